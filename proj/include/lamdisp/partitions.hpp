#pragma once

#include <vector>

#include "lamdisp/series.hpp"

namespace lamdisp {

/// Ordered positive parts t_1..t_n with total x = sum t_j; the element of A_x.
struct Partition {
    std::vector<double> parts;

    Partition() = default;
    explicit Partition(std::vector<double> p);
    static Partition uniform(double x, int n);

    double total() const;
    int size() const { return int(parts.size()); }
};

/// Refinement relation t < s: the partial sums of s contain those of t
/// (within absolute tolerance tol on each matched sum).
bool is_refinement(const Partition& t, const Partition& s, double tol = 1e-12);

/// Entrywise AP norms of the 2x2 transfer-matrix polynomial
///   M(q_0..q_{n-1}) = (I + d_n A)(B_0 + q_{n-1} B_1) ... (I + d_1 A)(B_0 + q_0 B_1)
/// together with P = prod(1 + d_j) and p = prod(1 - d_j).  The expansion
/// satisfies norm_a = norm_d = (P+p)/2 and norm_b = norm_c = (P-p)/2, the
/// coefficient of q_0...q_{n-1} in entry a is 1 and the constant term of
/// entry d is 1 (both asserted here).
struct TransferMatrixNorms {
    double norm_a = 0, norm_b = 0, norm_c = 0, norm_d = 0;
    double P = 1, p = 1;
    double unit_coeff_a = 0;  // coefficient of q_0...q_{n-1} in a
    double unit_const_d = 0;  // constant term of d
};
TransferMatrixNorms transfer_matrix_norms(const std::vector<double>& d);

/// R(t;q) = (gamma(t_n) alpha(q_{n-1}) ... alpha(q_1) gamma(t_1))(0) as a
/// MultiSeries in n-1 generators; equals E(tanh t_1..tanh t_n; q).
/// `prune_floor` > 0 moves coefficients below the floor into the tail.
MultiSeries r_series(const Partition& t, int degree_cap, double prune_floor = 0.0);

/// Exact masses ||R(t)^r|| for r = 0..max_power, computed by the
/// nested-generator factorization: writing R = sum_i g_i(d_n) q^i R'^i with
/// scalar g_i, the newest generator's exponent tags the power of R', so
/// ||R^r|| = sum_i |g^{(r)}_i| ||R'^i|| exactly.  Truncating the power index
/// at max_power only discards nonnegative terms, so every entry is an exact
/// lower bound that converges up to the true value as max_power grows.
std::vector<double> power_masses(const Partition& t, int max_power);

/// Scalar upper bound tan(sum_k arctan(tanh t_k))^r from the norm recursion
/// ||beta(d)(s)|| <= (||s|| + d)/(1 - d||s||); +inf past the pole.
double scalar_norm_bound(const Partition& t, int r = 1);

/// Certified bracket for ||R(t)^r||: lower from power_masses, upper from the
/// scalar bound (and the power-index remainder when it converges).
NormInterval r_power_bracket(const Partition& t, int r, int max_power);

/// Lemma "refining can only grow the norm" check: verifies t < s, computes
/// both brackets of ||R(.)^r|| and the substitution identity
/// R(t; q) = R(s; 1,..,1,q_1,..) at random unit-modulus points.
struct RefinementReport {
    NormInterval coarse;
    NormInterval fine;
    bool monotone = false;         // coarse.lower <= fine.upper
    double max_subst_mismatch = 0; // series-vs-series evaluation residual
    bool substitution_ok = false;
};
RefinementReport check_refinement(const Partition& t, const Partition& s, int r,
                                  int degree_cap, unsigned seed = 12345);

/// One row of the f_r lower table: uniform partition of x into n parts.
struct FTableRow {
    int n = 0;
    NormInterval norm;
    double target = 0;  // tan^r x
};

/// Lower bounds for f_r(x) = sup_t ||R(t)^r|| over uniform partitions of x
/// into n = 1..n_max parts.  Rejects x >= pi/2 (f_r is infinite there).
std::vector<FTableRow> f_lower_table(double x, int r, int n_max, int max_power);

/// Searches uniform partitions of alpha for a certified lower bound >= N.
struct HeavySearchResult {
    Partition partition;
    double certified_lower = 0;
    int n = 0;
    bool reached = false;
};

/// Uniform-refinement search; throws std::domain_error when the target is
/// provably unreachable (alpha < pi/2 and N >= tan(alpha)); otherwise
/// returns reached=false with the best bound if the n budget runs out.
HeavySearchResult find_heavy_partition(double alpha, double N, int max_power = 240,
                                       int n_start = 2, int n_budget = 1 << 22);

}  // namespace lamdisp
