#include "lamdisp/partitions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace lamdisp {

namespace {

constexpr double kPi2 = 1.5707963267948966;

// |gamma^{(r)}_i(d)| table for the nested-generator transfer:
// gamma^{(r)} is the power series of ((z + d)/(1 + d z))^r.
// Returned flat, row-major, (I+1) x (I+1), in long double for head-room
// against the transient growth of high power masses.
std::vector<long double> abs_gamma_table(double d, int I) {
    std::vector<long double> psi(I + 1, 0.0L);
    psi[0] = d;
    long double f = (1.0L - (long double)d * d);
    long double p = 1.0L;
    for (int i = 1; i <= I; ++i) {
        psi[i] = f * p;
        p *= -(long double)d;
    }
    std::vector<long double> G((I + 1) * (std::size_t)(I + 1), 0.0L);
    G[0] = 1.0L;  // gamma^{(0)} = 1
    std::vector<long double> row(I + 1, 0.0L), next(I + 1);
    row[0] = 1.0L;
    for (int r = 1; r <= I; ++r) {
        std::fill(next.begin(), next.end(), 0.0L);
        for (int i = 0; i <= I; ++i) {
            if (row[i] == 0.0L) continue;
            for (int j = 0; i + j <= I; ++j) next[i + j] += row[i] * psi[j];
        }
        row.swap(next);
        long double* g = &G[(std::size_t)r * (I + 1)];
        for (int i = 0; i <= I; ++i) g[i] = row[i] < 0 ? -row[i] : row[i];
    }
    return G;
}

std::vector<long double> transfer_masses(const std::vector<double>& parts, int I) {
    std::vector<long double> M(I + 1);
    long double d1 = std::tanh((long double)parts[0]);
    long double v = 1.0L;
    for (int i = 0; i <= I; ++i) {
        M[i] = v;
        v *= d1;
    }
    std::map<double, std::vector<long double>> cache;
    std::vector<long double> next(I + 1);
    for (std::size_t k = 1; k < parts.size(); ++k) {
        double d = std::tanh(parts[k]);
        auto it = cache.find(d);
        if (it == cache.end()) it = cache.emplace(d, abs_gamma_table(d, I)).first;
        const std::vector<long double>& G = it->second;
        for (int r = 0; r <= I; ++r) {
            const long double* g = &G[(std::size_t)r * (I + 1)];
            long double acc = 0.0L;
            for (int i = 0; i <= I; ++i) acc += g[i] * M[i];
            next[r] = acc;
        }
        M.swap(next);
    }
    return M;
}

}  // namespace

Partition::Partition(std::vector<double> p) : parts(std::move(p)) {
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (!(parts[i] > 0.0))
            throw std::invalid_argument("partition: non-positive part at index " +
                                        std::to_string(i));
}

Partition Partition::uniform(double x, int n) {
    if (!(x > 0.0) || n < 1) throw std::invalid_argument("partition: need x > 0, n >= 1");
    return Partition(std::vector<double>(n, x / n));
}

double Partition::total() const {
    double s = 0.0;
    for (double t : parts) s += t;
    return s;
}

bool is_refinement(const Partition& t, const Partition& s, double tol) {
    if (std::fabs(t.total() - s.total()) > tol * std::max(1.0, t.total())) return false;
    std::size_t j = 0;
    double sum_s = 0.0, sum_t = 0.0;
    for (double part : t.parts) {
        sum_t += part;
        while (j < s.parts.size() && sum_s < sum_t - tol) sum_s += s.parts[j++];
        if (std::fabs(sum_s - sum_t) > tol) return false;
    }
    return true;
}

TransferMatrixNorms transfer_matrix_norms(const std::vector<double>& d) {
    const int n = int(d.size());
    TransferMatrixNorms out;
    if (n == 0) {
        out.norm_a = out.norm_d = 1.0;
        out.unit_coeff_a = out.unit_const_d = 1.0;
        return out;
    }
    // M = F_n ... F_1 with F_k = [[q_{k-1}, d_k], [d_k q_{k-1}, 1]].
    const int cap = n;
    std::array<MultiSeries, 4> M = {
        MultiSeries::constant(n, cap, 1.0), MultiSeries::constant(n, cap, 0.0),
        MultiSeries::constant(n, cap, 0.0), MultiSeries::constant(n, cap, 1.0)};
    for (int k = 0; k < n; ++k) {
        MultiSeries q = modulate(MultiSeries::constant(n, cap, 1.0), k, 1);
        std::array<MultiSeries, 4> F = {q, MultiSeries::constant(n, cap, d[k]),
                                        scale(q, d[k]), MultiSeries::constant(n, cap, 1.0)};
        std::array<MultiSeries, 4> R = {
            add(mul(F[0], M[0]), mul(F[1], M[2])), add(mul(F[0], M[1]), mul(F[1], M[3])),
            add(mul(F[2], M[0]), mul(F[3], M[2])), add(mul(F[2], M[1]), mul(F[3], M[3]))};
        M = std::move(R);
    }
    out.norm_a = M[0].ap_norm().lower;
    out.norm_b = M[1].ap_norm().lower;
    out.norm_c = M[2].ap_norm().lower;
    out.norm_d = M[3].ap_norm().lower;
    for (double dk : d) {
        out.P *= 1.0 + dk;
        out.p *= 1.0 - dk;
    }
    std::vector<int> ones(n, 1), zeros(n, 0);
    out.unit_coeff_a = M[0].coefficient(ones).real();
    out.unit_const_d = M[3].coefficient(zeros).real();
    double scale_ref = std::max(1.0, out.P);
    if (std::fabs(out.norm_a - 0.5 * (out.P + out.p)) > 1e-9 * scale_ref ||
        std::fabs(out.norm_d - 0.5 * (out.P + out.p)) > 1e-9 * scale_ref ||
        std::fabs(out.norm_b - 0.5 * (out.P - out.p)) > 1e-9 * scale_ref ||
        std::fabs(out.norm_c - 0.5 * (out.P - out.p)) > 1e-9 * scale_ref ||
        std::fabs(out.unit_coeff_a - 1.0) > 1e-9 || std::fabs(out.unit_const_d - 1.0) > 1e-9)
        throw std::logic_error("transfer_matrix_norms: entrywise norm identities violated");
    return out;
}

MultiSeries r_series(const Partition& t, int degree_cap, double prune_floor) {
    const int n = t.size();
    if (n == 0) throw std::invalid_argument("r_series: empty partition");
    const int gens = std::max(n - 1, 0);
    MultiSeries E = MultiSeries::constant(gens, degree_cap, std::tanh(t.parts[0]));
    for (int k = 1; k < n; ++k) {
        MultiSeries p = modulate(E, k - 1, 1);
        E = mobius_beta(std::tanh(t.parts[k]), p);
        if (prune_floor > 0) E.prune(prune_floor);
    }
    return E;
}

std::vector<double> power_masses(const Partition& t, int max_power) {
    if (t.size() == 0) throw std::invalid_argument("power_masses: empty partition");
    if (max_power < 1) throw std::invalid_argument("power_masses: max_power must be >= 1");
    std::vector<long double> M = transfer_masses(t.parts, max_power);
    std::vector<double> out(M.size());
    const long double dmax = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < M.size(); ++i) {
        // High power masses can transiently exceed double range; they are
        // consumed only through the |gamma| weights, so clamping is safe for
        // the returned low-order entries.
        out[i] = (double)std::min(M[i], dmax);
    }
    return out;
}

double scalar_norm_bound(const Partition& t, int r) {
    double s = 0.0;
    for (double part : t.parts) s += std::atan(std::tanh(part));
    if (s >= kPi2) return std::numeric_limits<double>::infinity();
    return std::pow(std::tan(s), r);
}

NormInterval r_power_bracket(const Partition& t, int r, int max_power) {
    if (r < 0) throw std::invalid_argument("r_power_bracket: negative power");
    if (r == 0) return {1.0, 1.0};
    std::vector<double> M = power_masses(t, std::max(max_power, r + 8));
    double lower = M[r];
    double upper = scalar_norm_bound(t, r);
    return {lower, std::max(lower, upper)};
}

RefinementReport check_refinement(const Partition& t, const Partition& s, int r,
                                  int degree_cap, unsigned seed) {
    if (!is_refinement(t, s))
        throw std::invalid_argument("check_refinement: s is not a refinement of t");
    RefinementReport rep;
    int power_cap = std::max(120, degree_cap);
    rep.coarse = r_power_bracket(t, r, power_cap);
    rep.fine = r_power_bracket(s, r, power_cap);
    rep.monotone = rep.coarse.lower <= rep.fine.upper * (1.0 + 1e-12) + 1e-12;

    // Substitution identity R(t; q) = R(s; 1,..,1,q_1,..) at unit-modulus q.
    MultiSeries Rt = r_series(t, degree_cap);
    MultiSeries Rs = r_series(s, degree_cap);
    // Positions of t's interior cut points among s's partial sums.
    std::vector<int> cut_pos;
    {
        std::size_t j = 0;
        double sum_s = 0.0, sum_t = 0.0;
        double tol = 1e-12 * std::max(1.0, t.total());
        for (int l = 0; l + 1 < t.size(); ++l) {
            sum_t += t.parts[l];
            while (sum_s < sum_t - tol) sum_s += s.parts[j++];
            cut_pos.push_back(int(j) - 1);  // cut after s-part j-1
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 2.0 * 3.14159265358979323846);
    double err_budget = Rt.tail() + Rs.tail() + 1e-9;
    rep.substitution_ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Complex> qt(std::max(t.size() - 1, 0));
        for (Complex& v : qt) v = std::polar(1.0, U(rng));
        std::vector<Complex> qs(std::max(s.size() - 1, 0), Complex(1.0));
        for (std::size_t l = 0; l < qt.size(); ++l) qs[cut_pos[l]] = qt[l];
        Complex vt = Rt.evaluate(qt).first;
        Complex vs = Rs.evaluate(qs).first;
        double mismatch = std::abs(vt - vs);
        rep.max_subst_mismatch = std::max(rep.max_subst_mismatch, mismatch);
        if (mismatch > err_budget) rep.substitution_ok = false;
    }
    return rep;
}

std::vector<FTableRow> f_lower_table(double x, int r, int n_max, int max_power) {
    if (!(x > 0.0) || x >= kPi2)
        throw std::domain_error("f_lower_table: requires 0 < x < pi/2 (f_r infinite beyond)");
    if (r < 1 || r > 4) throw std::invalid_argument("f_lower_table: r in 1..4 supported");
    std::vector<FTableRow> rows;
    double target = std::pow(std::tan(x), r);
    for (int n = 1; n <= n_max; ++n) {
        Partition t = Partition::uniform(x, n);
        FTableRow row;
        row.n = n;
        row.norm = r_power_bracket(t, r, max_power);
        row.target = target;
        rows.push_back(row);
    }
    return rows;
}

HeavySearchResult find_heavy_partition(double alpha, double N, int max_power, int n_start,
                                       int n_budget) {
    if (!(alpha > 0.0) || !(N > 0.0))
        throw std::invalid_argument("find_heavy_partition: alpha and N must be positive");
    if (alpha < kPi2) {
        double bound = std::tan(alpha);
        if (N >= bound)
            throw std::domain_error(
                "find_heavy_partition: unreachable target, alpha < pi/2 bounds the norm by "
                "tan(alpha) = " + std::to_string(bound) + " < N");
    }
    auto mass_at = [&](int n) {
        return power_masses(Partition::uniform(alpha, n), max_power)[1];
    };
    HeavySearchResult best;
    int n = std::max(1, n_start);
    double m = mass_at(n);
    best = {Partition::uniform(alpha, n), m, n, m >= N};
    if (best.reached) return best;
    // Dyadic doubling to bracket, then binary refinement on the (empirically
    // monotone) uniform family.
    int lo = n;
    while (2 * n <= n_budget) {
        n *= 2;
        m = mass_at(n);
        if (m > best.certified_lower) best = {Partition::uniform(alpha, n), m, n, m >= N};
        if (m >= N) break;
        lo = n;
    }
    if (best.certified_lower < N) return best;  // budget exhausted
    int hi = n;
    while (lo + 1 < hi) {
        int mid = lo + (hi - lo) / 2;
        double mm = mass_at(mid);
        if (mm >= N) {
            hi = mid;
            best = {Partition::uniform(alpha, mid), mm, mid, true};
        } else {
            lo = mid;
        }
    }
    return best;
}

}  // namespace lamdisp
