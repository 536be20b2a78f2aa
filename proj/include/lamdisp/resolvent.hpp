#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "lamdisp/medium.hpp"
#include "lamdisp/series.hpp"

namespace lamdisp {

/// Initial datum / source for the resolvent right-hand side.  Support must
/// lie strictly inside a single layer.
struct SourceSpec {
    enum class Kind { dirac, box };
    Kind kind = Kind::dirac;
    double position = 0.0;   // Dirac location or box center
    double half_width = 0.0; // box half width (kind == box)
};

/// Dense assembly of D_n(w) C = T at a fixed complex frequency w.
/// Unknown ordering C = [c_1, c_3, c_4, ..., c_{2n-3}, c_{2n-2}, c_{2n}].
struct ResolventSystem {
    std::complex<double> omega;
    Eigen::MatrixXcd matrix;
    Eigen::VectorXcd rhs;
    int layers = 0;
};

struct OracleSolution {
    Eigen::VectorXcd c;
    std::complex<double> det;
    double residual = 0.0;  // ||A c - T|| / (||A||_inf ||c|| + ||T||)
    bool flagged = false;   // conditioning suspect
};

/// Builds the block system from the continuity of R_w g and a(x) d_x R_w g at
/// the interfaces.  Throws if the source support is not strictly inside one
/// layer, or w == 0, or the medium has a single layer.
ResolventSystem assemble_system(const LaminarMedium& medium, std::complex<double> omega,
                                const SourceSpec& source);

/// Dense LU solve (the numerical oracle; deliberately shares no code with the
/// Q recursion).
OracleSolution oracle_coefficients(const ResolventSystem& system);

/// Scalar Q_k(w) recursion, k = 1..n (Q_1 = 0); the k = n branch carries the
/// e^{2 w b_n x_{n-1}} phase.
std::vector<std::complex<double>> q_values(const LaminarMedium& medium,
                                           std::complex<double> omega);

/// det D_n(w) via the product identity
///   prod_j (b_j + b_{j+1}) e^{w (b_j - b_{j+1}) x_j} (1 - d_j Q_j(w)).
std::complex<double> det_product_formula(const LaminarMedium& medium,
                                         std::complex<double> omega);

/// Q_k as certified series, k = 2..n: member k is the phase-stripped series
/// S_k over generators lambda_1..lambda_{k-2} with Q_k(w) =
/// e^{-w lambda_{k-1}} S_k(q_j = e^{-w lambda_j}) for k < n and
/// Q_n(w) = e^{2 w b_n x_{n-1}} S_n(...).  Contraction failure at step k
/// throws std::domain_error naming the step.
std::vector<MultiSeries> q_sequence(const ReflectionProfile& profile, int degree_cap,
                                    double prune_floor = 0.0);

struct TanBoundReport {
    NormInterval norm;   // certified bracket of ||Q_n||_AP
    double bound = 0.0;  // tan(sum arctanh |d_k|)
    double slack = 0.0;
    bool pass = false;
};

/// Lemma-style check  ||Q_n||_AP <= tan(sum arctanh |d_k|); requires the sum
/// to be below pi/2 (the bound is +inf otherwise).
TanBoundReport verify_tan_bound(const ReflectionProfile& profile, int degree_cap,
                                double slack = 1e-6);

struct ClosedFormValue {
    std::complex<double> value;  // w * c_{2n}(w)
    double error = 0.0;          // additive radius from the series tail
};

/// Case 1 closed form for a Dirac source in the last layer:
///   w c_{2n}(w) = -(b_n/2) e^{-w b_n y0} Q_n(w),
/// with Q_n evaluated by numeric substitution into the series from
/// q_sequence (tail becomes the error bar).  Requires Re(w) >= 0.
ClosedFormValue c2n_closed_form(const LaminarMedium& medium, std::complex<double> omega,
                                const SourceSpec& source, int degree_cap = 60);

/// Case 2/3 determinant-ratio formulas for w c_{2n}(w) with the source in
/// layer 1 or an interior layer; evaluated through the scalar Q recursion.
std::complex<double> case_formula_c2n(const LaminarMedium& medium, std::complex<double> omega,
                                      const SourceSpec& source);

/// One event of the reflected return train seen at a probe in the last layer
/// for Dirac data in the last layer: arrival delay and signed time-integrated
/// weight -(b_n/2) s_J at t = b_n (x_p + y0 - 2 x_{n-1}) + <J, lambda>.
struct TrainEvent {
    double time = 0.0;
    double amplitude = 0.0;
};

/// Series-side prediction of the return train (sorted by arrival time).
std::vector<TrainEvent> dirac_return_train(const LaminarMedium& medium, double source_y,
                                           double probe_x, int degree_cap,
                                           double amplitude_floor = 0.0);

}  // namespace lamdisp
