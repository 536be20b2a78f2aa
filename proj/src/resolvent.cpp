#include "lamdisp/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lamdisp {

namespace {

using Cx = std::complex<double>;

int source_layer(const LaminarMedium& medium, const SourceSpec& source) {
    double lo = source.position, hi = source.position;
    if (source.kind == SourceSpec::Kind::box) {
        if (!(source.half_width > 0.0))
            throw std::invalid_argument("source: box needs positive half width");
        lo -= source.half_width;
        hi += source.half_width;
    }
    int layer = medium.layer_of(source.position);
    const auto& xs = medium.interfaces;
    double left = layer >= 2 ? xs[layer - 2] : -std::numeric_limits<double>::infinity();
    double right = layer <= int(xs.size()) ? xs[layer - 1] : std::numeric_limits<double>::infinity();
    if (layer <= int(xs.size()) && !(hi < right))
        throw std::invalid_argument("source: support not strictly inside one layer");
    if (layer >= 2 && !(lo > left))
        throw std::invalid_argument("source: support not strictly inside one layer");
    return layer;
}

// I_left(k)  = int_{I_k} g(y)/(2w) e^{-w b_k (x_k - y)} dy      (source in I_k)
// I_right(k) = int_{I_{k+1}} g(y)/(2w) e^{-w b_{k+1} (y - x_k)} dy
Cx source_integral_left(const LaminarMedium& med, Cx w, const SourceSpec& src, int k) {
    double b = med.b[k - 1];
    double xk = med.interfaces[k - 1];
    if (src.kind == SourceSpec::Kind::dirac)
        return std::exp(-w * b * (xk - src.position)) / (2.0 * w);
    double y0 = src.position, h = src.half_width;
    return (std::exp(-w * b * (xk - y0 - h)) - std::exp(-w * b * (xk - y0 + h))) /
           (2.0 * w * w * b);
}

Cx source_integral_right(const LaminarMedium& med, Cx w, const SourceSpec& src, int k) {
    double b = med.b[k];
    double xk = med.interfaces[k - 1];
    if (src.kind == SourceSpec::Kind::dirac)
        return std::exp(-w * b * (src.position - xk)) / (2.0 * w);
    double y0 = src.position, h = src.half_width;
    return (std::exp(-w * b * (y0 - h - xk)) - std::exp(-w * b * (y0 + h - xk))) /
           (2.0 * w * w * b);
}

// Strips unused trailing generators so that member k of q_sequence really
// lives over lambda_1..lambda_{k-2}.
MultiSeries project_generators(const MultiSeries& s, int gens) {
    MultiSeries out(gens, s.degree_cap());
    out.add_tail(s.tail());
    for (const auto& term : s.terms_sorted()) {
        std::vector<int> idx(term.index.begin(), term.index.begin() + gens);
        out.add_term(idx, term.coeff);
    }
    return out;
}

}  // namespace

ResolventSystem assemble_system(const LaminarMedium& medium, Cx omega,
                                const SourceSpec& source) {
    const int n = medium.layers();
    if (n < 2) throw std::invalid_argument("assemble_system: needs n >= 2 layers");
    if (omega == Cx(0.0)) throw std::invalid_argument("assemble_system: omega must be nonzero");
    const int j = source_layer(medium, source);
    const int dim = 2 * (n - 1);
    ResolventSystem sys;
    sys.omega = omega;
    sys.layers = n;
    sys.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    sys.rhs = Eigen::VectorXcd::Zero(dim);
    const auto& b = medium.b;
    const auto& xs = medium.interfaces;
    const Cx w = omega;

    auto col_plus = [&](int layer) { return layer == 1 ? 0 : 2 * layer - 3; };  // e^{+w b x}
    auto col_minus = [&](int layer) { return 2 * layer - 2; };                  // e^{-w b x}

    for (int k = 1; k <= n - 1; ++k) {
        const int r1 = 2 * k - 2, r2 = 2 * k - 1;
        const double xk = xs[k - 1];
        const Cx ep_k = std::exp(w * b[k - 1] * xk), em_k = std::exp(-w * b[k - 1] * xk);
        const Cx ep_k1 = std::exp(w * b[k] * xk), em_k1 = std::exp(-w * b[k] * xk);
        // layer k side (A_k block; layer 1 contributes only the c_1 column)
        sys.matrix(r1, col_plus(k)) += ep_k;
        sys.matrix(r2, col_plus(k)) += b[k] * ep_k;
        if (k >= 2) {
            sys.matrix(r1, col_minus(k)) += em_k;
            sys.matrix(r2, col_minus(k)) += -b[k] * em_k;
        }
        // layer k+1 side (B_k block; layer n contributes only the c_{2n} column)
        sys.matrix(r1, col_minus(k + 1)) += -em_k1;
        sys.matrix(r2, col_minus(k + 1)) += b[k - 1] * em_k1;
        if (k + 1 <= n - 1) {
            sys.matrix(r1, col_plus(k + 1)) += -ep_k1;
            sys.matrix(r2, col_plus(k + 1)) += -b[k - 1] * ep_k1;
        }
        // RHS: t_k nonzero only for k in {j-1, j}
        if (k == j) {
            Cx il = source_integral_left(medium, w, source, k);
            sys.rhs(r1) += -b[k - 1] * il;
            sys.rhs(r2) += b[k - 1] * b[k] * il;
        }
        if (k == j - 1) {
            Cx ir = source_integral_right(medium, w, source, k);
            sys.rhs(r1) += b[k] * ir;
            sys.rhs(r2) += b[k - 1] * b[k] * ir;
        }
    }
    return sys;
}

OracleSolution oracle_coefficients(const ResolventSystem& system) {
    OracleSolution out;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system.matrix);
    out.c = lu.solve(system.rhs);
    out.det = lu.determinant();
    double anorm = system.matrix.cwiseAbs().rowwise().sum().maxCoeff();
    double denom = anorm * out.c.norm() + system.rhs.norm();
    out.residual = denom > 0 ? (system.matrix * out.c - system.rhs).norm() / denom : 0.0;
    out.flagged = !(out.residual < 1e-8);
    return out;
}

std::vector<Cx> q_values(const LaminarMedium& medium, Cx omega) {
    const int n = medium.layers();
    ReflectionProfile prof = reflection_profile(medium);
    std::vector<Cx> Q(n + 1, Cx(0.0));  // Q[1] = 0
    const auto& b = medium.b;
    const auto& xs = medium.interfaces;
    for (int k = 2; k <= n; ++k) {
        double d = prof.d[k - 2];
        Cx inner = (-d + Q[k - 1]) / (1.0 - d * Q[k - 1]);
        Cx phase = k < n ? std::exp(-2.0 * omega * b[k - 1] * (xs[k - 1] - xs[k - 2]))
                         : std::exp(2.0 * omega * b[n - 1] * xs[n - 2]);
        Q[k] = phase * inner;
    }
    return Q;
}

Cx det_product_formula(const LaminarMedium& medium, Cx omega) {
    const int n = medium.layers();
    if (n < 2) return Cx(1.0);
    ReflectionProfile prof = reflection_profile(medium);
    std::vector<Cx> Q = q_values(medium, omega);
    Cx det = 1.0;
    for (int j = 1; j <= n - 1; ++j) {
        double bj = medium.b[j - 1], bj1 = medium.b[j];
        det *= (bj + bj1) * std::exp(omega * (bj - bj1) * medium.interfaces[j - 1]) *
               (1.0 - prof.d[j - 1] * Q[j]);
    }
    return det;
}

std::vector<MultiSeries> q_sequence(const ReflectionProfile& profile, int degree_cap,
                                    double prune_floor) {
    const int nd = int(profile.d.size());  // interfaces = n - 1
    if (nd < 1) throw std::invalid_argument("q_sequence: needs at least one interface");
    const int n = nd + 1;
    for (int k = 0; k < nd; ++k)
        if (!(std::fabs(profile.d[k]) < 1.0))
            throw std::domain_error("q_sequence: |d_" + std::to_string(k + 1) + "| >= 1");
    const int gens = std::max(n - 2, 0);
    std::vector<MultiSeries> out;
    MultiSeries S = MultiSeries::constant(gens, degree_cap, -profile.d[0]);
    out.push_back(project_generators(S, 0));
    for (int k = 3; k <= n; ++k) {
        MultiSeries p = modulate(S, k - 3, 1);
        double d = profile.d[k - 2];
        try {
            S = mobius_beta(-d, p);
        } catch (const std::domain_error& e) {
            throw std::domain_error("q_sequence: contraction failure at step k = " +
                                    std::to_string(k) + " (" + e.what() + ")");
        }
        if (prune_floor > 0) S.prune(prune_floor);
        out.push_back(project_generators(S, k - 2));
    }
    return out;
}

TanBoundReport verify_tan_bound(const ReflectionProfile& profile, int degree_cap,
                                double slack) {
    double sum = 0.0;
    for (double d : profile.d) sum += std::atanh(std::fabs(d));
    if (!(sum < 1.5707963267948966))
        throw std::domain_error("verify_tan_bound: sum of arctanh|d_k| = " +
                                std::to_string(sum) + " >= pi/2, bound is infinite");
    TanBoundReport rep;
    rep.bound = std::tan(sum);
    rep.slack = slack;
    std::vector<MultiSeries> qs = q_sequence(profile, degree_cap, 1e-14);
    rep.norm = qs.back().ap_norm();
    rep.pass = rep.norm.upper <= rep.bound + slack;
    return rep;
}

ClosedFormValue c2n_closed_form(const LaminarMedium& medium, Cx omega,
                                const SourceSpec& source, int degree_cap) {
    const int n = medium.layers();
    if (n < 2) throw std::invalid_argument("c2n_closed_form: needs n >= 2");
    if (source.kind != SourceSpec::Kind::dirac)
        throw std::invalid_argument("c2n_closed_form: Dirac sources only");
    if (source_layer(medium, source) != n)
        throw std::invalid_argument("c2n_closed_form: source must lie in the last layer");
    if (omega.real() < 0)
        throw std::domain_error("c2n_closed_form: requires Re(omega) >= 0");
    ReflectionProfile prof = reflection_profile(medium);
    std::vector<MultiSeries> qs = q_sequence(prof, degree_cap, 1e-16);
    const MultiSeries& Sn = qs.back();
    std::vector<Cx> q(prof.lambda.size());
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = std::exp(-omega * prof.lambda[j]);
    auto [sval, serr] = Sn.evaluate(q);
    double bn = medium.b[n - 1];
    double xn1 = medium.interfaces[n - 2];
    Cx prefactor = -(bn / 2.0) * std::exp(-omega * bn * source.position) *
                   std::exp(2.0 * omega * bn * xn1);
    return {prefactor * sval, std::abs(prefactor) * serr};
}

Cx case_formula_c2n(const LaminarMedium& medium, Cx omega, const SourceSpec& source) {
    const int n = medium.layers();
    if (n < 2) throw std::invalid_argument("case_formula_c2n: needs n >= 2");
    if (source.kind != SourceSpec::Kind::dirac)
        throw std::invalid_argument("case_formula_c2n: Dirac sources only");
    const int k = source_layer(medium, source);
    const auto& b = medium.b;
    const auto& xs = medium.interfaces;
    const Cx w = omega;
    const double y0 = source.position;
    std::vector<Cx> Q = q_values(medium, omega);
    ReflectionProfile prof = reflection_profile(medium);

    if (k == n) {
        // Case 1: w c_{2n} = -(b_n/2) e^{-w b_n y0} Q_n(w).
        return -(b[n - 1] / 2.0) * std::exp(-w * b[n - 1] * y0) * Q[n];
    }
    // det D_k / det D_n = 1 / prod_{j=k}^{n-1} (...)
    Cx ratio = 1.0;
    for (int j = k; j <= n - 1; ++j)
        ratio /= (b[j - 1] + b[j]) * std::exp(w * (b[j - 1] - b[j]) * xs[j - 1]) *
                 (1.0 - prof.d[j - 1] * Q[j]);
    Cx det_a = 1.0;
    for (int j = k; j <= n - 1; ++j) det_a *= -2.0 * b[j];
    if (k == 1) {
        // Case 2: w c_{2n} = prod det A_j * e^{w b_1 x_1} (w t_{1,1}) / det D_n.
        Cx wt11 = -(b[0] / 2.0) * std::exp(-w * b[0] * (xs[0] - y0));
        return det_a * ratio * std::exp(w * b[0] * xs[0]) * wt11;
    }
    // Case 3 (2 <= k <= n-1):
    // w c_{2n} = -prod det A_j * (det D_k / det D_n)
    //            * (w t_{k-1,1} e^{w b_k (x_k - x_{k-1})} Q_k + w t_{k,1}) e^{w b_k x_k}.
    Cx wtkm1 = (b[k - 1] / 2.0) * std::exp(-w * b[k - 1] * (y0 - xs[k - 2]));
    Cx wtk = -(b[k - 1] / 2.0) * std::exp(-w * b[k - 1] * (xs[k - 1] - y0));
    Cx inner = wtkm1 * std::exp(w * b[k - 1] * (xs[k - 1] - xs[k - 2])) * Q[k] + wtk;
    return -det_a * ratio * inner * std::exp(w * b[k - 1] * xs[k - 1]);
}

std::vector<TrainEvent> dirac_return_train(const LaminarMedium& medium, double source_y,
                                           double probe_x, int degree_cap,
                                           double amplitude_floor) {
    const int n = medium.layers();
    if (n < 2) return {};
    if (medium.layer_of(source_y) != n || medium.layer_of(probe_x) != n)
        throw std::invalid_argument("dirac_return_train: source and probe must be in the last layer");
    ReflectionProfile prof = reflection_profile(medium);
    std::vector<MultiSeries> qs = q_sequence(prof, degree_cap, 1e-16);
    const MultiSeries& Sn = qs.back();
    double bn = medium.b[n - 1];
    double xn1 = medium.interfaces[n - 2];
    double base = bn * (probe_x + source_y - 2.0 * xn1);
    std::vector<TrainEvent> events;
    for (const auto& term : Sn.terms_sorted()) {
        double amp = -(bn / 2.0) * term.coeff.real();
        if (std::fabs(amp) <= amplitude_floor) continue;
        double t = base;
        for (std::size_t j = 0; j < term.index.size(); ++j) t += term.index[j] * prof.lambda[j];
        events.push_back({t, amp});
    }
    std::sort(events.begin(), events.end(),
              [](const TrainEvent& a, const TrainEvent& b) { return a.time < b.time; });
    return events;
}

}  // namespace lamdisp
