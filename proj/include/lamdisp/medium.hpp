#pragma once

#include <optional>
#include <vector>

namespace lamdisp {

struct Partition;

/// Metadata attached to media produced by synthesize_counterexample.
struct SynthesisMetadata {
    double alpha = 0.0;
    std::vector<double> parts;
    std::vector<int> signs;
};

/// Piecewise-constant coefficient a(x) = b_k^{-2} on I_k = (x_{k-1}, x_k),
/// with x_0 = -inf, x_n = +inf.  Immutable after construction.
struct LaminarMedium {
    std::vector<double> a;           // layer coefficients, size n >= 1
    std::vector<double> b;           // slowness b_k = a_k^{-1/2}
    std::vector<double> interfaces;  // x_1 < ... < x_{n-1}
    double m = 0.0;                  // min a
    double M = 0.0;                  // max a
    std::optional<SynthesisMetadata> synthesis;

    int layers() const { return int(a.size()); }
    /// Layer index in 1..n containing x (interfaces belong to the right layer).
    int layer_of(double x) const;
};

/// Derived reflection data: d_k = (b_k - b_{k+1})/(b_k + b_{k+1}) and the
/// phase frequencies lambda_k = 2 b_{k+1} (x_{k+1} - x_k) of the Q recursion
/// (interior layers only, so lambda has n-2 entries).
struct ReflectionProfile {
    std::vector<double> d;
    std::vector<double> lambda;
};

/// Validates and builds a medium from per-layer a-values and interface
/// positions (layer count = interface count + 1).  Throws
/// std::invalid_argument naming the offending index.
LaminarMedium build_medium(const std::vector<double>& a_values,
                           const std::vector<double>& interfaces);

/// Reflection coefficients and generators; empty profile for a single layer.
ReflectionProfile reflection_profile(const LaminarMedium& medium);

/// Total variation of log a(x):  sum_k |log a_{k+1} - log a_k|.
/// Equals 4 sum_k arctanh|d_k| identically.
double log_variation(const LaminarMedium& medium);

/// Builds the dispersion counterexample medium for a partition of alpha:
/// |d_k| = tanh(t_k), signs chosen greedily so every running sum of
/// eps_j t_j stays within [-(log 2)/2, (log 2)/2], interface widths
/// proportional to square roots of distinct primes (rationally independent
/// generators in the idealized model), and the overall impedance level
/// centered so that a(x) stays strictly inside (1/2, 2).
/// Requires every part <= (log 2)/2; rejects otherwise instructing
/// refinement.
LaminarMedium synthesize_counterexample(double alpha, const Partition& parts,
                                        double width_scale);

}  // namespace lamdisp
