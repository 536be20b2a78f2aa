#include "lamdisp/medium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lamdisp/partitions.hpp"

namespace lamdisp {

namespace {

constexpr double kHalfLog2 = 0.34657359027997264;  // (log 2)/2

// First few primes for the rationally independent interface spacings.
constexpr int kPrimes[] = {2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
                           43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
                           103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
                           173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229};

double sqrt_prime(int k) {
    const int count = int(std::size(kPrimes));
    // Beyond the table, fall back to sqrt of consecutive odd integers offset
    // by the last prime; still irrational and collision-free in practice.
    if (k < count) return std::sqrt(double(kPrimes[k]));
    return std::sqrt(double(kPrimes[count - 1] + 2 * (k - count + 1)));
}

}  // namespace

int LaminarMedium::layer_of(double x) const {
    auto it = std::upper_bound(interfaces.begin(), interfaces.end(), x);
    return int(it - interfaces.begin()) + 1;
}

LaminarMedium build_medium(const std::vector<double>& a_values,
                           const std::vector<double>& interfaces) {
    if (a_values.empty()) throw std::invalid_argument("medium: needs at least one layer");
    if (a_values.size() != interfaces.size() + 1)
        throw std::invalid_argument("medium: layer count must equal interface count + 1");
    for (std::size_t i = 0; i < a_values.size(); ++i)
        if (!(a_values[i] > 0.0))
            throw std::invalid_argument("medium: non-positive coefficient at index " +
                                        std::to_string(i));
    for (std::size_t i = 1; i < interfaces.size(); ++i)
        if (!(interfaces[i - 1] < interfaces[i]))
            throw std::invalid_argument("medium: non-increasing interface at index " +
                                        std::to_string(i));
    LaminarMedium med;
    med.a = a_values;
    med.interfaces = interfaces;
    med.b.resize(a_values.size());
    for (std::size_t i = 0; i < a_values.size(); ++i) med.b[i] = 1.0 / std::sqrt(a_values[i]);
    med.m = *std::min_element(a_values.begin(), a_values.end());
    med.M = *std::max_element(a_values.begin(), a_values.end());
    return med;
}

ReflectionProfile reflection_profile(const LaminarMedium& medium) {
    ReflectionProfile prof;
    const int n = medium.layers();
    for (int k = 0; k + 1 < n; ++k)
        prof.d.push_back((medium.b[k] - medium.b[k + 1]) / (medium.b[k] + medium.b[k + 1]));
    for (int k = 1; k + 1 < n; ++k)
        prof.lambda.push_back(2.0 * medium.b[k] *
                              (medium.interfaces[k] - medium.interfaces[k - 1]));
    return prof;
}

double log_variation(const LaminarMedium& medium) {
    double var = 0.0;
    for (std::size_t k = 0; k + 1 < medium.a.size(); ++k)
        var += std::fabs(std::log(medium.a[k + 1]) - std::log(medium.a[k]));
    return var;
}

LaminarMedium synthesize_counterexample(double alpha, const Partition& parts,
                                        double width_scale) {
    if (!(width_scale > 0.0)) throw std::invalid_argument("synthesize: width_scale must be > 0");
    if (parts.parts.empty()) throw std::invalid_argument("synthesize: empty partition");
    if (std::fabs(parts.total() - alpha) > 1e-9 * std::max(1.0, alpha))
        throw std::invalid_argument("synthesize: partition does not sum to alpha");
    for (std::size_t k = 0; k < parts.parts.size(); ++k)
        if (parts.parts[k] > kHalfLog2)
            throw std::invalid_argument(
                "synthesize: part " + std::to_string(k) + " exceeds (log 2)/2 = " +
                std::to_string(kHalfLog2) + "; refine the partition first");

    // Greedy signs: eps_1 = +1, then flip whenever the running sum is positive.
    const int nd = int(parts.parts.size());
    std::vector<int> eps(nd);
    std::vector<double> sums(nd + 1, 0.0);  // sums[k] = sum_{j<k} eps_j t_j
    double run = 0.0;
    for (int k = 0; k < nd; ++k) {
        eps[k] = run > 0.0 ? -1 : 1;
        run += eps[k] * parts.parts[k];
        sums[k + 1] = run;
    }
    // log a on layer k+1 is 4 * sums[k]; center the range so a stays in (1/2, 2).
    double lo = *std::min_element(sums.begin(), sums.end());
    double hi = *std::max_element(sums.begin(), sums.end());
    double center = 0.5 * (lo + hi);

    const int n = nd + 1;  // layers
    std::vector<double> a(n), b(n);
    for (int k = 0; k < n; ++k) {
        a[k] = std::exp(4.0 * (sums[k] - center));
        b[k] = 1.0 / std::sqrt(a[k]);
    }
    // Interfaces: x_1 = 0; interior layer I_j (j = 2..n-1) gets width
    // width_scale * sqrt(prime_{j-1}) / b_j, so the generators are
    // 2 * width_scale * sqrt(prime) exactly.
    std::vector<double> interfaces(nd);
    interfaces[0] = 0.0;
    for (int j = 1; j < nd; ++j)
        interfaces[j] = interfaces[j - 1] + width_scale * sqrt_prime(j - 1) / b[j];

    LaminarMedium med = build_medium(a, interfaces);
    SynthesisMetadata meta;
    meta.alpha = alpha;
    meta.parts = parts.parts;
    meta.signs = eps;
    med.synthesis = std::move(meta);
    return med;
}

}  // namespace lamdisp
