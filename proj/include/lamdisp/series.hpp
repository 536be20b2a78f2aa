#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lamdisp {

using Complex = std::complex<double>;

/// Certified bracket around a series norm. The lower bound is exact under
/// truncation (discarding terms can only decrease the coefficient-mass sum),
/// the upper bound adds the rigorously propagated tail.
struct NormInterval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Sparse multi-index trigonometric/formal series  sum_j c_j q^j  with
/// q_k = e^{i lambda_k w} represented symbolically.  Frequencies never appear
/// as floats here; a multi-index j in N^m is packed into a 128-bit key with
/// the total degree cached in the top byte.  All stored indices have total
/// degree <= degree_cap; `tail` is a certified upper bound on the mass
/// (sum of |coefficients|) of every discarded term.
class MultiSeries {
public:
    using Key = unsigned __int128;

    MultiSeries(int generator_count, int degree_cap);

    static MultiSeries constant(int generator_count, int degree_cap, Complex value);

    int generator_count() const { return gens_; }
    int degree_cap() const { return cap_; }
    double tail() const { return tail_; }
    std::size_t term_count() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Adds `value` to the coefficient at `index` (index.size() == m).
    /// Mass landing above the degree cap is absorbed into the tail.
    void add_term(std::span<const int> index, Complex value);

    Complex coefficient(std::span<const int> index) const;

    void add_tail(double extra);

    /// Moves every stored coefficient with |c| <= floor into the tail.
    void prune(double floor);

    /// [lower, upper] for the AP norm  sum |c_j|.
    NormInterval ap_norm() const;

    /// Exact lower part of the norm (sum of stored |c_j|).
    double mass() const;

    /// Largest stored total degree.
    int max_degree() const;

    /// sum_j c_j prod_k q_k^{j_k} for |q_k| <= 1; .second is the additive
    /// error radius inherited from the tail.
    std::pair<Complex, double> evaluate(std::span<const Complex> q) const;

    /// Text dump: header `generators m cap K tail t`, then `j_1 .. j_m re im`
    /// per stored term in lexicographic index order.
    std::string dump() const;
    static MultiSeries parse(const std::string& text);

    // Term iteration (unpacked exponents, ascending lexicographic order).
    struct Term {
        std::vector<int> index;
        Complex coeff;
    };
    std::vector<Term> terms_sorted() const;

    friend MultiSeries add(const MultiSeries& s1, const MultiSeries& s2);
    friend MultiSeries scale(const MultiSeries& s, Complex factor);
    friend MultiSeries mul(const MultiSeries& s1, const MultiSeries& s2);
    friend MultiSeries mobius_beta(double d, const MultiSeries& s);
    friend MultiSeries modulate(const MultiSeries& s, int generator_index, int power);

private:
    int gens_;
    int cap_;
    int bits_;
    double tail_ = 0.0;
    std::unordered_map<Key, Complex> terms_;

    Key pack(std::span<const int> index) const;
    std::vector<int> unpack(Key key) const;
    int degree_of(Key key) const { return int(key >> 120); }
    void insert_raw(Key key, Complex value);
    friend class SeriesOps;
};

/// s1 + s2 (same generator count; result cap = min of caps).
MultiSeries add(const MultiSeries& s1, const MultiSeries& s2);

/// factor * s.
MultiSeries scale(const MultiSeries& s, Complex factor);

/// Convolution product.  Mass above the result cap goes into the tail, and
/// input tails propagate sub-multiplicatively:
///   tail += l1*u2 + l2*u1 + u1*u2   (l = lower norms, u = input tails).
MultiSeries mul(const MultiSeries& s1, const MultiSeries& s2);

/// Moebius map beta(d): z -> (z + d)/(1 + d z) applied to the series s,
/// expanded as a geometric series.  Requires the contraction
/// |d| * ap_norm(s).upper < 1; throws std::domain_error otherwise, reporting
/// rho >= 1.  The stored part is exact through the degree cap whenever the
/// non-constant part of s has positive minimal degree; all remainder mass
/// (cap truncation, reciprocal tail, input tail) is added to the tail.
MultiSeries mobius_beta(double d, const MultiSeries& s);

/// alpha(q)-style modulation: multiplies by q_{generator_index}^power, i.e.
/// shifts every multi-index.  Terms pushed past the cap move into the tail.
MultiSeries modulate(const MultiSeries& s, int generator_index, int power);

}  // namespace lamdisp
