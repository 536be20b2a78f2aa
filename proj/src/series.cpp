#include "lamdisp/series.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lamdisp {

namespace {

int bits_for_cap(int cap) {
    int b = 1;
    while ((1 << b) <= cap) ++b;
    return b;
}

}  // namespace

MultiSeries::MultiSeries(int generator_count, int degree_cap)
    : gens_(generator_count), cap_(degree_cap), bits_(bits_for_cap(std::max(degree_cap, 1))) {
    if (generator_count < 0) throw std::invalid_argument("series: negative generator count");
    if (degree_cap < 0) throw std::invalid_argument("series: negative degree cap");
    if (degree_cap > 120) throw std::invalid_argument("series: degree cap above 120 unsupported");
    if (gens_ * bits_ > 120)
        throw std::invalid_argument("series: generator count too large for this degree cap");
}

MultiSeries MultiSeries::constant(int generator_count, int degree_cap, Complex value) {
    MultiSeries s(generator_count, degree_cap);
    if (value != Complex(0.0)) s.terms_.emplace(Key(0), value);
    return s;
}

MultiSeries::Key MultiSeries::pack(std::span<const int> index) const {
    if (int(index.size()) != gens_) throw std::invalid_argument("series: index arity mismatch");
    Key key = 0;
    int deg = 0;
    for (int i = 0; i < gens_; ++i) {
        if (index[i] < 0) throw std::invalid_argument("series: negative exponent");
        deg += index[i];
        key |= Key(index[i]) << (bits_ * i);
    }
    key |= Key(deg) << 120;
    return key;
}

std::vector<int> MultiSeries::unpack(Key key) const {
    std::vector<int> index(gens_);
    Key mask = (Key(1) << bits_) - 1;
    for (int i = 0; i < gens_; ++i) index[i] = int((key >> (bits_ * i)) & mask);
    return index;
}

void MultiSeries::insert_raw(Key key, Complex value) {
    auto [it, inserted] = terms_.try_emplace(key, value);
    if (!inserted) {
        it->second += value;
        if (it->second == Complex(0.0)) terms_.erase(it);
    } else if (value == Complex(0.0)) {
        terms_.erase(it);
    }
}

void MultiSeries::add_term(std::span<const int> index, Complex value) {
    int deg = 0;
    for (int v : index) deg += v;
    if (deg > cap_) {
        tail_ += std::abs(value);
        return;
    }
    insert_raw(pack(index), value);
}

Complex MultiSeries::coefficient(std::span<const int> index) const {
    auto it = terms_.find(pack(index));
    return it == terms_.end() ? Complex(0.0) : it->second;
}

void MultiSeries::add_tail(double extra) {
    if (extra < 0) throw std::invalid_argument("series: negative tail increment");
    tail_ += extra;
}

void MultiSeries::prune(double floor) {
    if (floor <= 0) return;
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= floor) {
            tail_ += std::abs(it->second);
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
}

NormInterval MultiSeries::ap_norm() const {
    double low = mass();
    return {low, low + tail_};
}

double MultiSeries::mass() const {
    double s = 0.0;
    for (const auto& [k, c] : terms_) s += std::abs(c);
    return s;
}

int MultiSeries::max_degree() const {
    int deg = 0;
    for (const auto& [k, c] : terms_) deg = std::max(deg, degree_of(k));
    return deg;
}

std::pair<Complex, double> MultiSeries::evaluate(std::span<const Complex> q) const {
    if (int(q.size()) != gens_) throw std::invalid_argument("series: evaluation arity mismatch");
    for (const Complex& v : q)
        if (std::abs(v) > 1.0 + 1e-12)
            throw std::domain_error("series: evaluation requires |q_k| <= 1");
    // Powers up to the max stored degree per generator.
    std::vector<std::vector<Complex>> pow(gens_);
    Key mask = (Key(1) << bits_) - 1;
    std::vector<int> maxexp(gens_, 0);
    for (const auto& [k, c] : terms_)
        for (int i = 0; i < gens_; ++i)
            maxexp[i] = std::max(maxexp[i], int((k >> (bits_ * i)) & mask));
    for (int i = 0; i < gens_; ++i) {
        pow[i].resize(maxexp[i] + 1);
        pow[i][0] = 1.0;
        for (int e = 1; e <= maxexp[i]; ++e) pow[i][e] = pow[i][e - 1] * q[i];
    }
    Complex acc = 0.0;
    for (const auto& [k, c] : terms_) {
        Complex prod = c;
        for (int i = 0; i < gens_; ++i) prod *= pow[i][int((k >> (bits_ * i)) & mask)];
        acc += prod;
    }
    return {acc, tail_};
}

std::vector<MultiSeries::Term> MultiSeries::terms_sorted() const {
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const auto& [k, c] : terms_) out.push_back({unpack(k), c});
    std::sort(out.begin(), out.end(),
              [](const Term& a, const Term& b) { return a.index < b.index; });
    return out;
}

std::string MultiSeries::dump() const {
    std::ostringstream os;
    char buf[64];
    os << "generators " << gens_ << " cap " << cap_ << " tail ";
    std::snprintf(buf, sizeof buf, "%.17g", tail_);
    os << buf << "\n";
    for (const Term& t : terms_sorted()) {
        for (int e : t.index) os << e << " ";
        std::snprintf(buf, sizeof buf, "%.17g", t.coeff.real());
        os << " " << buf;
        std::snprintf(buf, sizeof buf, "%.17g", t.coeff.imag());
        os << " " << buf << "\n";
    }
    return os.str();
}

MultiSeries MultiSeries::parse(const std::string& text) {
    std::istringstream is(text);
    std::string word;
    int gens = 0, cap = 0;
    double tail = 0.0;
    if (!(is >> word >> gens >> word >> cap >> word >> tail))
        throw std::invalid_argument("series: malformed dump header");
    MultiSeries s(gens, cap);
    s.tail_ = tail;
    std::vector<int> index(gens);
    double re = 0, im = 0;
    while (is >> index[0]) {
        for (int i = 1; i < gens; ++i)
            if (!(is >> index[i])) throw std::invalid_argument("series: truncated dump line");
        if (!(is >> re >> im)) throw std::invalid_argument("series: truncated dump line");
        s.add_term(index, {re, im});
    }
    return s;
}

MultiSeries add(const MultiSeries& s1, const MultiSeries& s2) {
    if (s1.gens_ != s2.gens_) throw std::invalid_argument("series: generator count mismatch");
    MultiSeries out(s1.gens_, std::min(s1.cap_, s2.cap_));
    out.tail_ = s1.tail_ + s2.tail_;
    for (const auto& [k, c] : s1.terms_) {
        if (s1.degree_of(k) > out.cap_) out.tail_ += std::abs(c);
        else out.insert_raw(k, c);
    }
    for (const auto& [k, c] : s2.terms_) {
        if (s2.degree_of(k) > out.cap_) out.tail_ += std::abs(c);
        else out.insert_raw(k, c);
    }
    return out;
}

MultiSeries scale(const MultiSeries& s, Complex factor) {
    MultiSeries out(s.gens_, s.cap_);
    out.tail_ = s.tail_ * std::abs(factor);
    if (factor == Complex(0.0)) return out;
    for (const auto& [k, c] : s.terms_) out.terms_.emplace(k, c * factor);
    return out;
}

MultiSeries mul(const MultiSeries& s1, const MultiSeries& s2) {
    if (s1.gens_ != s2.gens_) throw std::invalid_argument("series: generator count mismatch");
    MultiSeries out(s1.gens_, std::min(s1.cap_, s2.cap_));
    double over_cap = 0.0;
    for (const auto& [ka, ca] : s1.terms_) {
        int da = s1.degree_of(ka);
        for (const auto& [kb, cb] : s2.terms_) {
            if (da + s2.degree_of(kb) > out.cap_) {
                over_cap += std::abs(ca * cb);
            } else {
                out.insert_raw(ka + kb, ca * cb);
            }
        }
    }
    // sub-multiplicative tail propagation: l1*u2 + l2*u1 + u1*u2
    double l1 = s1.mass(), l2 = s2.mass();
    out.tail_ = over_cap + l1 * s2.tail_ + l2 * s1.tail_ + s1.tail_ * s2.tail_;
    return out;
}

MultiSeries mobius_beta(double d, const MultiSeries& s) {
    if (!(std::abs(d) < 1.0)) throw std::domain_error("mobius_beta: |d| must be < 1");
    double up_s = s.ap_norm().upper;
    double rho = std::abs(d) * up_s;
    if (rho >= 1.0)
        throw std::domain_error("mobius_beta: contraction violated, rho = " +
                                std::to_string(rho) + " >= 1");
    const int gens = s.generator_count();
    const int cap = s.degree_cap();

    // Split off the constant term and reduce algebraically:
    //   (s + d)/(1 + d s) = (e + p/u) * 1/(1 + (d/u) p),
    // with s = c0 + p, u = 1 + d c0, e = (c0 + d)/u, and p of positive
    // minimal degree, so the geometric expansion terminates at the cap.
    Complex c0 = 0.0;
    MultiSeries p(gens, cap);
    for (const auto& [k, c] : s.terms_) {
        if (s.degree_of(k) == 0) c0 = c;
        else p.terms_.emplace(k, c);
    }
    Complex u = 1.0 + d * c0;
    Complex e = (c0 + d) / u;
    Complex dt = d / u;

    MultiSeries num = add(MultiSeries::constant(gens, cap, e), scale(p, 1.0 / u));
    MultiSeries acc = MultiSeries::constant(gens, cap, 1.0);
    MultiSeries g = scale(p, -dt);
    MultiSeries pw = MultiSeries::constant(gens, cap, 1.0);
    for (int k = 1; k <= cap && !pw.empty(); ++k) {
        pw = mul(pw, g);
        acc = add(acc, pw);
    }
    MultiSeries out = mul(num, acc);

    // Geometric terms beyond the cap (only matter when p is nonempty).
    double rho_p = std::abs(dt) * p.ap_norm().upper;
    if (!p.empty() && rho_p < 1.0) {
        out.add_tail(num.ap_norm().upper * std::pow(rho_p, cap + 1) / (1.0 - rho_p));
    } else if (!p.empty()) {
        throw std::domain_error("mobius_beta: contraction violated, rho = " +
                                std::to_string(rho_p) + " >= 1");
    }
    // Input-tail perturbation: beta(d)(s + R) - beta(d)(s) =
    // (1 - d^2) R / ((1 + d(s+R))(1 + d s)), both denominators invertible
    // under the contraction condition.
    if (s.tail() > 0.0) {
        out.add_tail((1.0 - d * d) * s.tail() / ((1.0 - rho) * (1.0 - rho)));
    }
    return out;
}

MultiSeries modulate(const MultiSeries& s, int generator_index, int power) {
    if (generator_index < 0 || generator_index >= s.gens_)
        throw std::invalid_argument("modulate: generator index out of range");
    if (power <= 0) throw std::invalid_argument("modulate: power must be positive");
    MultiSeries out(s.gens_, s.cap_);
    out.tail_ = s.tail_;
    MultiSeries::Key shift =
        (MultiSeries::Key(power) << (s.bits_ * generator_index)) |
        (MultiSeries::Key(power) << 120);
    for (const auto& [k, c] : s.terms_) {
        if (s.degree_of(k) + power > s.cap_) out.tail_ += std::abs(c);
        else out.terms_.emplace(k + shift, c);
    }
    return out;
}

}  // namespace lamdisp
