#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "comb/core.hpp"
#include "comb/rational.hpp"

namespace comb::padic {

// Boundary point of the infinite p-ary tree: digits in {0..p-1} indexed by
// the integers, zero below some index. Exactly two tail behaviours are
// representable, and they are precisely the two face classes:
//   zeros    - finitely many nonzero digits (right faces),
//   pminus1  - all digits p-1 beyond the window (left faces).
// Canonical form: no leading zero digit, no trailing digit equal to the tail
// value; the zero sequence has an empty window and zero tail.
class PSequence {
public:
    enum class Tail { zeros, pminus1 };

    explicit PSequence(int p) : p_(check_p(p)) {}

    PSequence(int p, long first_index, std::vector<int> digits, Tail tail = Tail::zeros)
        : p_(check_p(p)), n_min_(first_index), digits_(std::move(digits)), tail_(tail) {
        for (int d : digits_)
            if (d < 0 || d >= p_) throw std::invalid_argument("digit out of range");
        canonicalize();
    }

    static PSequence all_pminus1_from(int p, long n) { return PSequence(p, n, {}, Tail::pminus1); }

    int p() const { return p_; }
    Tail tail() const { return tail_; }
    bool is_zero() const { return digits_.empty() && tail_ == Tail::zeros; }
    long window_begin() const { return n_min_; }
    long window_end() const { return n_min_ + static_cast<long>(digits_.size()) - 1; }
    const std::vector<int>& window() const { return digits_; }

    int digit(long k) const {
        if (k < n_min_) return 0;
        if (k <= window_end()) return digits_[static_cast<std::size_t>(k - n_min_)];
        return tail_ == Tail::pminus1 ? p_ - 1 : 0;
    }

    bool operator==(const PSequence& o) const {
        return p_ == o.p_ && tail_ == o.tail_ && digits_ == o.digits_ &&
               (digits_.empty() && tail_ == Tail::zeros ? true : n_min_ == o.n_min_);
    }

private:
    static int check_p(int p) {
        if (p < 2) throw std::invalid_argument("p must be >= 2");
        return p;
    }

    void canonicalize() {
        const int tail_digit = tail_ == Tail::pminus1 ? p_ - 1 : 0;
        while (!digits_.empty() && digits_.back() == tail_digit) digits_.pop_back();
        while (!digits_.empty() && digits_.front() == 0) {
            digits_.erase(digits_.begin());
            ++n_min_;
        }
        if (digits_.empty() && tail_ == Tail::zeros) n_min_ = 0;
    }

    int p_;
    long n_min_ = 0;
    std::vector<int> digits_;
    Tail tail_ = Tail::zeros;
};

// v_u(x) = min{n : x_n != 0}; the zero sequence has no valuation (the
// distance convention p^{-v_u(0)} = 0 is handled by d_u).
inline long v_u(const PSequence& x) {
    if (x.is_zero()) throw std::domain_error("v_u of the zero sequence");
    return x.window_begin();
}

// w(x) = max{n : x_n != 0}, defined on U' (finite support) only.
inline long w_index(const PSequence& x) {
    if (x.is_zero() || x.tail() != PSequence::Tail::zeros)
        throw std::domain_error("w is defined for nonzero finite-support sequences only");
    return x.window_end();
}

// x-hat: decrement at w(x), all p-1 above. d_u(x, x-hat) = p^{-w(x)}.
inline PSequence hat(const PSequence& x) {
    w_index(x); // validates: nonzero, finite support
    std::vector<int> digits(x.window());
    digits.back() -= 1;
    return PSequence(x.p(), x.window_begin(), std::move(digits), PSequence::Tail::pminus1);
}

// Digit-wise subtraction with borrow propagating toward +infinity, tails
// resolved symbolically.
inline PSequence subtract(const PSequence& x, const PSequence& y) {
    if (x.p() != y.p()) throw std::invalid_argument("subtract: mismatched p");
    const int p = x.p();
    const long lo = std::min(x.window_begin(), y.window_begin());
    const long hi = std::max(x.window_end(), y.window_end());
    std::vector<int> digits;
    int borrow = 0;
    for (long k = lo; k <= hi; ++k) {
        int d = x.digit(k) - y.digit(k) - borrow;
        borrow = d < 0 ? 1 : 0;
        digits.push_back(d + borrow * p);
    }
    const bool xt = x.tail() == PSequence::Tail::pminus1;
    const bool yt = y.tail() == PSequence::Tail::pminus1;
    PSequence::Tail tail;
    if (xt == yt) {
        tail = borrow ? PSequence::Tail::pminus1 : PSequence::Tail::zeros;
    } else if (yt) { // zeros minus pminus1
        if (!borrow) digits.push_back(1);
        tail = PSequence::Tail::zeros;
    } else { // pminus1 minus zeros
        if (borrow) digits.push_back(p - 2);
        tail = PSequence::Tail::pminus1;
    }
    return PSequence(p, lo, std::move(digits), tail);
}

// d_u(x, y) = p^{-v_u(x - y)}, exact.
inline Rational d_u(const PSequence& x, const PSequence& y) {
    PSequence diff = subtract(x, y);
    if (diff.is_zero()) return Rational(0);
    return rational_pow(x.p(), -v_u(diff));
}

namespace detail {

inline long strip_factor(BigInt& a, int p) {
    long count = 0;
    while (a != 0 && a % p == 0) {
        a /= p;
        ++count;
    }
    return count;
}

inline bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

} // namespace detail

// p-adic valuation of a nonzero rational.
inline long v_p(const Rational& q, int p) {
    if (q == 0) throw std::domain_error("v_p of zero");
    BigInt num = numerator(q), den = denominator(q);
    return detail::strip_factor(num, p) - detail::strip_factor(den, p);
}

// q is in Z[1/p]: its denominator is a power of p, so a finite p-ary
// expansion exists.
inline bool has_p_power_denominator(const Rational& q, int p) {
    BigInt den = denominator(q);
    detail::strip_factor(den, p);
    return den == 1;
}

// Greedy p-ary expansion of t >= 0 in Z[1/p]; the terminating (right-face)
// representative.
inline PSequence phi(const Rational& t, int p) {
    if (t < 0) throw std::domain_error("phi: t must be nonnegative");
    if (t == 0) return PSequence(p);
    if (!has_p_power_denominator(t, p))
        throw std::domain_error("phi: t has no finite p-ary expansion (denominator not a power of p)");
    BigInt den = denominator(t);
    const long m = detail::strip_factor(den, p);
    BigInt a = numerator(t); // t = a / p^m
    std::vector<int> rev;    // base-p digits of a, least significant first
    while (a != 0) {
        rev.push_back(static_cast<int>(a % p));
        a /= p;
    }
    std::vector<int> digits(rev.rbegin(), rev.rend()); // digit index k = m - j, ascending in k
    return PSequence(p, m - static_cast<long>(rev.size()) + 1, std::move(digits));
}

// Left and right faces of a grid point t > 0: right is phi(t), left its hat.
inline std::pair<PSequence, PSequence> phi_faces(const Rational& t, int p) {
    if (!(t > 0)) throw std::domain_error("phi_faces: faces of t = 0 are undefined");
    PSequence right = phi(t, p);
    return {hat(right), right};
}

// phi^{-1}: sum of p^{-k} x_k, the geometric-series identity resolving the
// all-(p-1) tail.
inline Rational phi_inverse(const PSequence& x) {
    Rational sum = 0;
    for (long k = x.window_begin(); k <= x.window_end(); ++k)
        sum += x.digit(k) * rational_pow(x.p(), -k);
    if (x.tail() == PSequence::Tail::pminus1) {
        const long k0 = x.window_end() + 1;
        sum += rational_pow(x.p(), -(k0 - 1));
    }
    return sum;
}

// The comb F_p: p^{-w(phi(t))} on the p-ary grid, 0 elsewhere.
inline Rational F_p(const Rational& t, int p) {
    if (t < 0) throw std::domain_error("F_p: t must be nonnegative");
    if (t == 0 || !has_p_power_denominator(t, p)) return Rational(0);
    return rational_pow(p, v_p(t, p)); // w(phi(t)) = -v_p(t)
}

// Element of Q_p at finite precision: exact when the value lies in Z[1/p]
// (representable Hensel expansion), otherwise a truncation tagged with the
// digit index it is exact up to.
struct PRational {
    int p;
    Rational value;
    bool exact = true;
    long precision = 0; // meaningful when !exact

    PRational(int p_, Rational v, bool exact_ = true, long precision_ = 0)
        : p(p_), value(std::move(v)), exact(exact_), precision(precision_) {
        if (!detail::is_prime(p)) throw std::invalid_argument("PRational: p must be prime");
    }
};

inline long v_p(const PRational& q) { return v_p(q.value, q.p); }

// d_p(q, q') = p^{-v_p(q - q')}, exact; 0 when equal.
inline Rational d_p(const PRational& a, const PRational& b) {
    if (a.p != b.p) throw std::invalid_argument("d_p: mismatched p");
    Rational diff = a.value - b.value;
    if (diff == 0) return Rational(0);
    return rational_pow(a.p, -v_p(diff, a.p));
}

// rho . psi: the Hensel digits of q re-read as a U_p element (the digit at
// index k is the Hensel coefficient of p^k). Finite support for q >= 0,
// eventually p-1 for q < 0; defined on Z[1/p].
inline PSequence rho_psi(const PRational& q) {
    if (!has_p_power_denominator(q.value, q.p))
        throw std::domain_error("rho_psi: value outside Z[1/p] has an infinite Hensel tail");
    const int p = q.p;
    if (q.value == 0) return PSequence(p);
    BigInt den = denominator(q.value);
    const long m = detail::strip_factor(den, p);
    BigInt a = numerator(q.value); // q = a / p^m; digit at k = Hensel digit of a at k + m
    std::vector<int> digits;
    while (a != 0 && a != -1) {
        BigInt r = a % p;
        if (r < 0) r += p;
        digits.push_back(static_cast<int>(r));
        a = (a - r) / p;
    }
    const auto tail = a == -1 ? PSequence::Tail::pminus1 : PSequence::Tail::zeros;
    return PSequence(p, -m, std::move(digits), tail);
}

// psi^{-1} . rho: sum of digit(k) * p^k. The all-(p-1) tail from k0 is the
// p-adic limit -p^{k0} (the homomorphism lemma), keeping the result exact.
inline Rational psi_inverse_rho(const PSequence& x) {
    Rational sum = 0;
    for (long k = x.window_begin(); k <= x.window_end(); ++k)
        sum += x.digit(k) * rational_pow(x.p(), k);
    if (x.tail() == PSequence::Tail::pminus1) sum -= rational_pow(x.p(), x.window_end() + 1);
    return sum;
}

using PCombPoint = BasicCombPoint<Rational>;

// chi = phi-bar^{-1} . rho . psi: the global isometry from Q_p into the comb
// metric space of F_p. Finite-support images land on right faces,
// eventually-(p-1) images on left faces, 0 at the interior point 0.
inline PCombPoint chi(const PRational& q) {
    PSequence x = rho_psi(q);
    if (x.is_zero()) return {Rational(0), Face::interior};
    const Face face = x.tail() == PSequence::Tail::pminus1 ? Face::left : Face::right;
    return {phi_inverse(x), face};
}

// chi^{-1}. Faces at grid points are exact; faces at zero-height positions
// are identified with the interior point; interior points with infinite
// expansions come back as tagged truncations at the given digit index.
inline PRational chi_inverse(int p, const PCombPoint& point, long precision = 24) {
    if (!detail::is_prime(p)) throw std::invalid_argument("chi_inverse: p must be prime");
    const Rational& t = point.position;
    if (t < 0) throw std::domain_error("chi_inverse: position must be nonnegative");
    const bool on_grid = t > 0 && has_p_power_denominator(t, p);
    if (on_grid && point.face == Face::interior)
        throw std::domain_error("chi_inverse: interior face at a tooth of F_p");
    if (!on_grid) {
        if (t == 0) return PRational(p, Rational(0));
        // infinite expansion: accumulate digits down to index `precision`
        Rational value = 0;
        Rational rest = t;
        long k = 0;
        while (rational_pow(p, -k) <= t) --k;
        for (; k <= precision; ++k) {
            Rational step = rational_pow(p, -k);
            BigInt d = static_cast<BigInt>(rest / step); // floor, rest >= 0
            value += Rational(d) * rational_pow(p, k);
            rest -= Rational(d) * step;
        }
        return PRational(p, std::move(value), /*exact=*/false, precision);
    }
    auto [left, right] = phi_faces(t, p);
    return PRational(p, psi_inverse_rho(point.face == Face::left ? left : right));
}

// F_p restricted to [0, hi], materialized down to teeth of height
// min_height: one tooth of height p^{-n} at every step-p^{-n} grid point not
// on a coarser grid.
inline BasicComb<Rational> p_adic_comb(int p, const Rational& hi, const Rational& min_height) {
    if (!(hi > 0) || !(min_height > 0))
        throw std::domain_error("p_adic_comb: bounds must be positive");
    long n = 0;
    while (rational_pow(p, -(n - 1)) < hi) --n; // coarsest grid with points inside (0, hi)
    while (rational_pow(p, -n) >= hi) ++n;
    std::vector<BasicTooth<Rational>> teeth;
    for (; rational_pow(p, -n) >= min_height; ++n) {
        const Rational step = rational_pow(p, -n);
        for (BigInt a = 1; Rational(a) * step < hi; ++a) {
            if (a % p == 0) continue; // on a coarser grid
            teeth.push_back({Rational(a) * step, step});
        }
    }
    std::sort(teeth.begin(), teeth.end(),
              [](const auto& a, const auto& b) { return a.position < b.position; });
    return BasicComb<Rational>(Rational(0), hi, std::move(teeth));
}

} // namespace comb::padic
