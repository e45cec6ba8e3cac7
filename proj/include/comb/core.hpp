#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace comb {

template <class T>
struct BasicTooth {
    T position;
    T height;
};

// Completion points: a positive-height tooth splits into a left face (limit of
// increasing sequences) and a right face (limit of decreasing sequences).
// Interior is only meaningful where the comb vanishes.
enum class Face { left, interior, right };

template <class T>
struct BasicCombPoint {
    T position;
    Face face = Face::interior;
};

// Sparse table over tooth heights: O(n log n) build, O(1) max over any
// contiguous run. An empty run has no teeth; max_in reports that as nullopt
// and callers read it as sup = 0 (empty supremum of a nonnegative comb).
template <class T>
class RangeMaxIndex {
public:
    RangeMaxIndex() = default;

    explicit RangeMaxIndex(std::vector<T> values) {
        if (values.empty()) return;
        table_.push_back(std::move(values));
        const std::size_t n = table_[0].size();
        for (std::size_t len = 2; len <= n; len *= 2) {
            const auto& prev = table_.back();
            std::vector<T> row;
            row.reserve(n - len + 1);
            for (std::size_t i = 0; i + len <= n; ++i)
                row.push_back(std::max(prev[i], prev[i + len / 2]));
            table_.push_back(std::move(row));
        }
    }

    std::size_t size() const { return table_.empty() ? 0 : table_[0].size(); }

    // Maximum of values[first, last); nullopt when the run is empty.
    std::optional<T> max_in(std::size_t first, std::size_t last) const {
        if (first >= last) return std::nullopt;
        if (last > size()) throw std::out_of_range("RangeMaxIndex: run out of range");
        const std::size_t k = std::bit_width(last - first) - 1;
        const std::size_t len = std::size_t{1} << k;
        return std::max(table_[k][first], table_[k][last - len]);
    }

private:
    std::vector<std::vector<T>> table_; // table_[k][i] = max of values[i, i + 2^k)
};

// A comb: finitely many teeth with strictly positive heights at strictly
// increasing positions inside a compact interval. Immutable after
// construction; the range-max index is built once so distance queries cost
// one binary search.
template <class T>
class BasicComb {
public:
    BasicComb(T interval_lo, T interval_hi, std::vector<BasicTooth<T>> teeth)
        : lo_(std::move(interval_lo)), hi_(std::move(interval_hi)), teeth_(std::move(teeth)) {
        if (!(lo_ < hi_)) throw std::invalid_argument("comb: interval_lo must be < interval_hi");
        for (std::size_t i = 0; i < teeth_.size(); ++i) {
            if (!(teeth_[i].height > T(0)))
                throw std::invalid_argument("comb: tooth heights must be strictly positive");
            if (!(lo_ < teeth_[i].position && teeth_[i].position < hi_))
                throw std::invalid_argument("comb: tooth positions must lie strictly inside the interval");
            if (i > 0 && !(teeth_[i - 1].position < teeth_[i].position))
                throw std::invalid_argument("comb: tooth positions must be strictly increasing");
        }
        std::vector<T> heights;
        heights.reserve(teeth_.size());
        for (const auto& t : teeth_) heights.push_back(t.height);
        index_ = RangeMaxIndex<T>(std::move(heights));
    }

    const T& interval_lo() const { return lo_; }
    const T& interval_hi() const { return hi_; }
    const std::vector<BasicTooth<T>>& teeth() const { return teeth_; }
    std::size_t size() const { return teeth_.size(); }
    const RangeMaxIndex<T>& index() const { return index_; }

    bool contains(const T& x) const { return lo_ <= x && x <= hi_; }

    std::optional<std::size_t> tooth_index_at(const T& x) const {
        auto it = std::lower_bound(teeth_.begin(), teeth_.end(), x,
                                   [](const BasicTooth<T>& t, const T& v) { return t.position < v; });
        if (it != teeth_.end() && it->position == x)
            return static_cast<std::size_t>(it - teeth_.begin());
        return std::nullopt;
    }

    // f(x): tooth height at x, 0 elsewhere.
    T height_at(const T& x) const {
        auto i = tooth_index_at(x);
        return i ? teeth_[*i].height : T(0);
    }

    // Index of the first tooth with position > x.
    std::size_t first_tooth_after(const T& x) const {
        auto it = std::upper_bound(teeth_.begin(), teeth_.end(), x,
                                   [](const T& v, const BasicTooth<T>& t) { return v < t.position; });
        return static_cast<std::size_t>(it - teeth_.begin());
    }

    // Index of the first tooth with position >= x.
    std::size_t first_tooth_at_or_after(const T& x) const {
        auto it = std::lower_bound(teeth_.begin(), teeth_.end(), x,
                                   [](const BasicTooth<T>& t, const T& v) { return t.position < v; });
        return static_cast<std::size_t>(it - teeth_.begin());
    }

    // sup of f over the open interval (a, b); 0 when no tooth lies inside.
    T sup_open(const T& a, const T& b) const {
        auto m = index_.max_in(first_tooth_after(a), first_tooth_at_or_after(b));
        return m ? *m : T(0);
    }

private:
    T lo_, hi_;
    std::vector<BasicTooth<T>> teeth_;
    RangeMaxIndex<T> index_;
};

using Tooth = BasicTooth<double>;
using Comb = BasicComb<double>;
using CombPoint = BasicCombPoint<double>;

// Spec operation: a fresh index over the comb's tooth heights.
template <class T>
RangeMaxIndex<T> build_index(const BasicComb<T>& c) {
    std::vector<T> heights;
    heights.reserve(c.size());
    for (const auto& t : c.teeth()) heights.push_back(t.height);
    return RangeMaxIndex<T>(std::move(heights));
}

namespace detail {

template <class T>
void check_point(const BasicComb<T>& c, const BasicCombPoint<T>& p) {
    if (!c.contains(p.position))
        throw std::domain_error("comb point outside the comb interval");
    if (p.face == Face::interior && c.tooth_index_at(p.position))
        throw std::domain_error("interior face at a tooth position");
}

} // namespace detail

// The comb metric on the completion. For positions s < t the face tags select
// which endpoints' heights join the open-interval supremum:
//   (s,r)-(t,l): sup over (s,t)      (s,l)-(t,l): sup over [s,t)
//   (s,r)-(t,r): sup over (s,t]      (s,l)-(t,r): sup over [s,t]
// Equal positions: opposite faces are f(t) apart, same faces coincide.
template <class T>
T comb_distance(const BasicComb<T>& c, const BasicCombPoint<T>& a, const BasicCombPoint<T>& b) {
    detail::check_point(c, a);
    detail::check_point(c, b);
    const BasicCombPoint<T>& s = a.position <= b.position ? a : b;
    const BasicCombPoint<T>& t = a.position <= b.position ? b : a;
    if (s.position == t.position) {
        const bool opposite = (s.face == Face::left && t.face == Face::right) ||
                              (s.face == Face::right && t.face == Face::left);
        return opposite ? c.height_at(s.position) : T(0);
    }
    T sup = c.sup_open(s.position, t.position);
    if (s.face == Face::left) sup = std::max(sup, c.height_at(s.position));
    if (t.face == Face::right) sup = std::max(sup, c.height_at(t.position));
    return sup;
}

// True iff d(r,t) <= max(d(r,s), d(s,t)) over all triples of the given points.
template <class T>
bool verify_ultrametric(const BasicComb<T>& c, std::span<const BasicCombPoint<T>> points) {
    const std::size_t n = points.size();
    if (n < 3) throw std::domain_error("verify_ultrametric: need at least 3 points");
    std::vector<T> d(n * n, T(0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = d[j * n + i] = comb_distance(c, points[i], points[j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t k = j + 1; k < n; ++k) {
                if (k == i) continue;
                if (d[j * n + k] > std::max(d[j * n + i], d[i * n + k])) return false;
            }
        }
    return true;
}

enum class ApproachSide { from_left, from_right };

// Distances from the chosen face of x to a monotone approaching sequence of
// zero-height positions. The returned list is the finite completeness
// witness: it must be nonincreasing with limit 0.
template <class T>
std::vector<T> face_limit_distance(const BasicComb<T>& c, const T& x, ApproachSide side,
                                   std::span<const T> approaching) {
    if (!c.contains(x)) throw std::domain_error("face_limit_distance: x outside the interval");
    for (std::size_t i = 0; i < approaching.size(); ++i) {
        const T& s = approaching[i];
        if (!c.contains(s)) throw std::domain_error("face_limit_distance: position outside the interval");
        if (c.tooth_index_at(s)) throw std::domain_error("face_limit_distance: approaching position on a tooth");
        if (side == ApproachSide::from_left) {
            if (!(s < x)) throw std::domain_error("face_limit_distance: from_left positions must be < x");
            if (i > 0 && !(approaching[i - 1] < s))
                throw std::domain_error("face_limit_distance: positions must increase toward x");
        } else {
            if (!(s > x)) throw std::domain_error("face_limit_distance: from_right positions must be > x");
            if (i > 0 && !(approaching[i - 1] > s))
                throw std::domain_error("face_limit_distance: positions must decrease toward x");
        }
    }
    const BasicCombPoint<T> target{x, side == ApproachSide::from_left ? Face::left : Face::right};
    std::vector<T> out;
    out.reserve(approaching.size());
    for (const T& s : approaching)
        out.push_back(comb_distance(c, target, BasicCombPoint<T>{s, Face::interior}));
    return out;
}

} // namespace comb
