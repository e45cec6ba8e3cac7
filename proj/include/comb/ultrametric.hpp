#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "comb/core.hpp"
#include "comb/rational.hpp"

namespace comb {

struct NotUltrametricError : std::domain_error {
    std::array<std::size_t, 3> triple;
    explicit NotUltrametricError(std::array<std::size_t, 3> t)
        : std::domain_error("not ultrametric: d(" + std::to_string(t[0]) + "," + std::to_string(t[2]) +
                            ") > max(d(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "), d(" +
                            std::to_string(t[1]) + "," + std::to_string(t[2]) + "))"),
          triple(t) {}
};

// Finite metric with the strong triangle inequality, optionally carrying a
// point measure. Distances are doubles; masses are exact rationals so that
// the measured construction's interval tiling is exact. Construction checks
// shape (symmetry, zero diagonal, nonnegativity); ultrametricity is checked
// by the operations that require it, so that violating inputs can be
// reported with their triple.
class UltrametricMatrix {
public:
    UltrametricMatrix(std::size_t n, std::vector<double> distances)
        : n_(n), d_(std::move(distances)) {
        if (n_ == 0) throw std::invalid_argument("matrix: n must be >= 1");
        if (d_.size() != n_ * n_) throw std::invalid_argument("matrix: wrong number of entries");
        for (std::size_t i = 0; i < n_; ++i) {
            if (d_[i * n_ + i] != 0.0) throw std::invalid_argument("matrix: nonzero diagonal");
            for (std::size_t j = 0; j < n_; ++j) {
                if (d_[i * n_ + j] < 0.0) throw std::invalid_argument("matrix: negative distance");
                if (d_[i * n_ + j] != d_[j * n_ + i]) throw std::invalid_argument("matrix: not symmetric");
            }
        }
    }

    UltrametricMatrix(std::size_t n, std::vector<double> distances, std::vector<Rational> masses)
        : UltrametricMatrix(n, std::move(distances)) {
        set_masses_checked(std::move(masses));
    }

    std::size_t size() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
    const std::vector<double>& data() const { return d_; }

    bool has_masses() const { return !masses_.empty(); }
    const std::vector<Rational>& masses() const {
        if (!has_masses()) throw std::domain_error("matrix has no masses");
        return masses_;
    }
    Rational total_mass() const {
        Rational m = 0;
        for (const auto& x : masses()) m += x;
        return m;
    }

    UltrametricMatrix with_masses(std::vector<Rational> masses) const {
        UltrametricMatrix out(n_, d_);
        out.set_masses_checked(std::move(masses));
        return out;
    }

    // First triple (i,j,k) with d(i,k) > max(d(i,j), d(j,k)) + tol, if any.
    std::optional<std::array<std::size_t, 3>> ultrametric_violation(double tol = 0.0) const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                for (std::size_t k = j + 1; k < n_; ++k) {
                    if (j == i || k == i) continue;
                    if (d_[j * n_ + k] > std::max(d_[j * n_ + i], d_[i * n_ + k]) + tol)
                        return std::array<std::size_t, 3>{j, i, k};
                }
        return std::nullopt;
    }

    void require_ultrametric() const {
        if (auto v = ultrametric_violation()) throw NotUltrametricError(*v);
    }

private:
    void set_masses_checked(std::vector<Rational> masses) {
        if (masses.size() != n_) throw std::invalid_argument("matrix: wrong number of masses");
        for (const auto& m : masses)
            if (!(m > 0)) throw std::invalid_argument("matrix: masses must be strictly positive");
        masses_ = std::move(masses);
    }

    std::size_t n_;
    std::vector<double> d_;
    std::vector<Rational> masses_; // empty = no measure attached
};

// Checks the ordering identity: d(x_i, x_j) = max consecutive distance for
// all i < j of the given labelling.
inline bool order_satisfies_eq1(const UltrametricMatrix& m, std::span<const std::size_t> order) {
    const std::size_t n = m.size();
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (std::size_t v : order) {
        if (v >= n || seen[v]) return false;
        seen[v] = true;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double running = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            running = std::max(running, m.at(order[j - 1], order[j]));
            if (m.at(order[i], order[j]) != running) return false;
        }
    }
    return true;
}

// Labelling of a finite ultrametric set so consecutive distances determine
// all pairwise ones. Follows the appendix induction: remove the second
// element z of a minimum-distance pair (y,z), order the rest, reinsert z
// right after y. Ties on the minimum pair break lexicographically.
inline std::vector<std::size_t> order_ultrametric(const UltrametricMatrix& m) {
    m.require_ultrametric();
    const std::size_t n = m.size();
    std::vector<std::size_t> alive(n);
    for (std::size_t i = 0; i < n; ++i) alive[i] = i;
    std::vector<std::pair<std::size_t, std::size_t>> removals; // (y kept, z removed)
    while (alive.size() > 1) {
        std::size_t by = 0, bz = 0;
        double best = -1.0;
        for (std::size_t a = 0; a < alive.size(); ++a)
            for (std::size_t b = a + 1; b < alive.size(); ++b) {
                double d = m.at(alive[a], alive[b]);
                if (best < 0.0 || d < best) {
                    best = d;
                    by = alive[a];
                    bz = alive[b];
                }
            }
        removals.push_back({by, bz});
        alive.erase(std::find(alive.begin(), alive.end(), bz));
    }
    std::vector<std::size_t> order{alive[0]};
    for (auto it = removals.rbegin(); it != removals.rend(); ++it) {
        auto pos = std::find(order.begin(), order.end(), it->first);
        order.insert(pos + 1, it->second);
    }
    return order;
}

// Transcription of an ordered ultrametric set into a comb on [0, n]: tooth i
// carries the i-th consecutive distance. Zero consecutive distances
// (identified points) yield no tooth.
inline Comb comb_from_ordered(const UltrametricMatrix& m, std::span<const std::size_t> order) {
    if (!order_satisfies_eq1(m, order))
        throw std::invalid_argument("comb_from_ordered: order does not satisfy the consecutive-max identity");
    const std::size_t n = m.size();
    std::vector<Tooth> teeth;
    for (std::size_t i = 1; i < n; ++i) {
        double h = m.at(order[i - 1], order[i]);
        if (h > 0.0) teeth.push_back({static_cast<double>(i), h});
    }
    return Comb(0.0, static_cast<double>(n), std::move(teeth));
}

// Restriction of the comb metric to a finite set of zero-height positions.
inline UltrametricMatrix matrix_from_comb(const Comb& c, std::span<const double> positions) {
    const std::size_t n = positions.size();
    if (n == 0) throw std::domain_error("matrix_from_comb: need at least one position");
    std::vector<CombPoint> pts;
    pts.reserve(n);
    for (double p : positions) {
        if (c.tooth_index_at(p)) throw std::domain_error("matrix_from_comb: position on a tooth");
        pts.push_back({p, Face::interior});
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (positions[i] == positions[j])
                throw std::domain_error("matrix_from_comb: positions must be distinct");
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d[i * n + j] = d[j * n + i] = comb_distance(c, pts[i], pts[j]);
    return UltrametricMatrix(n, std::move(d));
}

// One level of the ball partition, ordered consistently with the refinement
// cascade, plus the mass bookkeeping A_i / J_i of the measured construction.
struct BallPartition {
    double threshold = 0.0;
    std::vector<std::vector<std::size_t>> blocks; // members ascending, blocks in cascade order
    std::vector<Rational> cumulative;             // A_0 = 0, ..., A_N = total mass

    std::pair<Rational, Rational> interval(std::size_t i) const {
        return {cumulative[i], cumulative[i + 1]};
    }
};

namespace detail {

// Classes of relation d <= t (strict < when strict) inside the given member
// set, each class sorted ascending, classes keyed by smallest member.
inline std::vector<std::vector<std::size_t>> classes_within(const UltrametricMatrix& m,
                                                            std::span<const std::size_t> members,
                                                            double t, bool strict) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> used(members.size(), false);
    for (std::size_t a = 0; a < members.size(); ++a) {
        if (used[a]) continue;
        std::vector<std::size_t> cls{members[a]};
        used[a] = true;
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            if (used[b]) continue;
            double d = m.at(members[a], members[b]);
            if (strict ? d < t : d <= t) {
                cls.push_back(members[b]);
                used[b] = true;
            }
        }
        out.push_back(std::move(cls));
    }
    return out;
}

inline Rational block_mass(const UltrametricMatrix& m, const std::vector<std::size_t>& block) {
    Rational s = 0;
    for (std::size_t i : block) s += m.masses()[i];
    return s;
}

// Sub-balls ranked by decreasing mass, ties by smallest member ascending.
inline void rank_blocks(const UltrametricMatrix& m, std::vector<std::vector<std::size_t>>& blocks) {
    std::vector<Rational> mass(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) mass[i] = block_mass(m, blocks[i]);
    std::vector<std::size_t> idx(blocks.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (mass[a] != mass[b]) return mass[a] > mass[b];
        return blocks[a].front() < blocks[b].front();
    });
    std::vector<std::vector<std::size_t>> ranked;
    ranked.reserve(blocks.size());
    for (std::size_t i : idx) ranked.push_back(std::move(blocks[i]));
    blocks = std::move(ranked);
}

inline std::vector<double> distinct_positive_distances_desc(const UltrametricMatrix& m) {
    std::vector<double> v;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            if (m.at(i, j) > 0.0) v.push_back(m.at(i, j));
    std::sort(v.begin(), v.end(), std::greater<>());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

inline void fill_cumulative(const UltrametricMatrix& m, BallPartition& p) {
    p.cumulative.assign(1, Rational(0));
    for (const auto& b : p.blocks) p.cumulative.push_back(p.cumulative.back() + block_mass(m, b));
}

} // namespace detail

// Ball partition at threshold t. With a parent (t below its threshold), one
// refinement step: each parent block is replaced in place by its sub-balls
// ranked by decreasing mass. Without a parent, the full cascade from the
// diameter down to t, one jump value at a time.
inline BallPartition partition_at(const UltrametricMatrix& m, double t,
                                  const BallPartition* parent = nullptr) {
    if (!(t > 0.0)) throw std::domain_error("partition_at: threshold must be positive");
    if (!m.has_masses()) throw std::domain_error("partition_at: masses required for block ranking");
    m.require_ultrametric();
    BallPartition out;
    out.threshold = t;
    auto refine = [&](const std::vector<std::vector<std::size_t>>& coarse, double level) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& block : coarse) {
            auto subs = detail::classes_within(m, block, level, /*strict=*/false);
            detail::rank_blocks(m, subs);
            for (auto& s : subs) next.push_back(std::move(s));
        }
        return next;
    };
    std::vector<std::size_t> all(m.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    if (parent) {
        if (!(t < parent->threshold))
            throw std::domain_error("partition_at: t must be below the parent threshold");
        out.blocks = refine(parent->blocks, t);
    } else {
        std::vector<std::vector<std::size_t>> blocks{all};
        for (double v : detail::distinct_positive_distances_desc(m)) {
            if (v <= t) break;
            blocks = refine(blocks, v);
        }
        out.blocks = refine(blocks, t);
    }
    detail::fill_cumulative(m, out);
    return out;
}

// Visibility measure: total mass 1, split equally among sub-balls at every
// fragmentation. Requires distinct points (no zero off-diagonal distances).
inline std::vector<Rational> visibility_measure(const UltrametricMatrix& m) {
    m.require_ultrametric();
    std::vector<Rational> masses(m.size(), Rational(0));
    std::vector<std::pair<std::vector<std::size_t>, Rational>> stack;
    std::vector<std::size_t> all(m.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    stack.push_back({std::move(all), Rational(1)});
    while (!stack.empty()) {
        auto [block, mass] = std::move(stack.back());
        stack.pop_back();
        if (block.size() == 1) {
            masses[block[0]] = mass;
            continue;
        }
        double diam = 0.0;
        for (std::size_t a = 0; a < block.size(); ++a)
            for (std::size_t b = a + 1; b < block.size(); ++b)
                diam = std::max(diam, m.at(block[a], block[b]));
        if (diam == 0.0)
            throw std::domain_error("visibility_measure: indistinct points (zero distance)");
        auto subs = detail::classes_within(m, block, diam, /*strict=*/true);
        Rational share = mass / static_cast<unsigned>(subs.size());
        for (auto& s : subs) stack.push_back({std::move(s), share});
    }
    return masses;
}

// Finite-scale Thm 3.1 construction: the per-point interval correspondence
// (the finite stand-in for phi^{-1}) plus the comb whose teeth sit at the
// interval boundaries, with heights equal to the split thresholds.
struct PointInterval {
    Rational lo, hi;
    Rational length() const { return hi - lo; }
    Rational midpoint() const { return (lo + hi) / 2; }
};

struct MeasuredComb {
    Comb comb;
    std::vector<PointInterval> intervals; // indexed by original point
};

inline MeasuredComb comb_from_measured(const UltrametricMatrix& m) {
    if (!m.has_masses())
        throw std::domain_error("comb_from_measured: masses required; apply visibility_measure first");
    m.require_ultrametric();
    const Rational total = m.total_mass();

    struct Block {
        std::vector<std::size_t> members;
        Rational lo, hi;
    };
    std::vector<std::size_t> all(m.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::vector<Block> blocks{{std::move(all), Rational(0), total}};
    std::vector<Tooth> teeth_raw; // positions converted at the end
    std::vector<std::pair<Rational, double>> boundaries;

    for (double v : detail::distinct_positive_distances_desc(m)) {
        std::vector<Block> next;
        for (auto& block : blocks) {
            auto subs = detail::classes_within(m, block.members, v, /*strict=*/true);
            if (subs.size() == 1) {
                next.push_back(std::move(block));
                continue;
            }
            detail::rank_blocks(m, subs);
            Rational at = block.lo;
            for (std::size_t s = 0; s < subs.size(); ++s) {
                Rational mass = detail::block_mass(m, subs[s]);
                Block nb{std::move(subs[s]), at, at + mass};
                at = nb.hi;
                if (s + 1 < subs.size()) boundaries.push_back({at, v});
                next.push_back(std::move(nb));
            }
        }
        blocks = std::move(next);
    }

    std::vector<PointInterval> intervals(m.size());
    for (const auto& b : blocks) {
        if (b.members.size() != 1)
            throw std::domain_error("comb_from_measured: indistinct points (zero distance)");
        intervals[b.members[0]] = {b.lo, b.hi};
    }
    std::sort(boundaries.begin(), boundaries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Tooth> teeth;
    teeth.reserve(boundaries.size());
    for (const auto& [pos, h] : boundaries) teeth.push_back({to_double(pos), h});
    return MeasuredComb{Comb(0.0, to_double(total), std::move(teeth)), std::move(intervals)};
}

} // namespace comb
