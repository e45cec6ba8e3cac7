#include <catch2/catch_amalgamated.hpp>

#include "comb/core.hpp"
#include "test_support.hpp"

using namespace comb;
using testsupport::Rng;

TEST_CASE("range-max index agrees with linear scan") {
    // pinned examples
    RangeMaxIndex<double> idx({1.0, 3.0, 2.0});
    CHECK(idx.max_in(0, 3) == 3.0);
    CHECK(idx.max_in(0, 1) == 1.0);
    CHECK(idx.max_in(2, 3) == 2.0);
    CHECK_FALSE(idx.max_in(1, 1).has_value()); // empty run: sup = 0 by convention
    RangeMaxIndex<double> single({5.0});
    CHECK(single.max_in(0, 1) == 5.0);

    // all runs, sizes up to 512
    Rng rng(20240601);
    for (std::size_t n : {1u, 2u, 3u, 5u, 17u, 64u, 512u}) {
        std::vector<double> v;
        for (std::size_t i = 0; i < n; ++i) v.push_back(rng.uniform(0.0, 10.0));
        RangeMaxIndex<double> t(v);
        for (std::size_t i = 0; i < n; ++i) {
            double best = v[i];
            for (std::size_t j = i + 1; j <= n; ++j) {
                REQUIRE(t.max_in(i, j) == best);
                if (j < n) best = std::max(best, v[j]);
            }
        }
    }
}

TEST_CASE("comb construction enforces invariants") {
    CHECK_THROWS_AS(Comb(0.0, 1.0, {{0.5, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Comb(0.0, 1.0, {{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Comb(0.0, 1.0, {{0.5, 1.0}, {0.5, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(Comb(1.0, 1.0, {}), std::invalid_argument);
    // empty comb is legal: every point identified, all distances 0
    Comb empty(0.0, 1.0, {});
    CHECK(comb_distance(empty, {0.2, Face::interior}, {0.9, Face::interior}) == 0.0);
    CHECK(comb_distance(empty, {0.2, Face::left}, {0.9, Face::right}) == 0.0);
}

TEST_CASE("comb distance face conventions") {
    Comb c(0.0, 1.0, {{0.25, 1.0}, {0.5, 3.0}});
    // no tooth strictly between the two: left face of 0.25 contributes f(0.25)
    CHECK(comb_distance(c, {0.25, Face::left}, {0.5, Face::left}) == 1.0);
    CHECK(comb_distance(c, {0.25, Face::right}, {0.5, Face::left}) == 0.0);
    CHECK(comb_distance(c, {0.25, Face::right}, {0.5, Face::right}) == 3.0);
    CHECK(comb_distance(c, {0.25, Face::left}, {0.5, Face::right}) == 3.0);
    // symmetry in the argument order
    CHECK(comb_distance(c, {0.5, Face::left}, {0.25, Face::left}) == 1.0);

    // equal positions: same face 0, opposite faces f(t)
    CHECK(comb_distance(c, {0.5, Face::left}, {0.5, Face::left}) == 0.0);
    CHECK(comb_distance(c, {0.5, Face::left}, {0.5, Face::right}) == 3.0);
    CHECK(comb_distance(c, {0.5, Face::right}, {0.5, Face::left}) == 3.0);
    CHECK(comb_distance(c, {0.1, Face::interior}, {0.1, Face::interior}) == 0.0);
    // zero-height position: faces identified with the interior point
    CHECK(comb_distance(c, {0.1, Face::left}, {0.1, Face::right}) == 0.0);

    CHECK_THROWS_AS(comb_distance(c, {1.5, Face::interior}, {0.5, Face::left}), std::domain_error);
    CHECK_THROWS_AS(comb_distance(c, {0.5, Face::interior}, {0.1, Face::interior}), std::domain_error);
}

TEST_CASE("comb distance equals direct scan on random combs") {
    Rng rng(8812);
    const Face faces[3] = {Face::left, Face::interior, Face::right};
    for (int trial = 0; trial < 300; ++trial) {
        Comb c = testsupport::random_comb(rng, 40);
        for (int q = 0; q < 30; ++q) {
            auto pick = [&](CombPoint& p) {
                if (!c.size() || rng.uniform01() < 0.5) {
                    p.position = testsupport::random_zero_positions(c, 1, rng)[0];
                    p.face = faces[rng.index(3)];
                    if (p.face == Face::interior && c.tooth_index_at(p.position)) p.face = Face::left;
                } else {
                    p.position = c.teeth()[rng.index(c.size())].position;
                    p.face = rng.uniform01() < 0.5 ? Face::left : Face::right;
                }
            };
            CombPoint a{}, b{};
            pick(a);
            pick(b);
            REQUIRE(comb_distance(c, a, b) == testsupport::brute_comb_distance(c, a, b));
        }
    }
}

TEST_CASE("comb metric is symmetric and ultrametric over random draws") {
    Rng rng(515161);
    const Face faces[3] = {Face::left, Face::interior, Face::right};
    int checked = 0;
    while (checked < 10000) {
        Comb c = testsupport::random_comb(rng, 24);
        std::vector<CombPoint> pts;
        for (double p : testsupport::random_zero_positions(c, 5, rng))
            pts.push_back({p, faces[rng.index(3)]});
        for (const auto& t : c.teeth()) {
            pts.push_back({t.position, Face::left});
            pts.push_back({t.position, Face::right});
        }
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                REQUIRE(comb_distance(c, pts[i], pts[j]) == comb_distance(c, pts[j], pts[i]));
        REQUIRE(verify_ultrametric(c, std::span<const CombPoint>(pts)));
        checked += static_cast<int>(pts.size() * (pts.size() - 1) * (pts.size() - 2) / 6);
    }
}

TEST_CASE("verify_ultrametric spec example") {
    // interior points straddling teeth of heights 1 and 3
    Comb c(0.0, 4.0, {{1.0, 1.0}, {2.0, 3.0}});
    std::vector<CombPoint> pts{{0.5, Face::interior}, {1.5, Face::interior}, {2.5, Face::interior}};
    CHECK(comb_distance(c, pts[0], pts[2]) == 3.0);
    CHECK(verify_ultrametric(c, std::span<const CombPoint>(pts)));
    CHECK_THROWS_AS(verify_ultrametric(c, std::span<const CombPoint>(pts.data(), 2)), std::domain_error);
}

TEST_CASE("face limit distances witness completeness") {
    SECTION("single tooth, approach from the left over flat ground") {
        Comb c(0.0, 1.0, {{0.5, 2.0}});
        std::vector<double> xs{0.5 - 0.25, 0.5 - 0.125, 0.5 - 0.0625, 0.5 - 0.03125};
        auto d = face_limit_distance(c, 0.5, ApproachSide::from_left, std::span<const double>(xs));
        for (double v : d) CHECK(v == 0.0);
    }
    SECTION("minor teeth make the distances shrink through 1/4, 1/8, 0") {
        Comb c(0.0, 1.0, {{0.4375, 0.25}, {0.46875, 0.125}, {0.5, 2.0}});
        std::vector<double> xs{0.4, 0.45, 0.48, 0.49};
        auto d = face_limit_distance(c, 0.5, ApproachSide::from_left, std::span<const double>(xs));
        REQUIRE(d.size() == 4);
        CHECK(d[0] == 0.25);
        CHECK(d[1] == 0.125);
        CHECK(d[2] == 0.0);
        CHECK(d[3] == 0.0);
    }
    SECTION("decreasing approach to the right face") {
        Comb c(0.0, 1.0, {{0.5, 2.0}, {0.53125, 0.125}, {0.5625, 0.25}});
        std::vector<double> xs{0.6, 0.55, 0.52, 0.51};
        auto d = face_limit_distance(c, 0.5, ApproachSide::from_right, std::span<const double>(xs));
        CHECK(d[0] == 0.25);
        CHECK(d[1] == 0.125);
        CHECK(d[2] == 0.0);
        CHECK(d[3] == 0.0);
    }
    SECTION("non-monotone input is rejected") {
        Comb c(0.0, 1.0, {{0.5, 2.0}});
        std::vector<double> xs{0.3, 0.2};
        CHECK_THROWS_AS(face_limit_distance(c, 0.5, ApproachSide::from_left, std::span<const double>(xs)),
                        std::domain_error);
    }
    SECTION("random monotone approaches converge to zero") {
        Rng rng(777);
        for (int trial = 0; trial < 200; ++trial) {
            Comb c = testsupport::random_comb(rng, 12, 0.0, 1.0);
            double x = 0.75;
            while (c.tooth_index_at(x)) x = rng.uniform(0.5, 1.0);
            // geometric approach; final step closer than any tooth below x
            double closest = x - c.interval_lo();
            for (const auto& t : c.teeth())
                if (t.position < x) closest = std::min(closest, x - t.position);
            std::vector<double> xs;
            for (double gap = (x - c.interval_lo()) / 2.0; gap > closest / 4.0; gap /= 2.0) {
                double p = x - gap;
                if (!c.tooth_index_at(p)) xs.push_back(p);
            }
            if (xs.size() < 2) continue;
            auto d = face_limit_distance(c, x, ApproachSide::from_left, std::span<const double>(xs));
            for (std::size_t i = 1; i < d.size(); ++i) REQUIRE(d[i] <= d[i - 1]);
            REQUIRE(d.back() == 0.0);
        }
    }
}

TEST_CASE("build_index matches the comb's own index") {
    Rng rng(4242);
    Comb c = testsupport::random_comb(rng, 64);
    auto idx = build_index(c);
    for (std::size_t i = 0; i <= c.size(); ++i)
        for (std::size_t j = i; j <= c.size(); ++j)
            REQUIRE(idx.max_in(i, j) == c.index().max_in(i, j));
}
