#include <catch2/catch_amalgamated.hpp>

#include "confmetric/domain.hpp"
#include "confmetric/point_metrics.hpp"
#include "confmetric/rng.hpp"
#include "oracles.hpp"

using namespace confmetric;
using Catch::Approx;

TEST_CASE("boundary distance for named variants") {
    CHECK(boundary_distance(unit_disk(), point(0, 0)) == 1.0);
    CHECK(boundary_distance(punctured_disk(), point(0.1, 0)) == Approx(0.1).epsilon(1e-12));
    CHECK(boundary_distance(punctured_disk(), point(0.8, 0)) == Approx(0.2).epsilon(1e-12));
    CHECK(boundary_distance(annulus(1, 2), point(1.25, 0)) == Approx(0.25).epsilon(1e-12));
    CHECK(boundary_distance(half_plane(), point(3, 0.7)) == Approx(0.7).epsilon(1e-12));

    const auto tri = complement_of({point(0, 0), point(1, 0), inf_point()});
    CHECK(boundary_distance(tri, point(0.5, 0)) == Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(boundary_distance(unit_disk(), point(2, 0)), DomainError);
    CHECK_THROWS_AS(boundary_distance(unit_disk(), inf_point()), DomainError);
    CHECK_THROWS_AS(boundary_distance(punctured_disk(), point(0, 0)), DomainError);
}

TEST_CASE("contains for named variants") {
    CHECK_FALSE(contains(punctured_disk(), point(0, 0)));
    CHECK_FALSE(contains(unit_disk(), inf_point()));
    CHECK(contains(annulus(1, 2), point(1.5, 0)));
    CHECK_FALSE(contains(annulus(1, 2), point(0.5, 0)));
    CHECK(contains(complement_of({point(0, 0), inf_point()}), point(5, 5)));
    CHECK_FALSE(contains(complement_of({point(0, 0), inf_point()}), inf_point()));
}

TEST_CASE("boundary view") {
    SECTION("finite boundary is exact") {
        const auto tri = complement_of({point(0, 0), point(1, 0), inf_point()});
        const auto view = boundary_view(tri, 64);
        CHECK(view.exact);
        CHECK(view.mesh_gap == 0.0);
        REQUIRE(view.points.size() == 3);
    }
    SECTION("disk samples land on the circle") {
        const auto view = boundary_view(unit_disk(), 4);
        CHECK_FALSE(view.exact);
        REQUIRE(view.points.size() == 4);
        for (const auto& p : view.points) CHECK(std::abs(p.z) == Approx(1.0).epsilon(1e-12));
        CHECK(view.mesh_gap <= kPi / 4.0);
        CHECK(view.mesh_gap == Approx(2.0 * std::sin(kPi / 8.0)).epsilon(1e-12));
    }
    SECTION("annulus has two sampled components") {
        const auto view = boundary_view(annulus(1, 2), 8);
        REQUIRE(view.points.size() == 16);
    }
}

TEST_CASE("sampled boundary tracks its exact counterpart") {
    // Build a sampled version of the unit circle and compare distances.
    const int n = 600;
    std::vector<ExtendedPoint> samples;
    for (int i = 0; i < n; ++i) {
        const double th = 2.0 * kPi * i / n;
        samples.push_back(point(std::cos(th), std::sin(th)));
    }
    const double gap = 2.0 * std::sin(kPi / (2.0 * n));
    const auto sb = sampled_boundary(samples, gap, point(0, 0));

    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto x = oracles::random_point(unit_disk(), rng, 0.05);
        REQUIRE(contains(sb, x));
        const double exact = boundary_distance(unit_disk(), x);
        const double approx = boundary_distance(sb, x);
        CHECK(std::fabs(exact - approx) <= gap);
        CHECK(approx > 0.0);
    }
    // Outside points are rejected.
    CHECK_FALSE(contains(sb, point(1.5, 0)));
    CHECK_THROWS_AS(boundary_distance(sb, point(1.5, 0)), DomainError);
}

TEST_CASE("contains implies positive boundary distance") {
    Rng rng(6);
    for (const auto& spec : {unit_disk(), annulus(1, 2), punctured_disk()}) {
        for (int i = 0; i < 50; ++i) {
            const auto x = oracles::random_point(spec, rng, 0.01);
            CHECK(boundary_distance(spec, x) > 0.0);
        }
    }
}

TEST_CASE("normalize infinity to boundary") {
    SECTION("already satisfied is the identity") {
        const auto tri = complement_of({point(0, 0), point(1, 0), inf_point()});
        const auto [spec, map] = normalize_infinity_to_boundary(tri);
        CHECK(approx_equal(map(point(5, 5)), point(5, 5)));
        CHECK(boundary_contains_infinity(spec));
    }
    SECTION("disk maps to a half-plane-like image") {
        const auto [spec, map] = normalize_infinity_to_boundary(unit_disk());
        CHECK(boundary_contains_infinity(spec));
        // Interior maps to interior.
        CHECK(contains(spec, map(point(0, 0))));
        CHECK(contains(spec, map(point(0.3, 0.4))));
        CHECK_FALSE(contains(spec, map(point(2, 0))));
        // delta is Mobius invariant: distances agree through the map.
        const ExtendedPoint x = point(0.2, 0.1), y = point(-0.4, 0.3);
        const auto before = delta_metric(unit_disk(), x, y);
        const auto after = delta_metric(spec, map(x), map(y));
        CHECK(after.value ==
              Approx(before.value).margin(1e-8 + before.error_bound + after.error_bound));
    }
    SECTION("punctured disk gains infinity on the boundary") {
        const auto [spec, map] = normalize_infinity_to_boundary(punctured_disk());
        CHECK(boundary_contains_infinity(spec));
        const ExtendedPoint x = point(0.3, 0.0);
        CHECK(contains(spec, map(x)));
        // Ferrand density transforms with the conformal factor of the map:
        // w'(f(x)) |f'(x)| = w(x) for a Mobius f.
        const auto wx = ferrand_density(punctured_disk(), x);
        const ExtendedPoint fx = map(x);
        const auto wfx = ferrand_density(spec, fx);
        // |f'(z)| for f = 1/(z - p): 1/|z - p|^2
        const double fprime = 1.0 / std::norm(x.z - Complex(0, 0));
        CHECK(wfx.value * fprime == Approx(wx.value).epsilon(1e-9));
    }
}

TEST_CASE("transformed domains keep exact oracles") {
    // Push the annulus through z -> 1/(z - 4); circles map to circles.
    const MobiusMap f(Complex(0), Complex(1), Complex(1), Complex(-4, 0));
    const auto img = transformed(annulus(1, 2), f);

    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto x = oracles::random_point(annulus(1, 2), rng, 0.02);
        const ExtendedPoint fx = f(x);
        CHECK(contains(img, fx));
        // Exact distance to the image circles must match a dense sampling.
        const double exact = boundary_distance(img, fx);
        double sampled = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4000; ++k) {
            const double th = 2.0 * kPi * k / 4000;
            for (double r : {1.0, 2.0}) {
                const ExtendedPoint b = f(point(r * std::cos(th), r * std::sin(th)));
                sampled = std::min(sampled, std::abs(fx.z - b.z));
            }
        }
        CHECK(exact == Approx(sampled).margin(1e-5));
    }
}

TEST_CASE("domain spec json round trip") {
    const auto tri = complement_of({point(0, 0), point(1, 0), inf_point()});
    const auto j = to_json(tri);
    CHECK(j["type"] == "complement-of-finite-set");
    const auto back = domain_from_json(j);
    CHECK(back.kind == DomainKind::ComplementOfFiniteSet);
    REQUIRE(back.points.size() == 3);
    CHECK(back.points[2].is_inf);

    const auto ann = annulus(1.0, 2.5);
    const auto back2 = domain_from_json(to_json(ann));
    CHECK(back2.inner == 1.0);
    CHECK(back2.outer == 2.5);

    const MobiusMap f(Complex(0), Complex(1), Complex(1), Complex(-1, 0));
    const auto back3 = domain_from_json(to_json(transformed(unit_disk(), f)));
    REQUIRE(back3.transform.has_value());
    CHECK(contains(back3, f(point(0.2, 0.2))));

    CHECK_THROWS_AS(domain_from_json(nlohmann::json{{"type", "nonsense"}}), DomainError);
}
