#include <catch2/catch_amalgamated.hpp>

#include "confmetric/mobius.hpp"
#include "confmetric/point.hpp"
#include "confmetric/rng.hpp"

using namespace confmetric;
using Catch::Approx;

namespace {

ExtendedPoint random_extended(Rng& rng, double inf_prob = 0.0) {
    if (rng.uniform() < inf_prob) return inf_point();
    return point(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
}

MobiusMap random_mobius(Rng& rng) {
    for (;;) {
        const Complex a(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Complex b(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Complex c(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Complex d(rng.uniform(-2, 2), rng.uniform(-2, 2));
        const double scale = std::max(std::abs(a) * std::abs(d), std::abs(b) * std::abs(c));
        if (std::abs(a * d - b * c) > 0.05 * std::max(scale, 1e-6))
            return MobiusMap(a, b, c, d);
    }
}

}  // namespace

TEST_CASE("sigma weight") {
    CHECK(sigma_weight(point(0, 0)) == 1.0);
    CHECK(sigma_weight(point(1, 0)) == Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(sigma_weight(point(3, 4)) == Approx(std::sqrt(26.0)).epsilon(1e-12));
    CHECK_THROWS_AS(sigma_weight(inf_point()), DomainError);
}

TEST_CASE("sigma strict Lipschitz inequality |sigma(x)-sigma(y)| < |x-y|") {
    Rng rng(101);
    for (int i = 0; i < 1000; ++i) {
        const ExtendedPoint x = random_extended(rng), y = random_extended(rng);
        if (x == y) continue;
        const double lhs = std::fabs(sigma_weight(x) - sigma_weight(y));
        const double rhs = std::abs(x.z - y.z);
        CHECK(lhs < rhs);
    }
}

TEST_CASE("chordal distance basics") {
    CHECK(chordal_distance(point(0, 0), inf_point()) == 1.0);
    CHECK(chordal_distance(point(0.3, -0.7), point(0.3, -0.7)) == 0.0);
    CHECK(chordal_distance(point(0, 0), point(1, 0)) == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(chordal_distance(inf_point(), inf_point()) == 0.0);
}

TEST_CASE("chordal metric axioms on random triples") {
    Rng rng(707);
    for (int i = 0; i < 1000; ++i) {
        const ExtendedPoint x = random_extended(rng, 0.05);
        const ExtendedPoint y = random_extended(rng, 0.05);
        const ExtendedPoint z = random_extended(rng, 0.05);
        CHECK(chordal_distance(x, y) == chordal_distance(y, x));
        CHECK(chordal_distance(x, y) <= 1.0 + 1e-15);
        CHECK(chordal_distance(x, z) <= chordal_distance(x, y) + chordal_distance(y, z) + 1e-12);
        if (!(x == y)) CHECK(chordal_distance(x, y) > 0.0);
    }
}

TEST_CASE("cross ratio with infinity drops the matching factors") {
    // |0, x, inf, y| -> |x - y| / |x|
    const double e1 = std::exp(-1.0);
    CHECK(cross_ratio(point(0, 0), point(e1, 0), inf_point(), point(-e1, 0)) ==
          Approx(2.0).epsilon(1e-12));
    // |0, 1, inf, 2| -> |1 - 2| / |0 - 1| = 1
    CHECK(cross_ratio(point(0, 0), point(1, 0), inf_point(), point(2, 0)) ==
          Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cross ratio limit matches brute-force limit along c -> infinity") {
    const ExtendedPoint a = point(0, 0), b = point(1, 0), d = point(2, 0);
    const double lim = cross_ratio(a, b, inf_point(), d);
    for (double R : {1e6, 1e8}) {
        const double fin = cross_ratio(a, b, point(R, R / 3), d);
        CHECK(fin == Approx(lim).epsilon(1e-5));
    }
}

TEST_CASE("cross ratio symmetry |a,b,c,d| = |c,d,a,b|") {
    Rng rng(33);
    for (int i = 0; i < 200; ++i) {
        const ExtendedPoint a = random_extended(rng, 0.04), b = random_extended(rng, 0.04);
        const ExtendedPoint c = random_extended(rng, 0.04), d = random_extended(rng, 0.04);
        if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
        CHECK(cross_ratio(a, b, c, d) == Approx(cross_ratio(c, d, a, b)).epsilon(1e-9));
    }
}

TEST_CASE("cross ratio rejects coincident points") {
    CHECK_THROWS_AS(cross_ratio(point(1, 1), point(1, 1), point(0, 0), point(2, 2)),
                    DegenerateConfiguration);
    CHECK_THROWS_AS(cross_ratio(inf_point(), point(1, 1), inf_point(), point(2, 2)),
                    DegenerateConfiguration);
}

TEST_CASE("cross ratio is Mobius invariant") {
    Rng rng(55);
    int checked = 0;
    for (int i = 0; i < 2000 && checked < 1000; ++i) {
        const ExtendedPoint a = random_extended(rng, 0.03), b = random_extended(rng, 0.03);
        const ExtendedPoint c = random_extended(rng, 0.03), d = random_extended(rng, 0.03);
        if (a == b || a == c || a == d || b == c || b == d || c == d) continue;
        const MobiusMap f = random_mobius(rng);
        const ExtendedPoint fa = f(a), fb = f(b), fc = f(c), fd = f(d);
        if (fa == fb || fa == fc || fa == fd || fb == fc || fb == fd || fc == fd) continue;
        const double before = cross_ratio(a, b, c, d);
        const double after = cross_ratio(fa, fb, fc, fd);
        // Skip configurations mapped too close to the pole for double accuracy.
        if (!std::isfinite(before) || !std::isfinite(after)) continue;
        CHECK(after == Approx(before).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked >= 900);
}

TEST_CASE("inversion about a center") {
    CHECK(invert_about(point(0, 0), point(2, 0)) == point(0.5, 0));
    CHECK(invert_about(point(0, 0), inf_point()) == point(0, 0));
    CHECK(invert_about(point(1, 0), point(1, 0)) == inf_point());
}

TEST_CASE("inversion distance identity") {
    // |iota(a) - iota(b)| = |a - b| / (|x-a| |x-b|)
    const ExtendedPoint x = point(1, 0);
    const ExtendedPoint a = point(0, 0), b = point(3, 0);
    const auto ia = invert_about(x, a), ib = invert_about(x, b);
    CHECK(std::abs(ia.z - ib.z) == Approx(1.5).epsilon(1e-12));

    Rng rng(919);
    for (int i = 0; i < 500; ++i) {
        const ExtendedPoint c = random_extended(rng);
        const ExtendedPoint p = random_extended(rng), q = random_extended(rng);
        if (p == c || q == c || p == q) continue;
        const auto ip = invert_about(c, p), iq = invert_about(c, q);
        const double lhs = std::abs(ip.z - iq.z);
        const double rhs = std::abs(p.z - q.z) / (std::abs(c.z - p.z) * std::abs(c.z - q.z));
        CHECK(lhs == Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("mobius from triple") {
    const std::array<ExtendedPoint, 3> std_triple{point(0, 0), point(1, 0), inf_point()};

    SECTION("identity") {
        const MobiusMap f = mobius_from_triple(std_triple, std_triple);
        Rng rng(1);
        for (int i = 0; i < 50; ++i) {
            const ExtendedPoint p = random_extended(rng);
            CHECK(approx_equal(f(p), p, 1e-10));
        }
    }
    SECTION("(0,1,inf) -> (inf,1,0) is 1/z") {
        const MobiusMap f =
            mobius_from_triple(std_triple, {inf_point(), point(1, 0), point(0, 0)});
        CHECK(approx_equal(f(point(2, 0)), point(0.5, 0), 1e-10));
        CHECK(f(point(0, 0)) == inf_point());
        CHECK(approx_equal(f(inf_point()), point(0, 0), 1e-10));
    }
    SECTION("round trip on finite triples") {
        const std::array<ExtendedPoint, 3> src{point(0, 0), point(1, 0), point(2, 0)};
        const std::array<ExtendedPoint, 3> dst{point(0, 0), point(1, 0), inf_point()};
        const MobiusMap f = mobius_from_triple(src, dst);
        for (int i = 0; i < 3; ++i) CHECK(approx_equal(f(src[i]), dst[i], 1e-10));
    }
    SECTION("random triples interpolate to 1e-10") {
        Rng rng(77);
        for (int i = 0; i < 100; ++i) {
            std::array<ExtendedPoint, 3> src{random_extended(rng, 0.1), random_extended(rng),
                                             random_extended(rng)};
            std::array<ExtendedPoint, 3> dst{random_extended(rng), random_extended(rng, 0.1),
                                             random_extended(rng)};
            if (src[0] == src[1] || src[0] == src[2] || src[1] == src[2]) continue;
            if (dst[0] == dst[1] || dst[0] == dst[2] || dst[1] == dst[2]) continue;
            const MobiusMap f = mobius_from_triple(src, dst);
            for (int k = 0; k < 3; ++k) CHECK(approx_equal(f(src[k]), dst[k], 1e-10));
        }
    }
    SECTION("degenerate triple throws") {
        CHECK_THROWS_AS(mobius_from_triple({point(0, 0), point(0, 0), point(1, 0)}, std_triple),
                        DegenerateConfiguration);
    }
}

TEST_CASE("mobius group laws on random triples of maps") {
    Rng rng(404);
    for (int i = 0; i < 200; ++i) {
        const MobiusMap f = random_mobius(rng), g = random_mobius(rng), h = random_mobius(rng);
        const ExtendedPoint p = random_extended(rng);
        // Associativity of composition.
        const ExtendedPoint lhs = ((f * g) * h)(p);
        const ExtendedPoint rhs = (f * (g * h))(p);
        if (lhs.is_inf || rhs.is_inf) {
            CHECK(lhs.is_inf == rhs.is_inf);
        } else {
            CHECK(approx_equal(lhs, rhs, 1e-8));
        }
        // Inverse composes to the identity.
        const ExtendedPoint q = (f.inverse() * f)(p);
        if (!q.is_inf && !p.is_inf) CHECK(approx_equal(q, p, 1e-8));
    }
}

TEST_CASE("mobius determinant validity check") {
    CHECK_THROWS_AS(MobiusMap(Complex(1), Complex(2), Complex(2), Complex(4)),
                    DegenerateConfiguration);
}
