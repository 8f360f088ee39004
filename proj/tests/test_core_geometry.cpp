#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcs/core_geometry.hpp"

using qcs::Complex;

TEST_CASE("theorem disk endpoints match 1/(1+k^2) and 1/(1-k^2)") {
    for (double k : {0.0, 0.1, 0.5, 0.9, 0.99}) {
        const auto d = qcs::theorem_disk(k).real_diameter();
        CHECK(d.lo() == doctest::Approx(1.0 / (1.0 + k * k)).epsilon(1e-14));
        CHECK(d.hi() == doctest::Approx(1.0 / (1.0 - k * k)).epsilon(1e-14));
    }
}

TEST_CASE("theorem disk at k = 0 is the point 1") {
    const auto d = qcs::theorem_disk(0.0);
    CHECK(d.center() == Complex(1.0, 0.0));
    CHECK(d.radius() == 0.0);
    CHECK(d.contains(Complex(1.0, 0.0)));
}

TEST_CASE("theorem disk rejects k outside [0, 1)") {
    CHECK_THROWS_AS(qcs::theorem_disk(1.0), qcs::Error);
    CHECK_THROWS_AS(qcs::theorem_disk(-0.1), qcs::Error);
    CHECK_THROWS_AS(qcs::rotation_bound(std::nan("")), qcs::Error);
}

TEST_CASE("rotation bound agrees with a brute-force boundary search") {
    for (double k : {0.05, 0.3, 0.6, 0.9, 0.99}) {
        const auto d = qcs::theorem_disk(k);
        const double brute = oracle::max_boundary_slope(d.center().real(), d.radius(), 10000);
        CHECK(qcs::rotation_bound(k) == doctest::Approx(brute).epsilon(1e-9));
        CHECK(d.max_slope() == doctest::Approx(brute).epsilon(1e-9));
    }
}

TEST_CASE("general diameter at s = 0 and s = 2") {
    // s = 0 collapses to the real interval [(1-k)/(1+k), (1+k)/(1-k)]
    const double k = 0.4;
    const auto g0 = qcs::general_diameter(0.0, k);
    CHECK(g0.lo() == doctest::Approx((1 - k) / (1 + k)));
    CHECK(g0.hi() == doctest::Approx((1 + k) / (1 - k)));
    // s = 2 collapses to the point 1
    const auto g2 = qcs::general_diameter(2.0, k);
    CHECK(g2.lo() == doctest::Approx(1.0));
    CHECK(g2.hi() == doctest::Approx(1.0));
}

TEST_CASE("theorem disk is strictly inside the s = 1 disk") {
    for (int i = 1; i < 100; ++i) {
        const double k = 0.99 * i / 100.0;
        const auto small = qcs::theorem_disk(k);
        const auto big = qcs::Disk::with_real_diameter(qcs::general_diameter(1.0, k));
        CHECK(big.contains(small, 0.0));
        CHECK(big.radius() > small.radius());
    }
}

TEST_CASE("aips bound peaks at the identity exponent") {
    CHECK(qcs::aips_bound(1.0, 0.0, 0.5) == doctest::Approx(2.0));
    CHECK(qcs::aips_bound(1.2, 0.3, 0.3) < qcs::aips_bound(1.0, 0.0, 0.3));
}

TEST_CASE("disk containment and distance") {
    const qcs::Disk d(Complex(1.0, 0.0), 0.5);
    CHECK(d.distance(Complex(1.2, 0.0)) == 0.0);
    CHECK(d.distance(Complex(2.0, 0.0)) == doctest::Approx(0.5));
    CHECK(d.contains(Complex(1.5, 0.0), 0.0));
    CHECK_FALSE(d.contains(Complex(1.6, 0.0), 0.0));
    CHECK_THROWS_AS(qcs::Disk(Complex(0.0, 0.0), -1.0), qcs::Error);
    CHECK_THROWS_AS(qcs::Interval(2.0, 1.0), qcs::Error);
}

TEST_CASE("max slope is infinite when the disk meets the imaginary axis") {
    CHECK(std::isinf(qcs::Disk(Complex(0.5, 0.0), 0.6).max_slope()));
}

TEST_CASE("branch_log follows a winding curve continuously") {
    std::vector<double> t;
    std::vector<Complex> curve;
    for (int i = 0; i < 200; ++i) {
        const double s = 1.0 - i / 200.0;
        t.push_back(s);
        curve.push_back(std::polar(s, 8.0 * std::numbers::pi * i / 200.0));
    }
    const auto logs = qcs::branch_log(t, curve);
    CHECK(logs.value.back().imag() ==
          doctest::Approx(8.0 * std::numbers::pi * 199 / 200.0).epsilon(1e-12));
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::exp(logs.value[i]).real() == doctest::Approx(curve[i].real()).epsilon(1e-12));
    }
}

TEST_CASE("branch_log refuses coarse jumps, zeros and non-decreasing parameters") {
    const std::vector<double> t{1.0, 0.5};
    // a half-turn between samples cannot be attributed to either branch
    CHECK_THROWS_AS(qcs::branch_log(t, std::vector<Complex>{{1, 0}, {-1, 0}}), qcs::Error);
    CHECK_NOTHROW(qcs::branch_log(t, std::vector<Complex>{{1, 0}, {-1, 1e-3}}));
    try {
        qcs::branch_log(t, std::vector<Complex>{{1, 0}, {-1, 0}});
    } catch (const qcs::Error& e) {
        CHECK(e.kind() == qcs::ErrorKind::refinement_needed);
    }
    try {
        qcs::branch_log(t, std::vector<Complex>{{1, 0}, {0, 0}});
    } catch (const qcs::Error& e) {
        CHECK(e.kind() == qcs::ErrorKind::singular_point);
    }
    CHECK_THROWS_AS(qcs::branch_log(std::vector<double>{0.5, 1.0},
                                    std::vector<Complex>{{1, 0}, {1, 0}}),
                    qcs::Error);
}

TEST_CASE("property: random points of the theorem disk have slope within the rotation bound") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double k = 0.99 * u(rng);
        const auto d = qcs::theorem_disk(k);
        const Complex z = d.center() + std::polar(d.radius() * std::sqrt(u(rng)),
                                                  2.0 * std::numbers::pi * u(rng));
        CHECK(std::abs(z.imag() / z.real()) <= qcs::rotation_bound(k) + 1e-12);
    }
}
