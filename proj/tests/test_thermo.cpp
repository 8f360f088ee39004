#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qcs/thermo.hpp"

using qcs::Complex;

namespace {

qcs::MovedSystem moduli(std::vector<double> m) { return qcs::MovedSystem::from_moduli(std::move(m)); }

std::vector<double> random_moduli(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(2, 8);
    std::uniform_real_distribution<double> u(0.02, 0.6);
    std::vector<double> m(static_cast<std::size_t>(count(rng)));
    for (auto& v : m) {
        v = u(rng);
    }
    return m;
}

qcs::ProbabilityVector random_probability(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) {
        v = e(rng);
        s += v;
    }
    for (auto& v : p) {
        v /= s;
    }
    return qcs::ProbabilityVector(p);
}

}  // namespace

TEST_CASE("pressure of simple moduli systems") {
    CHECK(qcs::pressure(moduli({0.5, 0.5}), 0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(qcs::pressure(moduli({1.0 / 3, 1.0 / 3}), 0.0, std::log(2.0) / std::log(3.0))) <
          1e-12);
    CHECK(qcs::pressure(moduli({0.2}), 0.0, 0.7) == doctest::Approx(0.7 * std::log(0.2)));
}

TEST_CASE("Moran roots match closed forms") {
    CHECK(qcs::moran_dimension(moduli({0.5, 0.5}), 0.0).d == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qcs::moran_dimension(moduli({1.0 / 3, 1.0 / 3}), 0.0).d ==
          doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(qcs::moran_dimension(moduli({0.5, 0.25}), 0.0).d ==
          doctest::Approx(-std::log2(golden)).epsilon(1e-12));
}

TEST_CASE("Moran root agrees with a 50-digit oracle on random systems") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto m = random_moduli(rng);
        const auto root = qcs::moran_dimension(moduli(m), 0.0);
        if (!root.saturated) {
            CHECK(std::abs(root.d - oracle::moran_root(m)) < 1e-12);
        }
    }
}

TEST_CASE("Moran saturation cases") {
    const auto one = qcs::moran_dimension(moduli({0.4}), 0.0);
    CHECK(one.saturated);
    CHECK(one.d == 0.0);
    const auto big = qcs::moran_dimension(moduli(std::vector<double>(50, 0.9)), 0.0);
    CHECK(big.saturated);
    CHECK(big.d == 2.0);
}

TEST_CASE("Moran dimension ignores permutation and radius phases") {
    const std::vector<double> m{0.3, 0.1, 0.25};
    const auto a = qcs::moran_dimension(moduli(m), 0.0).d;
    const auto b = qcs::moran_dimension(moduli({0.25, 0.3, 0.1}), 0.0).d;
    CHECK(std::abs(a - b) < 1e-14);
    const auto rotated = qcs::MovedSystem::power_law(
        m, [](Complex lambda) { return Complex(1.0, 0.0) + Complex(0.0, lambda.real()); });
    CHECK(std::abs(qcs::moran_dimension(rotated, Complex(0.7, 0.0)).d - a) < 1e-14);
}

TEST_CASE("entropy values") {
    CHECK(qcs::entropy(qcs::ProbabilityVector::point_mass(3, 1)) == 0.0);
    CHECK(qcs::entropy(qcs::ProbabilityVector::uniform(4)) == doctest::Approx(std::log(4.0)));
    CHECK(qcs::entropy(qcs::ProbabilityVector({0.75, 0.25})) ==
          doctest::Approx(oracle::entropy({0.75, 0.25})).epsilon(1e-15));
}

TEST_CASE("invalid probability vectors are rejected") {
    CHECK_THROWS_AS(qcs::ProbabilityVector({0.5, 0.6}), qcs::Error);
    CHECK_THROWS_AS(qcs::ProbabilityVector({1.5, -0.5}), qcs::Error);
    CHECK_THROWS_AS(qcs::ProbabilityVector({}), qcs::Error);
}

TEST_CASE("Lyapunov exponent values") {
    const auto sys = moduli({1.0 / 3, 1.0 / 3});
    CHECK(qcs::lyapunov(sys, qcs::ProbabilityVector::uniform(2), 0.0) ==
          Complex(std::log(3.0), 0.0));
    CHECK(qcs::lyapunov(moduli({0.2, 0.5}), qcs::ProbabilityVector::point_mass(2, 1), 0.0).real() ==
          doctest::Approx(-std::log(0.5)));
}

TEST_CASE("power-law motion scales the Lyapunov exponent by tau(lambda)") {
    const Complex m = std::polar(0.3, 0.8);
    const double k = 0.3;
    const std::vector<double> radii{0.2, 0.05, 0.4};
    const auto sys = qcs::MovedSystem::power_law(
        radii, [&](Complex lambda) { return oracle::moved_tau(m, k, lambda); });
    const qcs::ProbabilityVector p({0.2, 0.3, 0.5});
    const Complex l0 = qcs::lyapunov(sys, p, 0.0);
    for (const Complex lambda : {Complex(0.1, 0.1), Complex(-0.25, 0.0), Complex(0.0, 0.29)}) {
        const Complex want = oracle::moved_tau(m, k, lambda) * l0;
        CHECK(std::abs(qcs::lyapunov(sys, p, lambda) - want) < 1e-12 * std::abs(want));
    }
}

TEST_CASE("maximizer for moduli {1/2, 1/4} at the Moran root is golden") {
    const auto sys = moduli({0.5, 0.25});
    const double d = qcs::moran_dimension(sys, 0.0).d;
    const auto p = qcs::maximizer(sys, d);
    const double u = (std::sqrt(5.0) - 1.0) / 2.0;
    CHECK(p[0] == doctest::Approx(u).epsilon(1e-10));
    CHECK(p[1] == doctest::Approx(u * u).epsilon(1e-10));
}

TEST_CASE("maximizer attains the pressure") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int i = 0; i < 20; ++i) {
        const auto m = random_moduli(rng);
        const auto sys = moduli(m);
        const double delta = u(rng);
        const auto p = qcs::maximizer(sys, delta);
        const double lhs = qcs::entropy(p) - delta * qcs::lyapunov(sys, p, 0.0).real();
        CHECK(std::abs(lhs - oracle::log_sum_pow(m, delta)) < 1e-12);
    }
}

TEST_CASE("phi at a Jensen-equality system equals 1 - delta") {
    const auto sys = moduli({1.0 / 3, 1.0 / 3});
    const double d = std::log(2.0) / std::log(3.0);
    const auto p = qcs::maximizer(sys, d);
    CHECK(std::abs(qcs::phi(sys, p, 0.0) - (1.0 - d)) < 1e-12);
    CHECK(qcs::phi(sys, qcs::ProbabilityVector::point_mass(2, 0), 0.0) == Complex(1.0, 0.0));
}

TEST_CASE("phi for uniform p over equal radii") {
    const double r = 0.1;
    const auto sys = moduli({r, r, r, r, r});
    const Complex got = qcs::phi(sys, qcs::ProbabilityVector::uniform(5), 0.0);
    CHECK(got.real() == doctest::Approx(1.0 - std::log(5.0) / -std::log(r)).epsilon(1e-14));
}

TEST_CASE("property: Jensen gap is nonnegative and vanishes only at the maximizer") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.05, 2.0);
    for (int i = 0; i < 300; ++i) {
        const auto m = random_moduli(rng);
        const auto sys = moduli(m);
        const double d = u(rng);
        const auto p = random_probability(rng, m.size());
        CHECK(qcs::jensen_gap(sys, p, 0.0, d) >= -1e-12);
        if (d <= 1.0) {
            CHECK(std::abs(qcs::jensen_gap(sys, qcs::maximizer(sys, d), 0.0, d)) < 1e-10);
        }
    }
}

TEST_CASE("property: pressure strictly decreases in d") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto sys = moduli(random_moduli(rng));
        double previous = qcs::pressure(sys, 0.0, 0.01);
        for (int j = 2; j <= 200; ++j) {
            const double value = qcs::pressure(sys, 0.0, 0.01 * j);
            CHECK(value < previous);
            previous = value;
        }
    }
}

TEST_CASE("disk systems validate containment and disjointness") {
    CHECK_NOTHROW(qcs::DiskSystem({{-0.5, 0.2}, {0.5, 0.2}}, 1.0));
    CHECK_THROWS_AS(qcs::DiskSystem({{-0.1, 0.2}, {0.1, 0.2}}, 1.0), qcs::Error);
    CHECK_THROWS_AS(qcs::DiskSystem({{0.9, 0.2}}, 1.0), qcs::Error);
    CHECK_THROWS_AS(qcs::DiskSystem({{0.0, 0.2}}, 0.0), qcs::Error);
}

TEST_CASE("motion-backed radii start real and follow the motion") {
    const qcs::DiskSystem base({{-0.5, 0.2}, {0.3, 0.1}}, 0.5);
    // phi_lambda(z) = z + lambda z^2 / 4 is a holomorphic family fixing 0
    const auto sys = qcs::MovedSystem::from_motion(
        base, [](Complex lambda, Complex z) { return z + lambda * z * z / 4.0; });
    const auto r0 = sys.radii(0.0);
    CHECK(std::abs(r0[0] - 0.1) < 1e-16);
    CHECK(r0[0].imag() == 0.0);
    CHECK(std::abs(r0[1] - Complex(0.05, 0.0)) < 1e-16);
    const Complex lambda(0.3, 0.4);
    const auto r = sys.radii(lambda);
    const Complex want = 0.5 * (0.1 + lambda * (0.4 * 0.4 - 0.3 * 0.3) / 4.0);
    CHECK(std::abs(r[1] - want) < 1e-15);
}

TEST_CASE("tabulated systems answer only at cached lambdas") {
    const auto sys = qcs::MovedSystem::tabulated(std::nullopt, {Complex(0.0, 0.0)},
                                                 {{Complex(std::log(0.5), 0.0)}});
    CHECK(qcs::pressure(sys, 0.0, 1.0) == doctest::Approx(std::log(0.5)));
    try {
        qcs::pressure(sys, Complex(0.1, 0.0), 1.0);
        FAIL("expected cache miss");
    } catch (const qcs::Error& e) {
        CHECK(e.kind() == qcs::ErrorKind::cache_miss);
    }
}

TEST_CASE("apu check at lambda = 0 and for a corrupted system") {
    const auto sys = moduli({1.0 / 3, 1.0 / 3});
    const auto p = qcs::maximizer(sys, std::log(2.0) / std::log(3.0));
    const std::vector<Complex> zero{Complex(0.0, 0.0)};
    const auto ok = qcs::apu_check(sys, p, 0.5, zero);
    CHECK(ok.front().inside);
    // exponents collapsing this fast in |lambda| are not a holomorphic motion
    const auto twisted = qcs::MovedSystem::power_law(
        {1.0 / 3, 1.0 / 3}, [](Complex lambda) { return Complex(1.0 - 10.0 * std::abs(lambda), 0.0); });
    const std::vector<Complex> small{Complex(0.05, 0.0)};
    const auto bad = qcs::apu_check(twisted, p, 0.5, small);
    CHECK_FALSE(bad.front().inside);
    CHECK(bad.front().margin < 0.0);
}

TEST_CASE("techni check: identity motion at delta = 1 witnesses b = 1") {
    const qcs::DiskSystem base({{-0.5, 0.25}, {0.5, 0.25}}, 2.0);
    const auto sys = qcs::MovedSystem::fixed(base);
    const auto rep = qcs::techni_check(sys, 0.3, 0.6, 1.0);
    CHECK(rep.ratio == Complex(1.0, 0.0));
    CHECK(rep.passed);
    CHECK(rep.asserted);
    CHECK(rep.s == doctest::Approx(0.25));
    CHECK(rep.witness_b == doctest::Approx(1.0));
}

TEST_CASE("techni check precondition and the delta < 1 diagnostic mode") {
    const qcs::DiskSystem base({{-0.5, 0.1}, {0.5, 0.1}}, 1.0);
    try {
        qcs::techni_check(qcs::MovedSystem::fixed(base), 0.3, 0.6, 1.0);
        FAIL("expected precondition failure");
    } catch (const qcs::Error& e) {
        CHECK(e.kind() == qcs::ErrorKind::precondition);
    }
    const auto rep = qcs::techni_check(qcs::MovedSystem::fixed(base), 0.3, 0.6, 0.3);
    CHECK_FALSE(rep.asserted);
}

TEST_CASE("IFS attractor of a single contraction is its fixed point") {
    const qcs::IfsSystem ifs{{Complex(0.5, 0.0)}, {Complex(0.0, 0.0)}};
    const auto pts = qcs::ifs_attractor(ifs, 6);
    REQUIRE(pts.size() == 1);
    CHECK(pts.front() == Complex(0.0, 0.0));
}

TEST_CASE("word fixed points lie near the depth-d attractor") {
    const qcs::IfsSystem ifs{{Complex(1.0 / 3, 0.0), Complex(0.0, 1.0 / 3)},
                             {Complex(0.0, 0.0), Complex(2.0 / 3, 0.1)}};
    const std::vector<int> word{0, 1};
    const Complex z = qcs::word_fixed_point(ifs, word);
    // closed form: gamma_0(gamma_1(z)) = z
    const Complex r0 = ifs.r[0], r1 = ifs.r[1], w0 = ifs.w[0], w1 = ifs.w[1];
    CHECK(std::abs(z - (r0 * w1 + w0) / (1.0 - r0 * r1)) < 1e-15);
    const int depth = 8;
    const auto pts = qcs::ifs_attractor(ifs, depth);
    double best = INFINITY;
    for (const auto& p : pts) {
        best = std::min(best, std::abs(p - z));
    }
    CHECK(best <= qcs::attractor_error_bound(ifs, depth) + 1e-15);
}

TEST_CASE("property: depth-(d+1) attractor stays within the telescoped bound") {
    const qcs::IfsSystem ifs{{Complex(0.3, 0.1), Complex(0.25, -0.2), Complex(0.2, 0.0)},
                             {Complex(-0.6, 0.0), Complex(0.1, 0.2), Complex(0.6, -0.1)}};
    const auto coarse = qcs::ifs_attractor(ifs, 5);
    const auto fine = qcs::ifs_attractor(ifs, 6);
    const double bound = qcs::attractor_error_bound(ifs, 5) + qcs::attractor_error_bound(ifs, 6);
    for (const auto& p : fine) {
        double best = INFINITY;
        for (const auto& q : coarse) {
            best = std::min(best, std::abs(p - q));
        }
        CHECK(best <= bound + 1e-15);
    }
}

TEST_CASE("non-contracting IFS is a domain error") {
    const qcs::IfsSystem ifs{{Complex(1.0, 0.0)}, {Complex(0.0, 0.0)}};
    CHECK_THROWS_AS(qcs::ifs_attractor(ifs, 3), qcs::Error);
}

TEST_CASE("box dimension of a segment, a square and the middle-thirds set") {
    std::vector<Complex> segment;
    for (double x : qcs::sample_segment(0.0, 1.0, 10000)) {
        segment.emplace_back(x, 0.0);
    }
    const auto seg = qcs::box_dimension(segment, qcs::dyadic_scales(segment, 6));
    CHECK(seg.dimension == doctest::Approx(1.0).epsilon(0.05));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Complex> square(10000);
    for (auto& z : square) {
        z = Complex(u(rng), u(rng));
    }
    const std::vector<double> sq_scales{0.25, 0.125, 0.0625, 0.03125};
    CHECK(qcs::box_dimension(square, sq_scales).dimension == doctest::Approx(2.0).epsilon(0.025));

    const qcs::IfsSystem cantor{{Complex(1.0 / 3, 0.0), Complex(1.0 / 3, 0.0)},
                                {Complex(0.0, 0.0), Complex(2.0 / 3, 0.0)}};
    const auto pts = qcs::ifs_attractor(cantor, 10);
    std::vector<double> scales;
    for (int i = 1; i <= 6; ++i) {
        scales.push_back(std::pow(3.0, -i) * 0.999);
    }
    const auto c = qcs::box_dimension(pts, scales);
    CHECK(std::abs(c.dimension - std::log(2.0) / std::log(3.0)) < 0.03);
}

TEST_CASE("box dimension degenerate and invalid inputs") {
    const std::vector<Complex> same(2000, Complex(0.3, 0.3));
    const std::vector<double> scales{0.5, 0.25, 0.125, 0.0625};
    const auto rep = qcs::box_dimension(same, scales);
    CHECK(rep.degenerate);
    CHECK(rep.dimension == 0.0);
    CHECK_THROWS_AS(qcs::box_dimension(std::vector<Complex>(10), scales), qcs::Error);
    CHECK_THROWS_AS(qcs::box_dimension(same, std::vector<double>{0.5, 0.25}), qcs::Error);
}

TEST_CASE("fat Cantor sampler stays inside the construction") {
    const auto xs = qcs::sample_fat_cantor(0.0, 1.0, 5000, 3);
    // the first removed gap is (3/8, 5/8)
    for (double x : xs) {
        CHECK((x <= 0.375 || x >= 0.625));
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    CHECK(std::is_sorted(xs.begin(), xs.end()));
}

TEST_CASE("image dimension of the identity passes for any k") {
    const auto xs = qcs::sample_segment(0.0, 1.0, 20000);
    const auto rep = qcs::image_dimension_experiment(qcs::identity_map(), 0.9, xs, {});
    CHECK(rep.passed);
    CHECK(rep.estimate.dimension == doctest::Approx(1.0).epsilon(0.02));
}
