#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <memory>

#include "qcs/beltrami_solver.hpp"

using qcs::Complex;

namespace {

qcs::GridGeometry small_box(int n) { return {.n = n, .xmin = -4.0, .ymin = -4.0, .side = 8.0}; }

double sup_error(const qcs::PlanarMap& f, const std::function<Complex(Complex)>& exact, double lo,
                 double hi, int count) {
    double err = 0.0;
    for (int i = 0; i <= count; ++i) {
        for (int j = 0; j <= count; ++j) {
            const Complex z(lo + (hi - lo) * i / count, lo + (hi - lo) * j / count);
            err = std::max(err, std::abs(f(z) - exact(z)));
        }
    }
    return err;
}

}  // namespace

TEST_CASE("zero coefficient gives the identity") {
    const auto grid = qcs::SolverGrid::from_field(qcs::BeltramiField::zero(), small_box(64));
    auto sol = std::make_shared<const qcs::SolverSolution>(qcs::solve_principal(grid));
    CHECK(sol->iterations == 0);
    const auto f = qcs::solver_map(sol);
    CHECK(f(Complex(0.3, -1.2)) == Complex(0.3, -1.2));
}

TEST_CASE("constant coefficient reproduces (z + c conj z)/(1 + c)") {
    const Complex c(0.2, 0.0);
    const auto grid = qcs::SolverGrid::from_field(qcs::BeltramiField::constant(c), small_box(128));
    CHECK(grid.global_constant);
    auto sol = std::make_shared<const qcs::SolverSolution>(qcs::solve_principal(grid));
    const auto f = qcs::solver_map(sol);
    CHECK(std::abs(f(Complex(0.0, 1.0)) - Complex(0.0, 2.0 / 3.0)) < 1e-12);
    const double err = sup_error(
        f, [&](Complex z) { return (z + c * std::conj(z)) / (1.0 + c); }, -3.0, 3.0, 40);
    CHECK(err < 1e-10);
}

TEST_CASE("annulus spiral coefficient converges to the closed form under refinement") {
    const std::vector<qcs::AnnularBlock> blocks{{0.25, 0.5, Complex(2.0, 0.0)}};
    const auto exact = qcs::annular_compose(blocks);
    double previous = INFINITY;
    for (int n : {128, 256}) {
        const auto grid = qcs::SolverGrid::from_field(exact.beltrami(), small_box(n));
        CHECK_FALSE(grid.truncated);
        auto sol = std::make_shared<const qcs::SolverSolution>(qcs::solve_principal(grid));
        const auto f = qcs::solver_map(sol);
        const double err = sup_error(f, [&](Complex z) { return exact(z); }, -1.0, 1.0, 60);
        CHECK(err < previous);
        previous = err;
    }
    CHECK(previous < 1e-2);
}

TEST_CASE("Neumann residual contracts at rate at most k + 0.05") {
    const auto field = qcs::BeltramiField::annular(
        {{0.2, 0.9, qcs::tau_from_factor(std::polar(0.7, 0.3))}}, Complex{});
    const auto grid = qcs::SolverGrid::from_field(field, small_box(128));
    const auto sol = qcs::solve_principal(grid);
    REQUIRE(sol.residual_history.size() >= 2);
    for (std::size_t i = 1; i < sol.residual_history.size(); ++i) {
        CHECK(sol.residual_history[i] <= (grid.k + 0.05) * sol.residual_history[i - 1]);
    }
    CHECK(sol.residual_history.back() <= 1e-10);
}

TEST_CASE("iteration budget exhaustion raises a solver error with history") {
    const auto field = qcs::BeltramiField::annular(
        {{0.2, 0.9, qcs::tau_from_factor(std::polar(0.7, 0.3))}}, Complex{});
    const auto grid = qcs::SolverGrid::from_field(field, small_box(64));
    try {
        // rounding keeps the residual far above this tolerance
        qcs::solve_principal(grid, 1e-300, 0);
        FAIL("expected non-convergence");
    } catch (const qcs::SolverError& e) {
        CHECK(e.kind() == qcs::ErrorKind::non_convergence);
        CHECK_FALSE(e.residual_history().empty());
    }
}

TEST_CASE("support touching the box edge is truncated and reported") {
    const auto field = qcs::BeltramiField::spiral(Complex(0.3, 0.0), Complex{});
    const auto grid = qcs::SolverGrid::from_field(field, small_box(64));
    CHECK(grid.truncated);
    CHECK_NOTHROW(grid.validate());
}

TEST_CASE("evaluation near the box edge is an extrapolation error") {
    const auto grid = qcs::SolverGrid::from_field(qcs::BeltramiField::zero(), small_box(64));
    const auto sol = qcs::solve_principal(grid);
    try {
        qcs::evaluate_raw(sol, Complex(3.95, 0.0));
        FAIL("expected extrapolation error");
    } catch (const qcs::Error& e) {
        CHECK(e.kind() == qcs::ErrorKind::extrapolation);
    }
}

TEST_CASE("motion scaling at lambda = k reproduces the base solve") {
    const double k = 0.4;
    const auto field = qcs::BeltramiField::annular(
        {{0.25, 0.5, qcs::tau_from_factor(std::polar(k, 0.5))}}, Complex{});
    const auto grid = qcs::SolverGrid::from_field(field, small_box(64));
    const auto a = qcs::solve_principal(grid);
    const auto b = qcs::solve_principal(grid.scaled(Complex(k, 0.0) / k));
    CHECK(a.h == b.h);
}

TEST_CASE("grid files round-trip") {
    const auto field = qcs::BeltramiField::annular({{0.25, 0.5, Complex(2.0, 0.0)}}, Complex{});
    const auto grid = qcs::SolverGrid::from_field(field, small_box(32));
    const auto dir = std::filesystem::temp_directory_path() / "qcs_grid_roundtrip";
    std::filesystem::create_directories(dir);
    qcs::write_grid(grid.geometry, grid.samples, grid.k, dir / "mu.bin", dir / "mu.json");
    const auto back = qcs::read_grid(dir / "mu.bin", dir / "mu.json");
    CHECK(back.geometry.n == 32);
    CHECK(back.geometry.xmin == -4.0);
    CHECK(back.samples == grid.samples);
    CHECK(std::filesystem::file_size(dir / "mu.bin") == 32u * 32u * 16u);
    std::filesystem::remove_all(dir);
}

TEST_CASE("grids with |mu| >= 1 are rejected") {
    qcs::SolverGrid grid;
    grid.geometry = small_box(8);
    grid.samples.assign(64, Complex{});
    grid.samples[27] = Complex(1.0, 0.0);
    grid.k = 1.0;
    try {
        grid.validate();
        FAIL("expected rejection");
    } catch (const qcs::Error& e) {
        CHECK(e.kind() == qcs::ErrorKind::not_quasiconformal);
    }
}
