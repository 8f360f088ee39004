#pragma once

// Principal solution of the Beltrami equation f_zbar = mu f_z for coefficients
// sampled on a square lattice. The density h = f_zbar solves the fixed point
// problem h = mu S h + mu, where S (the Beurling transform) acts on the
// periodised lattice as the Fourier multiplier conj(zeta)/zeta. The map is
// recovered as f = z + C h, C being the Cauchy transform with multiplier
// 1/(pi i zeta); the mean of h is integrated exactly as mean(h) * conj(z).

#include <filesystem>
#include <memory>
#include <vector>

#include "qcs/core_geometry.hpp"
#include "qcs/model_maps.hpp"

namespace qcs {

/// Lattice used when nothing else is configured: n = 1024 on [-4, 4]^2.
GridGeometry default_solver_geometry();

struct SolverGrid {
    GridGeometry geometry;
    std::vector<Complex> samples;  // row-major n*n
    double k = 0.0;                // max |sample|
    bool global_constant = false;  // uniform coefficient on the whole torus
    bool truncated = false;        // coefficient cut off near the box edge

    /// Cell averages of `field` over supersample^2 sub-points per cell.
    /// Fields whose support reaches the box edge are truncated to
    /// `edge_margin` cells inside it. Constant fields give the global
    /// constant test mode.
    static SolverGrid from_field(const BeltramiField& field, GridGeometry geometry,
                                 int supersample = 4, int edge_margin = 8);

    /// factor * mu on the same lattice.
    SolverGrid scaled(Complex factor) const;

    void validate() const;
};

class SolverError : public Error {
public:
    SolverError(const std::string& message, std::vector<double> residual_history);
    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

struct SolverSolution {
    GridGeometry geometry;
    double k = 0.0;
    std::vector<Complex> mu;          // coefficient samples
    std::vector<Complex> h;           // f_zbar on the lattice
    std::vector<Complex> correction;  // periodic part of C h
    Complex mean_h{};
    int iterations = 0;
    std::vector<double> residual_history;  // ||h - mu S h - mu|| / ||mu|| per step
    int interpolation_order = 3;
    bool global_constant = false;
    bool truncated = false;
};

/// Neumann iteration to relative residual `tol`. The budget is
/// ceil(log tol / log k) + margin steps; exceeding it raises SolverError.
SolverSolution solve_principal(const SolverGrid& grid, double tol = 1e-10, int margin = 10);

/// Unnormalised z + (C h)(z), bicubic in the lattice. Points closer than two
/// cells to the box edge raise ErrorKind::extrapolation.
Complex evaluate_raw(const SolverSolution& solution, Complex z);

/// evaluate_raw followed by the affine normalisation f(0) = 0, f(1) = 1.
Complex evaluate_map(const SolverSolution& solution, Complex z);

/// Wraps a solution as a PlanarMap with resolution floor 10 cells.
PlanarMap solver_map(std::shared_ptr<const SolverSolution> solution);

/// Little-endian interleaved (re, im) doubles, row-major, plus a JSON sidecar
/// {"n", "box": [xmin, xmax, ymin, ymax], "k"}.
void write_grid(const GridGeometry& geometry, const std::vector<Complex>& values, double k,
                const std::filesystem::path& binary, const std::filesystem::path& sidecar);
SolverGrid read_grid(const std::filesystem::path& binary, const std::filesystem::path& sidecar);

}  // namespace qcs
