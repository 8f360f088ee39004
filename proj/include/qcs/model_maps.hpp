#pragma once

// Closed-form quasiconformal model maps: complex power (spiral) maps, radial
// compositions of spirals on nested annuli, their Beltrami coefficients and
// the holomorphic motions obtained by scaling those coefficients.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qcs/core_geometry.hpp"

namespace qcs {

/// f(z) = center + omega * (z - center)/|z - center| * |z - center|^tau.
/// tau = alpha(1 + i gamma) with alpha > 0.
class SpiralMap {
public:
    explicit SpiralMap(Complex tau, Complex omega = {1.0, 0.0}, Complex center = {0.0, 0.0});

    Complex tau() const noexcept { return tau_; }
    Complex omega() const noexcept { return omega_; }
    Complex center() const noexcept { return center_; }

    /// m = (tau - 1)/(tau + 1); the Beltrami coefficient is m (z-c)/conj(z-c).
    Complex beltrami_factor() const noexcept;

private:
    Complex tau_;
    Complex omega_;
    Complex center_;
};

/// |tau - 1| / |tau + 1|
double spiral_norm(Complex tau);

/// Inverse of m = (tau - 1)/(tau + 1).
Complex tau_from_factor(Complex m);

Complex spiral_eval(const SpiralMap& map, Complex z);

/// Square lattice of n x n nodes z = (xmin + col h) + i (ymin + row h),
/// h = side / n, stored row-major.
struct GridGeometry {
    int n = 0;
    double xmin = 0.0;
    double ymin = 0.0;
    double side = 0.0;

    double cell() const noexcept { return side / n; }
    Complex node(int row, int col) const noexcept {
        return {xmin + col * cell(), ymin + row * cell()};
    }
    void validate() const;
};

/// One annulus r_inner <= |z - c| <= r_outer carrying a spiral with exponent tau.
struct AnnularBlock {
    double r_inner = 0.0;
    double r_outer = 0.0;
    Complex tau{1.0, 0.0};
};

class BeltramiField {
public:
    enum class Kind { zero, constant, spiral, annular, grid };

    static BeltramiField zero();
    static BeltramiField constant(Complex c);
    /// m (z - center) / conj(z - center)
    static BeltramiField spiral(Complex m, Complex center);
    /// Piecewise spiral coefficients restricted to the annuli of `blocks`.
    static BeltramiField annular(std::vector<AnnularBlock> blocks, Complex center);
    /// Piecewise constant on lattice cells centred at the nodes; zero outside.
    static BeltramiField grid(GridGeometry geometry, std::vector<Complex> samples);

    Kind kind() const noexcept { return kind_; }
    /// ess-sup |mu|
    double norm_bound() const noexcept { return norm_bound_; }
    Complex operator()(Complex z) const;

    /// factor * mu. Fails with not_quasiconformal when the result has norm >= 1.
    BeltramiField scaled(Complex factor) const;

    Complex constant_value() const noexcept { return value_; }
    Complex center() const noexcept { return center_; }
    std::span<const AnnularBlock> blocks() const noexcept { return blocks_; }
    const GridGeometry& geometry() const noexcept { return geometry_; }
    std::span<const Complex> samples() const noexcept { return samples_; }

private:
    BeltramiField() = default;

    Kind kind_ = Kind::zero;
    double norm_bound_ = 0.0;
    Complex value_{};   // constant value or spiral factor m
    Complex center_{};
    std::vector<AnnularBlock> blocks_;
    GridGeometry geometry_{};
    std::vector<Complex> samples_;
};

/// mu(z) = ((tau - 1)/(tau + 1)) (z - z0)/conj(z - z0).
/// Fails with not_quasiconformal when |tau - 1| >= |tau + 1|.
BeltramiField spiral_beltrami(const SpiralMap& map);

/// The spiral whose coefficient is lambda mu / k, i.e.
/// tau(lambda) = (1 + m lambda/k)/(1 - m lambda/k). Fails with
/// degenerate_motion when |m lambda / k| >= 1.
SpiralMap spiral_motion(const SpiralMap& map, double k, Complex lambda);

/// Each block's coefficient multiplied by lambda / k.
std::vector<AnnularBlock> annular_motion(std::span<const AnnularBlock> blocks, double k,
                                         Complex lambda);

enum class Provenance { closed_form, solver };

/// A quasiconformal map of the plane normalised by affine post-composition
/// so that f(0) = 0 and f(1) = 1.
class PlanarMap {
public:
    using Evaluator = std::function<Complex(Complex)>;

    struct Options {
        std::string description;
        std::vector<Complex> exceptional_points;
        double resolution_floor = 0.0;  // smallest reliable increment scale
        std::function<bool(Complex)> domain;  // empty: whole plane
        // raw f(z + t) - f(z) without cancellation; empty: plain difference
        std::function<Complex(Complex, Complex)> increment;
    };

    PlanarMap(Evaluator raw, BeltramiField field, Provenance provenance, Options options);

    Complex operator()(Complex z) const;
    Complex raw(Complex z) const { return (*raw_)(z); }
    /// Normalised f(z + t) - f(z).
    Complex increment(Complex z, Complex t) const;

    const BeltramiField& beltrami() const noexcept { return field_; }
    double k() const noexcept { return field_.norm_bound(); }
    Provenance provenance() const noexcept { return provenance_; }
    const std::string& description() const noexcept { return options_.description; }
    std::span<const Complex> exceptional_points() const noexcept {
        return options_.exceptional_points;
    }
    double resolution_floor() const noexcept { return options_.resolution_floor; }
    bool in_domain(Complex z) const { return !options_.domain || options_.domain(z); }

    /// True when the raw evaluator needed an affine correction.
    bool affinely_normalized() const noexcept { return affine_; }

private:
    std::shared_ptr<const Evaluator> raw_;
    BeltramiField field_;
    Provenance provenance_;
    Options options_;
    Complex offset_{};
    Complex scale_{1.0, 0.0};
    bool affine_ = false;
};

PlanarMap identity_map();
PlanarMap spiral_map(const SpiralMap& map);

/// Radially piecewise spiral map. Blocks must be nested and disjoint; outside
/// the outermost annulus the map is the identity, between and inside annuli it
/// is a similarity chosen so the map is continuous.
PlanarMap annular_compose(std::vector<AnnularBlock> blocks, Complex center = {0.0, 0.0});

/// Sup over random triples z, x, y in the closed disk of `radius` with
/// |x - z| <= |y - z| of |f(x) - f(z)| / |f(y) - f(z)|: a finite surrogate
/// for eta(1).
double quasisymmetry_surrogate(const std::function<Complex(Complex)>& f, int triples,
                               std::uint64_t seed, double radius = 1.0);

}  // namespace qcs
