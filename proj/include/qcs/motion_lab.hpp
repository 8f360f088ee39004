#pragma once

// Holomorphic motions phi_lambda with Beltrami coefficient lambda mu / k,
// discrete holomorphy diagnostics in lambda, the Schwarz-lemma step and the
// empirical envelope experiment for the constrained family of Lemma-type
// self maps of the disk.

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcs/beltrami_solver.hpp"
#include "qcs/model_maps.hpp"
#include "qcs/thermo.hpp"

namespace qcs {

/// lambda = rho * i/(points + 1) * exp(2 pi i r / rays), i = 1..points, r = 0..rays-1.
std::vector<Complex> ray_grid(double rho, int rays = 8, int points = 64);

/// lambda = radius * exp(2 pi i j / count), j = 0..count-1.
std::vector<Complex> circle_grid(double radius, int count);

class MotionFamily {
public:
    enum class Backend { spiral, annular, solver };

    static MotionFamily spiral(const SpiralMap& base);
    static MotionFamily annular(std::vector<AnnularBlock> blocks, Complex center = {0.0, 0.0});
    /// Solves the Beltrami equation for every lambda in `lambdas` (0 is always
    /// added). Evaluations at other lambdas raise ErrorKind::cache_miss.
    static MotionFamily solver(const BeltramiField& field, const GridGeometry& geometry,
                               std::vector<Complex> lambdas, double tol = 1e-10);

    Backend backend() const noexcept { return backend_; }
    double k() const noexcept { return k_; }
    const std::vector<Complex>& cached_lambdas() const noexcept { return lambdas_; }

    /// phi_lambda as a normalised map.
    PlanarMap at(Complex lambda) const;

private:
    MotionFamily() = default;

    Backend backend_ = Backend::spiral;
    double k_ = 0.0;
    std::optional<SpiralMap> spiral_;
    std::vector<AnnularBlock> blocks_;
    Complex center_{};
    std::vector<Complex> lambdas_;
    std::vector<std::shared_ptr<const PlanarMap>> maps_;
};

/// phi_lambda(z), normalised to fix 0 and 1.
Complex motion_eval(const MotionFamily& family, Complex lambda, Complex z);

/// Disk system moved by the family. Closed-form backends continue logs along
/// rays adaptively; the solver backend continues along the cached rays and
/// answers only at cached lambdas.
MovedSystem moved_system(const MotionFamily& family, const DiskSystem& base);

struct HoloSample {
    double radius = 0.0;
    Complex center_value;          // h(0)
    std::vector<Complex> circle;   // h(radius * exp(2 pi i j / N))
};

HoloSample sample_circle(const std::function<Complex(Complex)>& h, double radius, int count);

struct HoloReport {
    double mean_value_residual = 0.0;  // |h(0) - circle average|
    double tail_energy = 0.0;          // l2 norm of the upper half of the DFT coefficients
    bool holomorphic = false;
};

HoloReport holomorphy_diagnostic(const HoloSample& sample, double tolerance = 1e-8);

/// lambda -> log(phi_lambda(x + t) - phi_lambda(x)) / log t - 1 on the circle
/// of the given radius, the logarithm continued from lambda = 0 radially and
/// then around the circle.
HoloSample quotient_sample(const MotionFamily& family, double x, double t, double radius,
                           int count);

enum class CheckStatus { passed, failed, skipped };
std::string to_string(CheckStatus status);

struct SchwarzVerdict {
    CheckStatus status = CheckStatus::skipped;
    double value = 0.0;  // |g(k)|
    double bound = 0.0;  // k^2
    std::string reason;
};

/// Verifies |g(k)| <= k^2 + tolerance for g mapping the disk into its
/// closure with g(0) = 0 and g'(0) = 0. Failed preconditions give `skipped`.
SchwarzVerdict schwarz_check(const std::function<Complex(Complex)>& g, double k,
                             double tolerance = 1e-9);

struct SchwarzSummary {
    std::size_t tested = 0;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t skipped = 0;
    double max_excess = -INFINITY;  // max of |g(k)| - k^2 over checked functions
    SchwarzVerdict witness;         // g = z^2
};

/// Runs schwarz_check on z^2 and count - 1 seeded inner functions
/// e^{i theta} z^2 B_1(z) [B_2(z)] with Blaschke factors of zeros |c| <= 0.95.
SchwarzSummary schwarz_sample(int count, double k, std::uint64_t seed);

struct Lemma31Params {
    std::vector<double> epsilons{0.1, 0.03, 0.01};
    double k = 0.3;
    int candidates = 10000;
    std::uint64_t seed = 1;
    int circles = 8;
    int angles = 256;
    int boundary_points = 512;
    double envelope_factor = 3.0;  // envelope k^2 + factor * eps
};

struct Lemma31Row {
    double epsilon = 0.0;
    std::size_t accepted = 0;
    double max_abs_fk = 0.0;     // NaN when nothing was accepted
    std::int64_t argmax = -1;    // candidate index attaining the maximum
    double envelope = 0.0;
    bool within_envelope = false;
    bool witness_accepted = false;  // candidate 0 is z^2
    bool inconclusive = false;
};

struct Lemma31Result {
    Lemma31Params params;
    std::vector<Lemma31Row> rows;    // in the order of params.epsilons
    bool monotone = false;           // max |f(k)| non-increasing as eps decreases
    std::size_t constraint_passing = 0;
};

Lemma31Result lemma31_experiment(const Lemma31Params& params);

/// |f(z) - (1 - |z|^2)/2| <= (1 + |z|^2)/2 on `circles` circles of radius
/// i/circles times `angles` angles. z^2 touches the boundary at z = +-ir, hence
/// the rounding allowance.
bool lemma31_constraint(const std::function<Complex(Complex)>& f, int circles, int angles,
                        double tolerance = 1e-12);

}  // namespace qcs
