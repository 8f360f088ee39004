#pragma once

// Thermodynamic formalism for families of real-line disk systems: pressure,
// Moran dimension, entropy, complex Lyapunov exponents, the function
// Phi = 1 - I_p / Lambda_p and its disk inclusions, plus similarity IFS
// attractors and box-counting dimension.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcs/core_geometry.hpp"
#include "qcs/model_maps.hpp"

namespace qcs {

struct DiskEntry {
    double x = 0.0;
    double r = 0.0;
};

/// Disjoint disks B(x_j, r_j) inside the unit disk, centred on the real line,
/// together with the scale constant a.
class DiskSystem {
public:
    DiskSystem(std::vector<DiskEntry> entries, double a);

    std::span<const DiskEntry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    double a() const noexcept { return a_; }
    /// sum_j (a r_j)^d
    double scaled_sum(double d) const;

private:
    std::vector<DiskEntry> entries_;
    double a_;
};

/// Complex radii r_j(lambda) of a disk system moved by a family of maps, with
/// logarithms continued from the real branch at lambda = 0.
class MovedSystem {
public:
    using LogRadii = std::function<std::vector<Complex>(Complex)>;
    using Centers = std::function<std::vector<Complex>(Complex)>;

    /// r_j(lambda) = a (phi_lambda(x_j + r_j) - phi_lambda(x_j)); phi_0 must be
    /// the identity so that r_j(0) = a r_j. Logs are continued along the ray
    /// from 0 with step halving whenever a phase jump reaches pi/2.
    static MovedSystem from_motion(DiskSystem base,
                                   std::function<Complex(Complex, Complex)> phi);
    /// lambda-independent radii a r_j.
    static MovedSystem fixed(DiskSystem base);
    /// r_j(lambda) = rho_j^{tau(lambda)} for positive moduli rho_j.
    static MovedSystem power_law(std::vector<double> moduli, std::function<Complex(Complex)> tau);
    /// Constant positive radii without any disk geometry (oracle systems).
    static MovedSystem from_moduli(std::vector<double> moduli);
    /// Precomputed logs at finitely many lambda values; other lambdas raise
    /// ErrorKind::cache_miss.
    static MovedSystem tabulated(std::optional<DiskSystem> base, std::vector<Complex> lambdas,
                                 std::vector<std::vector<Complex>> log_radii);

    std::size_t size() const noexcept { return count_; }
    const std::optional<DiskSystem>& base() const noexcept { return base_; }
    std::vector<Complex> log_radii(Complex lambda) const;
    std::vector<Complex> radii(Complex lambda) const;
    /// Centres w_j(lambda) = sqrt(a) phi_lambda(x_j); only for motion-backed systems.
    std::vector<Complex> centers(Complex lambda) const;
    bool has_centers() const noexcept { return static_cast<bool>(centers_); }

private:
    MovedSystem(std::optional<DiskSystem> base, std::size_t count, LogRadii logs, Centers centers);

    std::optional<DiskSystem> base_;
    std::size_t count_ = 0;
    LogRadii logs_;
    Centers centers_;
};

class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<double> p);
    static ProbabilityVector uniform(std::size_t n);
    static ProbabilityVector point_mass(std::size_t n, std::size_t j);

    std::span<const double> values() const noexcept { return p_; }
    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }

private:
    std::vector<double> p_;
};

/// log sum_j |r_j(lambda)|^d
double pressure(const MovedSystem& system, Complex lambda, double d);

struct MoranRoot {
    double d = 0.0;
    bool saturated = false;
};

/// Root of d -> pressure(lambda, d) by bisection on [1e-9, 2].
MoranRoot moran_dimension(const MovedSystem& system, Complex lambda);

/// -sum p_j log p_j
double entropy(const ProbabilityVector& p);

/// -sum p_j log r_j(lambda) on the continued branch.
Complex lyapunov(const MovedSystem& system, const ProbabilityVector& p, Complex lambda);

/// p_j proportional to |r_j(0)|^delta.
ProbabilityVector maximizer(const MovedSystem& system, double delta);

/// 1 - I_p / Lambda_p(lambda)
Complex phi(const MovedSystem& system, const ProbabilityVector& p, Complex lambda);

/// pressure(lambda, d) - (I_p - d Re Lambda_p(lambda)); nonnegative by Jensen.
double jensen_gap(const MovedSystem& system, const ProbabilityVector& p, Complex lambda, double d);

struct ApuVerdict {
    Complex lambda;
    Complex phi;
    double margin = 0.0;  // radius minus distance to the centre
    bool inside = false;
};

/// Checks Phi(lambda) against the closed disk with real diameter
/// [-|lambda|^2/rho^2, 1] for every lambda (all |lambda| < rho).
std::vector<ApuVerdict> apu_check(const MovedSystem& system, const ProbabilityVector& p,
                                  double rho, std::span<const Complex> lambdas,
                                  double tolerance = 1e-9);

struct TechniReport {
    double s = 0.0;
    double entropy = 0.0;
    Complex lyapunov_0;
    Complex lyapunov_k;
    Complex ratio;               // Lambda_p(k) / Lambda_p(0)
    double real_part_margin = 0.0;  // Re(I_p / Lambda_p(k)) - (1 - s)
    double union_margin = 0.0;      // best over b of radius - distance
    double witness_b = 1.0;
    bool asserted = false;          // only delta = 1 is asserted
    bool passed = false;
};

/// p = maximizer(delta), s = (k/rho)^2 + r_term; membership of the Lyapunov
/// ratio in the union over b in [delta, 1] of closed disks
/// B(b/(1-s^2), b s/(1-s^2)).
TechniReport techni_check(const MovedSystem& system, double k, double rho, double delta,
                          double r_term = 0.0, double tolerance = 1e-9);

/// Similarities gamma_j(z) = r_j z + w_j.
struct IfsSystem {
    std::vector<Complex> r;
    std::vector<Complex> w;

    void validate() const;
    double max_contraction() const;
    /// Radius of a disk about 0 mapped into itself by every gamma_j.
    double invariant_radius() const;
    /// min over pairs of |w_i - w_j| - |r_i| - |r_j| (gaps between images of the unit disk).
    double separation_gap() const;
};

IfsSystem ifs_at(const MovedSystem& system, Complex lambda);

/// gamma_w(0) over all words of length depth, in lexicographic order.
std::vector<Complex> ifs_attractor(const IfsSystem& ifs, int depth);

/// Hausdorff distance bound between ifs_attractor(depth) and the attractor.
double attractor_error_bound(const IfsSystem& ifs, int depth);

/// Fixed point of gamma_{w_1} o ... o gamma_{w_n}.
Complex word_fixed_point(const IfsSystem& ifs, std::span<const int> word);

struct BoxDimension {
    double dimension = 0.0;
    std::vector<double> scales;
    std::vector<std::size_t> counts;
    bool degenerate = false;
};

/// Least-squares slope of log N(eps) against log(1/eps).
BoxDimension box_dimension(std::span<const Complex> points, std::span<const double> scales);

/// diameter * 2^{-first}, ..., diameter * 2^{-(first + count - 1)}
std::vector<double> dyadic_scales(std::span<const Complex> points, int count, int first = 2);

/// n evenly spaced midpoints of [lo, hi].
std::vector<double> sample_segment(double lo, double hi, std::size_t n);

/// n points spread evenly over the level-`levels` intervals of the
/// Smith-Volterra-Cantor construction on [lo, hi] (middle gaps of relative
/// length 4^{-level}).
std::vector<double> sample_fat_cantor(double lo, double hi, std::size_t n, int levels = 8);

struct ImageDimensionReport {
    BoxDimension estimate;
    double bound = 0.0;  // 1 - k^2
    bool passed = false;
};

/// Box dimension of f(A) against 1 - k^2 with slack 0.05.
ImageDimensionReport image_dimension_experiment(const PlanarMap& f, double k,
                                                std::span<const double> sample,
                                                std::span<const double> scales);

}  // namespace qcs
