#pragma once

// Complex-plane primitives, branch-tracked logarithms and the closed-form
// stretching/rotation bounds used as reference regions by the experiments.

#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcs {

using Complex = std::complex<double>;

enum class ErrorKind {
    domain,
    singular_point,
    refinement_needed,
    not_quasiconformal,
    degenerate_motion,
    construction,
    non_convergence,
    extrapolation,
    injectivity_violation,
    branch,
    cache_miss,
    precondition,
    config,
    io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Throws ErrorKind::domain when `z` has a NaN or infinite component.
void require_finite(Complex z, std::string_view what);
void require_finite(double x, std::string_view what);

class Interval {
public:
    Interval(double lo, double hi);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    double length() const noexcept { return hi_ - lo_; }
    bool contains(double x, double tol = 1e-9) const noexcept;

private:
    double lo_;
    double hi_;
};

class Disk {
public:
    Disk(Complex center, double radius);

    /// The closed disk whose real diameter is `diameter`.
    static Disk with_real_diameter(const Interval& diameter);

    Complex center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

    /// Distance from z to the closed disk (0 inside).
    double distance(Complex z) const noexcept;
    bool contains(Complex z, double tol = 1e-9) const noexcept;
    bool contains(const Disk& other, double tol = 1e-9) const noexcept;

    /// Intersection with the real axis; domain error if empty.
    Interval real_diameter() const;

    /// sup |Im w / Re w| over the disk. Infinite when the disk meets the
    /// imaginary axis.
    double max_slope() const noexcept;

private:
    Complex center_;
    double radius_;
};

/// Closed disk B(1/(1-k^4), k^2/(1-k^4)) containing the complex stretching
/// exponents of a k-quasiconformal map at almost every point of the line.
Disk theorem_disk(double k);

/// k^2 / sqrt(1 - k^4): the largest |Im w / Re w| over theorem_disk(k).
double rotation_bound(double k);

/// Real diameter of the exponent disk for s-dimensional sets, 0 <= s <= 2.
Interval general_diameter(double s, double k);

/// Upper bound for the dimension of the set where alpha(1 + i gamma) is a
/// stretching exponent. May be negative (no such points).
double aips_bound(double alpha, double gamma, double k);

struct BranchedLog {
    std::vector<double> t;       // strictly decreasing, t[0] is the anchor
    std::vector<Complex> value;  // continuous logarithm of the curve
};

/// Continuous logarithm of a curve sampled at decreasing parameters t.
/// Principal branch at t[0]; afterwards each sample takes the branch nearest
/// to its predecessor. Fails with refinement_needed when consecutive samples
/// differ in argument by at least `max_step`, and with singular_point on a
/// zero sample.
BranchedLog branch_log(std::span<const double> t, std::span<const Complex> curve,
                       double max_step = std::numbers::pi);

}  // namespace qcs
