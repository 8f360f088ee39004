#include "qcs/core_geometry.hpp"

#include <cmath>
#include <limits>

namespace qcs {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::singular_point: return "singular_point";
        case ErrorKind::refinement_needed: return "refinement_needed";
        case ErrorKind::not_quasiconformal: return "not_quasiconformal";
        case ErrorKind::degenerate_motion: return "degenerate_motion";
        case ErrorKind::construction: return "construction";
        case ErrorKind::non_convergence: return "non_convergence";
        case ErrorKind::extrapolation: return "extrapolation";
        case ErrorKind::injectivity_violation: return "injectivity_violation";
        case ErrorKind::branch: return "branch";
        case ErrorKind::cache_miss: return "cache_miss";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::config: return "config";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void require_finite(Complex z, std::string_view what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw Error(ErrorKind::domain, std::string(what) + " is not finite");
    }
}

void require_finite(double x, std::string_view what) {
    if (!std::isfinite(x)) {
        throw Error(ErrorKind::domain, std::string(what) + " is not finite");
    }
}

namespace {

void require_k(double k) {
    require_finite(k, "k");
    if (k < 0.0 || k >= 1.0) {
        throw Error(ErrorKind::domain, "k must lie in [0, 1), got " + std::to_string(k));
    }
}

}  // namespace

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
    require_finite(lo, "interval lower end");
    require_finite(hi, "interval upper end");
    if (lo > hi) {
        throw Error(ErrorKind::domain, "interval with lo > hi");
    }
}

bool Interval::contains(double x, double tol) const noexcept {
    return x >= lo_ - tol && x <= hi_ + tol;
}

Disk::Disk(Complex center, double radius) : center_(center), radius_(radius) {
    require_finite(center, "disk center");
    require_finite(radius, "disk radius");
    if (radius < 0.0) {
        throw Error(ErrorKind::domain, "negative disk radius");
    }
}

Disk Disk::with_real_diameter(const Interval& diameter) {
    return Disk(Complex(0.5 * (diameter.lo() + diameter.hi()), 0.0), 0.5 * diameter.length());
}

double Disk::distance(Complex z) const noexcept {
    const double d = std::abs(z - center_) - radius_;
    return d > 0.0 ? d : 0.0;
}

bool Disk::contains(Complex z, double tol) const noexcept {
    return std::abs(z - center_) <= radius_ + tol;
}

bool Disk::contains(const Disk& other, double tol) const noexcept {
    return std::abs(other.center_ - center_) + other.radius_ <= radius_ + tol;
}

Interval Disk::real_diameter() const {
    const double y = center_.imag();
    if (std::abs(y) > radius_) {
        throw Error(ErrorKind::domain, "disk does not meet the real axis");
    }
    const double half = std::sqrt(radius_ * radius_ - y * y);
    return {center_.real() - half, center_.real() + half};
}

double Disk::max_slope() const noexcept {
    const double m = std::abs(center_);
    if (radius_ >= m) {
        return std::numeric_limits<double>::infinity();
    }
    const double spread = std::asin(radius_ / m);
    const double arg = std::arg(center_);
    const double lo = arg - spread;
    const double hi = arg + spread;
    constexpr double half_pi = std::numbers::pi / 2.0;
    // |tan| is unbounded if the arc of directions crosses +-pi/2.
    for (double pole : {-3.0 * half_pi, -half_pi, half_pi, 3.0 * half_pi}) {
        if (lo <= pole && pole <= hi) {
            return std::numeric_limits<double>::infinity();
        }
    }
    return std::max(std::abs(std::tan(lo)), std::abs(std::tan(hi)));
}

Disk theorem_disk(double k) {
    require_k(k);
    const double k2 = k * k;
    const double denom = 1.0 - k2 * k2;
    return Disk(Complex(1.0 / denom, 0.0), k2 / denom);
}

double rotation_bound(double k) {
    require_k(k);
    const double k2 = k * k;
    return k2 / std::sqrt(1.0 - k2 * k2);
}

Interval general_diameter(double s, double k) {
    require_k(k);
    require_finite(s, "s");
    if (s < 0.0 || s > 2.0) {
        throw Error(ErrorKind::domain, "s must lie in [0, 2]");
    }
    const double lo = (1.0 - k) / (1.0 + k) + k * s / (1.0 + k);
    const double hi = (1.0 + k) / (1.0 - k) - k * s / (1.0 - k);
    return {lo, hi};
}

double aips_bound(double alpha, double gamma, double k) {
    require_finite(alpha, "alpha");
    require_finite(gamma, "gamma");
    require_finite(k, "k");
    if (alpha <= 0.0) {
        throw Error(ErrorKind::domain, "alpha must be positive");
    }
    if (k <= 0.0 || k >= 1.0) {
        throw Error(ErrorKind::domain, "k must lie in (0, 1)");
    }
    const double a = 1.0 - alpha;
    const double b = alpha * gamma;
    return 1.0 + alpha - std::sqrt(a * a + (1.0 - k * k) * b * b) / k;
}

BranchedLog branch_log(std::span<const double> t, std::span<const Complex> curve, double max_step) {
    if (t.size() != curve.size()) {
        throw Error(ErrorKind::domain, "branch_log: parameter and curve lengths differ");
    }
    BranchedLog out;
    out.t.reserve(t.size());
    out.value.reserve(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        require_finite(t[i], "curve parameter");
        require_finite(curve[i], "curve point");
        if (!(t[i] > 0.0)) {
            throw Error(ErrorKind::domain, "branch_log: parameters must be positive");
        }
        if (i > 0 && !(t[i] < t[i - 1])) {
            throw Error(ErrorKind::domain, "branch_log: parameters must decrease");
        }
        if (curve[i] == Complex(0.0, 0.0)) {
            throw Error(ErrorKind::singular_point,
                        "branch_log: curve passes through 0 at t=" + std::to_string(t[i]));
        }
        Complex value = std::log(curve[i]);
        if (i > 0) {
            // nearest-branch step relative to the previous sample
            const double step = std::arg(curve[i] / curve[i - 1]);
            if (std::abs(step) >= max_step) {
                throw Error(ErrorKind::refinement_needed,
                            "branch_log: angular jump " + std::to_string(step) + " at t=" +
                                std::to_string(t[i]));
            }
            // snap to the principal argument plus a whole number of turns so
            // rounding does not accumulate along long curves
            const double target = out.value.back().imag() + step;
            const double turns = std::round((target - value.imag()) / (2.0 * std::numbers::pi));
            value = Complex(value.real(), value.imag() + 2.0 * std::numbers::pi * turns);
        }
        out.t.push_back(t[i]);
        out.value.push_back(value);
    }
    return out;
}

}  // namespace qcs
