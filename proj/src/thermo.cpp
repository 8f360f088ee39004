#include "qcs/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>

#include "qcs/parallel.hpp"

namespace qcs {

DiskSystem::DiskSystem(std::vector<DiskEntry> entries, double a)
    : entries_(std::move(entries)), a_(a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw Error(ErrorKind::domain, "scale constant a must be positive");
    }
    if (entries_.empty()) {
        throw Error(ErrorKind::domain, "disk system is empty");
    }
    for (const auto& e : entries_) {
        require_finite(e.x, "disk centre");
        if (!(e.r > 0.0)) {
            throw Error(ErrorKind::domain, "disk radii must be positive");
        }
        if (std::abs(e.x) + e.r >= 1.0) {
            throw Error(ErrorKind::domain, "disk B(" + std::to_string(e.x) + ", " +
                                               std::to_string(e.r) +
                                               ") is not inside the unit disk");
        }
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            if (std::abs(entries_[i].x - entries_[j].x) <= entries_[i].r + entries_[j].r) {
                throw Error(ErrorKind::domain, "disks " + std::to_string(i) + " and " +
                                                   std::to_string(j) + " overlap");
            }
        }
    }
}

double DiskSystem::scaled_sum(double d) const {
    double s = 0.0;
    for (const auto& e : entries_) {
        s += std::pow(a_ * e.r, d);
    }
    return s;
}

MovedSystem::MovedSystem(std::optional<DiskSystem> base, std::size_t count, LogRadii logs,
                         Centers centers)
    : base_(std::move(base)), count_(count), logs_(std::move(logs)), centers_(std::move(centers)) {}

namespace {

std::vector<double> positive_moduli(std::vector<double> moduli) {
    if (moduli.empty()) {
        throw Error(ErrorKind::domain, "system has no entries");
    }
    for (double m : moduli) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw Error(ErrorKind::domain, "radius moduli must be positive");
        }
    }
    return moduli;
}

}  // namespace

MovedSystem MovedSystem::from_motion(DiskSystem base,
                                     std::function<Complex(Complex, Complex)> phi) {
    const double a = base.a();
    std::vector<DiskEntry> entries(base.entries().begin(), base.entries().end());
    auto radii_at = [phi, entries, a](Complex lambda) {
        std::vector<Complex> r(entries.size());
        for (std::size_t j = 0; j < entries.size(); ++j) {
            const Complex x(entries[j].x, 0.0);
            r[j] = a * (phi(lambda, x + entries[j].r) - phi(lambda, x));
            require_finite(r[j], "moved radius");
            if (r[j] == Complex(0.0, 0.0)) {
                throw Error(ErrorKind::singular_point, "moved radius vanished");
            }
        }
        return r;
    };
    auto logs = [radii_at](Complex lambda) {
        const std::vector<Complex> r0 = radii_at(Complex(0.0, 0.0));
        std::vector<Complex> anchor(r0.size());
        for (std::size_t j = 0; j < r0.size(); ++j) {
            if (r0[j].real() <= 0.0 || std::abs(r0[j].imag()) > 1e-12 * std::abs(r0[j])) {
                throw Error(ErrorKind::branch, "radius at lambda = 0 is not real positive");
            }
            anchor[j] = Complex(std::log(std::abs(r0[j])), 0.0);
        }
        if (lambda == Complex(0.0, 0.0)) {
            return anchor;
        }
        for (int steps = 16; steps <= (1 << 16); steps *= 2) {
            std::vector<double> arg(r0.size(), 0.0);
            std::vector<Complex> prev = r0;
            std::vector<Complex> cur;
            bool ok = true;
            for (int i = 1; i <= steps && ok; ++i) {
                cur = radii_at(lambda * (static_cast<double>(i) / steps));
                for (std::size_t j = 0; j < cur.size(); ++j) {
                    const double jump = std::arg(cur[j] / prev[j]);
                    if (std::abs(jump) >= std::numbers::pi / 2.0) {
                        ok = false;
                        break;
                    }
                    arg[j] += jump;
                }
                prev = cur;
            }
            if (ok) {
                std::vector<Complex> out(cur.size());
                for (std::size_t j = 0; j < cur.size(); ++j) {
                    out[j] = Complex(std::log(std::abs(cur[j])), arg[j]);
                }
                return out;
            }
        }
        throw Error(ErrorKind::branch, "radius phase could not be continued along the ray");
    };
    // centres scale by sqrt(a) = 1/C, radii by a = 1/C^2
    auto centers = [phi, entries, s = std::sqrt(a)](Complex lambda) {
        std::vector<Complex> w(entries.size());
        for (std::size_t j = 0; j < entries.size(); ++j) {
            w[j] = s * phi(lambda, Complex(entries[j].x, 0.0));
        }
        return w;
    };
    const std::size_t n = entries.size();
    return MovedSystem(std::move(base), n, std::move(logs), std::move(centers));
}

MovedSystem MovedSystem::fixed(DiskSystem base) {
    std::vector<Complex> logs;
    std::vector<Complex> w;
    for (const auto& e : base.entries()) {
        logs.emplace_back(std::log(base.a() * e.r), 0.0);
        w.emplace_back(std::sqrt(base.a()) * e.x, 0.0);
    }
    const std::size_t n = logs.size();
    return MovedSystem(
        std::move(base), n, [logs](Complex) { return logs; }, [w](Complex) { return w; });
}

MovedSystem MovedSystem::power_law(std::vector<double> moduli,
                                   std::function<Complex(Complex)> tau) {
    moduli = positive_moduli(std::move(moduli));
    const std::size_t n = moduli.size();
    return MovedSystem(std::nullopt, n,
                       [moduli = std::move(moduli), tau = std::move(tau)](Complex lambda) {
                           const Complex t = tau(lambda);
                           std::vector<Complex> out;
                           out.reserve(moduli.size());
                           for (double m : moduli) {
                               out.push_back(t * std::log(m));
                           }
                           return out;
                       },
                       nullptr);
}

MovedSystem MovedSystem::from_moduli(std::vector<double> moduli) {
    moduli = positive_moduli(std::move(moduli));
    std::vector<Complex> logs;
    for (double m : moduli) {
        logs.emplace_back(std::log(m), 0.0);
    }
    const std::size_t n = logs.size();
    return MovedSystem(std::nullopt, n, [logs](Complex) { return logs; }, nullptr);
}

MovedSystem MovedSystem::tabulated(std::optional<DiskSystem> base, std::vector<Complex> lambdas,
                                   std::vector<std::vector<Complex>> log_radii) {
    if (lambdas.empty() || lambdas.size() != log_radii.size()) {
        throw Error(ErrorKind::domain, "tabulated system needs one log-radius row per lambda");
    }
    const std::size_t n = log_radii.front().size();
    for (const auto& row : log_radii) {
        if (row.size() != n || n == 0) {
            throw Error(ErrorKind::domain, "tabulated rows differ in length");
        }
    }
    return MovedSystem(
        std::move(base), n,
        [lambdas = std::move(lambdas), rows = std::move(log_radii)](Complex lambda) {
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                if (std::abs(lambdas[i] - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda))) {
                    return rows[i];
                }
            }
            throw Error(ErrorKind::cache_miss, "lambda not in the tabulated grid");
        },
        nullptr);
}

std::vector<Complex> MovedSystem::log_radii(Complex lambda) const {
    require_finite(lambda, "lambda");
    return logs_(lambda);
}

std::vector<Complex> MovedSystem::radii(Complex lambda) const {
    auto logs = log_radii(lambda);
    for (auto& l : logs) {
        l = std::exp(l);
    }
    return logs;
}

std::vector<Complex> MovedSystem::centers(Complex lambda) const {
    if (!centers_) {
        throw Error(ErrorKind::precondition, "system carries no disk centres");
    }
    return centers_(lambda);
}

ProbabilityVector::ProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) {
        throw Error(ErrorKind::domain, "empty probability vector");
    }
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::domain, "probabilities must be finite and nonnegative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw Error(ErrorKind::domain, "probabilities sum to " + std::to_string(sum));
    }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
    return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t n, std::size_t j) {
    std::vector<double> p(n, 0.0);
    p.at(j) = 1.0;
    return ProbabilityVector(std::move(p));
}

namespace {

std::vector<double> log_moduli(const MovedSystem& system, Complex lambda) {
    const auto logs = system.log_radii(lambda);
    std::vector<double> out(logs.size());
    for (std::size_t j = 0; j < logs.size(); ++j) {
        out[j] = logs[j].real();
    }
    return out;
}

double log_sum_exp(std::span<const double> logs, double d) {
    double top = -INFINITY;
    for (double l : logs) {
        top = std::max(top, d * l);
    }
    double s = 0.0;
    for (double l : logs) {
        s += std::exp(d * l - top);
    }
    return top + std::log(s);
}

void check_size(const MovedSystem& system, const ProbabilityVector& p) {
    if (p.size() != system.size()) {
        throw Error(ErrorKind::domain, "probability vector and system differ in length");
    }
}

}  // namespace

double pressure(const MovedSystem& system, Complex lambda, double d) {
    if (system.size() == 0) {
        throw Error(ErrorKind::domain, "pressure of an empty system");
    }
    const auto logs = log_moduli(system, lambda);
    return log_sum_exp(logs, d);
}

MoranRoot moran_dimension(const MovedSystem& system, Complex lambda) {
    const auto logs = log_moduli(system, lambda);
    for (double l : logs) {
        if (!(l < 0.0)) {
            throw Error(ErrorKind::domain, "Moran dimension needs every |r_j| < 1");
        }
    }
    if (logs.size() == 1) {
        return {0.0, true};
    }
    double lo = 1e-9;
    double hi = 2.0;
    if (log_sum_exp(logs, hi) > 0.0) {
        return {2.0, true};
    }
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            break;
        }
        (log_sum_exp(logs, mid) > 0.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), false};
}

double entropy(const ProbabilityVector& p) {
    double s = 0.0;
    for (double v : p.values()) {
        if (v > 0.0) {
            s -= v * std::log(v);
        }
    }
    return s;
}

Complex lyapunov(const MovedSystem& system, const ProbabilityVector& p, Complex lambda) {
    check_size(system, p);
    const auto logs = system.log_radii(lambda);
    Complex s{};
    for (std::size_t j = 0; j < logs.size(); ++j) {
        if (p[j] > 0.0) {
            s -= p[j] * logs[j];
        }
    }
    return s;
}

ProbabilityVector maximizer(const MovedSystem& system, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw Error(ErrorKind::domain, "delta must lie in (0, 1]");
    }
    const auto logs = log_moduli(system, Complex(0.0, 0.0));
    const double top = *std::max_element(logs.begin(), logs.end());
    std::vector<double> p(logs.size());
    for (std::size_t j = 0; j < logs.size(); ++j) {
        p[j] = std::exp(delta * (logs[j] - top));
    }
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) {
        v /= total;
    }
    return ProbabilityVector(std::move(p));
}

Complex phi(const MovedSystem& system, const ProbabilityVector& p, Complex lambda) {
    const Complex l = lyapunov(system, p, lambda);
    if (l == Complex(0.0, 0.0)) {
        throw Error(ErrorKind::singular_point, "Lyapunov exponent vanishes");
    }
    return 1.0 - entropy(p) / l;
}

double jensen_gap(const MovedSystem& system, const ProbabilityVector& p, Complex lambda,
                  double d) {
    return pressure(system, lambda, d) - (entropy(p) - d * lyapunov(system, p, lambda).real());
}

std::vector<ApuVerdict> apu_check(const MovedSystem& system, const ProbabilityVector& p,
                                  double rho, std::span<const Complex> lambdas,
                                  double tolerance) {
    if (!(rho > 0.0 && rho < 1.0)) {
        throw Error(ErrorKind::domain, "rho must lie in (0, 1)");
    }
    for (const auto& l : lambdas) {
        if (!(std::abs(l) < rho)) {
            throw Error(ErrorKind::domain, "lambda outside the disk of radius rho");
        }
    }
    std::vector<ApuVerdict> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        const double r2 = std::norm(lambdas[i]) / (rho * rho);
        const Complex value = phi(system, p, lambdas[i]);
        const double margin = (1.0 + r2) / 2.0 - std::abs(value - (1.0 - r2) / 2.0);
        out[i] = {lambdas[i], value, margin, margin >= -tolerance};
    });
    return out;
}

TechniReport techni_check(const MovedSystem& system, double k, double rho, double delta,
                          double r_term, double tolerance) {
    if (!(k >= 0.0 && k < rho && rho < 1.0)) {
        throw Error(ErrorKind::domain, "need 0 <= k < rho < 1");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw Error(ErrorKind::domain, "delta must lie in (0, 1]");
    }
    const auto logs0 = log_moduli(system, Complex(0.0, 0.0));
    if (log_sum_exp(logs0, delta) < -1e-12) {
        throw Error(ErrorKind::precondition, "sum of (a r_j)^delta is below 1");
    }
    TechniReport rep;
    rep.s = (k / rho) * (k / rho) + r_term;
    if (!(rep.s >= 0.0 && rep.s < 1.0)) {
        throw Error(ErrorKind::domain, "s must lie in [0, 1)");
    }
    const ProbabilityVector p = maximizer(system, delta);
    rep.entropy = entropy(p);
    rep.lyapunov_0 = lyapunov(system, p, Complex(0.0, 0.0));
    rep.lyapunov_k = lyapunov(system, p, Complex(k, 0.0));
    rep.ratio = rep.lyapunov_k / rep.lyapunov_0;
    rep.real_part_margin = (rep.entropy / rep.lyapunov_k).real() - (1.0 - rep.s);

    // The margin is concave in b, so a ternary search finds the best witness.
    const double c = 1.0 / (1.0 - rep.s * rep.s);
    auto margin = [&](double b) { return b * rep.s * c - std::abs(rep.ratio - b * c); };
    double lo = delta;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (margin(m1) < margin(m2)) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    rep.witness_b = 0.5 * (lo + hi);
    rep.union_margin = margin(rep.witness_b);
    for (double b : {delta, 1.0}) {
        if (margin(b) > rep.union_margin) {
            rep.union_margin = margin(b);
            rep.witness_b = b;
        }
    }
    rep.asserted = delta == 1.0;
    rep.passed = rep.union_margin >= -tolerance && rep.real_part_margin >= -tolerance;
    return rep;
}

void IfsSystem::validate() const {
    if (r.empty() || r.size() != w.size()) {
        throw Error(ErrorKind::domain, "IFS needs matching, non-empty factor and offset lists");
    }
    for (std::size_t j = 0; j < r.size(); ++j) {
        require_finite(r[j], "IFS factor");
        require_finite(w[j], "IFS offset");
        if (!(std::abs(r[j]) < 1.0)) {
            throw Error(ErrorKind::domain, "IFS map " + std::to_string(j) + " is not a contraction");
        }
    }
}

double IfsSystem::max_contraction() const {
    double m = 0.0;
    for (const auto& v : r) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double IfsSystem::invariant_radius() const {
    double m = 0.0;
    for (const auto& v : w) {
        m = std::max(m, std::abs(v));
    }
    return m / (1.0 - max_contraction());
}

double IfsSystem::separation_gap() const {
    double gap = INFINITY;
    for (std::size_t i = 0; i < r.size(); ++i) {
        for (std::size_t j = i + 1; j < r.size(); ++j) {
            gap = std::min(gap, std::abs(w[i] - w[j]) - std::abs(r[i]) - std::abs(r[j]));
        }
    }
    return gap;
}

IfsSystem ifs_at(const MovedSystem& system, Complex lambda) {
    IfsSystem ifs{system.radii(lambda), system.centers(lambda)};
    ifs.validate();
    return ifs;
}

std::vector<Complex> ifs_attractor(const IfsSystem& ifs, int depth) {
    ifs.validate();
    if (depth < 1) {
        throw Error(ErrorKind::domain, "attractor depth must be at least 1");
    }
    const double total = std::pow(static_cast<double>(ifs.r.size()), depth);
    if (total > static_cast<double>(1 << 24)) {
        throw Error(ErrorKind::domain, "attractor word count exceeds 2^24");
    }
    std::vector<Complex> level{Complex(0.0, 0.0)};
    for (int d = 0; d < depth; ++d) {
        std::vector<Complex> next;
        next.reserve(level.size() * ifs.r.size());
        for (std::size_t j = 0; j < ifs.r.size(); ++j) {
            for (const auto& z : level) {
                next.push_back(ifs.r[j] * z + ifs.w[j]);
            }
        }
        level = std::move(next);
    }
    return level;
}

double attractor_error_bound(const IfsSystem& ifs, int depth) {
    ifs.validate();
    return std::pow(ifs.max_contraction(), depth) * ifs.invariant_radius();
}

Complex word_fixed_point(const IfsSystem& ifs, std::span<const int> word) {
    ifs.validate();
    if (word.empty()) {
        throw Error(ErrorKind::domain, "empty word");
    }
    Complex a(1.0, 0.0);
    Complex b(0.0, 0.0);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const auto j = static_cast<std::size_t>(*it);
        if (*it < 0 || j >= ifs.r.size()) {
            throw Error(ErrorKind::domain, "word letter out of range");
        }
        a = ifs.r[j] * a;
        b = ifs.r[j] * b + ifs.w[j];
    }
    return b / (1.0 - a);
}

BoxDimension box_dimension(std::span<const Complex> points, std::span<const double> scales) {
    if (points.size() < 1000) {
        throw Error(ErrorKind::domain, "box counting needs at least 1000 points");
    }
    if (scales.size() < 4) {
        throw Error(ErrorKind::domain, "box counting needs at least 4 scales");
    }
    for (double s : scales) {
        if (!(s > 0.0)) {
            throw Error(ErrorKind::domain, "box scales must be positive");
        }
    }
    BoxDimension out;
    out.scales.assign(scales.begin(), scales.end());
    out.counts.assign(scales.size(), 0);
    const bool all_equal = std::all_of(points.begin(), points.end(),
                                       [&](const Complex& z) { return z == points.front(); });
    if (all_equal) {
        std::fill(out.counts.begin(), out.counts.end(), std::size_t{1});
        out.degenerate = true;
        return out;
    }
    // grid anchored at the lower-left corner of the bounding box
    double x0 = INFINITY;
    double y0 = INFINITY;
    for (const auto& z : points) {
        x0 = std::min(x0, z.real());
        y0 = std::min(y0, z.imag());
    }
    parallel_for(scales.size(), [&](std::size_t s) {
        const double eps = scales[s];
        std::vector<std::pair<std::int64_t, std::int64_t>> keys(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            keys[i] = {static_cast<std::int64_t>(std::floor((points[i].real() - x0) / eps)),
                       static_cast<std::int64_t>(std::floor((points[i].imag() - y0) / eps))};
        }
        std::sort(keys.begin(), keys.end());
        out.counts[s] = static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) -
                                                 keys.begin());
    });
    const double n = static_cast<double>(scales.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t s = 0; s < scales.size(); ++s) {
        const double x = -std::log(scales[s]);
        const double y = std::log(static_cast<double>(out.counts[s]));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) {
        throw Error(ErrorKind::domain, "box scales must be distinct");
    }
    out.dimension = (n * sxy - sx * sy) / denom;
    return out;
}

std::vector<double> dyadic_scales(std::span<const Complex> points, int count, int first) {
    if (points.empty() || count < 1) {
        throw Error(ErrorKind::domain, "dyadic scales need points and a positive count");
    }
    double xmin = INFINITY;
    double xmax = -INFINITY;
    double ymin = INFINITY;
    double ymax = -INFINITY;
    for (const auto& z : points) {
        xmin = std::min(xmin, z.real());
        xmax = std::max(xmax, z.real());
        ymin = std::min(ymin, z.imag());
        ymax = std::max(ymax, z.imag());
    }
    // inflated so the extreme points do not open an extra row of boxes
    const double extent = std::max(xmax - xmin, ymax - ymin) * (1.0 + 0x1p-20);
    if (!(extent > 0.0)) {
        throw Error(ErrorKind::domain, "point set has zero extent");
    }
    std::vector<double> scales(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        scales[static_cast<std::size_t>(i)] = std::ldexp(extent, -(first + i));
    }
    return scales;
}

std::vector<double> sample_segment(double lo, double hi, std::size_t n) {
    if (!(hi > lo) || n == 0) {
        throw Error(ErrorKind::domain, "segment sampler needs lo < hi and n > 0");
    }
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    }
    return xs;
}

std::vector<double> sample_fat_cantor(double lo, double hi, std::size_t n, int levels) {
    if (!(hi > lo) || n == 0 || levels < 0 || levels > 20) {
        throw Error(ErrorKind::domain, "fat Cantor sampler needs lo < hi, n > 0, 0 <= levels <= 20");
    }
    const double length = hi - lo;
    std::vector<std::pair<double, double>> intervals{{lo, hi}};
    for (int level = 1; level <= levels; ++level) {
        const double gap = length * std::pow(0.25, level);
        std::vector<std::pair<double, double>> next;
        next.reserve(intervals.size() * 2);
        for (const auto& [a, b] : intervals) {
            const double mid = 0.5 * (a + b);
            next.emplace_back(a, mid - gap / 2.0);
            next.emplace_back(mid + gap / 2.0, b);
        }
        intervals = std::move(next);
    }
    double total = 0.0;
    for (const auto& [a, b] : intervals) {
        total += b - a;
    }
    std::vector<double> xs(n);
    std::size_t k = 0;
    double before = 0.0;  // measure of intervals preceding intervals[k]
    for (std::size_t i = 0; i < n; ++i) {
        const double u = total * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        while (k + 1 < intervals.size() && u > before + (intervals[k].second - intervals[k].first)) {
            before += intervals[k].second - intervals[k].first;
            ++k;
        }
        xs[i] = intervals[k].first + (u - before);
    }
    return xs;
}

ImageDimensionReport image_dimension_experiment(const PlanarMap& f, double k,
                                                std::span<const double> sample,
                                                std::span<const double> scales) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw Error(ErrorKind::domain, "k must lie in [0, 1)");
    }
    std::vector<Complex> image(sample.size());
    parallel_for(sample.size(), [&](std::size_t i) { image[i] = f(Complex(sample[i], 0.0)); });
    ImageDimensionReport rep;
    if (scales.empty()) {
        const auto auto_scales = dyadic_scales(image, 6);
        rep.estimate = box_dimension(image, auto_scales);
    } else {
        rep.estimate = box_dimension(image, scales);
    }
    rep.bound = 1.0 - k * k;
    rep.passed = rep.estimate.dimension >= rep.bound - 0.05;
    return rep;
}

}  // namespace qcs
