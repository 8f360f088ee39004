#include "qcs/motion_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "qcs/parallel.hpp"

namespace qcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool same_lambda(Complex a, Complex b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::vector<Complex> ray_grid(double rho, int rays, int points) {
    if (!(rho > 0.0) || rays < 1 || points < 1) {
        throw Error(ErrorKind::domain, "ray grid needs rho > 0 and positive counts");
    }
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(rays) * points);
    for (int r = 0; r < rays; ++r) {
        const Complex dir = std::polar(1.0, kTwoPi * r / rays);
        for (int i = 1; i <= points; ++i) {
            out.push_back(dir * (rho * i / (points + 1)));
        }
    }
    return out;
}

std::vector<Complex> circle_grid(double radius, int count) {
    if (!(radius >= 0.0) || count < 1) {
        throw Error(ErrorKind::domain, "circle grid needs radius >= 0 and count >= 1");
    }
    std::vector<Complex> out(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        out[static_cast<std::size_t>(j)] = std::polar(radius, kTwoPi * j / count);
    }
    return out;
}

MotionFamily MotionFamily::spiral(const SpiralMap& base) {
    MotionFamily f;
    f.backend_ = Backend::spiral;
    f.k_ = spiral_norm(base.tau());
    if (!(f.k_ > 0.0 && f.k_ < 1.0)) {
        throw Error(ErrorKind::precondition, "spiral motion needs 0 < k < 1");
    }
    f.spiral_ = base;
    return f;
}

MotionFamily MotionFamily::annular(std::vector<AnnularBlock> blocks, Complex center) {
    MotionFamily f;
    f.backend_ = Backend::annular;
    for (const auto& b : blocks) {
        f.k_ = std::max(f.k_, spiral_norm(b.tau));
    }
    if (!(f.k_ > 0.0 && f.k_ < 1.0)) {
        throw Error(ErrorKind::precondition, "annular motion needs 0 < k < 1");
    }
    (void)annular_compose(blocks, center);  // validates the block layout
    f.blocks_ = std::move(blocks);
    f.center_ = center;
    return f;
}

MotionFamily MotionFamily::solver(const BeltramiField& field, const GridGeometry& geometry,
                                  std::vector<Complex> lambdas, double tol) {
    MotionFamily f;
    f.backend_ = Backend::solver;
    f.k_ = field.norm_bound();
    if (!(f.k_ > 0.0 && f.k_ < 1.0)) {
        throw Error(ErrorKind::precondition, "solver motion needs 0 < k < 1");
    }
    if (std::none_of(lambdas.begin(), lambdas.end(),
                     [](Complex l) { return l == Complex(0.0, 0.0); })) {
        lambdas.insert(lambdas.begin(), Complex(0.0, 0.0));
    }
    const SolverGrid grid = SolverGrid::from_field(field, geometry);
    f.maps_.reserve(lambdas.size());
    for (const auto& lambda : lambdas) {
        if (!(std::abs(lambda) < 1.0)) {
            throw Error(ErrorKind::degenerate_motion, "cached lambda outside the unit disk");
        }
        if (lambda == Complex(0.0, 0.0)) {
            f.maps_.push_back(std::make_shared<const PlanarMap>(identity_map()));
            continue;
        }
        auto solution = std::make_shared<const SolverSolution>(
            solve_principal(grid.scaled(lambda / f.k_), tol));
        f.maps_.push_back(std::make_shared<const PlanarMap>(solver_map(std::move(solution))));
    }
    f.lambdas_ = std::move(lambdas);
    return f;
}

PlanarMap MotionFamily::at(Complex lambda) const {
    require_finite(lambda, "lambda");
    switch (backend_) {
        case Backend::spiral:
            return spiral_map(spiral_motion(*spiral_, k_, lambda));
        case Backend::annular:
            return annular_compose(annular_motion(blocks_, k_, lambda), center_);
        case Backend::solver:
            for (std::size_t i = 0; i < lambdas_.size(); ++i) {
                if (same_lambda(lambda, lambdas_[i])) {
                    return *maps_[i];
                }
            }
            throw Error(ErrorKind::cache_miss, "lambda is not in the solver cache");
    }
    throw Error(ErrorKind::precondition, "unknown motion backend");
}

Complex motion_eval(const MotionFamily& family, Complex lambda, Complex z) {
    return family.at(lambda)(z);
}

MovedSystem moved_system(const MotionFamily& family, const DiskSystem& base) {
    if (family.backend() != MotionFamily::Backend::solver) {
        return MovedSystem::from_motion(base, [family](Complex lambda, Complex z) {
            return motion_eval(family, lambda, z);
        });
    }

    auto radii_at = [&](Complex lambda) {
        const PlanarMap map = family.at(lambda);
        std::vector<Complex> r;
        for (const auto& e : base.entries()) {
            r.push_back(base.a() * (map(Complex(e.x + e.r, 0.0)) - map(Complex(e.x, 0.0))));
            if (r.back() == Complex(0.0, 0.0)) {
                throw Error(ErrorKind::singular_point, "moved radius vanished");
            }
        }
        return r;
    };
    // group cached lambdas by direction, each ray ordered by modulus
    std::map<long long, std::vector<Complex>> rays;
    for (const auto& l : family.cached_lambdas()) {
        if (l != Complex(0.0, 0.0)) {
            rays[std::llround(std::arg(l) * 1e9)].push_back(l);
        }
    }
    const std::vector<Complex> r0 = radii_at(Complex(0.0, 0.0));
    std::vector<Complex> lambdas{Complex(0.0, 0.0)};
    std::vector<std::vector<Complex>> rows;
    std::vector<Complex> anchor;
    for (const auto& r : r0) {
        anchor.emplace_back(std::log(std::abs(r)), 0.0);
    }
    rows.push_back(anchor);
    for (auto& [key, ray] : rays) {
        std::sort(ray.begin(), ray.end(),
                  [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
        std::vector<Complex> prev = r0;
        std::vector<double> arg(r0.size(), 0.0);
        for (const auto& l : ray) {
            const auto cur = radii_at(l);
            std::vector<Complex> row(cur.size());
            for (std::size_t j = 0; j < cur.size(); ++j) {
                const double jump = std::arg(cur[j] / prev[j]);
                if (std::abs(jump) >= std::numbers::pi / 2.0) {
                    throw Error(ErrorKind::branch,
                                "cached ray too coarse to continue the radius phase");
                }
                arg[j] += jump;
                row[j] = Complex(std::log(std::abs(cur[j])), arg[j]);
            }
            prev = cur;
            lambdas.push_back(l);
            rows.push_back(std::move(row));
        }
    }
    return MovedSystem::tabulated(base, std::move(lambdas), std::move(rows));
}

HoloSample sample_circle(const std::function<Complex(Complex)>& h, double radius, int count) {
    if (count < 16) {
        throw Error(ErrorKind::domain, "holomorphy sample needs at least 16 circle points");
    }
    HoloSample s;
    s.radius = radius;
    s.center_value = h(Complex(0.0, 0.0));
    const auto lambdas = circle_grid(radius, count);
    s.circle.resize(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t j) { s.circle[j] = h(lambdas[j]); });
    return s;
}

HoloReport holomorphy_diagnostic(const HoloSample& sample, double tolerance) {
    const std::size_t n = sample.circle.size();
    if (n < 16) {
        throw Error(ErrorKind::domain, "holomorphy sample needs at least 16 circle points");
    }
    HoloReport rep;
    Complex mean{};
    for (const auto& v : sample.circle) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    rep.mean_value_residual = std::abs(sample.center_value - mean);
    // upper half of the DFT holds the negative frequencies (conj(lambda)^m terms)
    double energy = 0.0;
    for (std::size_t f = n / 2; f < n; ++f) {
        Complex c{};
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -kTwoPi * static_cast<double>((f * j) % n) / static_cast<double>(n);
            c += sample.circle[j] * std::polar(1.0, angle);
        }
        energy += std::norm(c / static_cast<double>(n));
    }
    rep.tail_energy = std::sqrt(energy);
    rep.holomorphic = rep.mean_value_residual < tolerance && rep.tail_energy < tolerance;
    return rep;
}

HoloSample quotient_sample(const MotionFamily& family, double x, double t, double radius,
                           int count) {
    if (!(t > 0.0 && t < 1.0)) {
        throw Error(ErrorKind::domain, "quotient sample needs 0 < t < 1");
    }
    if (count < 16) {
        throw Error(ErrorKind::domain, "holomorphy sample needs at least 16 circle points");
    }
    constexpr int kRadial = 64;
    constexpr int kSub = 8;  // path points between consecutive circle samples
    std::vector<Complex> path;
    for (int i = 0; i <= kRadial; ++i) {
        path.emplace_back(radius * i / kRadial, 0.0);
    }
    const int steps = count * kSub;
    for (int i = 1; i < steps; ++i) {
        path.push_back(std::polar(radius, kTwoPi * i / steps));
    }
    std::vector<Complex> w(path.size());
    parallel_for(path.size(), [&](std::size_t i) {
        const PlanarMap map = family.at(path[i]);
        w[i] = map(Complex(x + t, 0.0)) - map(Complex(x, 0.0));
    });
    std::vector<double> param(path.size());  // branch_log wants a decreasing parameter
    for (std::size_t i = 0; i < param.size(); ++i) {
        param[i] = static_cast<double>(path.size() - i);
    }
    const BranchedLog logs = branch_log(param, w, std::numbers::pi / 2.0);
    const double lt = std::log(t);
    HoloSample s;
    s.radius = radius;
    s.center_value = logs.value.front() / lt - 1.0;
    for (int j = 0; j < count; ++j) {
        s.circle.push_back(logs.value[static_cast<std::size_t>(kRadial + j * kSub)] / lt - 1.0);
    }
    return s;
}

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::passed:
            return "passed";
        case CheckStatus::failed:
            return "failed";
        case CheckStatus::skipped:
            return "skipped";
    }
    return "unknown";
}

SchwarzVerdict schwarz_check(const std::function<Complex(Complex)>& g, double k,
                             double tolerance) {
    if (!(k >= 0.0 && k < 1.0)) {
        throw Error(ErrorKind::domain, "k must lie in [0, 1)");
    }
    SchwarzVerdict v;
    v.bound = k * k;
    for (int i = 1; i <= 8; ++i) {
        for (const auto& z : circle_grid(i / 8.0, 64)) {
            if (std::abs(g(z)) > 1.0 + 1e-12) {
                v.reason = "g leaves the closed unit disk";
                return v;
            }
        }
    }
    if (std::abs(g(Complex(0.0, 0.0))) >= 1e-10) {
        v.reason = "g(0) is not 0";
        return v;
    }
    // four-point contour difference: exact through cubic terms
    const double h = 1e-3;
    Complex derivative{};
    const Complex unit_i(0.0, 1.0);
    Complex rot(1.0, 0.0);
    for (int j = 0; j < 4; ++j) {
        derivative += g(h * rot) / rot;
        rot *= unit_i;
    }
    derivative /= 4.0 * h;
    if (std::abs(derivative) >= 1e-6) {
        v.reason = "g'(0) is not 0";
        return v;
    }
    v.value = std::abs(g(Complex(k, 0.0)));
    v.status = v.value <= v.bound + tolerance ? CheckStatus::passed : CheckStatus::failed;
    return v;
}

SchwarzSummary schwarz_sample(int count, double k, std::uint64_t seed) {
    if (count < 1) {
        throw Error(ErrorKind::domain, "schwarz sample needs at least one function");
    }
    const auto n = static_cast<std::size_t>(count);
    std::vector<SchwarzVerdict> verdicts(n);
    parallel_for(n, [&](std::size_t index) {
        if (index == 0) {
            verdicts[0] = schwarz_check([](Complex z) { return z * z; }, k);
            return;
        }
        std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index)));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto zero = [&] { return std::polar(0.95 * std::sqrt(u(rng)), kTwoPi * u(rng)); };
        const Complex rot = std::polar(1.0, kTwoPi * u(rng));
        const Complex c1 = zero();
        const Complex c2 = index % 2 ? zero() : Complex{};
        const bool second = index % 2 != 0;
        verdicts[index] = schwarz_check(
            [=](Complex z) {
                Complex g = rot * z * z * (z - c1) / (1.0 - std::conj(c1) * z);
                if (second) {
                    g *= (z - c2) / (1.0 - std::conj(c2) * z);
                }
                return g;
            },
            k);
    });
    SchwarzSummary out;
    out.tested = n;
    out.witness = verdicts[0];
    for (const auto& v : verdicts) {
        switch (v.status) {
            case CheckStatus::passed: ++out.passed; break;
            case CheckStatus::failed: ++out.failed; break;
            case CheckStatus::skipped: ++out.skipped; break;
        }
        if (v.status != CheckStatus::skipped) {
            out.max_excess = std::max(out.max_excess, v.value - v.bound);
        }
    }
    return out;
}

bool lemma31_constraint(const std::function<Complex(Complex)>& f, int circles, int angles,
                        double tolerance) {
    for (int i = 1; i <= circles; ++i) {
        const double r = static_cast<double>(i) / circles;
        const double center = (1.0 - r * r) / 2.0;
        const double radius = (1.0 + r * r) / 2.0;
        for (const auto& z : circle_grid(r, angles)) {
            if (std::abs(f(z) - center) > radius + tolerance) {
                return false;
            }
        }
    }
    return true;
}

namespace {

struct Candidate {
    Complex c0;
    double scale = 0.0;          // multiplies Q; zero for constants
    std::vector<Complex> coeff;  // Q(z) = sum_n coeff[n-1] (A(z) - A(0))^n
    Complex rotation{1.0, 0.0};
    Complex a{};
    bool square = false;  // the z^2 witness

    Complex automorphism(Complex z) const { return rotation * (z - a) / (1.0 - std::conj(a) * z); }
    Complex q(Complex z) const {
        const Complex u = automorphism(z) - automorphism(Complex(0.0, 0.0));
        Complex s{};
        for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) {
            s = (s + *it) * u;
        }
        return s;
    }
    Complex operator()(Complex z) const {
        if (square) {
            return z * z;
        }
        return scale == 0.0 ? c0 : c0 + scale * q(z);
    }
};

// Candidate 0 is z^2; every fourth candidate is a constant; every other
// polynomial candidate has no linear term in A(z) - A(0).
Candidate make_candidate(std::size_t index, std::uint64_t seed, double eps_max,
                         int boundary_points) {
    Candidate c;
    if (index == 0) {
        c.square = true;
        return c;
    }
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(index)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double u = unit(rng);
    c.c0 = std::polar(eps_max * u * u, std::numbers::pi * (unit(rng) - 0.5));
    if (index % 4 == 0) {
        return c;
    }
    const int degree = 1 + static_cast<int>(unit(rng) * 6.0) % 6;
    c.coeff.resize(static_cast<std::size_t>(degree));
    for (auto& b : c.coeff) {
        b = Complex(normal(rng), normal(rng));
    }
    if (index % 4 == 2) {
        c.coeff.front() = Complex(0.0, 0.0);
        if (degree == 1) {
            c.coeff.emplace_back(normal(rng), normal(rng));
        }
    }
    c.rotation = std::polar(1.0, kTwoPi * unit(rng));
    c.a = std::polar(0.5 * unit(rng), kTwoPi * unit(rng));
    double sup = 0.0;
    for (const auto& z : circle_grid(1.0, boundary_points)) {
        sup = std::max(sup, std::abs(c.q(z)));
    }
    if (sup > 0.0) {
        c.scale = unit(rng) * (1.0 - std::abs(c.c0)) / sup;
    }
    return c;
}

}  // namespace

Lemma31Result lemma31_experiment(const Lemma31Params& params) {
    if (params.epsilons.empty()) {
        throw Error(ErrorKind::domain, "epsilon grid is empty");
    }
    for (double e : params.epsilons) {
        if (!(e > 0.0 && e < 1.0)) {
            throw Error(ErrorKind::domain, "epsilons must lie in (0, 1)");
        }
    }
    if (!(params.k > 0.0 && params.k < 1.0) || params.candidates < 1) {
        throw Error(ErrorKind::domain, "need 0 < k < 1 and at least one candidate");
    }
    const double eps_max = *std::max_element(params.epsilons.begin(), params.epsilons.end());
    const auto count = static_cast<std::size_t>(params.candidates);
    std::vector<double> f0(count);
    std::vector<double> fk(count);
    std::vector<char> ok(count);
    parallel_for(count, [&](std::size_t i) {
        const Candidate c = make_candidate(i, params.seed, eps_max, params.boundary_points);
        f0[i] = std::abs(c(Complex(0.0, 0.0)));
        fk[i] = std::abs(c(Complex(params.k, 0.0)));
        ok[i] = lemma31_constraint(c, params.circles, params.angles) ? 1 : 0;
    });

    Lemma31Result result;
    result.params = params;
    result.constraint_passing = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
    for (double eps : params.epsilons) {
        Lemma31Row row;
        row.epsilon = eps;
        row.envelope = params.k * params.k + params.envelope_factor * eps;
        row.max_abs_fk = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t i = 0; i < count; ++i) {
            if (!ok[i] || f0[i] > eps) {
                continue;
            }
            ++row.accepted;
            if (row.argmax < 0 || fk[i] > row.max_abs_fk) {
                row.max_abs_fk = fk[i];
                row.argmax = static_cast<std::int64_t>(i);
            }
        }
        row.witness_accepted = ok[0] && f0[0] <= eps;
        row.inconclusive = row.accepted == 0;
        row.within_envelope = !row.inconclusive && row.max_abs_fk <= row.envelope;
        result.rows.push_back(row);
    }
    // envelope monotonicity along decreasing epsilon
    std::vector<const Lemma31Row*> order;
    for (const auto& r : result.rows) {
        order.push_back(&r);
    }
    std::sort(order.begin(), order.end(),
              [](const Lemma31Row* a, const Lemma31Row* b) { return a->epsilon > b->epsilon; });
    result.monotone = true;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->inconclusive || order[i - 1]->inconclusive ||
            order[i]->max_abs_fk > order[i - 1]->max_abs_fk) {
            result.monotone = false;
        }
    }
    return result;
}

}  // namespace qcs
