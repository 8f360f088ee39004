#include "qcs/model_maps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

namespace qcs {

SpiralMap::SpiralMap(Complex tau, Complex omega, Complex center)
    : tau_(tau), omega_(omega), center_(center) {
    require_finite(tau, "tau");
    require_finite(omega, "omega");
    require_finite(center, "center");
    if (!(tau.real() > 0.0)) {
        throw Error(ErrorKind::domain, "spiral exponent needs Re(tau) > 0");
    }
    if (omega == Complex(0.0, 0.0)) {
        throw Error(ErrorKind::domain, "spiral rotation factor must be nonzero");
    }
}

Complex SpiralMap::beltrami_factor() const noexcept { return (tau_ - 1.0) / (tau_ + 1.0); }

double spiral_norm(Complex tau) { return std::abs(tau - 1.0) / std::abs(tau + 1.0); }

Complex tau_from_factor(Complex m) {
    if (std::abs(m) >= 1.0) {
        throw Error(ErrorKind::degenerate_motion, "|m| >= 1 has no spiral exponent");
    }
    return (1.0 + m) / (1.0 - m);
}

Complex spiral_eval(const SpiralMap& map, Complex z) {
    require_finite(z, "z");
    const Complex w = z - map.center();
    const double r = std::abs(w);
    if (r == 0.0) {
        // Re(tau) > 0, so the map extends continuously to its centre
        return map.center();
    }
    return map.center() + map.omega() * (w / r) * std::exp(map.tau() * std::log(r));
}

void GridGeometry::validate() const {
    if (n < 4 || (n & (n - 1)) != 0) {
        throw Error(ErrorKind::domain, "grid size must be a power of two >= 4");
    }
    require_finite(xmin, "grid xmin");
    require_finite(ymin, "grid ymin");
    require_finite(side, "grid side");
    if (!(side > 0.0)) {
        throw Error(ErrorKind::domain, "grid side must be positive");
    }
}

BeltramiField BeltramiField::zero() { return BeltramiField(); }

BeltramiField BeltramiField::constant(Complex c) {
    require_finite(c, "constant coefficient");
    if (std::abs(c) >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "|mu| >= 1");
    }
    BeltramiField f;
    f.kind_ = c == Complex(0.0, 0.0) ? Kind::zero : Kind::constant;
    f.value_ = c;
    f.norm_bound_ = std::abs(c);
    return f;
}

BeltramiField BeltramiField::spiral(Complex m, Complex center) {
    require_finite(m, "spiral coefficient");
    require_finite(center, "spiral center");
    if (std::abs(m) >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "|mu| >= 1");
    }
    BeltramiField f;
    f.kind_ = Kind::spiral;
    f.value_ = m;
    f.center_ = center;
    f.norm_bound_ = std::abs(m);
    return f;
}

BeltramiField BeltramiField::annular(std::vector<AnnularBlock> blocks, Complex center) {
    require_finite(center, "annulus center");
    BeltramiField f;
    f.kind_ = Kind::annular;
    f.center_ = center;
    for (const auto& b : blocks) {
        const double norm = spiral_norm(b.tau);
        if (norm >= 1.0) {
            throw Error(ErrorKind::not_quasiconformal, "annular block with |mu| >= 1");
        }
        f.norm_bound_ = std::max(f.norm_bound_, norm);
    }
    f.blocks_ = std::move(blocks);
    return f;
}

BeltramiField BeltramiField::grid(GridGeometry geometry, std::vector<Complex> samples) {
    geometry.validate();
    const auto count = static_cast<std::size_t>(geometry.n) * geometry.n;
    if (samples.size() != count) {
        throw Error(ErrorKind::domain, "grid sample count does not match n*n");
    }
    BeltramiField f;
    f.kind_ = Kind::grid;
    for (const auto& s : samples) {
        require_finite(s, "grid coefficient");
        f.norm_bound_ = std::max(f.norm_bound_, std::abs(s));
    }
    if (f.norm_bound_ >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "grid coefficient with |mu| >= 1");
    }
    f.geometry_ = geometry;
    f.samples_ = std::move(samples);
    return f;
}

Complex BeltramiField::operator()(Complex z) const {
    require_finite(z, "z");
    switch (kind_) {
        case Kind::zero:
            return {};
        case Kind::constant:
            return value_;
        case Kind::spiral: {
            const Complex w = z - center_;
            if (w == Complex(0.0, 0.0)) {
                return {};
            }
            return value_ * w / std::conj(w);
        }
        case Kind::annular: {
            const Complex w = z - center_;
            const double r = std::abs(w);
            if (r == 0.0) {
                return {};
            }
            for (const auto& b : blocks_) {
                if (r >= b.r_inner && r <= b.r_outer) {
                    return (b.tau - 1.0) / (b.tau + 1.0) * w / std::conj(w);
                }
            }
            return {};
        }
        case Kind::grid: {
            const double h = geometry_.cell();
            const long col = std::lround((z.real() - geometry_.xmin) / h);
            const long row = std::lround((z.imag() - geometry_.ymin) / h);
            if (col < 0 || row < 0 || col >= geometry_.n || row >= geometry_.n) {
                return {};
            }
            return samples_[static_cast<std::size_t>(row) * geometry_.n + col];
        }
    }
    return {};
}

BeltramiField BeltramiField::scaled(Complex factor) const {
    require_finite(factor, "scale factor");
    if (norm_bound_ * std::abs(factor) >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "scaled coefficient has norm >= 1");
    }
    switch (kind_) {
        case Kind::zero:
            return zero();
        case Kind::constant:
            return constant(factor * value_);
        case Kind::spiral:
            return spiral(factor * value_, center_);
        case Kind::annular: {
            std::vector<AnnularBlock> moved = blocks_;
            for (auto& b : moved) {
                b.tau = tau_from_factor(factor * (b.tau - 1.0) / (b.tau + 1.0));
            }
            return annular(std::move(moved), center_);
        }
        case Kind::grid: {
            std::vector<Complex> s = samples_;
            for (auto& v : s) {
                v *= factor;
            }
            return grid(geometry_, std::move(s));
        }
    }
    return zero();
}

BeltramiField spiral_beltrami(const SpiralMap& map) {
    const double norm = spiral_norm(map.tau());
    if (norm >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "spiral with |tau-1| >= |tau+1|");
    }
    if (map.tau() == Complex(1.0, 0.0)) {
        return BeltramiField::zero();
    }
    return BeltramiField::spiral(map.beltrami_factor(), map.center());
}

namespace {

Complex moved_factor(Complex m, double k, Complex lambda) {
    require_finite(lambda, "lambda");
    if (!(k > 0.0) || k >= 1.0) {
        throw Error(ErrorKind::domain, "motion normaliser k must lie in (0, 1)");
    }
    const Complex u = m * lambda / k;
    if (std::abs(u) >= 1.0) {
        throw Error(ErrorKind::degenerate_motion, "|m lambda / k| >= 1");
    }
    return u;
}

}  // namespace

SpiralMap spiral_motion(const SpiralMap& map, double k, Complex lambda) {
    const Complex u = moved_factor(map.beltrami_factor(), k, lambda);
    return SpiralMap((1.0 + u) / (1.0 - u), map.omega(), map.center());
}

std::vector<AnnularBlock> annular_motion(std::span<const AnnularBlock> blocks, double k,
                                         Complex lambda) {
    std::vector<AnnularBlock> moved(blocks.begin(), blocks.end());
    for (auto& b : moved) {
        const Complex u = moved_factor((b.tau - 1.0) / (b.tau + 1.0), k, lambda);
        b.tau = (1.0 + u) / (1.0 - u);
    }
    return moved;
}

PlanarMap::PlanarMap(Evaluator raw, BeltramiField field, Provenance provenance, Options options)
    : raw_(std::make_shared<const Evaluator>(std::move(raw))),
      field_(std::move(field)),
      provenance_(provenance),
      options_(std::move(options)) {
    const Complex f0 = (*raw_)(Complex(0.0, 0.0));
    const Complex f1 = (*raw_)(Complex(1.0, 0.0));
    require_finite(f0, "f(0)");
    require_finite(f1, "f(1)");
    if (f1 == f0) {
        throw Error(ErrorKind::construction, "map identifies 0 and 1");
    }
    affine_ = f0 != Complex(0.0, 0.0) || f1 != Complex(1.0, 0.0);
    offset_ = f0;
    scale_ = f1 - f0;
}

Complex PlanarMap::operator()(Complex z) const {
    const Complex w = (*raw_)(z);
    if (!affine_) {
        return w;
    }
    return (w - offset_) / scale_;
}

Complex PlanarMap::increment(Complex z, Complex t) const {
    const Complex w = options_.increment ? options_.increment(z, t) : (*raw_)(z + t) - (*raw_)(z);
    return affine_ ? w / scale_ : w;
}

PlanarMap identity_map() {
    return PlanarMap([](Complex z) { return z; }, BeltramiField::zero(), Provenance::closed_form,
                     {.description = "identity", .increment = [](Complex, Complex t) { return t; }});
}

PlanarMap spiral_map(const SpiralMap& map) {
    auto field = spiral_beltrami(map);
    std::vector<Complex> exceptional;
    if (map.tau() != Complex(1.0, 0.0)) {
        exceptional.push_back(map.center());
    }
    return PlanarMap([map](Complex z) { return spiral_eval(map, z); }, std::move(field),
                     Provenance::closed_form,
                     {.description = "spiral", .exceptional_points = std::move(exceptional)});
}

namespace {

struct ResolvedBlock {
    AnnularBlock block;
    Complex omega;         // spiral rotation factor on the annulus
    Complex inner_factor;  // similarity factor just inside the annulus
};

struct AnnularEvaluator {
    std::vector<ResolvedBlock> blocks;  // outermost first
    Complex center;

    Complex operator()(Complex z) const {
        require_finite(z, "z");
        const Complex w = z - center;
        const double r = std::abs(w);
        Complex factor(1.0, 0.0);
        for (const auto& rb : blocks) {
            if (r > rb.block.r_outer) {
                return center + factor * w;
            }
            if (r >= rb.block.r_inner) {
                if (r == 0.0) {
                    return center;
                }
                return center + rb.omega * (w / r) * std::exp(rb.block.tau * std::log(r));
            }
            factor = rb.inner_factor;
        }
        return center + factor * w;
    }
};

}  // namespace

PlanarMap annular_compose(std::vector<AnnularBlock> blocks, Complex center) {
    require_finite(center, "center");
    for (const auto& b : blocks) {
        require_finite(b.tau, "block tau");
        if (!(b.r_inner >= 0.0) || !(b.r_outer > b.r_inner) || !std::isfinite(b.r_outer)) {
            throw Error(ErrorKind::construction, "annular block needs 0 <= r_inner < r_outer");
        }
        if (!(b.tau.real() > 0.0)) {
            throw Error(ErrorKind::construction, "annular block needs Re(tau) > 0");
        }
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const AnnularBlock& a, const AnnularBlock& b) { return a.r_outer > b.r_outer; });
    for (std::size_t i = 1; i < blocks.size(); ++i) {
        if (blocks[i].r_outer > blocks[i - 1].r_inner) {
            throw Error(ErrorKind::construction, "annular blocks overlap");
        }
        if (blocks[i - 1].r_inner == 0.0) {
            throw Error(ErrorKind::construction, "block reaching the centre must be innermost");
        }
    }

    AnnularEvaluator eval{{}, center};
    Complex factor(1.0, 0.0);
    for (const auto& b : blocks) {
        ResolvedBlock rb{b, factor * std::exp((1.0 - b.tau) * std::log(b.r_outer)), {}};
        rb.inner_factor = b.r_inner > 0.0 ? rb.omega * std::exp((b.tau - 1.0) * std::log(b.r_inner))
                                          : Complex(0.0, 0.0);
        factor = rb.inner_factor;
        eval.blocks.push_back(rb);
    }

    // Matching is exact in closed form; verify it numerically on both radii.
    for (std::size_t i = 0; i < eval.blocks.size(); ++i) {
        const auto& rb = eval.blocks[i];
        const Complex outer_factor = i == 0 ? Complex(1.0, 0.0) : eval.blocks[i - 1].inner_factor;
        for (double radius : {rb.block.r_outer, rb.block.r_inner}) {
            if (radius == 0.0) {
                continue;
            }
            const Complex side =
                radius == rb.block.r_outer ? outer_factor * radius : rb.inner_factor * radius;
            const Complex spiral = rb.omega * std::exp(rb.block.tau * std::log(radius));
            if (!(std::abs(side - spiral) <= 1e-12 * std::max(1.0, std::abs(side)))) {
                throw Error(ErrorKind::construction, "annular boundary values do not match");
            }
        }
    }

    auto field = BeltramiField::annular(blocks, center);
    std::vector<Complex> exceptional;
    if (field.norm_bound() > 0.0) {
        exceptional.push_back(center);
    }
    return PlanarMap(std::move(eval), std::move(field), Provenance::closed_form,
                     {.description = "annular", .exceptional_points = std::move(exceptional)});
}

double quasisymmetry_surrogate(const std::function<Complex(Complex)>& f, int triples,
                               std::uint64_t seed, double radius) {
    if (triples <= 0 || !(radius > 0.0)) {
        throw Error(ErrorKind::domain, "quasisymmetry surrogate needs triples > 0, radius > 0");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto point = [&] {
        const double r = radius * std::sqrt(unit(rng));
        const double a = 2.0 * std::numbers::pi * unit(rng);
        return std::polar(r, a);
    };
    double best = 1.0;
    const Complex f0 = f(Complex(0.0, 0.0));
    const Complex f1 = f(Complex(radius, 0.0));
    for (int i = 0; i < triples; ++i) {
        Complex z = point();
        Complex x = point();
        Complex y = point();
        if (std::abs(x - z) > std::abs(y - z)) {
            std::swap(x, y);
        }
        const Complex fz = f(z);
        const double den = std::abs(f(y) - fz);
        if (den > 0.0) {
            best = std::max(best, std::abs(f(x) - fz) / den);
        }
        // containment triple (z, 0, radius): |f(z) - f(0)| / |f(radius) - f(0)|
        best = std::max(best, std::abs(fz - f0) / std::abs(f1 - f0));
    }
    return best;
}

}  // namespace qcs
