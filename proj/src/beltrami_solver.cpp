#include "qcs/beltrami_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>

#include "qcs/parallel.hpp"

namespace qcs {

GridGeometry default_solver_geometry() { return {.n = 1024, .xmin = -4.0, .ymin = -4.0, .side = 8.0}; }

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// FFTW plans are tied to the alignment of the planning buffers, so the
// transform owns its buffer and callers copy in and out.
class Fft2d {
public:
    explicit Fft2d(int n) : n_(n), size_(static_cast<std::size_t>(n) * n) {
        std::lock_guard lock(planner_mutex());
        buffer_ = fftw_alloc_complex(size_);
        if (buffer_ == nullptr) {
            throw Error(ErrorKind::construction, "fftw allocation failed");
        }
        forward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_2d(n, n, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft2d() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buffer_);
    }
    Fft2d(const Fft2d&) = delete;
    Fft2d& operator=(const Fft2d&) = delete;

    Complex* data() noexcept { return reinterpret_cast<Complex*>(buffer_); }
    void forward() noexcept { fftw_execute(forward_); }
    void backward() noexcept { fftw_execute(backward_); }
    std::size_t size() const noexcept { return size_; }
    int n() const noexcept { return n_; }

private:
    int n_;
    std::size_t size_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

// zeta = xi_x + i xi_y for lattice frequency indices, in cycles per unit length
Complex frequency(int row, int col, const GridGeometry& g) {
    const int n = g.n;
    const int kx = col < n / 2 ? col : col - n;
    const int ky = row < n / 2 ? row : row - n;
    return {kx / g.side, ky / g.side};
}

// Applies a Fourier multiplier in place: values <- IFFT(m * FFT(values)).
template <class Multiplier>
void apply_multiplier(Fft2d& fft, const GridGeometry& g, std::vector<Complex>& values,
                      const Multiplier& multiplier) {
    Complex* buf = fft.data();
    const int n = g.n;
    std::copy(values.begin(), values.end(), buf);
    fft.forward();
    const double inv = 1.0 / static_cast<double>(fft.size());
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        for (int col = 0; col < n; ++col) {
            const std::size_t i = row * n + col;
            buf[i] *= multiplier(static_cast<int>(row), col) * inv;
        }
    });
    fft.backward();
    std::copy(buf, buf + fft.size(), values.begin());
}

// Sum of squares, reduced row by row in a fixed order.
double l2_norm(const std::vector<Complex>& v, int n) {
    std::vector<double> rows(static_cast<std::size_t>(n), 0.0);
    parallel_for(rows.size(), [&](std::size_t row) {
        double s = 0.0;
        for (int col = 0; col < n; ++col) {
            s += std::norm(v[row * n + col]);
        }
        rows[row] = s;
    });
    double total = 0.0;
    for (double s : rows) {
        total += s;
    }
    return std::sqrt(total);
}

// Keys cubic convolution kernel (a = -1/2).
std::array<double, 4> cubic_weights(double t) {
    auto w = [](double x) {
        x = std::abs(x);
        if (x <= 1.0) {
            return (1.5 * x - 2.5) * x * x + 1.0;
        }
        if (x < 2.0) {
            return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
        }
        return 0.0;
    };
    return {w(t + 1.0), w(t), w(1.0 - t), w(2.0 - t)};
}

}  // namespace

void SolverGrid::validate() const {
    geometry.validate();
    const auto count = static_cast<std::size_t>(geometry.n) * geometry.n;
    if (samples.size() != count) {
        throw Error(ErrorKind::domain, "solver grid sample count does not match n*n");
    }
    double kmax = 0.0;
    for (const auto& s : samples) {
        require_finite(s, "grid coefficient");
        kmax = std::max(kmax, std::abs(s));
    }
    if (kmax >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "solver grid coefficient with |mu| >= 1");
    }
    if (kmax > k + 1e-15) {
        throw Error(ErrorKind::domain, "solver grid k below its max |mu|");
    }
    if (global_constant) {
        return;
    }
    const int n = geometry.n;
    for (int i = 0; i < n; ++i) {
        const Complex edge[4] = {samples[i], samples[static_cast<std::size_t>(n - 1) * n + i],
                                 samples[static_cast<std::size_t>(i) * n],
                                 samples[static_cast<std::size_t>(i) * n + n - 1]};
        for (const auto& e : edge) {
            if (e != Complex(0.0, 0.0)) {
                throw Error(ErrorKind::domain, "coefficient support reaches the box edge");
            }
        }
    }
}

SolverGrid SolverGrid::from_field(const BeltramiField& field, GridGeometry geometry,
                                  int supersample, int edge_margin) {
    geometry.validate();
    if (supersample < 1 || edge_margin < 1 || 2 * edge_margin >= geometry.n) {
        throw Error(ErrorKind::domain, "bad supersample or edge margin");
    }
    const int n = geometry.n;
    SolverGrid grid;
    grid.geometry = geometry;
    grid.samples.assign(static_cast<std::size_t>(n) * n, Complex{});

    if (field.kind() == BeltramiField::Kind::constant) {
        std::fill(grid.samples.begin(), grid.samples.end(), field.constant_value());
        grid.k = std::abs(field.constant_value());
        grid.global_constant = true;
        return grid;
    }
    if (field.kind() == BeltramiField::Kind::zero) {
        return grid;
    }

    const double h = geometry.cell();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        for (int col = 0; col < n; ++col) {
            const Complex node = geometry.node(static_cast<int>(row), col);
            Complex sum{};
            for (int a = 0; a < supersample; ++a) {
                for (int b = 0; b < supersample; ++b) {
                    const Complex offset(((b + 0.5) / supersample - 0.5) * h,
                                         ((a + 0.5) / supersample - 0.5) * h);
                    sum += field(node + offset);
                }
            }
            grid.samples[row * n + col] = sum / static_cast<double>(supersample * supersample);
        }
    });

    for (int row = 0; row < n; ++row) {
        for (int col = 0; col < n; ++col) {
            const bool near_edge = row < edge_margin || col < edge_margin ||
                                   row >= n - edge_margin || col >= n - edge_margin;
            auto& s = grid.samples[static_cast<std::size_t>(row) * n + col];
            if (near_edge && s != Complex(0.0, 0.0)) {
                s = Complex{};
                grid.truncated = true;
            }
            grid.k = std::max(grid.k, std::abs(s));
        }
    }
    return grid;
}

SolverGrid SolverGrid::scaled(Complex factor) const {
    SolverGrid out = *this;
    out.k = 0.0;
    for (auto& s : out.samples) {
        s *= factor;
        out.k = std::max(out.k, std::abs(s));
    }
    if (out.k >= 1.0) {
        throw Error(ErrorKind::not_quasiconformal, "scaled coefficient has norm >= 1");
    }
    return out;
}

SolverError::SolverError(const std::string& message, std::vector<double> residual_history)
    : Error(ErrorKind::non_convergence, message), history_(std::move(residual_history)) {}

SolverSolution solve_principal(const SolverGrid& grid, double tol, int margin) {
    grid.validate();
    if (!(tol > 0.0) || margin < 0) {
        throw Error(ErrorKind::domain, "solver needs tol > 0 and margin >= 0");
    }
    const GridGeometry& g = grid.geometry;
    const int n = g.n;
    const std::size_t size = grid.samples.size();

    SolverSolution sol;
    sol.geometry = g;
    sol.k = grid.k;
    sol.global_constant = grid.global_constant;
    sol.truncated = grid.truncated;
    sol.mu = grid.samples;
    sol.h.assign(size, Complex{});
    sol.correction.assign(size, Complex{});
    if (grid.k == 0.0) {
        return sol;
    }

    Fft2d fft(n);
    const auto& mu = grid.samples;
    const double mu_norm = l2_norm(mu, n);
    const int budget =
        static_cast<int>(std::ceil(std::log(tol) / std::log(grid.k))) + margin;

    auto beurling = [&g](int row, int col) -> Complex {
        if (row == 0 && col == 0) {
            return {};
        }
        const Complex zeta = frequency(row, col, g);
        return std::conj(zeta) / zeta;
    };

    std::vector<Complex> h = mu;
    std::vector<Complex> next(size);
    std::vector<double> row_diff(static_cast<std::size_t>(n));
    bool converged = false;
    for (int it = 1; it <= budget; ++it) {
        next = h;
        apply_multiplier(fft, g, next, beurling);
        parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
            double s = 0.0;
            for (int col = 0; col < n; ++col) {
                const std::size_t i = row * n + col;
                next[i] = mu[i] * next[i] + mu[i];
                s += std::norm(next[i] - h[i]);
            }
            row_diff[row] = s;
        });
        double diff = 0.0;
        for (double s : row_diff) {
            diff += s;
        }
        const double residual = std::sqrt(diff) / mu_norm;
        sol.residual_history.push_back(residual);
        h.swap(next);
        sol.iterations = it;
        if (residual <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw SolverError("Neumann iteration exceeded " + std::to_string(budget) + " steps",
                          sol.residual_history);
    }

    Complex total{};
    for (const auto& v : h) {
        total += v;
    }
    sol.mean_h = total / static_cast<double>(size);
    sol.correction = h;
    for (auto& v : sol.correction) {
        v -= sol.mean_h;
    }
    apply_multiplier(fft, g, sol.correction, [&g](int row, int col) -> Complex {
        if (row == 0 && col == 0) {
            return {};
        }
        return 1.0 / (Complex(0.0, std::numbers::pi) * frequency(row, col, g));
    });
    sol.h = std::move(h);
    return sol;
}

Complex evaluate_raw(const SolverSolution& sol, Complex z) {
    require_finite(z, "z");
    const GridGeometry& g = sol.geometry;
    const double h = g.cell();
    const double fx = (z.real() - g.xmin) / h;
    const double fy = (z.imag() - g.ymin) / h;
    if (fx < 2.0 || fy < 2.0 || fx > g.n - 2.0 || fy > g.n - 2.0) {
        throw Error(ErrorKind::extrapolation, "point outside the solver interior");
    }
    const int n = g.n;
    const int col0 = static_cast<int>(std::floor(fx));
    const int row0 = static_cast<int>(std::floor(fy));
    const auto wx = cubic_weights(fx - col0);
    const auto wy = cubic_weights(fy - row0);
    Complex acc{};
    for (int a = 0; a < 4; ++a) {
        const int row = (row0 - 1 + a + n) % n;
        Complex line{};
        for (int b = 0; b < 4; ++b) {
            const int col = (col0 - 1 + b + n) % n;
            line += wx[b] * sol.correction[static_cast<std::size_t>(row) * n + col];
        }
        acc += wy[a] * line;
    }
    return z + sol.mean_h * std::conj(z) + acc;
}

Complex evaluate_map(const SolverSolution& sol, Complex z) {
    const Complex f0 = evaluate_raw(sol, Complex(0.0, 0.0));
    const Complex f1 = evaluate_raw(sol, Complex(1.0, 0.0));
    return (evaluate_raw(sol, z) - f0) / (f1 - f0);
}

PlanarMap solver_map(std::shared_ptr<const SolverSolution> solution) {
    if (!solution) {
        throw Error(ErrorKind::construction, "null solver solution");
    }
    const GridGeometry g = solution->geometry;
    auto field = BeltramiField::zero();
    if (solution->global_constant) {
        field = BeltramiField::constant(solution->mu.front());
    } else if (solution->k > 0.0) {
        field = BeltramiField::grid(g, solution->mu);
    }
    PlanarMap::Options options;
    options.description = "solver";
    options.resolution_floor = 10.0 * g.cell();
    options.domain = [g](Complex z) {
        const double h = g.cell();
        const double fx = (z.real() - g.xmin) / h;
        const double fy = (z.imag() - g.ymin) / h;
        return fx >= 2.0 && fy >= 2.0 && fx <= g.n - 2.0 && fy <= g.n - 2.0;
    };
    return PlanarMap([solution](Complex z) { return evaluate_raw(*solution, z); },
                     std::move(field), Provenance::solver, std::move(options));
}

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) {
            r = (r << 8) | ((v >> (8 * i)) & 0xffu);
        }
        return r;
    }
    return v;
}

}  // namespace

void write_grid(const GridGeometry& geometry, const std::vector<Complex>& values, double k,
                const std::filesystem::path& binary, const std::filesystem::path& sidecar) {
    geometry.validate();
    if (values.size() != static_cast<std::size_t>(geometry.n) * geometry.n) {
        throw Error(ErrorKind::io, "grid value count does not match n*n");
    }
    std::ofstream out(binary, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::io, "cannot open " + binary.string());
    }
    for (const auto& v : values) {
        for (double part : {v.real(), v.imag()}) {
            const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(part));
            out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
        }
    }
    if (!out) {
        throw Error(ErrorKind::io, "write failed: " + binary.string());
    }

    nlohmann::ordered_json meta;
    meta["n"] = geometry.n;
    meta["box"] = {geometry.xmin, geometry.xmin + geometry.side, geometry.ymin,
                   geometry.ymin + geometry.side};
    meta["k"] = k;
    meta["layout"] = "row-major interleaved (re, im) float64 little-endian";
    std::ofstream side(sidecar, std::ios::trunc);
    if (!side) {
        throw Error(ErrorKind::io, "cannot open " + sidecar.string());
    }
    side << meta.dump(2) << '\n';
}

SolverGrid read_grid(const std::filesystem::path& binary, const std::filesystem::path& sidecar) {
    std::ifstream side(sidecar);
    if (!side) {
        throw Error(ErrorKind::io, "cannot open " + sidecar.string());
    }
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::io, std::string("bad grid sidecar: ") + e.what());
    }
    SolverGrid grid;
    try {
        const auto box = meta.at("box").get<std::vector<double>>();
        if (box.size() != 4) {
            throw Error(ErrorKind::io, "grid box must have 4 entries");
        }
        grid.geometry.n = meta.at("n").get<int>();
        grid.geometry.xmin = box[0];
        grid.geometry.ymin = box[2];
        grid.geometry.side = box[1] - box[0];
        if (std::abs((box[3] - box[2]) - grid.geometry.side) > 1e-12 * grid.geometry.side) {
            throw Error(ErrorKind::io, "grid box must be square");
        }
        grid.k = meta.at("k").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::io, std::string("bad grid sidecar: ") + e.what());
    }
    grid.geometry.validate();

    const auto count = static_cast<std::size_t>(grid.geometry.n) * grid.geometry.n;
    std::ifstream in(binary, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open " + binary.string());
    }
    grid.samples.resize(count);
    for (auto& v : grid.samples) {
        double parts[2];
        for (double& part : parts) {
            std::uint64_t bits = 0;
            in.read(reinterpret_cast<char*>(&bits), sizeof bits);
            part = std::bit_cast<double>(to_little_endian(bits));
        }
        v = {parts[0], parts[1]};
    }
    if (!in || in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::io, "grid binary size does not match the sidecar");
    }
    bool uniform = true;
    for (const auto& v : grid.samples) {
        uniform = uniform && v == grid.samples.front();
    }
    grid.global_constant = uniform && grid.samples.front() != Complex(0.0, 0.0);
    grid.validate();
    return grid;
}

}  // namespace qcs
