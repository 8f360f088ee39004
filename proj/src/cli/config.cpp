#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>

#include "internal.hpp"

namespace qcs::cli {

namespace {

[[noreturn]] void bad(const std::string& message) { throw ConfigError(message); }

// Map construction errors are exit 3; everything else from the library while
// reading a descriptor is a config problem.
template <class F>
auto constructing(const std::string& what, F&& make) {
    try {
        return make();
    } catch (const Error& e) {
        throw MapFailure(what + ": " + e.what());
    }
}

Complex tau_of(const json& obj, const std::string& what) {
    const bool has_tau = obj.contains("tau");
    const bool has_factor = obj.contains("factor");
    if (has_tau == has_factor) {
        bad(what + ": give exactly one of \"tau\" or \"factor\"");
    }
    if (has_tau) {
        return to_complex(obj["tau"], what + ".tau");
    }
    const Complex m = to_complex(obj["factor"], what + ".factor");
    return constructing(what, [&] { return tau_from_factor(m); });
}

Complex center_of(const json& obj, const std::string& what) {
    return obj.contains("center") ? to_complex(obj["center"], what + ".center") : Complex{};
}

std::string kind_of(const json& descriptor) {
    if (!descriptor.is_object()) {
        bad("map descriptor must be an object");
    }
    if (!descriptor.contains("kind") || !descriptor["kind"].is_string()) {
        bad("map descriptor needs a string \"kind\"");
    }
    return descriptor["kind"].get<std::string>();
}

SpiralMap parse_spiral(const json& d) {
    const Complex tau = tau_of(d, "spiral");
    const Complex omega = d.contains("omega") ? to_complex(d["omega"], "spiral.omega") : 1.0;
    const Complex center = center_of(d, "spiral");
    return constructing("spiral", [&] { return SpiralMap(tau, omega, center); });
}

std::vector<AnnularBlock> parse_blocks(const json& d) {
    if (!d.contains("blocks") || !d["blocks"].is_array() || d["blocks"].empty()) {
        bad("annular: \"blocks\" must be a non-empty array");
    }
    std::vector<AnnularBlock> blocks;
    for (const auto& b : d["blocks"]) {
        if (!b.is_object()) {
            bad("annular: every block must be an object");
        }
        blocks.push_back({require_number(b, "r_inner"), require_number(b, "r_outer"),
                          tau_of(b, "annular block")});
    }
    return blocks;
}

}  // namespace

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj[key];
    if (!v.is_number()) {
        bad(std::string("\"") + key + "\" must be a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        bad(std::string("\"") + key + "\" must be finite");
    }
    return x;
}

double require_number(const json& obj, const char* key) {
    if (!obj.contains(key)) {
        bad(std::string("missing \"") + key + "\"");
    }
    return get_number(obj, key, 0.0);
}

int get_int(const json& obj, const char* key, int fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj[key];
    if (!v.is_number_integer()) {
        bad(std::string("\"") + key + "\" must be an integer");
    }
    const auto x = v.get<std::int64_t>();
    if (x < -(1LL << 30) || x > (1LL << 30)) {
        bad(std::string("\"") + key + "\" is out of range");
    }
    return static_cast<int>(x);
}

std::uint64_t require_seed(const json& doc) {
    if (!doc.contains("seed")) {
        bad("missing \"seed\"");
    }
    const auto& v = doc["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        bad("\"seed\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

Complex to_complex(const json& value, const std::string& what) {
    if (value.is_number()) {
        return {value.get<double>(), 0.0};
    }
    if (value.is_array() && value.size() == 2 && value[0].is_number() && value[1].is_number()) {
        return {value[0].get<double>(), value[1].get<double>()};
    }
    bad(what + " must be a number or a [re, im] pair");
}

std::vector<double> get_number_list(const json& obj, const char* key,
                                    std::vector<double> fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj[key];
    if (!v.is_array()) {
        bad(std::string("\"") + key + "\" must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) {
            bad(std::string("\"") + key + "\" must be an array of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

const json& get_object(const json& obj, const char* key) {
    static const json empty = json::object();
    if (!obj.contains(key)) {
        return empty;
    }
    if (!obj[key].is_object()) {
        bad(std::string("\"") + key + "\" must be an object");
    }
    return obj[key];
}

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            bad("override \"" + item + "\" is not key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string text = item.substr(eq + 1);
        if (doc.contains(key) && (doc[key].is_object() || doc[key].is_array())) {
            bad("override \"" + key + "\" targets a non-scalar field");
        }
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded() || value.is_structured()) {
            value = text;
        }
        doc[key] = value;
    }
}

GridGeometry parse_geometry(const json& obj) {
    GridGeometry g = default_solver_geometry();
    g.n = get_int(obj, "n", g.n);
    g.xmin = get_number(obj, "xmin", g.xmin);
    g.ymin = get_number(obj, "ymin", g.ymin);
    g.side = get_number(obj, "side", g.side);
    if (g.n < 8 || g.n > 8192 || (g.n & (g.n - 1)) != 0) {
        bad("grid.n must be a power of two in [8, 8192]");
    }
    if (!(g.side > 0.0)) {
        bad("grid.side must be positive");
    }
    return g;
}

std::string describe_kind(const json& descriptor) { return kind_of(descriptor); }

BeltramiField build_field(const json& d) {
    const std::string kind = kind_of(d);
    if (kind == "identity") {
        return BeltramiField::zero();
    }
    if (kind == "constant") {
        const Complex c = to_complex(d.contains("c") ? d["c"] : json(), "constant.c");
        return constructing("constant", [&] { return BeltramiField::constant(c); });
    }
    if (kind == "spiral") {
        const SpiralMap s = parse_spiral(d);
        return constructing("spiral", [&] { return spiral_beltrami(s); });
    }
    if (kind == "annular") {
        const auto blocks = parse_blocks(d);
        const Complex center = center_of(d, "annular");
        return constructing("annular", [&] { return annular_compose(blocks, center).beltrami(); });
    }
    bad("no Beltrami field for map kind \"" + kind + "\"");
}

PlanarMap build_map(const json& d) {
    const std::string kind = kind_of(d);
    if (kind == "identity") {
        return identity_map();
    }
    if (kind == "spiral") {
        const SpiralMap s = parse_spiral(d);
        return constructing("spiral", [&] { return spiral_map(s); });
    }
    if (kind == "annular") {
        const auto blocks = parse_blocks(d);
        const Complex center = center_of(d, "annular");
        return constructing("annular", [&] { return annular_compose(blocks, center); });
    }
    if (kind == "constant") {
        const BeltramiField field = build_field(d);
        const Complex c = to_complex(d["c"], "constant.c");
        return constructing("constant", [&] {
            return PlanarMap([c](Complex z) { return (z + c * std::conj(z)) / (1.0 + c); }, field,
                             Provenance::closed_form, {.description = "constant"});
        });
    }
    if (kind == "solver") {
        if (!d.contains("field")) {
            bad("solver: missing \"field\" descriptor");
        }
        const BeltramiField field = build_field(d["field"]);
        const GridGeometry geometry = parse_geometry(get_object(d, "grid"));
        const double tol = get_number(d, "tol", 1e-10);
        const int margin = get_int(d, "margin", 10);
        return constructing("solver", [&] {
            const auto grid = SolverGrid::from_field(field, geometry);
            auto solution = std::make_shared<const SolverSolution>(solve_principal(grid, tol, margin));
            return solver_map(solution);
        });
    }
    bad("unknown map kind \"" + kind + "\"");
}

std::optional<MotionFamily> build_family(const json& d, const std::vector<Complex>& lambdas) {
    const std::string kind = kind_of(d);
    if (kind == "identity") {
        return std::nullopt;
    }
    if (kind == "spiral") {
        const SpiralMap s = parse_spiral(d);
        return constructing("spiral motion", [&] { return MotionFamily::spiral(s); });
    }
    if (kind == "annular") {
        const auto blocks = parse_blocks(d);
        const Complex center = center_of(d, "annular");
        return constructing("annular motion",
                            [&] { return MotionFamily::annular(blocks, center); });
    }
    if (kind == "solver") {
        if (!d.contains("field")) {
            bad("solver: missing \"field\" descriptor");
        }
        const BeltramiField field = build_field(d["field"]);
        const GridGeometry geometry = parse_geometry(get_object(d, "grid"));
        const double tol = get_number(d, "tol", 1e-10);
        std::vector<Complex> all = lambdas;
        all.emplace_back(field.norm_bound(), 0.0);
        return constructing("solver motion",
                            [&] { return MotionFamily::solver(field, geometry, all, tol); });
    }
    bad("map kind \"" + kind + "\" has no motion");
}

Scalars resolve_scalars(const json& doc, double intrinsic_k, bool exact_k) {
    Scalars s;
    s.seed = require_seed(doc);
    s.k = get_number(doc, "k", intrinsic_k);
    if (exact_k && std::abs(s.k - intrinsic_k) > 1e-12) {
        bad("\"k\" must equal the motion's coefficient norm " + format_double(intrinsic_k));
    }
    if (s.k < intrinsic_k - 1e-12) {
        bad("\"k\" is below the map's coefficient norm " + format_double(intrinsic_k));
    }
    s.rho = get_number(doc, "rho", (1.0 + s.k) / 2.0);
    s.delta = get_number(doc, "delta", 1.0);
    if (!(s.k >= 0.0 && s.k < s.rho && s.rho < 1.0)) {
        bad("need 0 <= k < rho < 1");
    }
    if (!(s.delta > 0.0 && s.delta <= 1.0)) {
        bad("need 0 < delta <= 1");
    }
    return s;
}

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Writer::Writer(std::filesystem::path staging) : dir_(std::move(staging)) {
    std::filesystem::create_directories(dir_);
}

void Writer::add(const std::string& name) {
    if (std::find(names_.begin(), names_.end(), name) == names_.end()) {
        names_.push_back(name);
    }
}

void Writer::text(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    f << content;
    if (!f) {
        throw Error(ErrorKind::io, "cannot write " + (dir_ / name).string());
    }
    add(name);
}

void Writer::json_file(const std::string& name, const json& value) {
    text(name, value.dump(2) + "\n");
}

std::filesystem::path Writer::path(const std::string& name) {
    add(name);
    return dir_ / name;
}

}  // namespace qcs::cli
