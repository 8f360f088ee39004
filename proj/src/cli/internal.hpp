#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcs/motion_lab.hpp"

namespace qcs::cli {

using json = nlohmann::ordered_json;

/// Schema or invariant violation in the config (exit 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A well-formed map descriptor whose construction failed (exit 3).
class MapFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- config access -----------------------------------------------------------

double get_number(const json& obj, const char* key, double fallback);
double require_number(const json& obj, const char* key);
int get_int(const json& obj, const char* key, int fallback);
std::uint64_t require_seed(const json& doc);
Complex to_complex(const json& value, const std::string& what);
std::vector<double> get_number_list(const json& obj, const char* key,
                                    std::vector<double> fallback);
const json& get_object(const json& obj, const char* key);  // empty object when absent

/// Applies key=value overrides to top-level scalar fields.
void apply_overrides(json& doc, const std::vector<std::string>& overrides);

// --- map descriptors ---------------------------------------------------------

GridGeometry parse_geometry(const json& obj);
BeltramiField build_field(const json& descriptor);
/// Any map kind: identity, spiral, annular, constant, solver.
PlanarMap build_map(const json& descriptor);
/// Motion of a spiral, annular or solver descriptor; nullopt for identity.
/// Solver families are solved at `lambdas` (plus 0 and k).
std::optional<MotionFamily> build_family(const json& descriptor,
                                         const std::vector<Complex>& lambdas);
std::string describe_kind(const json& descriptor);

/// Resolved scalar parameters shared by every command.
struct Scalars {
    double k = 0.0;
    double rho = 0.0;
    double delta = 1.0;
    std::uint64_t seed = 0;
};

/// k defaults to `intrinsic_k`; explicit values are checked against it with
/// `exact_k` (motions) or as an upper bound (maps).
Scalars resolve_scalars(const json& doc, double intrinsic_k, bool exact_k);

// --- outputs -----------------------------------------------------------------

std::string format_double(double x);
json complex_json(Complex z);

/// Collects output files in a staging directory.
class Writer {
public:
    explicit Writer(std::filesystem::path staging);
    void text(const std::string& name, const std::string& content);
    void json_file(const std::string& name, const json& value);
    /// Registers a file written by other code at path(name).
    std::filesystem::path path(const std::string& name);
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    void add(const std::string& name);

    std::filesystem::path dir_;
    std::vector<std::string> names_;
};

/// Runs `command` against the config, writing outputs; returns the verdict
/// summary for the manifest.
json run_command(const std::string& command, const json& doc, Writer& out);

// --- manifest ----------------------------------------------------------------

std::string sha256_file(const std::filesystem::path& file);

}  // namespace qcs::cli
