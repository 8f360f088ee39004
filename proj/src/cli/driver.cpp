#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "internal.hpp"
#include "qcs/cli.hpp"
#include "qcs/parallel.hpp"

#ifndef QCS_VERSION
#define QCS_VERSION "0.0.0"
#endif

namespace qcs::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kCommands{"exponents", "pressure", "dimension",
                                         "lemma31",   "motion",   "solve"};

/// Removes a directory tree when leaving scope.
class ScratchDir {
public:
    explicit ScratchDir(fs::path p) : path_(std::move(p)) {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

json load_config(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot read config " + path.string());
    }
    std::stringstream buf;
    buf << f.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) {
        throw ConfigError("config " + path.string() + " is not valid JSON");
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    return doc;
}

fs::path output_dir(const Invocation& inv, const json& doc) {
    if (inv.out) {
        return *inv.out;
    }
    if (doc.contains("output")) {
        if (!doc["output"].is_string()) {
            throw ConfigError("\"output\" must be a path string");
        }
        return doc["output"].get<std::string>();
    }
    return "qc-spectra-out";
}

std::string unique_suffix() {
    std::random_device rd;
    std::ostringstream s;
    s << std::hex << rd() << rd();
    return s.str();
}

json hash_list(const Writer& w) {
    json files = json::array();
    for (const auto& name : w.names()) {
        const fs::path p = w.directory() / name;
        files.push_back({{"name", name},
                         {"sha256", sha256_file(p)},
                         {"bytes", static_cast<std::uint64_t>(fs::file_size(p))}});
    }
    return files;
}

int run_fresh(const Invocation& inv, const json& doc, const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
        throw ConfigError("output directory " + out.string() + " is not writable");
    }
    ScratchDir staging(out / (".staging-" + unique_suffix()));
    Writer writer(staging.path());
    const auto start = std::chrono::steady_clock::now();
    const json summary = run_command(inv.command, doc, writer);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json files = hash_list(writer);
    for (const auto& name : writer.names()) {
        fs::rename(staging.path() / name, out / name);
    }
    const json manifest = {{"toolkit", {{"name", "qc-spectra"}, {"version", QCS_VERSION}}},
                           {"command", inv.command},
                           {"config", doc},
                           {"summary", summary},
                           {"files", files},
                           {"wall_time_s", wall}};
    std::ofstream m(out / "manifest.json", std::ios::binary);
    m << manifest.dump(2) << "\n";
    if (!m) {
        throw Error(ErrorKind::io, "cannot write manifest");
    }
    return exit_ok;
}

int run_verify(const Invocation& inv, const json& doc, const fs::path& out) {
    std::ifstream mf(out / "manifest.json", std::ios::binary);
    if (!mf) {
        std::cerr << "verify: no manifest.json in " << out << "\n";
        return exit_verify_mismatch;
    }
    std::stringstream buf;
    buf << mf.rdbuf();
    const json manifest = json::parse(buf.str(), nullptr, false);
    if (manifest.is_discarded() || !manifest.contains("files") ||
        !manifest["files"].is_array()) {
        std::cerr << "verify: manifest.json is malformed\n";
        return exit_verify_mismatch;
    }
    if (manifest.value("command", std::string()) != inv.command) {
        std::cerr << "verify: manifest was written by a different command\n";
        return exit_verify_mismatch;
    }
    ScratchDir scratch(fs::temp_directory_path() / ("qc-spectra-verify-" + unique_suffix()));
    Writer writer(scratch.path());
    run_command(inv.command, doc, writer);
    const json fresh = hash_list(writer);

    bool ok = fresh.size() == manifest["files"].size();
    for (const auto& entry : manifest["files"]) {
        const std::string name = entry.value("name", std::string());
        const std::string recorded = entry.value("sha256", std::string());
        const fs::path on_disk = out / name;
        if (!fs::exists(on_disk) || sha256_file(on_disk) != recorded) {
            std::cerr << "verify: " << name << " on disk does not match the manifest\n";
            ok = false;
        }
        const auto it = std::find_if(fresh.begin(), fresh.end(),
                                     [&](const json& f) { return f["name"] == name; });
        if (it == fresh.end() || (*it)["sha256"] != recorded) {
            std::cerr << "verify: recomputed " << name << " differs from the manifest\n";
            ok = false;
        }
    }
    if (ok) {
        std::cout << "verify: " << fresh.size() << " files match\n";
    }
    return ok ? exit_ok : exit_verify_mismatch;
}

}  // namespace

std::string sha256_file(const fs::path& file) {
    std::ifstream f(file, std::ios::binary);
    if (!f) {
        throw Error(ErrorKind::io, "cannot read " + file.string());
    }
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error(ErrorKind::io, "sha256 unavailable");
    }
    std::vector<char> chunk(1 << 16);
    while (f) {
        f.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        EVP_DigestUpdate(ctx, chunk.data(), static_cast<std::size_t>(f.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

int execute(const Invocation& inv) {
    try {
        if (std::find(kCommands.begin(), kCommands.end(), inv.command) == kCommands.end()) {
            throw ConfigError("unknown command " + inv.command);
        }
        json doc = load_config(inv.config);
        apply_overrides(doc, inv.overrides);
        set_worker_count(inv.threads);
        const fs::path out = output_dir(inv, doc);
        return inv.verify ? run_verify(inv, doc, out) : run_fresh(inv, doc, out);
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return exit_invalid_config;
    } catch (const MapFailure& e) {
        std::cerr << "map failure: " << e.what() << "\n";
        return exit_map_failure;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return exit_invalid_config;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config) {
            std::cerr << "invalid config: " << e.what() << "\n";
            return exit_invalid_config;
        }
        if (e.kind() == ErrorKind::io) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_internal;
        }
        std::cerr << "map failure (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_map_failure;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Numerical experiments on complex stretching exponents of quasiconformal maps"};
    app.set_version_flag("--version", QCS_VERSION);
    Invocation inv;
    std::string out;
    app.add_option("command", inv.command, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(kCommands));
    app.add_option("--config", inv.config, "JSON run configuration")->required();
    app.add_option("--threads", inv.threads, "Worker threads (default: all cores)")
        ->check(CLI::Range(1u, 4096u));
    app.add_option("--out", out, "Output directory (overrides the config)");
    app.add_flag("--verify", inv.verify, "Recompute outputs and compare with the manifest");
    app.add_option("--set", inv.overrides, "Override a top-level scalar: key=value")
        ->allow_extra_args(false);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_invalid_config;
    }
    if (!out.empty()) {
        inv.out = out;
    }
    return execute(inv);
}

}  // namespace qcs::cli
