#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcs/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using qcs::cli::Invocation;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("qcs-cli-test-" + std::to_string(rd()) +
                                             std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

int run(const std::string& command, const fs::path& config, const fs::path& out,
        unsigned threads = 2, bool verify = false, std::vector<std::string> overrides = {}) {
    Invocation inv;
    inv.command = command;
    inv.config = config;
    inv.out = out;
    inv.threads = threads;
    inv.verify = verify;
    inv.overrides = std::move(overrides);
    return qcs::cli::execute(inv);
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

const char* kSpiral = R"({"seed": 7, "map": {"kind": "spiral", "tau": 2},
  "x": {"lo": 0.05, "hi": 2, "count": 40}})";

}  // namespace

TEST_CASE("malformed or invalid configs exit 2") {
    TempDir dir;
    const auto broken = write_config(dir.path(), "broken.json", "{\"seed\": 1, \"map\": ");
    CHECK(run("exponents", broken, dir.path() / "o1") == qcs::cli::exit_invalid_config);

    const auto missing = write_config(dir.path(), "missing.json", "{}");
    CHECK(run("exponents", dir.path() / "nope.json", dir.path() / "o2") ==
          qcs::cli::exit_invalid_config);
    CHECK(run("exponents", missing, dir.path() / "o3") == qcs::cli::exit_invalid_config);

    const auto overlap = write_config(dir.path(), "overlap.json", R"({"seed": 1,
      "system": {"entries": [[0.0, 0.5], [0.3, 0.5]]}})");
    CHECK(run("pressure", overlap, dir.path() / "o4") == qcs::cli::exit_invalid_config);

    const auto bad_k = write_config(dir.path(), "k.json", R"({"seed": 1, "k": 0.7, "rho": 0.5,
      "system": {"moduli": [0.5, 0.25]}})");
    CHECK(run("pressure", bad_k, dir.path() / "o5") == qcs::cli::exit_invalid_config);

    const auto wrong = write_config(dir.path(), "wrong.json",
                                    R"({"seed": 1, "experiment": "solve", "map": {"kind": "identity"}})");
    CHECK(run("exponents", wrong, dir.path() / "o6") == qcs::cli::exit_invalid_config);
    CHECK(run("bogus", wrong, dir.path() / "o7") == qcs::cli::exit_invalid_config);
}

TEST_CASE("map construction failures exit 3") {
    TempDir dir;
    const auto factor = write_config(dir.path(), "f.json",
                                     R"({"seed": 1, "map": {"kind": "spiral", "factor": 1.5}})");
    CHECK(run("exponents", factor, dir.path() / "o1") == qcs::cli::exit_map_failure);
    const auto tau = write_config(dir.path(), "t.json",
                                  R"({"seed": 1, "map": {"kind": "spiral", "tau": -1}})");
    CHECK(run("exponents", tau, dir.path() / "o2") == qcs::cli::exit_map_failure);
}

TEST_CASE("argument parsing errors exit 2") {
    std::vector<std::string> args{"qc-spectra", "exponents"};
    std::vector<char*> argv;
    for (auto& a : args) {
        argv.push_back(a.data());
    }
    CHECK(qcs::cli::main(static_cast<int>(argv.size()), argv.data()) ==
          qcs::cli::exit_invalid_config);
}

TEST_CASE("exponent verdicts for identity and a smooth spiral") {
    TempDir dir;
    const auto id = write_config(dir.path(), "id.json",
                                 R"({"seed": 1, "map": {"kind": "identity"}})");
    REQUIRE(run("exponents", id, dir.path() / "id") == qcs::cli::exit_ok);
    const json v = read_json(dir.path() / "id" / "verdicts.json");
    CHECK(v["theorem"]["inside_fraction"] == 1.0);

    const auto sp = write_config(dir.path(), "sp.json", kSpiral);
    REQUIRE(run("exponents", sp, dir.path() / "sp") == qcs::cli::exit_ok);
    const json s = read_json(dir.path() / "sp" / "verdicts.json");
    CHECK(s["theorem"]["inside_fraction"] == 1.0);
    CHECK(slurp(dir.path() / "sp" / "traces.csv").rfind("x,i,t,", 0) == 0);
}

TEST_CASE("pressure outputs carry the Moran root and phi(0)") {
    TempDir dir;
    const double d = std::log(2.0) / std::log(3.0);
    const auto cfg = write_config(dir.path(), "p.json", R"({"seed": 1,
      "system": {"moduli": [0.3333333333333333, 0.3333333333333333]}, "delta": 0.5})");
    REQUIRE(run("pressure", cfg, dir.path() / "o", 2, false, {"delta=0.6309297535714574"}) ==
            qcs::cli::exit_ok);
    const json p = read_json(dir.path() / "o" / "pressure.json");
    CHECK(std::abs(p["moran"]["d"].get<double>() - d) < 1e-10);
    const double delta = p["delta"].get<double>();
    CHECK(std::abs(p["phi_0"][0].get<double>() - (1.0 - delta)) < 1e-12);
    CHECK(std::abs(p["phi_0"][1].get<double>()) < 1e-12);
}

TEST_CASE("outputs are byte-identical across thread counts") {
    TempDir dir;
    const std::vector<std::pair<std::string, std::string>> cases{
        {"exponents", kSpiral},
        {"pressure", R"({"seed": 3, "k": 0.25, "rho": 0.5,
            "system": {"entries": [[0.1, 0.05], [0.3, 0.05], [0.5, 0.05], [0.7, 0.05]]},
            "motion": {"kind": "spiral", "factor": [0, 0.25]},
            "lambda_grid": {"rays": 4, "points": 8}})"},
        {"dimension", R"({"seed": 5, "map": {"kind": "spiral", "factor": [0, 0.3]},
            "sample": {"count": 20000}})"},
        {"lemma31", R"({"seed": 11, "k": 0.3, "lemma31": {"epsilons": [0.1, 0.03],
            "candidates": 200, "angles": 32, "boundary_points": 64, "schwarz_functions": 50}})"},
        {"motion", R"({"seed": 2, "motion": {"kind": "annular",
            "blocks": [{"r_inner": 0.25, "r_outer": 0.5, "factor": [0, 0.3]}]}})"},
        {"solve", R"({"seed": 2, "map": {"kind": "constant", "c": [0.2, 0.1]},
            "grid": {"n": 64}})"},
    };
    for (const auto& [command, text] : cases) {
        CAPTURE(command);
        const auto cfg = write_config(dir.path(), command + ".json", text);
        const fs::path one = dir.path() / (command + "-1");
        const fs::path eight = dir.path() / (command + "-8");
        REQUIRE(run(command, cfg, one, 1) == qcs::cli::exit_ok);
        REQUIRE(run(command, cfg, eight, 8) == qcs::cli::exit_ok);
        json m1 = read_json(one / "manifest.json");
        json m8 = read_json(eight / "manifest.json");
        CHECK(m1["wall_time_s"].is_number());
        m1.erase("wall_time_s");
        m8.erase("wall_time_s");
        CHECK(m1 == m8);
        REQUIRE(!m1["files"].empty());
        for (const auto& f : m1["files"]) {
            const std::string name = f["name"].get<std::string>();
            CAPTURE(name);
            CHECK(slurp(one / name) == slurp(eight / name));
            CHECK(fs::file_size(one / name) == f["bytes"].get<std::uintmax_t>());
        }
    }
}

TEST_CASE("verify accepts an untouched run and rejects tampering") {
    TempDir dir;
    const auto cfg = write_config(dir.path(), "sp.json", kSpiral);
    const fs::path out = dir.path() / "run";
    CHECK(run("exponents", cfg, dir.path() / "empty", 2, true) ==
          qcs::cli::exit_verify_mismatch);
    REQUIRE(run("exponents", cfg, out) == qcs::cli::exit_ok);
    CHECK(run("exponents", cfg, out, 4, true) == qcs::cli::exit_ok);

    std::ofstream(out / "traces.csv", std::ios::app) << "tampered\n";
    CHECK(run("exponents", cfg, out, 2, true) == qcs::cli::exit_verify_mismatch);

    REQUIRE(run("exponents", cfg, out) == qcs::cli::exit_ok);
    CHECK(run("exponents", cfg, out, 2, true, {"tail=5"}) == qcs::cli::exit_verify_mismatch);
}

TEST_CASE("scalar overrides replace top-level fields only") {
    TempDir dir;
    const auto cfg = write_config(dir.path(), "sp.json", kSpiral);
    CHECK(run("exponents", cfg, dir.path() / "o1", 2, false, {"map=3"}) ==
          qcs::cli::exit_invalid_config);
    CHECK(run("exponents", cfg, dir.path() / "o2", 2, false, {"noequals"}) ==
          qcs::cli::exit_invalid_config);
    REQUIRE(run("exponents", cfg, dir.path() / "o3", 2, false, {"tail=4"}) == qcs::cli::exit_ok);
    CHECK(read_json(dir.path() / "o3" / "verdicts.json")["tail"] == 4);
    CHECK(read_json(dir.path() / "o3" / "manifest.json")["config"]["tail"] == 4);
}

TEST_CASE("a moving system without a scale constant is shrunk by the surrogate") {
    TempDir dir;
    const auto cfg = write_config(dir.path(), "p.json", R"({"seed": 4, "k": 0.25, "rho": 0.5,
      "system": {"entries": [[0.2, 0.1], [0.6, 0.2]]},
      "motion": {"kind": "spiral", "factor": [0, 0.25]},
      "lambda_grid": {"rays": 4, "points": 16}})");
    REQUIRE(run("pressure", cfg, dir.path() / "o") == qcs::cli::exit_ok);
    const json p = read_json(dir.path() / "o" / "pressure.json");
    const double a = p["system"]["a"].get<double>();
    CHECK(a > 0.0);
    CHECK(a <= 1.0);
    CHECK(p["apu"]["inside_fraction"] == 1.0);
}
