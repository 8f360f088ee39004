#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "internal.hpp"
#include "qcs/exponents.hpp"

namespace qcs::cli {

namespace {

const json& require_descriptor(const json& doc, const char* key) {
    if (!doc.contains(key)) {
        throw ConfigError(std::string("missing \"") + key + "\" descriptor");
    }
    return doc[key];
}

/// Either an explicit array or {lo, hi, count} (endpoints included).
std::vector<double> parse_points(const json& doc, const char* key, double lo, double hi,
                                 int count) {
    if (doc.contains(key) && doc[key].is_array()) {
        auto xs = get_number_list(doc, key, {});
        if (xs.empty()) {
            throw ConfigError(std::string("\"") + key + "\" is empty");
        }
        return xs;
    }
    const json& spec = get_object(doc, key);
    lo = get_number(spec, "lo", lo);
    hi = get_number(spec, "hi", hi);
    count = get_int(spec, "count", count);
    if (count < 1 || !(hi >= lo)) {
        throw ConfigError(std::string("\"") + key + "\" needs count >= 1 and hi >= lo");
    }
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        xs[static_cast<std::size_t>(i)] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    }
    return xs;
}

TraceParams parse_trace(const json& doc) {
    const json& g = get_object(doc, "t_grid");
    TraceParams p;
    p.t0 = get_number(g, "t0", p.t0);
    p.q = get_number(g, "q", p.q);
    p.depth = get_int(g, "depth", p.depth);
    if (!(p.t0 > 0.0) || !(p.q > 0.0 && p.q < 1.0) || p.depth < 1) {
        throw ConfigError("t_grid needs t0 > 0, 0 < q < 1 and depth >= 1");
    }
    return p;
}

json disk_json(const Disk& d) {
    return {{"center", complex_json(d.center())}, {"radius", d.radius()}};
}

json report_counts(const VerdictReport& r) {
    return {{"evaluated", r.evaluated},
            {"inside", r.inside},
            {"exceptional", r.exceptional},
            {"skipped", r.skipped},
            {"inside_fraction", r.inside_fraction}};
}

DiskSystem parse_disk_system(const json& sys) {
    std::vector<DiskEntry> entries;
    for (const auto& e : sys["entries"]) {
        if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            entries.push_back({e[0].get<double>(), e[1].get<double>()});
        } else if (e.is_object()) {
            entries.push_back({require_number(e, "x"), require_number(e, "r")});
        } else {
            throw ConfigError("system entries must be {x, r} objects or [x, r] pairs");
        }
    }
    try {
        return DiskSystem(std::move(entries), get_number(sys, "a", 1.0));
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid disk system: ") + e.what());
    }
}

struct SystemSpec {
    std::optional<DiskSystem> disks;
    std::vector<double> moduli;
    bool a_given = false;
};

SystemSpec parse_system(const json& doc) {
    const json& sys = get_object(doc, "system");
    SystemSpec out;
    const bool has_entries = sys.contains("entries");
    const bool has_moduli = sys.contains("moduli");
    if (has_entries == has_moduli) {
        throw ConfigError("\"system\" needs exactly one of \"entries\" or \"moduli\"");
    }
    if (has_entries) {
        if (!sys["entries"].is_array() || sys["entries"].empty()) {
            throw ConfigError("system entries must be a non-empty array");
        }
        out.disks = parse_disk_system(sys);
        out.a_given = sys.contains("a");
    } else {
        out.moduli = get_number_list(sys, "moduli", {});
        if (out.moduli.empty()) {
            throw ConfigError("system moduli must be a non-empty array");
        }
        for (double m : out.moduli) {
            if (!(m > 0.0 && m < 1.0)) {
                throw ConfigError("system moduli must lie in (0, 1)");
            }
        }
    }
    return out;
}

// Without an explicit "a", a moving system is shrunk by 1/C^2 where C is the
// quasisymmetry surrogate of phi_k on the unit disk.
MovedSystem make_moved(const SystemSpec& spec, const std::optional<MotionFamily>& family,
                       std::uint64_t seed) {
    if (!spec.disks) {
        if (family) {
            throw ConfigError("moduli systems carry no geometry to move; drop \"motion\"");
        }
        return MovedSystem::from_moduli(spec.moduli);
    }
    if (!family) {
        return MovedSystem::fixed(*spec.disks);
    }
    if (spec.a_given) {
        return moved_system(*family, *spec.disks);
    }
    const Complex k(family->k(), 0.0);
    const double c = quasisymmetry_surrogate(
        [&](Complex z) { return motion_eval(*family, k, z); }, 10000, seed, 1.0);
    const auto& e = spec.disks->entries();
    return moved_system(*family, DiskSystem({e.begin(), e.end()}, 1.0 / (c * c)));
}

struct LambdaGrid {
    int rays = 8;
    int points = 64;
};

LambdaGrid parse_lambda_grid(const json& doc) {
    const json& g = get_object(doc, "lambda_grid");
    LambdaGrid out;
    out.rays = get_int(g, "rays", out.rays);
    out.points = get_int(g, "points", out.points);
    if (out.rays < 1 || out.points < 1) {
        throw ConfigError("lambda_grid needs positive rays and points");
    }
    return out;
}

json apu_json(const std::vector<ApuVerdict>& verdicts, double rho) {
    std::size_t inside = 0;
    double min_margin = INFINITY;
    json samples = json::array();
    for (const auto& v : verdicts) {
        inside += v.inside ? 1 : 0;
        min_margin = std::min(min_margin, v.margin);
        samples.push_back({{"lambda", complex_json(v.lambda)},
                           {"phi", complex_json(v.phi)},
                           {"margin", v.margin},
                           {"inside", v.inside}});
    }
    return {{"rho", rho},
            {"count", verdicts.size()},
            {"inside", inside},
            {"inside_fraction", verdicts.empty() ? 1.0 : double(inside) / verdicts.size()},
            {"min_margin", min_margin},
            {"samples", std::move(samples)}};
}

json holo_json(const HoloReport& r) {
    return {{"mean_value_residual", r.mean_value_residual},
            {"tail_energy", r.tail_energy},
            {"holomorphic", r.holomorphic}};
}

// --- commands ------------------------------------------------------------------

json cmd_exponents(const json& doc, Writer& out) {
    const json& desc = require_descriptor(doc, "map");
    const PlanarMap f = build_map(desc);
    const Scalars sc = resolve_scalars(doc, f.k(), false);
    const TraceParams tp = parse_trace(doc);
    const auto xs = parse_points(doc, "x", 0.05, 2.0, 200);
    VerdictParams vp;
    vp.trace = tp;
    vp.tail = get_int(doc, "tail", 10);
    vp.tolerance = get_number(doc, "cluster_tolerance", 0.05);
    vp.merge_radius = get_number(doc, "merge_radius", vp.tolerance);
    if (vp.tail < 1 || vp.tail > tp.depth + 1) {
        throw ConfigError("tail must lie in [1, depth + 1]");
    }

    const TraceBatch batch = trace_all(f, xs, tp);
    const Disk theorem = theorem_disk(sc.k);
    const Disk comparison = Disk::with_real_diameter(general_diameter(1.0, sc.k));
    const auto strong = classify_traces(batch.traces, xs, batch.failures, f, theorem, vp);
    const auto weak = classify_traces(batch.traces, xs, batch.failures, f, comparison, vp);

    std::ostringstream csv;
    csv << "x,i,t,log_re,log_im,quotient_re,quotient_im\n";
    for (std::size_t j = 0; j < xs.size(); ++j) {
        if (batch.failures[j]) {
            continue;
        }
        const auto& tr = batch.traces[j];
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            csv << format_double(xs[j]) << ',' << i << ',' << format_double(tr.t[i]) << ','
                << format_double(tr.log_increment[i].real()) << ','
                << format_double(tr.log_increment[i].imag()) << ','
                << format_double(tr.quotient[i].real()) << ','
                << format_double(tr.quotient[i].imag()) << '\n';
        }
    }
    out.text("traces.csv", csv.str());

    const double bound = rotation_bound(sc.k);
    double max_rotation = 0.0;
    bool rotation_ok = true;
    json points = json::array();
    for (std::size_t j = 0; j < xs.size(); ++j) {
        const auto& a = strong.verdicts[j];
        const auto& b = weak.verdicts[j];
        json clusters = json::array();
        for (const auto& c : a.clusters) {
            clusters.push_back(complex_json(c));
        }
        const bool counted = !a.exceptional && !a.skipped;
        const bool within = a.rotation <= bound + vp.tolerance;
        if (counted) {
            max_rotation = std::max(max_rotation, a.rotation);
            rotation_ok = rotation_ok && within;
        }
        points.push_back({{"x", xs[j]},
                          {"clusters", std::move(clusters)},
                          {"distance_theorem", a.distance},
                          {"inside_theorem", a.inside},
                          {"distance_comparison", b.distance},
                          {"inside_comparison", b.inside},
                          {"rotation", a.rotation},
                          {"rotation_within_bound", within},
                          {"drift", a.drift},
                          {"exceptional", a.exceptional},
                          {"skipped", a.skipped ? json(*a.skipped) : json(nullptr)}});
    }
    json verdicts = {{"map", describe_kind(desc)},
                     {"k", sc.k},
                     {"t_grid", {{"t0", tp.t0}, {"q", tp.q}, {"depth", tp.depth}}},
                     {"tail", vp.tail},
                     {"cluster_tolerance", vp.tolerance},
                     {"merge_radius", vp.merge_radius},
                     {"theorem_disk", disk_json(theorem)},
                     {"comparison_disk", disk_json(comparison)},
                     {"theorem", report_counts(strong)},
                     {"comparison", report_counts(weak)},
                     {"rotation_bound", bound},
                     {"max_rotation", max_rotation},
                     {"rotation_within_bound", rotation_ok},
                     {"points", std::move(points)}};
    out.json_file("verdicts.json", verdicts);
    return {{"inside_fraction_theorem", strong.inside_fraction},
            {"inside_fraction_comparison", weak.inside_fraction},
            {"max_rotation", max_rotation},
            {"rotation_within_bound", rotation_ok}};
}

json cmd_pressure(const json& doc, Writer& out) {
    const SystemSpec spec = parse_system(doc);
    const LambdaGrid lg = parse_lambda_grid(doc);
    std::optional<MotionFamily> family;
    double intrinsic_k = 0.0;
    bool exact = false;
    // the ray grid depends on rho, which may default from k: resolve on a
    // provisional k first, then build the family at the final lambdas
    if (doc.contains("motion")) {
        const json& motion = doc["motion"];
        if (describe_kind(motion) != "solver") {
            family = build_family(motion, {});
        } else {
            intrinsic_k = build_field(get_object(motion, "field")).norm_bound();
        }
        if (family) {
            intrinsic_k = family->k();
        }
        exact = describe_kind(motion) != "identity";
    }
    const Scalars sc = resolve_scalars(doc, intrinsic_k, exact);
    const auto lambdas = ray_grid(sc.rho, lg.rays, lg.points);
    if (doc.contains("motion") && describe_kind(doc["motion"]) == "solver") {
        family = build_family(doc["motion"], lambdas);
    }
    const MovedSystem sys = make_moved(spec, family, sc.seed);

    const json& dg = get_object(doc, "d_grid");
    const double dlo = get_number(dg, "lo", 0.05);
    const double dhi = get_number(dg, "hi", 2.0);
    const int dcount = get_int(dg, "count", 40);
    if (dcount < 2 || !(dhi > dlo) || !(dlo > 0.0)) {
        throw ConfigError("d_grid needs 0 < lo < hi and count >= 2");
    }
    json grid = json::array();
    for (int i = 0; i < dcount; ++i) {
        const double d = dlo + (dhi - dlo) * i / (dcount - 1);
        grid.push_back({{"d", d}, {"P", pressure(sys, 0.0, d)}});
    }
    const MoranRoot root = moran_dimension(sys, 0.0);
    const ProbabilityVector p = maximizer(sys, sc.delta);
    const Complex l0 = lyapunov(sys, p, 0.0);
    const Complex phi0 = phi(sys, p, 0.0);
    json pvec = json::array();
    for (double v : p.values()) {
        pvec.push_back(v);
    }
    const auto apu = apu_check(sys, p, sc.rho, lambdas);
    json apu_out = apu_json(apu, sc.rho);

    json techni;
    bool techni_passed = false;
    try {
        const TechniReport t = techni_check(sys, sc.k, sc.rho, sc.delta);
        techni_passed = t.passed;
        techni = {{"s", t.s},
                  {"entropy", t.entropy},
                  {"lyapunov_0", complex_json(t.lyapunov_0)},
                  {"lyapunov_k", complex_json(t.lyapunov_k)},
                  {"ratio", complex_json(t.ratio)},
                  {"real_part_margin", t.real_part_margin},
                  {"union_margin", t.union_margin},
                  {"witness_b", t.witness_b},
                  {"asserted", t.asserted},
                  {"passed", t.passed},
                  {"skipped", nullptr}};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::precondition) {
            throw;
        }
        techni = {{"passed", false}, {"asserted", false}, {"skipped", e.what()}};
    }

    const json result = {
        {"system", {{"size", sys.size()}, {"a", sys.base() ? sys.base()->a() : 1.0}}},
        {"motion", doc.contains("motion") ? json(describe_kind(doc["motion"])) : json("fixed")},
        {"k", sc.k},
        {"rho", sc.rho},
        {"delta", sc.delta},
        {"pressure", std::move(grid)},
        {"moran", {{"d", root.d}, {"saturated", root.saturated}}},
        {"p", std::move(pvec)},
        {"entropy", entropy(p)},
        {"lyapunov_0", complex_json(l0)},
        {"phi_0", complex_json(phi0)},
        {"jensen_gap_at_delta", jensen_gap(sys, p, 0.0, sc.delta)},
        {"apu", apu_out},
        {"techni", techni}};
    out.json_file("pressure.json", result);
    return {{"moran_dimension", root.d},
            {"apu_inside_fraction", apu_out["inside_fraction"]},
            {"apu_min_margin", apu_out["min_margin"]},
            {"techni_passed", techni_passed}};
}

json cmd_dimension(const json& doc, Writer& out) {
    const json& desc = require_descriptor(doc, "map");
    const PlanarMap f = build_map(desc);
    const Scalars sc = resolve_scalars(doc, f.k(), false);
    const json& s = get_object(doc, "sample");
    const std::string kind = s.contains("kind") && s["kind"].is_string()
                                 ? s["kind"].get<std::string>()
                                 : std::string("segment");
    const double lo = get_number(s, "lo", 0.0);
    const double hi = get_number(s, "hi", 1.0);
    const int count = get_int(s, "count", 100000);
    if (count < 1000 || !(hi > lo)) {
        throw ConfigError("sample needs count >= 1000 and hi > lo");
    }
    std::vector<double> xs;
    if (kind == "segment") {
        xs = sample_segment(lo, hi, static_cast<std::size_t>(count));
    } else if (kind == "fat_cantor") {
        xs = sample_fat_cantor(lo, hi, static_cast<std::size_t>(count), get_int(s, "levels", 8));
    } else {
        throw ConfigError("sample.kind must be \"segment\" or \"fat_cantor\"");
    }
    const int scale_count = get_int(doc, "scales", 6);
    if (scale_count < 4) {
        throw ConfigError("scales must be at least 4");
    }
    std::vector<Complex> image(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        image[i] = f(Complex(xs[i], 0.0));
    }
    const auto scales = dyadic_scales(image, scale_count);
    const auto rep = image_dimension_experiment(f, sc.k, xs, scales);
    json counts = json::array();
    for (auto c : rep.estimate.counts) {
        counts.push_back(c);
    }
    const json result = {{"map", describe_kind(desc)},
                         {"k", sc.k},
                         {"sample", {{"kind", kind}, {"lo", lo}, {"hi", hi}, {"count", count}}},
                         {"scales", rep.estimate.scales},
                         {"counts", std::move(counts)},
                         {"estimate", rep.estimate.dimension},
                         {"degenerate", rep.estimate.degenerate},
                         {"lower_bound", rep.bound},
                         {"upper_reference", 1.0 + sc.k * sc.k},
                         {"slack", 0.05},
                         {"passed", rep.passed}};
    out.json_file("dimension.json", result);
    return {{"estimate", rep.estimate.dimension}, {"passed", rep.passed}};
}

json cmd_lemma31(const json& doc, Writer& out) {
    const double k_default = 0.3;
    const Scalars sc = resolve_scalars(doc, doc.contains("k") ? 0.0 : k_default, false);
    const json& l = get_object(doc, "lemma31");
    Lemma31Params params;
    params.k = sc.k;
    params.seed = sc.seed;
    params.epsilons = get_number_list(l, "epsilons", params.epsilons);
    params.candidates = get_int(l, "candidates", params.candidates);
    params.circles = get_int(l, "circles", params.circles);
    params.angles = get_int(l, "angles", params.angles);
    params.boundary_points = get_int(l, "boundary_points", params.boundary_points);
    params.envelope_factor = get_number(l, "envelope_factor", params.envelope_factor);
    const int schwarz_count = get_int(l, "schwarz_functions", 1000);
    if (params.circles < 1 || params.angles < 4 || params.boundary_points < 16 ||
        schwarz_count < 1 || !(sc.k > 0.0)) {
        throw ConfigError("lemma31 needs k > 0 and positive sampling counts");
    }
    Lemma31Result res;
    try {
        res = lemma31_experiment(params);
    } catch (const Error& e) {
        throw ConfigError(std::string("lemma31: ") + e.what());
    }
    const SchwarzSummary sw = schwarz_sample(schwarz_count, sc.k, sc.seed);

    std::ostringstream csv;
    csv << "epsilon,accepted,max_abs_fk,envelope,within_envelope,witness_accepted,inconclusive,"
           "argmax\n";
    json rows = json::array();
    bool envelope_ok = true;
    for (const auto& r : res.rows) {
        csv << format_double(r.epsilon) << ',' << r.accepted << ',' << format_double(r.max_abs_fk)
            << ',' << format_double(r.envelope) << ',' << (r.within_envelope ? 1 : 0) << ','
            << (r.witness_accepted ? 1 : 0) << ',' << (r.inconclusive ? 1 : 0) << ',' << r.argmax
            << '\n';
        envelope_ok = envelope_ok && r.within_envelope;
        rows.push_back({{"epsilon", r.epsilon},
                        {"accepted", r.accepted},
                        {"max_abs_fk", r.inconclusive ? json(nullptr) : json(r.max_abs_fk)},
                        {"argmax", r.argmax},
                        {"envelope", r.envelope},
                        {"within_envelope", r.within_envelope},
                        {"witness_accepted", r.witness_accepted},
                        {"inconclusive", r.inconclusive}});
    }
    out.text("lemma31.csv", csv.str());
    const json result = {
        {"k", params.k},
        {"seed", params.seed},
        {"candidates", params.candidates},
        {"circles", params.circles},
        {"angles", params.angles},
        {"boundary_points", params.boundary_points},
        {"envelope_factor", params.envelope_factor},
        {"witness_level", params.k * params.k},
        {"constraint_passing", res.constraint_passing},
        {"monotone", res.monotone},
        {"within_envelope", envelope_ok},
        {"rows", std::move(rows)},
        {"schwarz",
         {{"tested", sw.tested},
          {"passed", sw.passed},
          {"failed", sw.failed},
          {"skipped", sw.skipped},
          {"max_excess", sw.max_excess},
          {"witness", {{"status", to_string(sw.witness.status)},
                       {"value", sw.witness.value},
                       {"bound", sw.witness.bound}}}}}};
    out.json_file("lemma31.json", result);
    return {{"monotone", res.monotone},
            {"within_envelope", envelope_ok},
            {"schwarz_failed", sw.failed}};
}

json cmd_motion(const json& doc, Writer& out) {
    const json& desc = require_descriptor(doc, "motion");
    const std::string kind = describe_kind(desc);
    if (kind != "spiral" && kind != "annular" && kind != "solver") {
        throw ConfigError("motion needs a spiral, annular or solver descriptor");
    }
    const json& h = get_object(doc, "holomorphy");
    const double radius = get_number(h, "radius", 0.5);
    const int count = get_int(h, "count", 128);
    const double t = get_number(h, "t", 0.01);
    if (!(radius > 0.0 && radius < 1.0) || count < 16 || !(t > 0.0)) {
        throw ConfigError("holomorphy needs 0 < radius < 1, count >= 16 and t > 0");
    }
    const LambdaGrid lg = parse_lambda_grid(doc);
    const double intrinsic_k = kind == "solver"
                                   ? build_field(get_object(desc, "field")).norm_bound()
                                   : build_family(desc, {})->k();
    const Scalars sc = resolve_scalars(doc, intrinsic_k, true);
    const auto circle = circle_grid(radius, count);
    const bool with_system = doc.contains("system");
    const auto rays = ray_grid(sc.rho, lg.rays, lg.points);
    std::vector<Complex> needed = circle;
    if (with_system) {
        needed.insert(needed.end(), rays.begin(), rays.end());
    }
    const MotionFamily family = *build_family(desc, kind == "solver" ? needed : std::vector<Complex>{});
    const auto xs = parse_points(doc, "x", 0.5, 1.5, 3);

    json probes = json::array();
    bool all_holomorphic = true;
    for (double x : xs) {
        const auto eval = holomorphy_diagnostic(
            sample_circle([&](Complex l) { return motion_eval(family, l, Complex(x, 0.0)); },
                          radius, count),
            kind == "solver" ? 1e-6 : 1e-8);
        json quotient = nullptr;
        if (kind != "solver") {
            const auto q = holomorphy_diagnostic(quotient_sample(family, x, t, radius, count));
            quotient = holo_json(q);
            all_holomorphic = all_holomorphic && q.holomorphic;
        }
        all_holomorphic = all_holomorphic && eval.holomorphic;
        probes.push_back({{"x", x}, {"motion_eval", holo_json(eval)}, {"quotient", quotient}});
    }
    double norm0 = 0.0;
    double norm1 = 0.0;
    for (const auto& l : circle) {
        norm0 = std::max(norm0, std::abs(motion_eval(family, l, 0.0)));
        norm1 = std::max(norm1, std::abs(motion_eval(family, l, 1.0) - 1.0));
    }
    json result = {{"motion", kind},
                   {"k", sc.k},
                   {"rho", sc.rho},
                   {"delta", sc.delta},
                   {"radius", radius},
                   {"count", count},
                   {"t", t},
                   {"probes", std::move(probes)},
                   {"all_holomorphic", all_holomorphic},
                   {"normalization", {{"max_abs_phi_0", norm0}, {"max_abs_phi_1_minus_1", norm1}}},
                   {"apu", nullptr}};
    json summary = {{"all_holomorphic", all_holomorphic}};
    if (with_system) {
        const SystemSpec spec = parse_system(doc);
        if (!spec.disks) {
            throw ConfigError("motion needs a disk system with \"entries\"");
        }
        const MovedSystem sys = make_moved(spec, family, sc.seed);
        const ProbabilityVector p = maximizer(sys, sc.delta);
        result["apu"] = apu_json(apu_check(sys, p, sc.rho, rays), sc.rho);
        summary["apu_inside_fraction"] = result["apu"]["inside_fraction"];
    }
    out.json_file("motion.json", result);
    return summary;
}

json cmd_solve(const json& doc, Writer& out) {
    const json& sv = get_object(doc, "solver");
    const double tol = get_number(sv, "tol", 1e-10);
    const int margin = get_int(sv, "margin", 10);
    SolverGrid grid;
    std::optional<PlanarMap> exact;
    std::vector<double> interfaces;
    Complex center{};
    if (doc.contains("mu_file")) {
        const json& mf = get_object(doc, "mu_file");
        if (!mf.contains("binary") || !mf.contains("sidecar") || !mf["binary"].is_string() ||
            !mf["sidecar"].is_string()) {
            throw ConfigError("mu_file needs \"binary\" and \"sidecar\" paths");
        }
        try {
            grid = read_grid(mf["binary"].get<std::string>(), mf["sidecar"].get<std::string>());
        } catch (const Error& e) {
            throw ConfigError(std::string("mu_file: ") + e.what());
        }
    } else {
        const json& desc = require_descriptor(doc, "map");
        const BeltramiField field = build_field(desc);
        const GridGeometry geometry = parse_geometry(get_object(doc, "grid"));
        grid = SolverGrid::from_field(field, geometry);
        exact = build_map(desc);
        if (describe_kind(desc) == "annular") {
            for (const auto& b : desc["blocks"]) {
                interfaces.push_back(b["r_inner"].get<double>());
                interfaces.push_back(b["r_outer"].get<double>());
            }
            if (desc.contains("center")) {
                center = to_complex(desc["center"], "annular.center");
            }
        }
    }
    resolve_scalars(doc, grid.k, false);
    SolverSolution sol;
    try {
        sol = solve_principal(grid, tol, margin);
    } catch (const SolverError& e) {
        throw MapFailure(std::string("solver: ") + e.what());
    }
    write_grid(sol.geometry, sol.mu, sol.k, out.path("mu.bin"), out.path("mu.json"));
    write_grid(sol.geometry, sol.h, sol.k, out.path("h.bin"), out.path("h.json"));

    double max_ratio = 0.0;
    for (std::size_t i = 1; i < sol.residual_history.size(); ++i) {
        max_ratio = std::max(max_ratio, sol.residual_history[i] / sol.residual_history[i - 1]);
    }
    json check = nullptr;
    if (exact) {
        const json& c = get_object(doc, "check");
        const double r = get_number(c, "radius", 1.0);
        const int n = get_int(c, "count", 81);
        const double cell = sol.geometry.side / sol.geometry.n;
        const double gap = get_number(c, "interface_cells", 2.0) * cell;
        if (n < 2 || !(r > 0.0)) {
            throw ConfigError("check needs radius > 0 and count >= 2");
        }
        double sup = 0.0;
        std::size_t used = 0;
        std::size_t excluded = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const Complex z(-r + 2.0 * r * i / (n - 1), -r + 2.0 * r * j / (n - 1));
                const double rad = std::abs(z - center);
                if (std::any_of(interfaces.begin(), interfaces.end(),
                                [&](double s) { return std::abs(rad - s) < gap; })) {
                    ++excluded;
                    continue;
                }
                sup = std::max(sup, std::abs(evaluate_map(sol, z) - (*exact)(z)));
                ++used;
            }
        }
        check = {{"radius", r},
                 {"count", n},
                 {"interface_cells", gap / cell},
                 {"points", used},
                 {"excluded", excluded},
                 {"sup_error", sup}};
    }
    const json result = {
        {"grid",
         {{"n", sol.geometry.n},
          {"xmin", sol.geometry.xmin},
          {"ymin", sol.geometry.ymin},
          {"side", sol.geometry.side}}},
        {"k", sol.k},
        {"global_constant", sol.global_constant},
        {"truncated", sol.truncated},
        {"iterations", sol.iterations},
        {"residual_history", sol.residual_history},
        {"max_residual_ratio", max_ratio},
        {"ratio_bound", sol.k + 0.05},
        {"closed_form_check", check}};
    out.json_file("solve.json", result);
    json summary = {{"iterations", sol.iterations}, {"max_residual_ratio", max_ratio}};
    if (exact) {
        summary["sup_error"] = check["sup_error"];
    }
    return summary;
}

}  // namespace

json run_command(const std::string& command, const json& doc, Writer& out) {
    if (doc.contains("experiment") &&
        (!doc["experiment"].is_string() || doc["experiment"].get<std::string>() != command)) {
        throw ConfigError("config \"experiment\" does not match command " + command);
    }
    if (command == "exponents") return cmd_exponents(doc, out);
    if (command == "pressure") return cmd_pressure(doc, out);
    if (command == "dimension") return cmd_dimension(doc, out);
    if (command == "lemma31") return cmd_lemma31(doc, out);
    if (command == "motion") return cmd_motion(doc, out);
    if (command == "solve") return cmd_solve(doc, out);
    throw ConfigError("unknown command " + command);
}

}  // namespace qcs::cli
