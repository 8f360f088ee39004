#include "qcs/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcs/parallel.hpp"

namespace qcs {

ExponentTrace trace_exponents(const PlanarMap& f, double x, const TraceParams& params) {
    require_finite(x, "x");
    if (!(params.q > 0.0 && params.q < 1.0)) {
        throw Error(ErrorKind::domain, "trace ratio q must lie in (0, 1)");
    }
    if (!(params.t0 > 0.0 && params.t0 < 1.0) || params.depth < 0) {
        throw Error(ErrorKind::domain, "trace needs 0 < t0 < 1 and depth >= 0");
    }
    const double t_last = params.t0 * std::pow(params.q, params.depth);
    if (t_last < f.resolution_floor()) {
        throw Error(ErrorKind::domain, "t-grid reaches below the map's resolution floor");
    }

    ExponentTrace trace;
    trace.x = x;
    trace.params = params;
    trace.provenance = f.description();
    std::vector<Complex> increments;
    increments.reserve(params.depth + 1);
    trace.t.reserve(params.depth + 1);
    for (int i = 0; i <= params.depth; ++i) {
        const double t = params.t0 * std::pow(params.q, i);
        const Complex w = f.increment(Complex(x, 0.0), Complex(t, 0.0));
        require_finite(w, "map increment");
        if (w == Complex(0.0, 0.0)) {
            throw Error(ErrorKind::injectivity_violation,
                        "f(x+t) = f(x) at x=" + std::to_string(x) + ", t=" + std::to_string(t));
        }
        trace.t.push_back(t);
        increments.push_back(w);
    }
    BranchedLog logs;
    try {
        logs = branch_log(trace.t, increments);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::refinement_needed) {
            throw Error(ErrorKind::refinement_needed,
                        "t-grid too coarse for branch tracking (reduce q): " +
                            std::string(e.what()));
        }
        throw;
    }
    trace.log_increment = std::move(logs.value);
    trace.quotient.reserve(trace.t.size());
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        trace.quotient.push_back(trace.log_increment[i] / std::log(trace.t[i]));
    }
    return trace;
}

std::vector<Complex> cluster_centers(std::span<const Complex> points, double merge_radius) {
    const std::size_t n = points.size();
    // union-find over the merge-radius graph
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(points[i] - points[j]) <= merge_radius) {
                const std::size_t a = find(i);
                const std::size_t b = find(j);
                if (a != b) {
                    parent[std::max(a, b)] = std::min(a, b);
                }
            }
        }
    }
    std::vector<std::size_t> roots;
    std::vector<Complex> sums;
    std::vector<double> counts;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            sums.push_back(points[i]);
            counts.push_back(1.0);
        } else {
            const auto idx = static_cast<std::size_t>(it - roots.begin());
            sums[idx] += points[i];
            counts[idx] += 1.0;
        }
    }
    std::vector<Complex> centers;
    centers.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        centers.push_back(sums[i] / counts[i]);
    }
    return centers;
}

std::vector<Complex> accumulation_estimate(const ExponentTrace& trace, int tail,
                                           double merge_radius) {
    if (tail <= 0) {
        throw Error(ErrorKind::domain, "accumulation estimate needs a non-empty tail");
    }
    if (static_cast<std::size_t>(tail) > trace.quotient.size()) {
        throw Error(ErrorKind::domain, "tail longer than the trace");
    }
    std::span<const Complex> q(trace.quotient);
    return cluster_centers(q.last(static_cast<std::size_t>(tail)), merge_radius);
}

double rotation_rate(const ExponentTrace& trace, int tail) {
    if (tail <= 0 || static_cast<std::size_t>(tail) > trace.log_increment.size()) {
        throw Error(ErrorKind::domain, "rotation rate tail out of range");
    }
    double best = 0.0;
    bool any = false;
    const std::size_t start = trace.log_increment.size() - static_cast<std::size_t>(tail);
    for (std::size_t i = start; i < trace.log_increment.size(); ++i) {
        const Complex l = trace.log_increment[i];
        if (l.real() == 0.0) {
            continue;
        }
        any = true;
        best = std::max(best, std::abs(l.imag()) / std::abs(l.real()));
    }
    if (!any) {
        throw Error(ErrorKind::domain, "every tail sample has |f(x+t) - f(x)| = 1");
    }
    return best;
}

TraceBatch trace_all(const PlanarMap& f, std::span<const double> xs, const TraceParams& params) {
    TraceBatch batch;
    batch.traces.resize(xs.size());
    batch.failures.resize(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        try {
            batch.traces[i] = trace_exponents(f, xs[i], params);
        } catch (const Error& e) {
            batch.failures[i] = e.what();
        }
    });
    return batch;
}

namespace {

bool is_exceptional(const PlanarMap& f, double x, double radius) {
    for (const auto& p : f.exceptional_points()) {
        if (std::abs(Complex(x, 0.0) - p) <= radius) {
            return true;
        }
    }
    return false;
}

}  // namespace

VerdictReport classify_traces(std::span<const ExponentTrace> traces, std::span<const double> xs,
                              std::span<const std::optional<std::string>> failures,
                              const PlanarMap& f, const Disk& disk, const VerdictParams& params) {
    VerdictReport report{disk, {}, 0, 0, 0, 0, 1.0};
    report.verdicts.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        DiskVerdict v;
        v.x = xs[i];
        v.exceptional = is_exceptional(f, xs[i], params.exceptional_radius);
        if (failures[i]) {
            v.skipped = failures[i];
            ++report.skipped;
            report.verdicts.push_back(std::move(v));
            continue;
        }
        const ExponentTrace& trace = traces[i];
        v.clusters = accumulation_estimate(trace, params.tail, params.merge_radius);
        for (const auto& c : v.clusters) {
            v.distance = std::max(v.distance, disk.distance(c));
        }
        v.inside = v.distance <= params.tolerance;
        v.rotation = rotation_rate(trace, params.tail);

        // stability: compare with the tail ending at half depth
        const std::size_t half_end = trace.quotient.size() / 2 + 1;
        if (half_end >= static_cast<std::size_t>(params.tail)) {
            std::span<const Complex> q(trace.quotient);
            const auto early = cluster_centers(
                q.subspan(half_end - static_cast<std::size_t>(params.tail),
                          static_cast<std::size_t>(params.tail)),
                params.merge_radius);
            Complex a{};
            Complex b{};
            for (const auto& c : early) a += c;
            for (const auto& c : v.clusters) b += c;
            v.drift = std::abs(a / static_cast<double>(early.size()) -
                               b / static_cast<double>(v.clusters.size()));
        }

        if (v.exceptional) {
            ++report.exceptional;
        } else {
            ++report.evaluated;
            if (v.inside) {
                ++report.inside;
            }
        }
        report.verdicts.push_back(std::move(v));
    }
    report.inside_fraction = report.evaluated == 0
                                 ? 1.0
                                 : static_cast<double>(report.inside) /
                                       static_cast<double>(report.evaluated);
    return report;
}

VerdictReport disk_verdict(const PlanarMap& f, const Disk& disk, std::span<const double> xs,
                           const VerdictParams& params) {
    const TraceBatch batch = trace_all(f, xs, params.trace);
    return classify_traces(batch.traces, xs, batch.failures, f, disk, params);
}

VerdictReport disk_verdict(const PlanarMap& f, double k, std::span<const double> xs,
                           const VerdictParams& params) {
    return disk_verdict(f, theorem_disk(k), xs, params);
}

}  // namespace qcs
