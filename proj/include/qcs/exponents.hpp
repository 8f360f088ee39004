#pragma once

// Complex stretching exponents along the real line: traces of
// log(f(x + t) - f(x)) / log t on geometric t-grids, finite surrogates for
// their accumulation sets, rotation rates and verdicts against a disk.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcs/core_geometry.hpp"
#include "qcs/model_maps.hpp"

namespace qcs {

struct TraceParams {
    double t0 = 0.1;
    double q = 0.7;
    int depth = 60;  // samples t_i = t0 q^i for i = 0..depth
};

struct ExponentTrace {
    double x = 0.0;
    TraceParams params;
    std::vector<double> t;
    std::vector<Complex> log_increment;  // branch-tracked log(f(x+t) - f(x))
    std::vector<Complex> quotient;       // log_increment / log t
    std::string provenance;
};

ExponentTrace trace_exponents(const PlanarMap& f, double x, const TraceParams& params = {});

/// Single-linkage clusters (merge radius `merge_radius`) of `points`, returned
/// as cluster means ordered by first appearance.
std::vector<Complex> cluster_centers(std::span<const Complex> points, double merge_radius);

/// Cluster centres of the last `tail` quotients.
std::vector<Complex> accumulation_estimate(const ExponentTrace& trace, int tail,
                                           double merge_radius = 0.02);

/// Tail maximum of |arg w| / |log |w|| with w = f(x+t) - f(x) on the tracked
/// branch. Samples with |w| = 1 are skipped.
double rotation_rate(const ExponentTrace& trace, int tail = 10);

struct VerdictParams {
    TraceParams trace;
    int tail = 10;
    double merge_radius = 0.02;
    double tolerance = 1e-9;  // membership slack
    double exceptional_radius = 1e-9;
};

struct DiskVerdict {
    double x = 0.0;
    std::vector<Complex> clusters;
    double distance = 0.0;  // max over clusters of the distance to the disk
    bool inside = false;
    bool exceptional = false;          // x is a declared exceptional point
    double rotation = 0.0;             // rotation_rate of the trace
    double drift = 0.0;                // cluster drift between depth/2 and depth
    std::optional<std::string> skipped;  // trace error message
};

struct VerdictReport {
    Disk disk;
    std::vector<DiskVerdict> verdicts;  // in input order
    std::size_t evaluated = 0;          // non-exceptional, non-skipped
    std::size_t inside = 0;
    std::size_t exceptional = 0;
    std::size_t skipped = 0;
    double inside_fraction = 0.0;       // inside / evaluated (1 when none)
};

/// Classifies precomputed traces against `disk`.
VerdictReport classify_traces(std::span<const ExponentTrace> traces, std::span<const double> xs,
                              std::span<const std::optional<std::string>> failures,
                              const PlanarMap& f, const Disk& disk, const VerdictParams& params);

/// Traces every x (in parallel, reduced in input order) and checks its
/// accumulation estimates against `disk`.
VerdictReport disk_verdict(const PlanarMap& f, const Disk& disk, std::span<const double> xs,
                           const VerdictParams& params = {});

/// Verdicts against theorem_disk(k).
VerdictReport disk_verdict(const PlanarMap& f, double k, std::span<const double> xs,
                           const VerdictParams& params = {});

struct TraceBatch {
    std::vector<ExponentTrace> traces;
    std::vector<std::optional<std::string>> failures;
};

/// Traces every x; failures are recorded per point instead of thrown.
TraceBatch trace_all(const PlanarMap& f, std::span<const double> xs, const TraceParams& params);

}  // namespace qcs
