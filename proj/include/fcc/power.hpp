#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcc/bootstrap.hpp"
#include "fcc/simgen.hpp"

namespace fcc {

/// Dependence tests compared in the power studies.
enum class Method { fcc, energy, pearson, chatterjee };

const char* to_string(Method method);
Method method_from_string(const std::string& name);
/// Parses a comma-separated list like "fcc,energy,pearson".
std::vector<Method> methods_from_csv(const std::string& csv);

struct PowerConfig {
    SimConfig sim;                       // setting, delta, and generator knobs
    std::vector<int> n_list = {50, 80, 100, 150};
    int replications = 100;
    int bootstrap_b = 500;
    std::uint64_t seed = 0;
    int h = 0;                           // 0 selects the per-setting default
    int min_cell = 0;                    // 0 selects the per-setting default
    MultiplierKind multiplier = MultiplierKind::rademacher;
    // Plugin normalization is data dependent, so the sweep stores the kind
    // and rebuilds the spec per generated sample.
    NormalizationKind normalization = NormalizationKind::identity;
    std::vector<Method> methods = {Method::fcc};
    double alpha = 0.05;
    int threads = 1;
    bool scalar_slice = false;           // run every method on first coordinates

    void validate() const;
};

struct PowerRow {
    std::string method;
    int n = 0;
    double delta = 0.0;
    int rejections = 0;
    int replications = 0;
    double rate = 0.0;      // rejections / replications
    double std_err = 0.0;   // sqrt(rate (1 - rate) / replications)
    int errors = 0;         // replications that raised instead of deciding
};

struct PowerCurve {
    std::string setting;
    double alpha = 0.05;
    std::vector<PowerRow> rows;
};

/// Runs the Monte Carlo sweep: for each n and replication, generate a sample,
/// build the predictor partition, and run every requested method. Replication
/// r at n-index i draws its data from mix64(mix64(seed, i), r), so results do
/// not depend on the thread count. A replication that throws for one method
/// is tallied in that row's errors column and never aborts the sweep.
PowerCurve run_power_study(const PowerConfig& config);

/// Header `method,n,delta,rejections,replications,rate,se,errors`; one row
/// per (method, n) in method-major order. Zero replications emit only the
/// header.
std::string power_csv(const PowerCurve& curve);
void write_power_csv(const std::string& path, const PowerCurve& curve);

/// Self-contained SVG line chart of rejection rate against n, one polyline
/// per method, with axes, ticks, a legend, and a dashed line at the level.
std::string power_svg(const PowerCurve& curve);
void write_power_svg(const std::string& path, const PowerCurve& curve);

}  // namespace fcc
