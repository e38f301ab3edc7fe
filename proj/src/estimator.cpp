#include "fcc/estimator.hpp"

#include <string>

namespace fcc {

namespace {

constexpr double kDegenerateVariance = 1e-14;
constexpr double kEndpointSlack = 1e-12;

}  // namespace

CellSummaries cell_summaries(const std::vector<MetricObject>& y, const SpaceDescriptor& space_y,
                             const Partition& partition) {
    partition.validate();
    if (static_cast<int>(y.size()) != partition.n()) {
        throw invalid_input_error("cell_summaries: sample length " + std::to_string(y.size()) +
                                  " does not match the partition over " +
                                  std::to_string(partition.n()) + " observations");
    }
    validate_sample(space_y, y, "y");

    CellSummaries out;
    const int m = partition.num_cells();
    out.means.reserve(static_cast<std::size_t>(m));
    out.variances.reserve(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        std::vector<MetricObject> members;
        members.reserve(static_cast<std::size_t>(partition.cell_sizes[static_cast<std::size_t>(c)]));
        for (int idx : partition.cell_members(c)) {
            members.push_back(y[static_cast<std::size_t>(idx)]);
        }
        FrechetSummary summary = frechet_mean(space_y, members);
        out.means.push_back(std::move(summary.mean));
        out.variances.push_back(summary.variance);
    }
    return out;
}

FccEstimate fcc_estimate(const std::vector<MetricObject>& y, const SpaceDescriptor& space_y,
                         const Partition& partition) {
    CellSummaries cells = cell_summaries(y, space_y, partition);
    FrechetSummary pooled = frechet_mean(space_y, y);
    if (pooled.variance <= kDegenerateVariance) {
        throw degenerate_error(
            "fcc_estimate: the sample Frechet variance of the response is zero, so the "
            "variance ratio is undefined; a nondegenerate response (positive Frechet "
            "variance) is required");
    }

    double within = 0.0;
    for (int c = 0; c < partition.num_cells(); ++c) {
        within += partition.cell_fractions[static_cast<std::size_t>(c)] *
                  cells.variances[static_cast<std::size_t>(c)];
    }
    double rho = 1.0 - within / pooled.variance;
    // Guard floating-point spill just past the endpoints; genuine violations
    // (cellwise objectives exceeding the pooled objective by more than noise)
    // pass through untouched so tests can catch them.
    if (rho < 0.0 && rho >= -kEndpointSlack) rho = 0.0;
    if (rho > 1.0 && rho <= 1.0 + kEndpointSlack) rho = 1.0;

    return FccEstimate{rho,
                       pooled.variance,
                       std::move(cells.variances),
                       std::move(cells.means),
                       std::move(pooled.mean),
                       partition};
}

FccEstimate fcc_estimate(const std::vector<MetricObject>& x, const std::vector<MetricObject>& y,
                         const SpaceDescriptor& space_y, const Partition& partition) {
    if (x.size() != y.size()) {
        throw invalid_input_error("fcc_estimate: predictor and response lengths differ (" +
                                  std::to_string(x.size()) + " vs " + std::to_string(y.size()) +
                                  ")");
    }
    return fcc_estimate(y, space_y, partition);
}

}  // namespace fcc
