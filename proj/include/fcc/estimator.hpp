#pragma once

#include <vector>

#include "fcc/metric_objects.hpp"
#include "fcc/partition.hpp"

namespace fcc {

/// Per-cell Frechet summaries of a response sample under a partition.
struct CellSummaries {
    std::vector<MetricObject> means;
    std::vector<double> variances;
};

/// The Frechet correlation estimate: one minus the ratio of the
/// size-weighted within-cell Frechet variance to the pooled Frechet
/// variance of the response.
struct FccEstimate {
    double rho_hat = 0.0;
    double v_f_hat = 0.0;                 // pooled Frechet variance
    std::vector<double> cell_variances;   // per-cell Frechet variance
    std::vector<MetricObject> cell_means;
    MetricObject global_mean;
    Partition partition;

    int n() const { return partition.n(); }
    int num_cells() const { return partition.num_cells(); }
};

/// Frechet mean and variance of each partition cell. Cells are always
/// non-empty (Partition guarantees this); the sample length must match the
/// partition.
CellSummaries cell_summaries(const std::vector<MetricObject>& y,
                             const SpaceDescriptor& space_y,
                             const Partition& partition);

/// Computes the correlation estimate. `x` participates only through the
/// partition (built upstream) and the length check |x| = |y|. Throws
/// degenerate_error when the pooled Frechet variance is at most 1e-14
/// (constant response), since the variance ratio is undefined there. The
/// ratio is clamped into [0, 1] only within 1e-12 of either endpoint;
/// anything farther out would indicate a real defect and is returned as-is.
FccEstimate fcc_estimate(const std::vector<MetricObject>& x,
                         const std::vector<MetricObject>& y,
                         const SpaceDescriptor& space_y,
                         const Partition& partition);

/// Same computation when no predictor sample is materialized (synthetic
/// partitions over the index set).
FccEstimate fcc_estimate(const std::vector<MetricObject>& y,
                         const SpaceDescriptor& space_y,
                         const Partition& partition);

}  // namespace fcc
