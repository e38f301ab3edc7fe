#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "fcc/metric_objects.hpp"

namespace fcc {

/// Voronoi-style partition of the predictor sample. Cells are indexed
/// 0..M-1 in prototype order; every observation belongs to exactly one
/// non-empty cell.
struct Partition {
    std::vector<int> prototype_indices;  // sample indices of the prototypes, selection order
    std::vector<int> assignments;        // cell index per observation
    std::vector<int> cell_sizes;
    std::vector<double> cell_fractions;  // n_m / n
    int requested_h = 0;                 // prototypes originally asked for
    int min_cell_size = 1;

    int num_cells() const { return static_cast<int>(cell_sizes.size()); }
    int n() const { return static_cast<int>(assignments.size()); }

    /// Observation indices of one cell, ascending.
    std::vector<int> cell_members(int cell) const;

    /// Internal consistency: sizes match assignments, no empty cell.
    void validate() const;
};

/// Farthest-point prototype selection seeded at the sample medoid: greedily
/// add the point with maximal distance to the prototypes already chosen,
/// breaking ties by the smallest sample index, and stop early once every
/// remaining point sits at distance zero (fewer than h distinct points, in
/// which case the achieved count is simply the returned length).
/// `candidates` restricts the search to a subset of sample indices (the
/// data-splitting option); empty means all observations.
std::vector<int> farthest_point_prototypes(const SampleCoords& coords, int h,
                                           const std::vector<int>& candidates = {});
std::vector<int> farthest_point_prototypes(const std::vector<MetricObject>& x,
                                           const SpaceDescriptor& space, int h,
                                           const std::vector<int>& candidates = {});

/// Nearest-prototype assignment of every observation, ties going to the
/// earliest prototype in list order. Returns the full partition bookkeeping.
Partition assign_cells(const SampleCoords& coords, const std::vector<int>& prototypes);
Partition assign_cells(const std::vector<MetricObject>& x, const SpaceDescriptor& space,
                       const std::vector<int>& prototypes);

/// Repeatedly removes the prototype owning the smallest undersized cell and
/// re-assigns all observations among the survivors, until every cell has at
/// least min_size members or a single cell remains.
Partition enforce_min_cell_size(const Partition& partition, const SampleCoords& coords,
                                int min_size);
Partition enforce_min_cell_size(const Partition& partition,
                                const std::vector<MetricObject>& x,
                                const SpaceDescriptor& space, int min_size);

/// Prototype selection, assignment and minimum-size enforcement in one step.
Partition build_partition(const SampleCoords& coords, int h, int min_size,
                          const std::vector<int>& candidates = {});
Partition build_partition(const std::vector<MetricObject>& x, const SpaceDescriptor& space,
                          int h, int min_size, const std::vector<int>& candidates = {});

/// Wraps externally supplied cell labels (pre-specified groups, quantile
/// bins) in a Partition. Labels must cover 0..M-1 with no empty cell; the
/// stored prototype of each cell is its first member.
Partition partition_from_assignments(const std::vector<int>& assignments);

/// CSV export: a comment header recording the construction parameters, then
/// one `obs_index,cell_index` row per observation.
void write_partition_csv(std::ostream& os, const Partition& partition);

}  // namespace fcc
