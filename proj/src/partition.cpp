#include "fcc/partition.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

namespace fcc {

namespace {

// Distances from every row to the single row `j`, vectorized over the sample.
Eigen::VectorXd distances_to(const SampleCoords& coords, Eigen::Index j) {
    if (coords.geodesic_sphere) {
        Eigen::ArrayXd dots = (coords.rows * coords.rows.row(j).transpose()).array();
        return dots.min(1.0).max(-1.0).acos().matrix();
    }
    return (coords.rows.rowwise() - coords.rows.row(j)).rowwise().norm();
}

int medoid_index(const SampleCoords& coords, const std::vector<int>& candidates) {
    double best = std::numeric_limits<double>::infinity();
    int best_idx = -1;
    for (int idx : candidates) {
        double total = 0.0;
        const Eigen::VectorXd d = distances_to(coords, idx);
        for (int other : candidates) total += d[other];
        if (total < best) {  // strict: ties keep the earlier candidate
            best = total;
            best_idx = idx;
        }
    }
    return best_idx;
}

std::vector<int> tally(const std::vector<int>& assignment, int m) {
    std::vector<int> sizes(static_cast<std::size_t>(m), 0);
    for (int a : assignment) ++sizes[static_cast<std::size_t>(a)];
    return sizes;
}

std::vector<int> assign_labels(const SampleCoords& coords, const std::vector<int>& prototypes) {
    const int n = static_cast<int>(coords.rows.rows());
    const int m = static_cast<int>(prototypes.size());
    Eigen::MatrixXd dist(n, m);
    for (int c = 0; c < m; ++c) {
        dist.col(c) = distances_to(coords, prototypes[static_cast<std::size_t>(c)]);
    }
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < m; ++c) {
            if (dist(i, c) < dist(i, best)) best = c;  // ties keep the earliest prototype
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    return labels;
}

Partition finalize(std::vector<int> prototypes, std::vector<int> labels, int requested_h,
                   int min_size) {
    Partition out;
    const int n = static_cast<int>(labels.size());
    out.prototype_indices = std::move(prototypes);
    out.assignments = std::move(labels);
    out.cell_sizes = tally(out.assignments, static_cast<int>(out.prototype_indices.size()));
    out.cell_fractions.resize(out.cell_sizes.size());
    for (std::size_t c = 0; c < out.cell_sizes.size(); ++c) {
        out.cell_fractions[c] = static_cast<double>(out.cell_sizes[c]) / static_cast<double>(n);
    }
    out.requested_h = requested_h;
    out.min_cell_size = min_size;
    out.validate();
    return out;
}

}  // namespace

std::vector<int> Partition::cell_members(int cell) const {
    std::vector<int> members;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        if (assignments[i] == cell) members.push_back(static_cast<int>(i));
    }
    return members;
}

void Partition::validate() const {
    const int m = num_cells();
    if (m <= 0) throw invalid_input_error("partition has no cells");
    if (static_cast<int>(cell_fractions.size()) != m ||
        static_cast<int>(prototype_indices.size()) != m) {
        throw invalid_input_error("partition bookkeeping sizes disagree");
    }
    std::vector<int> counts(static_cast<std::size_t>(m), 0);
    for (int a : assignments) {
        if (a < 0 || a >= m) throw invalid_input_error("partition assignment out of range");
        ++counts[static_cast<std::size_t>(a)];
    }
    for (int c = 0; c < m; ++c) {
        if (counts[static_cast<std::size_t>(c)] != cell_sizes[static_cast<std::size_t>(c)]) {
            throw invalid_input_error("partition cell sizes disagree with assignments");
        }
        if (counts[static_cast<std::size_t>(c)] == 0) {
            throw invalid_input_error("partition contains an empty cell");
        }
    }
}

std::vector<int> farthest_point_prototypes(const SampleCoords& coords, int h,
                                           const std::vector<int>& candidates) {
    const int n = static_cast<int>(coords.rows.rows());
    if (n == 0) throw invalid_input_error("farthest_point_prototypes: empty sample");
    if (h < 1) throw invalid_input_error("farthest_point_prototypes: h must be at least 1");
    if (h > n) {
        throw invalid_input_error("farthest_point_prototypes: h = " + std::to_string(h) +
                                  " exceeds the sample size " + std::to_string(n));
    }
    std::vector<int> pool;
    if (candidates.empty()) {
        pool.resize(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
    } else {
        pool = candidates;
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        if (pool.front() < 0 || pool.back() >= n) {
            throw invalid_input_error("farthest_point_prototypes: candidate index out of range");
        }
        if (h > static_cast<int>(pool.size())) {
            throw invalid_input_error(
                "farthest_point_prototypes: h exceeds the candidate pool size");
        }
    }

    std::vector<int> prototypes;
    prototypes.reserve(static_cast<std::size_t>(h));
    prototypes.push_back(medoid_index(coords, pool));

    // min_dist tracks each candidate's distance to the nearest chosen
    // prototype; the next prototype is the candidate maximizing it.
    Eigen::VectorXd min_dist = distances_to(coords, prototypes[0]);
    while (static_cast<int>(prototypes.size()) < h) {
        double best = -1.0;
        int best_idx = -1;
        for (int idx : pool) {
            if (min_dist[idx] > best) {  // strict: ties keep the smallest index
                best = min_dist[idx];
                best_idx = idx;
            }
        }
        if (best <= 0.0) break;  // every remaining candidate duplicates a prototype
        prototypes.push_back(best_idx);
        min_dist = min_dist.cwiseMin(distances_to(coords, best_idx));
    }
    return prototypes;
}

std::vector<int> farthest_point_prototypes(const std::vector<MetricObject>& x,
                                           const SpaceDescriptor& space, int h,
                                           const std::vector<int>& candidates) {
    return farthest_point_prototypes(distance_coords(space, x), h, candidates);
}

Partition assign_cells(const SampleCoords& coords, const std::vector<int>& prototypes) {
    if (prototypes.empty()) throw invalid_input_error("assign_cells: no prototypes");
    const int n = static_cast<int>(coords.rows.rows());
    for (int p : prototypes) {
        if (p < 0 || p >= n) throw invalid_input_error("assign_cells: prototype index out of range");
    }
    return finalize(prototypes, assign_labels(coords, prototypes),
                    static_cast<int>(prototypes.size()), 1);
}

Partition assign_cells(const std::vector<MetricObject>& x, const SpaceDescriptor& space,
                       const std::vector<int>& prototypes) {
    return assign_cells(distance_coords(space, x), prototypes);
}

Partition enforce_min_cell_size(const Partition& partition, const SampleCoords& coords,
                                int min_size) {
    if (min_size < 1) throw invalid_input_error("enforce_min_cell_size: min_size must be at least 1");
    partition.validate();
    if (partition.n() != static_cast<int>(coords.rows.rows())) {
        throw invalid_input_error("enforce_min_cell_size: coordinates do not match the partition");
    }
    if (partition.prototype_indices.empty()) {
        throw invalid_input_error("enforce_min_cell_size: partition lacks prototype indices");
    }
    std::vector<int> prototypes = partition.prototype_indices;
    std::vector<int> labels = partition.assignments;
    for (;;) {
        const std::vector<int> sizes = tally(labels, static_cast<int>(prototypes.size()));
        if (prototypes.size() <= 1) break;
        int victim = -1;
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            if (sizes[c] < min_size &&
                (victim < 0 || sizes[c] < sizes[static_cast<std::size_t>(victim)])) {
                victim = static_cast<int>(c);
            }
        }
        if (victim < 0) break;
        prototypes.erase(prototypes.begin() + victim);
        labels = assign_labels(coords, prototypes);
    }
    return finalize(std::move(prototypes), std::move(labels), partition.requested_h, min_size);
}

Partition enforce_min_cell_size(const Partition& partition, const std::vector<MetricObject>& x,
                                const SpaceDescriptor& space, int min_size) {
    return enforce_min_cell_size(partition, distance_coords(space, x), min_size);
}

Partition build_partition(const SampleCoords& coords, int h, int min_size,
                          const std::vector<int>& candidates) {
    const Partition raw = assign_cells(coords, farthest_point_prototypes(coords, h, candidates));
    Partition out = enforce_min_cell_size(raw, coords, min_size);
    out.requested_h = h;
    return out;
}

Partition build_partition(const std::vector<MetricObject>& x, const SpaceDescriptor& space,
                          int h, int min_size, const std::vector<int>& candidates) {
    return build_partition(distance_coords(space, x), h, min_size, candidates);
}

Partition partition_from_assignments(const std::vector<int>& assignments) {
    if (assignments.empty()) throw invalid_input_error("partition_from_assignments: empty labels");
    const int m = 1 + *std::max_element(assignments.begin(), assignments.end());
    if (*std::min_element(assignments.begin(), assignments.end()) < 0) {
        throw invalid_input_error("partition_from_assignments: negative label");
    }
    std::vector<int> prototypes(static_cast<std::size_t>(m), -1);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        auto& proto = prototypes[static_cast<std::size_t>(assignments[i])];
        if (proto < 0) proto = static_cast<int>(i);
    }
    for (int c = 0; c < m; ++c) {
        if (prototypes[static_cast<std::size_t>(c)] < 0) {
            throw invalid_input_error("partition_from_assignments: label " + std::to_string(c) +
                                      " has no members");
        }
    }
    return finalize(std::move(prototypes), assignments, m, 1);
}

void write_partition_csv(std::ostream& os, const Partition& partition) {
    partition.validate();
    os << "# farthest_point_partition H=" << partition.requested_h
       << " min_cell_size=" << partition.min_cell_size << " M=" << partition.num_cells()
       << " n=" << partition.n() << "\n";
    os << "obs_index,cell_index\n";
    for (std::size_t i = 0; i < partition.assignments.size(); ++i) {
        os << i << "," << partition.assignments[i] << "\n";
    }
}

}  // namespace fcc
