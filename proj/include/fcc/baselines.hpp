#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "fcc/bootstrap.hpp"
#include "fcc/metric_objects.hpp"

namespace fcc {

/// Paired scalar sample for the classical baselines.
struct ScalarPairSample {
    Eigen::VectorXd x;
    Eigen::VectorXd y;

    static ScalarPairSample make(Eigen::VectorXd x, Eigen::VectorXd y);
    Eigen::Index n() const { return x.size(); }
};

/// Product-moment correlation; throws degenerate_error when either
/// coordinate has zero variance.
double pearson_r(const ScalarPairSample& s);

/// Chatterjee's rank correlation. Observations are ordered by x with ties
/// broken by a seeded uniform jitter of the order (jitter_seed documents the
/// stream; only tied x values are affected). Ranks r_i use the max-rank
/// convention over all y; with l_i the count of y values >= y_i,
///   xi = 1 - n * sum |r_{i+1} - r_i| / (2 * sum l_i (n - l_i)),
/// which reduces to 1 - 3 sum |r_{i+1} - r_i| / (n^2 - 1) without ties.
/// Returns 0 when the denominator vanishes (constant y).
double chatterjee_xi(const ScalarPairSample& s, std::uint64_t jitter_seed = 0xC0FFEEull);

/// Metric distance covariance, V-statistic form: the mean of the elementwise
/// product of the double-centered pairwise distance matrices of the two
/// samples under their own metrics, clamped at zero. Requires n >= 4.
double energy_dcov_stat(const std::vector<MetricObject>& x, const std::vector<MetricObject>& y,
                        const SpaceDescriptor& space_x, const SpaceDescriptor& space_y);

/// Permutation test of the distance covariance: distance matrices are built
/// once and replicate b relabels the response side with the Fisher-Yates
/// permutation driven by mix64(seed, b), matching permutation_test's stream.
TestResult energy_dcov_permutation_test(const std::vector<MetricObject>& x,
                                        const std::vector<MetricObject>& y,
                                        const SpaceDescriptor& space_x,
                                        const SpaceDescriptor& space_y, int num_replicates,
                                        std::uint64_t seed);

}  // namespace fcc
