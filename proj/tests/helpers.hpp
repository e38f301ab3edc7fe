#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "fcc/metric_objects.hpp"
#include "fcc/rng.hpp"

namespace fcc::testing {

inline Eigen::VectorXd random_vector(int d, Rng& rng, double scale = 1.0) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = scale * rng.normal();
    return v;
}

inline MetricObject random_sphere_point(int d, Rng& rng) {
    for (;;) {
        Eigen::VectorXd v = random_vector(d, rng);
        const double norm = v.norm();
        if (norm > 1e-8) return MetricObject::sphere(v / norm);
    }
}

inline MetricObject random_spd_matrix(int p, Rng& rng) {
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) a(i, j) = rng.normal();
    }
    Eigen::MatrixXd s = a * a.transpose() + 0.2 * Eigen::MatrixXd::Identity(p, p);
    s = 0.5 * (s + s.transpose()).eval();
    return MetricObject::spd(s);
}

inline MetricObject random_quantile(const Eigen::VectorXd& grid, Rng& rng) {
    // Location-scale family around standard normal quantiles, always
    // strictly increasing.
    const double location = rng.normal();
    const double scale = 0.2 + rng.uniform01();
    Eigen::VectorXd q(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        q[j] = location + scale * inv_normal_cdf(grid[j]);
    }
    return MetricObject::quantile(q);
}

inline MetricObject random_object(const SpaceDescriptor& space, Rng& rng) {
    switch (space.kind) {
        case SpaceKind::euclidean: return MetricObject::euclidean(random_vector(space.dim, rng));
        case SpaceKind::sphere: return random_sphere_point(space.dim, rng);
        case SpaceKind::spd: return random_spd_matrix(space.dim, rng);
        case SpaceKind::wasserstein: return random_quantile(space.grid, rng);
    }
    throw std::logic_error("unreachable space kind");
}

inline std::vector<MetricObject> random_sample(const SpaceDescriptor& space, int n, Rng& rng) {
    std::vector<MetricObject> sample;
    sample.reserve(n);
    for (int i = 0; i < n; ++i) sample.push_back(random_object(space, rng));
    return sample;
}

/// Kolmogorov-Smirnov distance between a sample and a reference CDF.
template <class Cdf>
double ks_distance(std::vector<double> values, Cdf&& cdf) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double f = cdf(values[i]);
        sup = std::max(sup, std::abs((i + 1) / n - f));
        sup = std::max(sup, std::abs(i / n - f));
    }
    return sup;
}

/// Classical one-way ANOVA sums for a scalar response, computed directly.
struct AnovaSums {
    double between = 0.0;  // S_B
    double total = 0.0;    // S_T
};

inline AnovaSums scalar_anova(const std::vector<double>& y, const std::vector<int>& cell,
                              int num_cells) {
    const int n = static_cast<int>(y.size());
    std::vector<double> sum(num_cells, 0.0);
    std::vector<int> count(num_cells, 0);
    double grand = 0.0;
    for (int i = 0; i < n; ++i) {
        sum[cell[i]] += y[i];
        ++count[cell[i]];
        grand += y[i];
    }
    grand /= n;
    AnovaSums out;
    for (int m = 0; m < num_cells; ++m) {
        if (count[m] == 0) continue;
        const double mean = sum[m] / count[m];
        out.between += count[m] * (mean - grand) * (mean - grand);
    }
    for (int i = 0; i < n; ++i) out.total += (y[i] - grand) * (y[i] - grand);
    return out;
}

}  // namespace fcc::testing
