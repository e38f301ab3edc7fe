#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fcc/errors.hpp"

namespace fcc {

enum class SpaceKind { euclidean, sphere, spd, wasserstein };

/// Metric choice within a space kind. Spheres carry the chordal (ambient
/// Euclidean) or geodesic (arc length) metric; SPD matrices carry the
/// Log-Cholesky or log-Euclidean metric. Euclidean and Wasserstein spaces
/// use `none`.
enum class MetricVariant { none, chordal, geodesic, log_cholesky, log_euclidean };

const char* to_string(SpaceKind kind);
const char* to_string(MetricVariant variant);
SpaceKind space_kind_from_string(const std::string& name);
MetricVariant metric_variant_from_string(const std::string& name);

/// Midpoint-rule weights for a strictly increasing grid inside (0, 1): each
/// weight is the width of the cell whose boundaries sit halfway between
/// neighbouring grid points, with the first and last cells extended to 0 and
/// 1 so the weights sum to one exactly.
Eigen::VectorXd midpoint_weights(const Eigen::VectorXd& grid);

/// Evenly spaced grid of m levels from lo to hi inclusive.
Eigen::VectorXd uniform_grid(int m, double lo = 0.01, double hi = 0.99);

/// Declares the geometry an operation works in: space kind, metric variant,
/// dimension, and for Wasserstein spaces the quantile grid with integration
/// weights.
struct SpaceDescriptor {
    SpaceKind kind = SpaceKind::euclidean;
    MetricVariant variant = MetricVariant::none;
    int dim = 1;             // ambient dimension (euclidean, sphere) or matrix order p (spd)
    Eigen::VectorXd grid;    // wasserstein only: strictly increasing levels in (0, 1)
    Eigen::VectorXd weights; // wasserstein only: positive, sums to one

    static SpaceDescriptor euclidean(int d);
    static SpaceDescriptor sphere(int d, MetricVariant v = MetricVariant::chordal);
    static SpaceDescriptor spd(int p, MetricVariant v = MetricVariant::log_cholesky);
    static SpaceDescriptor wasserstein(Eigen::VectorXd grid);
    static SpaceDescriptor wasserstein(Eigen::VectorXd grid, Eigen::VectorXd weights);

    /// Throws invalid_input_error if the descriptor is not well formed.
    void validate() const;
};

/// A point of one of the supported metric spaces. Construction validates the
/// space invariants; instances are immutable afterwards.
class MetricObject {
public:
    /// Vector in R^d.
    static MetricObject euclidean(Eigen::VectorXd values);
    /// Unit vector on S^{d-1}; the norm must be 1 within 1e-10.
    static MetricObject sphere(Eigen::VectorXd coords);
    /// Symmetric positive definite matrix. Symmetry is checked to 1e-10 and
    /// definiteness via a Cholesky factorization, retried once with a 1e-12
    /// diagonal jitter before failing.
    static MetricObject spd(Eigen::MatrixXd entries);
    /// Non-decreasing quantile values on a shared grid.
    static MetricObject quantile(Eigen::VectorXd values);

    SpaceKind kind() const { return kind_; }

    /// Payload of euclidean, sphere and quantile objects.
    const Eigen::VectorXd& vector() const;
    /// Payload of spd objects.
    const Eigen::MatrixXd& matrix() const;

    /// Vector length, or matrix order p for spd objects.
    Eigen::Index size() const;

    /// True when this object can live in the given space.
    bool matches(const SpaceDescriptor& space) const;

private:
    MetricObject(SpaceKind kind, Eigen::VectorXd vec);
    MetricObject(Eigen::MatrixXd mat);

    SpaceKind kind_;
    Eigen::VectorXd vec_;
    Eigen::MatrixXd mat_;
};

/// Frechet mean together with the attained mean squared distance and, for
/// iterative geometries, the solver trace.
struct FrechetSummary {
    MetricObject mean;
    double variance = 0.0;
    int iterations = 0;         // 0 when the mean has a closed form
    double gradient_norm = 0.0; // tangent-mean norm at the final iterate
};

/// Metric distance between two objects of the space.
double distance(const SpaceDescriptor& space, const MetricObject& a,
                const MetricObject& b);

/// Weighted Frechet mean. Empty weights mean equal weighting; otherwise
/// weights must be non-negative with a positive sum (they are normalized
/// internally). The sphere geodesic mean runs Karcher iteration with unit
/// step, tolerance 1e-10 on the tangent-mean norm, and an iteration cap of
/// 200, throwing convergence_error when the cap is hit.
FrechetSummary frechet_mean(const SpaceDescriptor& space,
                            const std::vector<MetricObject>& points,
                            const Eigen::VectorXd& weights = Eigen::VectorXd());

/// Riemannian log map on the unit sphere: the tangent vector at `base` whose
/// norm is the geodesic distance to `y`. Returns the zero vector when y and
/// base coincide; throws geometry_error within 1e-12 of the antipode, where
/// the map is undefined.
Eigen::VectorXd sphere_log(const Eigen::VectorXd& base, const Eigen::VectorXd& y);

/// Riemannian exponential on the unit sphere; inverse of sphere_log for
/// tangent norms below pi.
Eigen::VectorXd sphere_exp(const Eigen::VectorXd& base, const Eigen::VectorXd& tangent);

/// Number of Log-Cholesky coordinates of a p x p SPD matrix.
inline int log_cholesky_dim(int p) { return p + p * (p - 1) / 2; }

/// Log-Cholesky coordinates: the strict lower triangle of the Cholesky factor
/// in row-major order, followed by the logs of its diagonal. Euclidean
/// distance between coordinate vectors is exactly the Log-Cholesky metric.
Eigen::VectorXd spd_log_cholesky_coords(const Eigen::MatrixXd& y);
Eigen::VectorXd spd_log_cholesky_coords(const MetricObject& y);

/// Inverse of spd_log_cholesky_coords.
Eigen::MatrixXd spd_from_log_cholesky_coords(const Eigen::VectorXd& coords, int p);

/// Matrix logarithm of an SPD matrix via its spectral decomposition.
Eigen::MatrixXd spd_matrix_log(const Eigen::MatrixXd& y);
Eigen::MatrixXd spd_matrix_log(const MetricObject& y);

/// Matrix exponential of a symmetric matrix via its spectral decomposition.
Eigen::MatrixXd spd_matrix_exp(const Eigen::MatrixXd& sym);

/// Coordinate rows for a whole sample, used by the partition, estimator and
/// baseline code to evaluate many distances cheaply. For every geometry
/// except the geodesic sphere, the Euclidean distance between two rows equals
/// the metric distance between the objects; the geodesic sphere keeps ambient
/// unit vectors and computes arc length from their inner product.
struct SampleCoords {
    Eigen::MatrixXd rows;
    bool geodesic_sphere = false;

    double operator()(Eigen::Index i, Eigen::Index j) const;
};

SampleCoords distance_coords(const SpaceDescriptor& space,
                             const std::vector<MetricObject>& sample);

/// Checks that every object matches the space; throws invalid_input_error
/// naming the first offending index. `what` names the sample in messages.
void validate_sample(const SpaceDescriptor& space,
                     const std::vector<MetricObject>& sample,
                     const std::string& what);

}  // namespace fcc
