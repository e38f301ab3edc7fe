#include "fcc/metric_objects.hpp"

#include <algorithm>
#include <cmath>

namespace fcc {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kUnitNormTol = 1e-10;
constexpr double kCholeskyJitter = 1e-12;
constexpr double kKarcherTol = 1e-10;
constexpr int kKarcherMaxIter = 200;

void require(bool ok, const std::string& message) {
    if (!ok) throw invalid_input_error(message);
}

double max_abs(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Lower Cholesky factor; retries once with a small diagonal jitter so that
/// matrices grazing the SPD boundary (e.g. reconstructed from coordinates)
/// still factor, and throws geometry_error otherwise.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& y) {
    Eigen::LLT<Eigen::MatrixXd> llt(y);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::MatrixXd jittered = y;
    jittered.diagonal().array() += kCholeskyJitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    throw geometry_error("matrix is not positive definite (Cholesky failed)");
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym_eigen(const Eigen::MatrixXd& m,
                                                         const char* where) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) {
        throw convergence_error(std::string(where) + ": symmetric eigen-solver did not converge",
                                0, 0.0);
    }
    return es;
}

}  // namespace

const char* to_string(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::euclidean: return "euclidean";
        case SpaceKind::sphere: return "sphere";
        case SpaceKind::spd: return "spd";
        case SpaceKind::wasserstein: return "wasserstein";
    }
    return "?";
}

const char* to_string(MetricVariant variant) {
    switch (variant) {
        case MetricVariant::none: return "none";
        case MetricVariant::chordal: return "chordal";
        case MetricVariant::geodesic: return "geodesic";
        case MetricVariant::log_cholesky: return "log_cholesky";
        case MetricVariant::log_euclidean: return "log_euclidean";
    }
    return "?";
}

SpaceKind space_kind_from_string(const std::string& name) {
    if (name == "euclidean") return SpaceKind::euclidean;
    if (name == "sphere") return SpaceKind::sphere;
    if (name == "spd") return SpaceKind::spd;
    if (name == "wasserstein") return SpaceKind::wasserstein;
    throw invalid_input_error("unknown space kind: " + name);
}

MetricVariant metric_variant_from_string(const std::string& name) {
    if (name == "none") return MetricVariant::none;
    if (name == "chordal") return MetricVariant::chordal;
    if (name == "geodesic") return MetricVariant::geodesic;
    if (name == "log_cholesky") return MetricVariant::log_cholesky;
    if (name == "log_euclidean") return MetricVariant::log_euclidean;
    throw invalid_input_error("unknown metric variant: " + name);
}

Eigen::VectorXd midpoint_weights(const Eigen::VectorXd& grid) {
    const Eigen::Index m = grid.size();
    require(m >= 1, "midpoint_weights: grid must be non-empty");
    Eigen::VectorXd w(m);
    double lower = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double upper = (i + 1 < m) ? 0.5 * (grid[i] + grid[i + 1]) : 1.0;
        w[i] = upper - lower;
        lower = upper;
    }
    return w;
}

Eigen::VectorXd uniform_grid(int m, double lo, double hi) {
    require(m >= 1, "uniform_grid: need at least one level");
    require(lo > 0.0 && hi < 1.0 && lo <= hi, "uniform_grid: levels must satisfy 0 < lo <= hi < 1");
    if (m == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
    return Eigen::VectorXd::LinSpaced(m, lo, hi);
}

SpaceDescriptor SpaceDescriptor::euclidean(int d) {
    SpaceDescriptor s;
    s.kind = SpaceKind::euclidean;
    s.variant = MetricVariant::none;
    s.dim = d;
    s.validate();
    return s;
}

SpaceDescriptor SpaceDescriptor::sphere(int d, MetricVariant v) {
    SpaceDescriptor s;
    s.kind = SpaceKind::sphere;
    s.variant = v;
    s.dim = d;
    s.validate();
    return s;
}

SpaceDescriptor SpaceDescriptor::spd(int p, MetricVariant v) {
    SpaceDescriptor s;
    s.kind = SpaceKind::spd;
    s.variant = v;
    s.dim = p;
    s.validate();
    return s;
}

SpaceDescriptor SpaceDescriptor::wasserstein(Eigen::VectorXd grid) {
    Eigen::VectorXd w = midpoint_weights(grid);
    return wasserstein(std::move(grid), std::move(w));
}

SpaceDescriptor SpaceDescriptor::wasserstein(Eigen::VectorXd grid, Eigen::VectorXd weights) {
    SpaceDescriptor s;
    s.kind = SpaceKind::wasserstein;
    s.variant = MetricVariant::none;
    s.grid = std::move(grid);
    s.weights = std::move(weights);
    s.dim = static_cast<int>(s.grid.size());
    s.validate();
    return s;
}

void SpaceDescriptor::validate() const {
    switch (kind) {
        case SpaceKind::euclidean:
            require(variant == MetricVariant::none, "euclidean space takes no metric variant");
            require(dim >= 1, "euclidean dimension must be at least 1");
            break;
        case SpaceKind::sphere:
            require(variant == MetricVariant::chordal || variant == MetricVariant::geodesic,
                    "sphere metric must be chordal or geodesic");
            require(dim >= 2, "sphere ambient dimension must be at least 2");
            break;
        case SpaceKind::spd:
            require(variant == MetricVariant::log_cholesky || variant == MetricVariant::log_euclidean,
                    "spd metric must be log_cholesky or log_euclidean");
            require(dim >= 1, "spd matrix order must be at least 1");
            break;
        case SpaceKind::wasserstein: {
            require(variant == MetricVariant::none, "wasserstein space takes no metric variant");
            const Eigen::Index m = grid.size();
            require(m >= 1, "wasserstein grid must be non-empty");
            require(weights.size() == m, "wasserstein weights must match the grid length");
            require(dim == m, "wasserstein dim must equal the grid length");
            for (Eigen::Index i = 0; i < m; ++i) {
                require(grid[i] > 0.0 && grid[i] < 1.0, "grid levels must lie strictly inside (0, 1)");
                if (i > 0) require(grid[i] > grid[i - 1], "grid levels must be strictly increasing");
                require(weights[i] > 0.0, "grid weights must be positive");
            }
            require(std::abs(weights.sum() - 1.0) <= 1e-8, "grid weights must sum to one");
            break;
        }
    }
}

MetricObject::MetricObject(SpaceKind kind, Eigen::VectorXd vec)
    : kind_(kind), vec_(std::move(vec)) {}

MetricObject::MetricObject(Eigen::MatrixXd mat)
    : kind_(SpaceKind::spd), mat_(std::move(mat)) {}

MetricObject MetricObject::euclidean(Eigen::VectorXd values) {
    require(values.size() >= 1, "euclidean object must have at least one coordinate");
    require(values.allFinite(), "euclidean object has non-finite entries");
    return MetricObject(SpaceKind::euclidean, std::move(values));
}

MetricObject MetricObject::sphere(Eigen::VectorXd coords) {
    require(coords.size() >= 2, "sphere object needs ambient dimension at least 2");
    require(coords.allFinite(), "sphere object has non-finite entries");
    const double norm = coords.norm();
    if (std::abs(norm - 1.0) > kUnitNormTol) {
        throw invalid_input_error("sphere object is off the unit sphere (|norm - 1| = " +
                                  std::to_string(std::abs(norm - 1.0)) + ")");
    }
    return MetricObject(SpaceKind::sphere, std::move(coords));
}

MetricObject MetricObject::spd(Eigen::MatrixXd entries) {
    require(entries.rows() == entries.cols() && entries.rows() >= 1,
            "spd object must be a square matrix");
    require(entries.allFinite(), "spd object has non-finite entries");
    const double asym = max_abs(entries - entries.transpose());
    if (asym > kSymmetryTol * std::max(1.0, max_abs(entries))) {
        throw invalid_input_error("spd object is not symmetric (max asymmetry " +
                                  std::to_string(asym) + ")");
    }
    Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
    cholesky_factor(sym);  // definiteness check; result discarded
    return MetricObject(std::move(sym));
}

MetricObject MetricObject::quantile(Eigen::VectorXd values) {
    require(values.size() >= 1, "quantile object must have at least one value");
    require(values.allFinite(), "quantile object has non-finite entries");
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        const double slack = 1e-12 * std::max(1.0, std::abs(values[i - 1]));
        if (values[i] < values[i - 1] - slack) {
            throw invalid_input_error("quantile values must be non-decreasing (violation at index " +
                                      std::to_string(i) + ")");
        }
    }
    return MetricObject(SpaceKind::wasserstein, std::move(values));
}

const Eigen::VectorXd& MetricObject::vector() const {
    if (kind_ == SpaceKind::spd) {
        throw invalid_input_error("vector(): object is an spd matrix");
    }
    return vec_;
}

const Eigen::MatrixXd& MetricObject::matrix() const {
    if (kind_ != SpaceKind::spd) {
        throw invalid_input_error("matrix(): object is not an spd matrix");
    }
    return mat_;
}

Eigen::Index MetricObject::size() const {
    return kind_ == SpaceKind::spd ? mat_.rows() : vec_.size();
}

bool MetricObject::matches(const SpaceDescriptor& space) const {
    if (kind_ != space.kind) return false;
    if (space.kind == SpaceKind::wasserstein) return vec_.size() == space.grid.size();
    return size() == space.dim;
}

void validate_sample(const SpaceDescriptor& space, const std::vector<MetricObject>& sample,
                     const std::string& what) {
    space.validate();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (!sample[i].matches(space)) {
            throw invalid_input_error(what + "[" + std::to_string(i) + "] does not live in the " +
                                      to_string(space.kind) + " space (kind " +
                                      to_string(sample[i].kind()) + ", size " +
                                      std::to_string(sample[i].size()) + ")");
        }
    }
}

namespace {

// Pairwise-distance coordinates of a single object; shared by
// distance_coords and by frechet_mean's variance pass.
Eigen::VectorXd object_coords(const SpaceDescriptor& space, const MetricObject& obj) {
    switch (space.kind) {
        case SpaceKind::euclidean:
        case SpaceKind::sphere:
            return obj.vector();
        case SpaceKind::wasserstein:
            return obj.vector().cwiseProduct(space.weights.cwiseSqrt());
        case SpaceKind::spd: {
            if (space.variant == MetricVariant::log_cholesky) {
                return spd_log_cholesky_coords(obj);
            }
            // Log-Euclidean: pack the diagonal of log(Y) followed by the
            // upper off-diagonal scaled by sqrt(2), so row distances equal
            // Frobenius distances between matrix logs.
            const Eigen::MatrixXd lg = spd_matrix_log(obj);
            const int p = static_cast<int>(lg.rows());
            Eigen::VectorXd out(p * (p + 1) / 2);
            Eigen::Index k = 0;
            for (int i = 0; i < p; ++i) out[k++] = lg(i, i);
            const double root2 = std::sqrt(2.0);
            for (int i = 0; i < p; ++i)
                for (int j = i + 1; j < p; ++j) out[k++] = root2 * lg(i, j);
            return out;
        }
    }
    throw invalid_input_error("object_coords: unknown space kind");
}

// Angle between unit vectors. The half-angle form stays accurate near 0 and
// pi, where acos of the clamped dot product loses half the working digits.
double unit_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

}  // namespace

double SampleCoords::operator()(Eigen::Index i, Eigen::Index j) const {
    if (geodesic_sphere) {
        return 2.0 * std::atan2((rows.row(i) - rows.row(j)).norm(),
                                (rows.row(i) + rows.row(j)).norm());
    }
    return (rows.row(i) - rows.row(j)).norm();
}

SampleCoords distance_coords(const SpaceDescriptor& space,
                             const std::vector<MetricObject>& sample) {
    validate_sample(space, sample, "sample");
    SampleCoords coords;
    coords.geodesic_sphere =
        space.kind == SpaceKind::sphere && space.variant == MetricVariant::geodesic;
    if (sample.empty()) return coords;
    const Eigen::VectorXd first = object_coords(space, sample[0]);
    coords.rows.resize(static_cast<Eigen::Index>(sample.size()), first.size());
    coords.rows.row(0) = first;
    for (std::size_t i = 1; i < sample.size(); ++i) {
        coords.rows.row(static_cast<Eigen::Index>(i)) = object_coords(space, sample[i]);
    }
    return coords;
}

double distance(const SpaceDescriptor& space, const MetricObject& a, const MetricObject& b) {
    space.validate();
    if (!a.matches(space) || !b.matches(space)) {
        throw invalid_input_error("distance: objects do not match the space descriptor");
    }
    switch (space.kind) {
        case SpaceKind::euclidean:
            return (a.vector() - b.vector()).norm();
        case SpaceKind::sphere: {
            if (space.variant == MetricVariant::chordal) return (a.vector() - b.vector()).norm();
            return unit_angle(a.vector(), b.vector());
        }
        case SpaceKind::spd:
            if (space.variant == MetricVariant::log_cholesky) {
                return (spd_log_cholesky_coords(a) - spd_log_cholesky_coords(b)).norm();
            }
            return (spd_matrix_log(a) - spd_matrix_log(b)).norm();
        case SpaceKind::wasserstein: {
            const Eigen::VectorXd diff = a.vector() - b.vector();
            return std::sqrt(diff.cwiseAbs2().dot(space.weights));
        }
    }
    throw invalid_input_error("distance: unknown space kind");
}

Eigen::VectorXd sphere_log(const Eigen::VectorXd& base, const Eigen::VectorXd& y) {
    if (base.size() != y.size()) {
        throw invalid_input_error("sphere_log: dimension mismatch");
    }
    const double dot = std::clamp(base.dot(y), -1.0, 1.0);
    if (dot < -1.0 + 1e-12) {
        throw geometry_error("sphere_log is undefined at the antipode of the base point");
    }
    const double theta = unit_angle(base, y);
    if (theta < 1e-12) return Eigen::VectorXd::Zero(base.size());
    Eigen::VectorXd radial = y - dot * base;
    const double rnorm = radial.norm();
    if (rnorm < 1e-300) return Eigen::VectorXd::Zero(base.size());
    return (theta / rnorm) * radial;
}

Eigen::VectorXd sphere_exp(const Eigen::VectorXd& base, const Eigen::VectorXd& tangent) {
    if (base.size() != tangent.size()) {
        throw invalid_input_error("sphere_exp: dimension mismatch");
    }
    const double t = tangent.norm();
    if (t < 1e-300) return base.normalized();
    Eigen::VectorXd out = std::cos(t) * base + (std::sin(t) / t) * tangent;
    return out.normalized();
}

Eigen::VectorXd spd_log_cholesky_coords(const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd L = cholesky_factor(0.5 * (y + y.transpose()));
    const int p = static_cast<int>(L.rows());
    Eigen::VectorXd coords(log_cholesky_dim(p));
    Eigen::Index k = 0;
    for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j) coords[k++] = L(i, j);
    for (int i = 0; i < p; ++i) coords[k++] = std::log(L(i, i));
    return coords;
}

Eigen::VectorXd spd_log_cholesky_coords(const MetricObject& y) {
    return spd_log_cholesky_coords(y.matrix());
}

Eigen::MatrixXd spd_from_log_cholesky_coords(const Eigen::VectorXd& coords, int p) {
    require(p >= 1, "spd_from_log_cholesky_coords: order must be at least 1");
    require(coords.size() == log_cholesky_dim(p),
            "spd_from_log_cholesky_coords: expected " + std::to_string(log_cholesky_dim(p)) +
                " coordinates");
    require(coords.allFinite(), "spd_from_log_cholesky_coords: non-finite coordinates");
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(p, p);
    Eigen::Index k = 0;
    for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j) L(i, j) = coords[k++];
    for (int i = 0; i < p; ++i) L(i, i) = std::exp(coords[k++]);
    Eigen::MatrixXd y = L * L.transpose();
    return 0.5 * (y + y.transpose());
}

Eigen::MatrixXd spd_matrix_log(const Eigen::MatrixXd& y) {
    require(y.rows() == y.cols() && y.rows() >= 1, "spd_matrix_log: matrix must be square");
    const double asym = max_abs(y - y.transpose());
    if (asym > kSymmetryTol * std::max(1.0, max_abs(y))) {
        throw geometry_error("spd_matrix_log: matrix is not symmetric");
    }
    const auto es = sym_eigen(0.5 * (y + y.transpose()), "spd_matrix_log");
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw geometry_error("spd_matrix_log: matrix has a non-positive eigenvalue");
    }
    const Eigen::MatrixXd out = es.eigenvectors() *
                                es.eigenvalues().array().log().matrix().asDiagonal() *
                                es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd spd_matrix_log(const MetricObject& y) { return spd_matrix_log(y.matrix()); }

Eigen::MatrixXd spd_matrix_exp(const Eigen::MatrixXd& sym) {
    require(sym.rows() == sym.cols() && sym.rows() >= 1, "spd_matrix_exp: matrix must be square");
    const double asym = max_abs(sym - sym.transpose());
    if (asym > kSymmetryTol * std::max(1.0, max_abs(sym))) {
        throw geometry_error("spd_matrix_exp: matrix is not symmetric");
    }
    const auto es = sym_eigen(0.5 * (sym + sym.transpose()), "spd_matrix_exp");
    const Eigen::MatrixXd out = es.eigenvectors() *
                                es.eigenvalues().array().exp().matrix().asDiagonal() *
                                es.eigenvectors().transpose();
    return 0.5 * (out + out.transpose());
}

namespace {

Eigen::VectorXd normalized_weights(std::size_t n, const Eigen::VectorXd& weights) {
    if (weights.size() == 0) {
        return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
    }
    require(static_cast<std::size_t>(weights.size()) == n,
            "frechet_mean: weights must match the number of points");
    require((weights.array() >= 0.0).all(), "frechet_mean: weights must be non-negative");
    const double total = weights.sum();
    require(total > 0.0, "frechet_mean: weights must have a positive sum");
    return weights / total;
}

// Weighted sum of squared geodesic distances from mu; the quantity the
// Karcher iteration drives down.
double sphere_spread(const std::vector<MetricObject>& points, const Eigen::VectorXd& w,
                     const Eigen::VectorXd& mu) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double theta = unit_angle(mu, points[i].vector());
        total += w[static_cast<Eigen::Index>(i)] * theta * theta;
    }
    return total;
}

MetricObject karcher_sphere_mean(const std::vector<MetricObject>& points,
                                 const Eigen::VectorXd& w, int& iterations,
                                 double& gradient_norm) {
    const Eigen::Index d = points[0].size();
    Eigen::VectorXd ambient = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < points.size(); ++i) {
        ambient += w[static_cast<Eigen::Index>(i)] * points[i].vector();
    }
    Eigen::VectorXd mu =
        (ambient.norm() > 1e-12) ? Eigen::VectorXd(ambient.normalized()) : points[0].vector();
    gradient_norm = 0.0;
    for (iterations = 1; iterations <= kKarcherMaxIter; ++iterations) {
        // One pass collects the gradient and the Hessian of the spread on the
        // tangent space at mu (both expressed in ambient coordinates).
        Eigen::VectorXd tangent = Eigen::VectorXd::Zero(d);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(d, d);
        const Eigen::MatrixXd perp = Eigen::MatrixXd::Identity(d, d) - mu * mu.transpose();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const Eigen::VectorXd u = sphere_log(mu, points[i].vector());
            const double theta = u.norm();
            const double wi = w[static_cast<Eigen::Index>(i)];
            tangent += wi * u;
            if (theta < 1e-8) {
                hess += 2.0 * wi * perp;
                continue;
            }
            const double c = theta / std::tan(theta);
            const Eigen::VectorXd e = u / theta;
            hess += 2.0 * wi * ((1.0 - c) * e * e.transpose() + c * perp);
        }
        gradient_norm = tangent.norm();
        if (gradient_norm < kKarcherTol) return MetricObject::sphere(mu);
        // Below this gradient the spread changes by less than its rounding
        // noise, so decrease tests are meaningless and steps are accepted
        // outright.
        const bool noise_floor = gradient_norm < 1e-6;
        // Newton candidate: hess annihilates mu by construction, so pinning
        // the normal direction makes the ambient solve act on the tangent
        // space alone. The plain fixed-point step crawls when the Hessian has
        // a near-flat direction; Newton does not.
        const Eigen::LDLT<Eigen::MatrixXd> solver(hess + mu * mu.transpose());
        Eigen::VectorXd newton = solver.solve(2.0 * tangent);
        newton -= mu * mu.dot(newton);
        const bool newton_ok = solver.info() == Eigen::Success &&
                               newton.dot(tangent) > 0.0 &&
                               newton.norm() < (noise_floor ? 0.1 : 3.2);
        const double current = noise_floor ? 0.0 : sphere_spread(points, w, mu);
        if (newton_ok) {
            const Eigen::VectorXd candidate = sphere_exp(mu, newton);
            if (noise_floor || sphere_spread(points, w, candidate) < current) {
                mu = candidate;
                continue;
            }
        }
        if (noise_floor) {
            mu = sphere_exp(mu, tangent);
            continue;
        }
        // Guarded fallback: full fixed-point steps can cycle when the data
        // spread past a hemisphere, so halve the step until the weighted
        // spread goes down.
        double step = 1.0;
        bool moved = false;
        for (int halvings = 0; halvings < 60 && !moved; ++halvings) {
            const Eigen::VectorXd candidate = sphere_exp(mu, step * tangent);
            if (sphere_spread(points, w, candidate) < current) {
                mu = candidate;
                moved = true;
            }
            step *= 0.5;
        }
        if (!moved) {
            throw convergence_error(
                "sphere geodesic mean: step search stalled before reaching the gradient tolerance",
                iterations, gradient_norm);
        }
    }
    throw convergence_error("sphere geodesic mean: Karcher iteration hit the cap of " +
                                std::to_string(kKarcherMaxIter) + " steps",
                            kKarcherMaxIter, gradient_norm);
}

}  // namespace

FrechetSummary frechet_mean(const SpaceDescriptor& space, const std::vector<MetricObject>& points,
                            const Eigen::VectorXd& weights) {
    require(!points.empty(), "frechet_mean: need at least one point");
    validate_sample(space, points, "points");
    const Eigen::VectorXd w = normalized_weights(points.size(), weights);

    int iterations = 0;
    double gradient_norm = 0.0;
    MetricObject mean = [&]() -> MetricObject {
        switch (space.kind) {
            case SpaceKind::euclidean: {
                Eigen::VectorXd m = Eigen::VectorXd::Zero(space.dim);
                for (std::size_t i = 0; i < points.size(); ++i)
                    m += w[static_cast<Eigen::Index>(i)] * points[i].vector();
                return MetricObject::euclidean(std::move(m));
            }
            case SpaceKind::wasserstein: {
                Eigen::VectorXd m = Eigen::VectorXd::Zero(space.grid.size());
                for (std::size_t i = 0; i < points.size(); ++i)
                    m += w[static_cast<Eigen::Index>(i)] * points[i].vector();
                return MetricObject::quantile(std::move(m));
            }
            case SpaceKind::spd: {
                if (space.variant == MetricVariant::log_cholesky) {
                    Eigen::VectorXd m = Eigen::VectorXd::Zero(log_cholesky_dim(space.dim));
                    for (std::size_t i = 0; i < points.size(); ++i)
                        m += w[static_cast<Eigen::Index>(i)] * spd_log_cholesky_coords(points[i]);
                    return MetricObject::spd(spd_from_log_cholesky_coords(m, space.dim));
                }
                Eigen::MatrixXd m = Eigen::MatrixXd::Zero(space.dim, space.dim);
                for (std::size_t i = 0; i < points.size(); ++i)
                    m += w[static_cast<Eigen::Index>(i)] * spd_matrix_log(points[i]);
                return MetricObject::spd(spd_matrix_exp(m));
            }
            case SpaceKind::sphere: {
                if (space.variant == MetricVariant::chordal) {
                    Eigen::VectorXd m = Eigen::VectorXd::Zero(space.dim);
                    for (std::size_t i = 0; i < points.size(); ++i)
                        m += w[static_cast<Eigen::Index>(i)] * points[i].vector();
                    const double norm = m.norm();
                    if (norm < 1e-12) {
                        throw degenerate_error(
                            "sphere chordal mean is undefined: the ambient weighted mean "
                            "has zero norm");
                    }
                    return MetricObject::sphere(m / norm);
                }
                return karcher_sphere_mean(points, w, iterations, gradient_norm);
            }
        }
        throw invalid_input_error("frechet_mean: unknown space kind");
    }();

    // Variance is the attained objective: the weighted mean squared distance
    // to the returned mean, evaluated with the same coordinates distance()
    // uses so the two agree to machine precision.
    const SampleCoords coords = distance_coords(space, points);
    const Eigen::VectorXd mean_row = object_coords(space, mean);
    double variance = 0.0;
    for (Eigen::Index i = 0; i < coords.rows.rows(); ++i) {
        double d;
        if (coords.geodesic_sphere) {
            d = std::acos(std::clamp(coords.rows.row(i).dot(mean_row), -1.0, 1.0));
        } else {
            d = (coords.rows.row(i).transpose() - mean_row).norm();
        }
        variance += w[i] * d * d;
    }
    return FrechetSummary{std::move(mean), variance, iterations, gradient_norm};
}

}  // namespace fcc
