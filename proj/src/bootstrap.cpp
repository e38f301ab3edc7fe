#include "fcc/bootstrap.hpp"

#include <cmath>

#include "fcc/parallel.hpp"

namespace fcc {

const char* to_string(MultiplierKind kind) {
    switch (kind) {
        case MultiplierKind::rademacher: return "rademacher";
        case MultiplierKind::gaussian: return "gaussian";
        case MultiplierKind::mammen_two_point: return "mammen_two_point";
    }
    return "?";
}

MultiplierKind multiplier_from_string(const std::string& name) {
    if (name == "rademacher") return MultiplierKind::rademacher;
    if (name == "gaussian") return MultiplierKind::gaussian;
    if (name == "mammen" || name == "mammen_two_point") return MultiplierKind::mammen_two_point;
    throw invalid_input_error("unknown multiplier law: " + name);
}

const char* to_string(NormalizationKind kind) {
    switch (kind) {
        case NormalizationKind::identity: return "identity";
        case NormalizationKind::plugin_hessian: return "plugin_hessian";
    }
    return "?";
}

NormalizationKind normalization_from_string(const std::string& name) {
    if (name == "identity") return NormalizationKind::identity;
    if (name == "plugin" || name == "plugin_hessian") return NormalizationKind::plugin_hessian;
    throw invalid_input_error("unknown normalization kind: " + name);
}

double draw_multiplier(MultiplierKind kind, Rng& rng) {
    switch (kind) {
        case MultiplierKind::rademacher:
            return rng.uniform01() < 0.5 ? -1.0 : 1.0;
        case MultiplierKind::gaussian:
            return rng.normal();
        case MultiplierKind::mammen_two_point: {
            // Two-point law at (1 -+ sqrt5)/2 with P(lower) = (sqrt5+1)/(2 sqrt5);
            // mean 0, variance 1, and E[xi^3] = 1.
            static const double root5 = std::sqrt(5.0);
            static const double p_lower = (root5 + 1.0) / (2.0 * root5);
            return rng.uniform01() < p_lower ? (1.0 - root5) / 2.0 : (1.0 + root5) / 2.0;
        }
    }
    throw invalid_input_error("draw_multiplier: unknown law");
}

namespace {

// Hessian of the (possibly cell-restricted) Frechet objective at the global
// mean, in an orthonormal tangent chart, by averaged central second
// differences. Used only for sphere responses; flat geometries have the
// exact Hessian 2I.
Eigen::MatrixXd sphere_objective_hessian(const SpaceDescriptor& space,
                                         const std::vector<MetricObject>& y,
                                         const std::vector<int>& members,
                                         const Eigen::VectorXd& base,
                                         const Eigen::MatrixXd& tangent_basis, double step) {
    const bool geodesic = space.variant == MetricVariant::geodesic;
    const auto objective = [&](const Eigen::VectorXd& t) {
        const Eigen::VectorXd point = sphere_exp(base, tangent_basis * t);
        double total = 0.0;
        for (int idx : members) {
            const Eigen::VectorXd& obs = y[static_cast<std::size_t>(idx)].vector();
            double d;
            if (geodesic) {
                d = std::acos(std::clamp(point.dot(obs), -1.0, 1.0));
            } else {
                d = (point - obs).norm();
            }
            total += d * d;
        }
        return total / static_cast<double>(members.size());
    };

    const Eigen::Index k = tangent_basis.cols();
    Eigen::MatrixXd hess(k, k);
    const double f0 = objective(Eigen::VectorXd::Zero(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
        e[j] = step;
        hess(j, j) = (objective(e) - 2.0 * f0 + objective(-e)) / (step * step);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index l = j + 1; l < k; ++l) {
            Eigen::VectorXd epp = Eigen::VectorXd::Zero(k);
            epp[j] = step;
            epp[l] = step;
            Eigen::VectorXd epm = Eigen::VectorXd::Zero(k);
            epm[j] = step;
            epm[l] = -step;
            const double v =
                (objective(epp) - objective(epm) - objective(-epm) + objective(-epp)) /
                (4.0 * step * step);
            hess(j, l) = v;
            hess(l, j) = v;
        }
    }
    return hess;
}

Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
        throw geometry_error(std::string(what) + ": estimated Hessian is not positive definite");
    }
    return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

}  // namespace

NormalizationSpec make_plugin_normalization(const std::vector<MetricObject>& y,
                                            const SpaceDescriptor& space_y,
                                            const Partition& partition, double step) {
    partition.validate();
    if (static_cast<int>(y.size()) != partition.n()) {
        throw invalid_input_error("make_plugin_normalization: sample does not match partition");
    }
    validate_sample(space_y, y, "y");
    if (!(step > 0.0)) throw invalid_input_error("make_plugin_normalization: step must be positive");

    NormalizationSpec spec;
    spec.kind = NormalizationKind::plugin_hessian;
    const int m = partition.num_cells();
    const int dim = [&] {
        switch (space_y.kind) {
            case SpaceKind::euclidean: return space_y.dim;
            case SpaceKind::sphere: return space_y.dim;
            case SpaceKind::wasserstein: return static_cast<int>(space_y.grid.size());
            case SpaceKind::spd: return log_cholesky_dim(space_y.dim);
        }
        return 0;
    }();

    if (space_y.kind != SpaceKind::sphere) {
        // Flat embedding coordinates: the squared distance to a point has
        // exact Hessian 2I, so H = 2 * (2I)^{-1} = I.
        spec.h = Eigen::MatrixXd::Identity(dim, dim);
        spec.h_m.assign(static_cast<std::size_t>(m), spec.h);
        return spec;
    }

    const Eigen::VectorXd base = frechet_mean(space_y, y).mean.vector();
    // Orthonormal tangent basis: the last d-1 columns of the Q factor of
    // [base] span the orthogonal complement of base.
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(base).householderQ() * Eigen::MatrixXd::Identity(base.size(), base.size());
    const Eigen::MatrixXd tangent_basis = q.rightCols(base.size() - 1);

    const auto lifted = [&](const Eigen::MatrixXd& tangent_mat) {
        // Extend to ambient coordinates with a unit eigenvalue along base;
        // tangent vectors never have a component there, so the extension is
        // inert but keeps the matrix SPD.
        return Eigen::MatrixXd(tangent_basis * tangent_mat * tangent_basis.transpose() +
                               base * base.transpose());
    };

    std::vector<int> all(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) all[i] = static_cast<int>(i);
    const Eigen::MatrixXd pooled_hess =
        sphere_objective_hessian(space_y, y, all, base, tangent_basis, step);
    spec.h = lifted(2.0 * invert_spd(pooled_hess, "make_plugin_normalization"));

    spec.h_m.reserve(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) {
        const Eigen::MatrixXd cell_hess = sphere_objective_hessian(
            space_y, y, partition.cell_members(c), base, tangent_basis, step);
        spec.h_m.push_back(lifted(2.0 * invert_spd(cell_hess, "make_plugin_normalization")));
    }
    return spec;
}

PreparedNormalization PreparedNormalization::prepare(const NormalizationSpec& spec, int dim,
                                                     int num_cells) {
    PreparedNormalization out;
    if (spec.kind == NormalizationKind::identity) return out;
    if (static_cast<int>(spec.h_m.size()) != num_cells) {
        throw invalid_input_error("normalization: expected one cell matrix per partition cell");
    }
    const auto inverse_sqrt = [dim](const Eigen::MatrixXd& h) {
        if (h.rows() != dim || h.cols() != dim) {
            throw invalid_input_error("normalization: matrix shape does not match the embedding");
        }
        if ((h - h.transpose()).cwiseAbs().maxCoeff() >
            1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
            throw invalid_input_error("normalization: matrix is not symmetric");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
        if (es.info() != Eigen::Success) {
            throw invalid_input_error("normalization: eigen-decomposition failed");
        }
        if (es.eigenvalues().minCoeff() <= 0.0) {
            throw invalid_input_error("normalization: matrix is not positive definite");
        }
        return Eigen::MatrixXd(es.eigenvectors() *
                               es.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                               es.eigenvectors().transpose());
    };
    out.global_root_ = inverse_sqrt(spec.h);
    out.cell_roots_.reserve(spec.h_m.size());
    for (const auto& h : spec.h_m) out.cell_roots_.push_back(inverse_sqrt(h));
    return out;
}

double between_cell_statistic(const Eigen::MatrixXd& rows, const Partition& partition,
                              const PreparedNormalization& norm) {
    const int n = partition.n();
    const int m = partition.num_cells();
    if (rows.rows() != n) {
        throw invalid_input_error("between_cell_statistic: row count does not match the partition");
    }
    Eigen::MatrixXd cell_sums = Eigen::MatrixXd::Zero(m, rows.cols());
    for (int i = 0; i < n; ++i) {
        cell_sums.row(partition.assignments[static_cast<std::size_t>(i)]) += rows.row(i);
    }
    const Eigen::RowVectorXd global_mean = cell_sums.colwise().sum() / static_cast<double>(n);

    double stat = 0.0;
    for (int c = 0; c < m; ++c) {
        const double n_m = static_cast<double>(partition.cell_sizes[static_cast<std::size_t>(c)]);
        const Eigen::VectorXd mean_m = cell_sums.row(c).transpose() / n_m;
        const double norm_sq = norm.is_identity()
                                   ? mean_m.squaredNorm()
                                   : (norm.cell_root(c) * mean_m).squaredNorm();
        stat += n_m * norm_sq;
    }
    const double global_sq = norm.is_identity()
                                 ? global_mean.squaredNorm()
                                 : (norm.global_root() * global_mean.transpose()).squaredNorm();
    stat -= static_cast<double>(n) * global_sq;
    return stat;
}

double between_cell_statistic(const EmbeddedSample& sample, const Partition& partition,
                              const NormalizationSpec& norm) {
    const PreparedNormalization prepared = PreparedNormalization::prepare(
        norm, static_cast<int>(sample.dim()), partition.num_cells());
    return between_cell_statistic(sample.centered, partition, prepared);
}

double resampling_p_value(double statistic_obs, const std::vector<double>& replicates) {
    std::size_t count = 0;
    for (double t : replicates) {
        if (t >= statistic_obs) ++count;
    }
    return static_cast<double>(1 + count) / static_cast<double>(replicates.size() + 1);
}

TestResult wild_bootstrap_test(const std::vector<MetricObject>& x,
                               const std::vector<MetricObject>& y,
                               const SpaceDescriptor& space_y, const Partition& partition,
                               int num_replicates, MultiplierKind law,
                               const NormalizationSpec& norm, std::uint64_t seed, int threads) {
    if (num_replicates < 1) {
        throw invalid_input_error("wild_bootstrap_test: B must be at least 1");
    }
    const FccEstimate estimate = fcc_estimate(x, y, space_y, partition);
    const EmbeddedSample embedded = embed_responses(space_y, y);
    const PreparedNormalization prepared = PreparedNormalization::prepare(
        norm, static_cast<int>(embedded.dim()), partition.num_cells());

    const double v_f = estimate.v_f_hat;
    const Eigen::Index n = embedded.n();

    TestResult out;
    out.method = "wild_bootstrap";
    out.normalization = to_string(norm.kind);
    out.multiplier = to_string(law);
    out.num_replicates = num_replicates;
    out.seed = seed;
    out.rho_hat = estimate.rho_hat;
    out.v_f_hat = v_f;
    out.statistic_obs = between_cell_statistic(embedded.centered, partition, prepared) / v_f;

    out.replicates.resize(static_cast<std::size_t>(num_replicates));
    parallel_for(num_replicates, threads, [&](int b) {
        Rng rng(mix64(seed, static_cast<std::uint64_t>(b)));
        Eigen::MatrixXd scaled(n, embedded.dim());
        for (Eigen::Index i = 0; i < n; ++i) {
            scaled.row(i) = draw_multiplier(law, rng) * embedded.centered.row(i);
        }
        out.replicates[static_cast<std::size_t>(b)] =
            between_cell_statistic(scaled, partition, prepared) / v_f;
    });
    out.p_value = resampling_p_value(out.statistic_obs, out.replicates);
    return out;
}

}  // namespace fcc
