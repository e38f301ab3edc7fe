#include "fcc/embedding.hpp"

#include <string>

namespace fcc {

const char* to_string(EmbedKind kind) {
    switch (kind) {
        case EmbedKind::identity: return "identity";
        case EmbedKind::weighted_quantile: return "weighted_quantile";
        case EmbedKind::log_cholesky: return "log_cholesky";
        case EmbedKind::tangent_log: return "tangent_log";
    }
    return "?";
}

int embedding_dimension(const SpaceDescriptor& space) {
    space.validate();
    switch (space.kind) {
        case SpaceKind::euclidean:
        case SpaceKind::sphere:
            return space.dim;
        case SpaceKind::wasserstein:
            return static_cast<int>(space.grid.size());
        case SpaceKind::spd:
            return log_cholesky_dim(space.dim);
    }
    throw invalid_input_error("embedding_dimension: unknown space kind");
}

EmbeddedSample embed_responses(const SpaceDescriptor& space,
                               const std::vector<MetricObject>& sample) {
    if (sample.empty()) throw invalid_input_error("embed_responses: sample is empty");
    validate_sample(space, sample, "sample");

    const Eigen::Index n = static_cast<Eigen::Index>(sample.size());
    const Eigen::Index d = embedding_dimension(space);
    EmbeddedSample out;
    out.rows.resize(n, d);

    switch (space.kind) {
        case SpaceKind::euclidean:
            out.kind = EmbedKind::identity;
            for (Eigen::Index i = 0; i < n; ++i) out.rows.row(i) = sample[i].vector();
            break;
        case SpaceKind::wasserstein: {
            out.kind = EmbedKind::weighted_quantile;
            const Eigen::VectorXd root_w = space.weights.cwiseSqrt();
            for (Eigen::Index i = 0; i < n; ++i)
                out.rows.row(i) = sample[i].vector().cwiseProduct(root_w);
            break;
        }
        case SpaceKind::spd:
            // Both SPD metrics embed through Log-Cholesky coordinates; for the
            // log-Euclidean metric this is the standard surrogate chart.
            out.kind = EmbedKind::log_cholesky;
            for (Eigen::Index i = 0; i < n; ++i)
                out.rows.row(i) = spd_log_cholesky_coords(sample[i]);
            break;
        case SpaceKind::sphere: {
            out.kind = EmbedKind::tangent_log;
            const MetricObject base = frechet_mean(space, sample).mean;
            for (Eigen::Index i = 0; i < n; ++i) {
                try {
                    out.rows.row(i) = sphere_log(base.vector(), sample[i].vector());
                } catch (const geometry_error&) {
                    throw geometry_error("embed_responses: observation " + std::to_string(i) +
                                         " is antipodal to the sphere Frechet mean");
                }
            }
            out.base_point = base;
            break;
        }
    }

    out.z_bar = out.rows.colwise().mean();
    out.centered = out.rows.rowwise() - out.z_bar;
    return out;
}

}  // namespace fcc
