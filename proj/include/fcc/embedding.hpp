#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "fcc/metric_objects.hpp"

namespace fcc {

/// How a sample was mapped into coordinate rows.
enum class EmbedKind {
    identity,        // euclidean vectors as-is
    weighted_quantile,  // quantile values scaled by sqrt of the grid weights
    log_cholesky,    // SPD matrices in Log-Cholesky coordinates
    tangent_log      // sphere points lifted to the tangent space at the Frechet mean
};

const char* to_string(EmbedKind kind);

/// Coordinate embedding of a response sample. Rows of `rows` are the
/// embedded observations; `centered` subtracts the column mean `z_bar`.
/// For every kind except tangent_log the embedding is a global isometry,
/// so Euclidean row distances reproduce the metric exactly; the tangent
/// lift preserves distances to first order around the base point.
struct EmbeddedSample {
    Eigen::MatrixXd rows;
    Eigen::RowVectorXd z_bar;
    Eigen::MatrixXd centered;
    EmbedKind kind = EmbedKind::identity;
    std::optional<MetricObject> base_point;  // tangent_log only: the Frechet mean

    Eigen::Index n() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }

    /// True when row distances equal metric distances everywhere.
    bool flat() const { return kind != EmbedKind::tangent_log; }
};

/// Dimension of the embedding for a given space: d for euclidean vectors and
/// sphere tangents (kept in ambient coordinates), the grid length for
/// Wasserstein spaces, and p + p(p-1)/2 for SPD matrices.
int embedding_dimension(const SpaceDescriptor& space);

/// Embeds a response sample into coordinate rows and centers it. Sphere
/// samples are lifted at their Frechet mean (chordal mean for the chordal
/// metric, Karcher mean for the geodesic metric); an observation within
/// 1e-12 of the base point's antipode raises geometry_error naming its index.
EmbeddedSample embed_responses(const SpaceDescriptor& space,
                               const std::vector<MetricObject>& sample);

}  // namespace fcc
