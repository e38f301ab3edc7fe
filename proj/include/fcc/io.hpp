#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcc/bootstrap.hpp"
#include "fcc/estimator.hpp"
#include "fcc/metric_objects.hpp"

namespace fcc {

/// A parsed sample file: one object per data line, tagged by kind.
/// Line format, whitespace separated, `#` starts a comment line:
///   GRID q1 q2 ... qm      quantile grid header, required before Q rows
///   E v1 ... vd            euclidean vector
///   S v1 ... vd            unit sphere point
///   P p a11 a12 ... app    SPD matrix, row-major after the order p
///   Q v1 ... vm            quantile values on the declared grid
/// A file holds one kind only; the metric variant (sphere chordal/geodesic,
/// SPD log-Cholesky/log-Euclidean) is not stored and is supplied when the
/// descriptor is built.
struct SampleFile {
    std::vector<MetricObject> objects;
    SpaceKind kind = SpaceKind::euclidean;
    int dim = 0;
    Eigen::VectorXd grid;

    int n() const { return static_cast<int>(objects.size()); }
};

SampleFile read_sample(std::istream& in, const std::string& name = "<stream>");
SampleFile read_sample_file(const std::string& path);

/// Builds the descriptor for a parsed file; `variant` selects the sphere or
/// SPD metric and is ignored for euclidean and wasserstein kinds.
SpaceDescriptor make_space(const SampleFile& file, MetricVariant variant = MetricVariant::none);

void write_sample(std::ostream& out, const std::vector<MetricObject>& objects,
                  const SpaceDescriptor& space);
void write_sample_file(const std::string& path, const std::vector<MetricObject>& objects,
                       const SpaceDescriptor& space);

/// Flat config format: `key = value` lines, `#` comments, blank lines ignored.
std::map<std::string, std::string> read_config(std::istream& in,
                                               const std::string& name = "<stream>");
std::map<std::string, std::string> read_config_file(const std::string& path);

nlohmann::json estimate_to_json(const FccEstimate& estimate);
nlohmann::json test_result_to_json(const TestResult& result, int n, int num_cells);

/// Shortest-faithful decimal rendering used across CSV outputs.
std::string format_csv_double(double value);
/// Full round-trip rendering used in the sample text format.
std::string format_full_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fcc
