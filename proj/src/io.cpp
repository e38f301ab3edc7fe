#include "fcc/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "fcc/errors.hpp"

namespace fcc {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    return tokens;
}

double parse_value(const std::string& token, const std::string& name, long line) {
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(token, &pos);
    } catch (const std::exception&) {
        throw io_error(name + ": cannot parse number '" + token + "'", line);
    }
    if (pos != token.size()) {
        throw io_error(name + ": trailing characters in number '" + token + "'", line);
    }
    return value;
}

Eigen::VectorXd parse_values(const std::vector<std::string>& tokens, std::size_t first,
                             const std::string& name, long line) {
    Eigen::VectorXd values(static_cast<int>(tokens.size() - first));
    for (std::size_t t = first; t < tokens.size(); ++t) {
        values[static_cast<int>(t - first)] = parse_value(tokens[t], name, line);
    }
    return values;
}

}  // namespace

SampleFile read_sample(std::istream& in, const std::string& name) {
    SampleFile file;
    bool kind_known = false;
    bool grid_seen = false;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const std::vector<std::string> tokens = split_tokens(body);
        const std::string& tag = tokens[0];

        if (tag == "GRID") {
            if (grid_seen) throw io_error(name + ": duplicate GRID header", line_number);
            if (tokens.size() < 2) throw io_error(name + ": empty GRID header", line_number);
            file.grid = parse_values(tokens, 1, name, line_number);
            for (int j = 1; j < file.grid.size(); ++j) {
                if (file.grid[j] <= file.grid[j - 1]) {
                    throw io_error(name + ": grid levels must be strictly increasing", line_number);
                }
            }
            grid_seen = true;
            continue;
        }

        SpaceKind row_kind;
        if (tag == "E") {
            row_kind = SpaceKind::euclidean;
        } else if (tag == "S") {
            row_kind = SpaceKind::sphere;
        } else if (tag == "P") {
            row_kind = SpaceKind::spd;
        } else if (tag == "Q") {
            row_kind = SpaceKind::wasserstein;
        } else {
            throw io_error(name + ": unknown row tag '" + tag + "' (expected GRID, E, S, P, or Q)",
                           line_number);
        }
        if (kind_known && row_kind != file.kind) {
            throw io_error(name + ": mixed row kinds in one sample file", line_number);
        }

        try {
            if (row_kind == SpaceKind::spd) {
                if (tokens.size() < 2) {
                    throw io_error(name + ": P row needs the matrix order", line_number);
                }
                const double order_value = parse_value(tokens[1], name, line_number);
                const int p = static_cast<int>(order_value);
                if (p < 1 || order_value != p) {
                    throw io_error(name + ": P row has invalid matrix order '" + tokens[1] + "'",
                                   line_number);
                }
                if (static_cast<int>(tokens.size()) != 2 + p * p) {
                    throw io_error(name + ": P row needs " + std::to_string(p * p) +
                                       " entries after the order",
                                   line_number);
                }
                if (kind_known && file.dim != p) {
                    throw io_error(name + ": matrix order changed within the file", line_number);
                }
                const Eigen::VectorXd values = parse_values(tokens, 2, name, line_number);
                Eigen::MatrixXd matrix(p, p);
                for (int r = 0; r < p; ++r) {
                    for (int c = 0; c < p; ++c) matrix(r, c) = values[r * p + c];
                }
                file.objects.push_back(MetricObject::spd(matrix));
                file.dim = p;
            } else {
                if (tokens.size() < 2) {
                    throw io_error(name + ": data row has no values", line_number);
                }
                const Eigen::VectorXd values = parse_values(tokens, 1, name, line_number);
                const int d = static_cast<int>(values.size());
                if (kind_known && file.dim != d) {
                    throw io_error(name + ": row length changed within the file", line_number);
                }
                if (row_kind == SpaceKind::euclidean) {
                    file.objects.push_back(MetricObject::euclidean(values));
                } else if (row_kind == SpaceKind::sphere) {
                    file.objects.push_back(MetricObject::sphere(values));
                } else {
                    if (!grid_seen) {
                        throw io_error(name + ": Q row before the GRID header", line_number);
                    }
                    if (d != static_cast<int>(file.grid.size())) {
                        throw io_error(name + ": Q row length does not match the grid",
                                       line_number);
                    }
                    file.objects.push_back(MetricObject::quantile(values));
                }
                file.dim = d;
            }
        } catch (const io_error&) {
            throw;
        } catch (const std::exception& error) {
            // Object validation failures (non-unit sphere point, non-SPD
            // matrix, decreasing quantiles) become file errors with the line.
            throw io_error(name + ": " + error.what(), line_number);
        }
        file.kind = row_kind;
        kind_known = true;
    }
    if (!kind_known) throw io_error(name + ": no data rows found", 0);
    if (grid_seen && file.kind != SpaceKind::wasserstein) {
        throw io_error(name + ": GRID header without Q rows", 0);
    }
    return file;
}

SampleFile read_sample_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading", 0);
    return read_sample(in, path);
}

SpaceDescriptor make_space(const SampleFile& file, MetricVariant variant) {
    switch (file.kind) {
        case SpaceKind::euclidean:
            return SpaceDescriptor::euclidean(file.dim);
        case SpaceKind::sphere:
            return SpaceDescriptor::sphere(
                file.dim, variant == MetricVariant::none ? MetricVariant::geodesic : variant);
        case SpaceKind::spd:
            return SpaceDescriptor::spd(
                file.dim, variant == MetricVariant::none ? MetricVariant::log_cholesky : variant);
        case SpaceKind::wasserstein:
            return SpaceDescriptor::wasserstein(file.grid);
    }
    throw std::logic_error("unreachable sample kind");
}

void write_sample(std::ostream& out, const std::vector<MetricObject>& objects,
                  const SpaceDescriptor& space) {
    if (space.kind == SpaceKind::wasserstein) {
        out << "GRID";
        for (int j = 0; j < space.grid.size(); ++j) {
            out << ' ' << format_full_double(space.grid[j]);
        }
        out << '\n';
    }
    for (const auto& object : objects) {
        if (!object.matches(space)) {
            throw invalid_input_error("object does not match the declared space while writing");
        }
        switch (object.kind()) {
            case SpaceKind::euclidean:
            case SpaceKind::sphere:
            case SpaceKind::wasserstein: {
                const char tag = object.kind() == SpaceKind::euclidean  ? 'E'
                                 : object.kind() == SpaceKind::sphere   ? 'S'
                                                                        : 'Q';
                out << tag;
                const Eigen::VectorXd& values = object.vector();
                for (int j = 0; j < values.size(); ++j) {
                    out << ' ' << format_full_double(values[j]);
                }
                out << '\n';
                break;
            }
            case SpaceKind::spd: {
                const Eigen::MatrixXd& matrix = object.matrix();
                out << "P " << matrix.rows();
                for (int r = 0; r < matrix.rows(); ++r) {
                    for (int c = 0; c < matrix.cols(); ++c) {
                        out << ' ' << format_full_double(matrix(r, c));
                    }
                }
                out << '\n';
                break;
            }
        }
    }
}

void write_sample_file(const std::string& path, const std::vector<MetricObject>& objects,
                       const SpaceDescriptor& space) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing", 0);
    write_sample(out, objects, space);
    if (!out) throw io_error("write failed for '" + path + "'", 0);
}

std::map<std::string, std::string> read_config(std::istream& in, const std::string& name) {
    std::map<std::string, std::string> entries;
    std::string line;
    long line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const std::size_t equals = line.find('=');
        if (equals == std::string::npos || (hash != std::string::npos && equals > hash)) {
            throw io_error(name + ": expected 'key = value'", line_number);
        }
        const std::string key = trim(line.substr(0, equals));
        const std::string value =
            trim(line.substr(equals + 1, hash == std::string::npos ? std::string::npos
                                                                   : hash - equals - 1));
        if (key.empty()) throw io_error(name + ": empty key", line_number);
        if (value.empty()) throw io_error(name + ": empty value for key '" + key + "'", line_number);
        if (entries.count(key)) {
            throw io_error(name + ": duplicate key '" + key + "'", line_number);
        }
        entries[key] = value;
    }
    return entries;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading", 0);
    return read_config(in, path);
}

nlohmann::json estimate_to_json(const FccEstimate& estimate) {
    nlohmann::json record;
    record["rho_hat"] = estimate.rho_hat;
    record["v_f_hat"] = estimate.v_f_hat;
    record["M"] = estimate.num_cells();
    record["n"] = estimate.n();
    record["cell_sizes"] = estimate.partition.cell_sizes;
    record["per_cell_variance"] = estimate.cell_variances;
    return record;
}

nlohmann::json test_result_to_json(const TestResult& result, int n, int num_cells) {
    nlohmann::json record;
    record["T_obs"] = result.statistic_obs;
    record["p_value"] = result.p_value;
    record["n_rho_hat"] = n * result.rho_hat;
    record["rho_hat"] = result.rho_hat;
    record["v_f_hat"] = result.v_f_hat;
    record["B"] = result.num_replicates;
    record["n"] = n;
    record["M"] = num_cells;
    record["seed"] = result.seed;
    record["method"] = result.method;
    record["multiplier"] = result.multiplier;
    record["normalization"] = result.normalization;
    record["replicates"] = result.replicates;
    return record;
}

std::string format_csv_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::string format_full_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading", 0);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing", 0);
    out << content;
    if (!out) throw io_error("write failed for '" + path + "'", 0);
}

}  // namespace fcc
