#include "fcc/power.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fcc/baselines.hpp"
#include "fcc/errors.hpp"
#include "fcc/io.hpp"
#include "fcc/parallel.hpp"
#include "fcc/partition.hpp"

namespace fcc {

namespace {

enum class Outcome { accepted, rejected, errored };

ScalarPairSample to_scalar_pairs(const PairedSample& sample) {
    const PairedSample slice = scalar_slice(sample);
    const int n = static_cast<int>(slice.x.size());
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
        x[i] = slice.x[static_cast<std::size_t>(i)].vector()[0];
        y[i] = slice.y[static_cast<std::size_t>(i)].vector()[0];
    }
    return ScalarPairSample::make(std::move(x), std::move(y));
}

// Stable per-method offsets for deriving test seeds from the data seed.
std::uint64_t method_seed(std::uint64_t data_seed, Method method) {
    switch (method) {
        case Method::fcc: return mix64(data_seed, 11);
        case Method::energy: return mix64(data_seed, 12);
        case Method::pearson: return mix64(data_seed, 13);
        case Method::chatterjee: return mix64(data_seed, 14);
    }
    throw std::logic_error("unreachable method tag");
}

}  // namespace

const char* to_string(Method method) {
    switch (method) {
        case Method::fcc: return "fcc";
        case Method::energy: return "energy";
        case Method::pearson: return "pearson";
        case Method::chatterjee: return "chatterjee";
    }
    throw std::logic_error("unreachable method tag");
}

Method method_from_string(const std::string& name) {
    if (name == "fcc") return Method::fcc;
    if (name == "energy") return Method::energy;
    if (name == "pearson") return Method::pearson;
    if (name == "chatterjee") return Method::chatterjee;
    throw invalid_input_error("unknown method '" + name +
                              "' (expected fcc, energy, pearson, or chatterjee)");
}

std::vector<Method> methods_from_csv(const std::string& csv) {
    std::vector<Method> methods;
    std::string token;
    std::istringstream stream(csv);
    while (std::getline(stream, token, ',')) {
        const auto begin = token.find_first_not_of(" \t");
        if (begin == std::string::npos) {
            throw invalid_input_error("empty entry in method list '" + csv + "'");
        }
        const auto end = token.find_last_not_of(" \t");
        const Method method = method_from_string(token.substr(begin, end - begin + 1));
        if (std::find(methods.begin(), methods.end(), method) != methods.end()) {
            throw invalid_input_error("method '" + std::string(to_string(method)) +
                                      "' listed twice");
        }
        methods.push_back(method);
    }
    if (methods.empty()) throw invalid_input_error("method list is empty");
    return methods;
}

void PowerConfig::validate() const {
    sim.validate();
    if (n_list.empty()) throw invalid_input_error("n list is empty");
    for (int n : n_list) {
        if (n < 2) throw invalid_input_error("every sample size must be at least 2");
    }
    if (replications < 0) throw invalid_input_error("replications must be nonnegative");
    if (bootstrap_b < 1) throw invalid_input_error("resampling count must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input_error("level must lie in (0, 1)");
    if (methods.empty()) throw invalid_input_error("method list is empty");
    if (h < 0 || min_cell < 0) {
        throw invalid_input_error("partition parameters must be nonnegative");
    }
    if (threads < 1) throw invalid_input_error("thread count must be at least 1");
}

PowerCurve run_power_study(const PowerConfig& config) {
    config.validate();
    PowerCurve curve;
    curve.setting = to_string(config.sim.setting);
    curve.alpha = config.alpha;
    if (config.replications == 0) return curve;

    const PartitionDefaults defaults = default_partition_params(config.sim.setting);
    const int h = config.h > 0 ? config.h : defaults.h;
    const int min_cell = config.min_cell > 0 ? config.min_cell : defaults.min_cell;
    const int num_methods = static_cast<int>(config.methods.size());

    for (std::size_t n_index = 0; n_index < config.n_list.size(); ++n_index) {
        const int n = config.n_list[n_index];
        std::vector<std::vector<Outcome>> outcomes(
            static_cast<std::size_t>(config.replications),
            std::vector<Outcome>(static_cast<std::size_t>(num_methods), Outcome::errored));

        parallel_for(config.replications, config.threads, [&](int rep) {
            const std::uint64_t data_seed =
                mix64(mix64(config.seed, static_cast<std::uint64_t>(n_index)),
                      static_cast<std::uint64_t>(rep));
            SimConfig sim = config.sim;
            sim.n = n;
            sim.seed = data_seed;
            PairedSample sample;
            try {
                sample = generate(sim);
                if (config.scalar_slice) sample = scalar_slice(sample);
            } catch (const std::exception&) {
                // Generation failed: every method of this replication stays
                // in the errored state.
                return;
            }
            for (int m = 0; m < num_methods; ++m) {
                const Method method = config.methods[static_cast<std::size_t>(m)];
                const std::uint64_t seed = method_seed(data_seed, method);
                try {
                    double p_value = 1.0;
                    switch (method) {
                        case Method::fcc: {
                            const Partition partition =
                                build_partition(sample.x, sample.space_x, h, min_cell);
                            NormalizationSpec norm = NormalizationSpec::identity();
                            if (config.normalization == NormalizationKind::plugin_hessian) {
                                norm = make_plugin_normalization(sample.y, sample.space_y,
                                                                 partition);
                            }
                            p_value = wild_bootstrap_test(sample.x, sample.y, sample.space_y,
                                                          partition, config.bootstrap_b,
                                                          config.multiplier, norm, seed)
                                          .p_value;
                            break;
                        }
                        case Method::energy:
                            p_value = energy_dcov_permutation_test(sample.x, sample.y,
                                                                   sample.space_x, sample.space_y,
                                                                   config.bootstrap_b, seed)
                                          .p_value;
                            break;
                        case Method::pearson: {
                            const ScalarPairSample pairs = to_scalar_pairs(sample);
                            p_value = permutation_test(
                                          [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                                              return std::abs(
                                                  pearson_r(ScalarPairSample::make(a, b)));
                                          },
                                          pairs.x, pairs.y, config.bootstrap_b, seed)
                                          .p_value;
                            break;
                        }
                        case Method::chatterjee: {
                            const ScalarPairSample pairs = to_scalar_pairs(sample);
                            p_value = permutation_test(
                                          [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                                              return chatterjee_xi(ScalarPairSample::make(a, b));
                                          },
                                          pairs.x, pairs.y, config.bootstrap_b, seed)
                                          .p_value;
                            break;
                        }
                    }
                    outcomes[static_cast<std::size_t>(rep)][static_cast<std::size_t>(m)] =
                        p_value <= config.alpha ? Outcome::rejected : Outcome::accepted;
                } catch (const std::exception&) {
                    // Recorded in the errors column; the sweep continues.
                }
            }
        });

        for (int m = 0; m < num_methods; ++m) {
            PowerRow row;
            row.method = to_string(config.methods[static_cast<std::size_t>(m)]);
            row.n = n;
            row.delta = config.sim.delta;
            row.replications = config.replications;
            for (int rep = 0; rep < config.replications; ++rep) {
                const Outcome outcome =
                    outcomes[static_cast<std::size_t>(rep)][static_cast<std::size_t>(m)];
                if (outcome == Outcome::rejected) ++row.rejections;
                if (outcome == Outcome::errored) ++row.errors;
            }
            row.rate = static_cast<double>(row.rejections) / row.replications;
            row.std_err = std::sqrt(row.rate * (1.0 - row.rate) / row.replications);
            curve.rows.push_back(std::move(row));
        }
    }

    // Method-major ordering: all sample sizes of one method before the next.
    std::stable_sort(curve.rows.begin(), curve.rows.end(),
                     [&](const PowerRow& a, const PowerRow& b) {
                         auto rank = [&](const std::string& name) {
                             for (std::size_t m = 0; m < config.methods.size(); ++m) {
                                 if (name == to_string(config.methods[m])) return m;
                             }
                             return config.methods.size();
                         };
                         return rank(a.method) < rank(b.method);
                     });
    return curve;
}

std::string power_csv(const PowerCurve& curve) {
    std::ostringstream out;
    out << "method,n,delta,rejections,replications,rate,se,errors\n";
    for (const PowerRow& row : curve.rows) {
        out << row.method << ',' << row.n << ',' << format_csv_double(row.delta) << ','
            << row.rejections << ',' << row.replications << ',' << format_csv_double(row.rate)
            << ',' << format_csv_double(row.std_err) << ',' << row.errors << '\n';
    }
    return out.str();
}

void write_power_csv(const std::string& path, const PowerCurve& curve) {
    write_text_file(path, power_csv(curve));
}

namespace {

struct ChartFrame {
    static constexpr double width = 640.0;
    static constexpr double height = 420.0;
    static constexpr double left = 60.0;
    static constexpr double right = 470.0;
    static constexpr double top = 20.0;
    static constexpr double bottom = 370.0;

    double n_min = 0.0;
    double n_max = 1.0;

    double x(double n) const {
        if (n_max <= n_min) return 0.5 * (left + right);
        return left + (n - n_min) / (n_max - n_min) * (right - left);
    }
    double y(double rate) const { return bottom - rate * (bottom - top); }
};

const char* method_color(const std::string& method) {
    if (method == "fcc") return "#1b6ca8";
    if (method == "energy") return "#d1495b";
    if (method == "pearson") return "#2e933c";
    return "#8a4fff";
}

}  // namespace

std::string power_svg(const PowerCurve& curve) {
    ChartFrame frame;
    std::vector<int> sizes;
    std::vector<std::string> methods;
    for (const PowerRow& row : curve.rows) {
        if (std::find(sizes.begin(), sizes.end(), row.n) == sizes.end()) sizes.push_back(row.n);
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
            methods.push_back(row.method);
        }
    }
    std::sort(sizes.begin(), sizes.end());
    if (!sizes.empty()) {
        frame.n_min = sizes.front();
        frame.n_max = sizes.back();
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << ChartFrame::width
        << "\" height=\"" << ChartFrame::height << "\" viewBox=\"0 0 " << ChartFrame::width << ' '
        << ChartFrame::height << "\">\n";
    svg << "<rect width=\"" << ChartFrame::width << "\" height=\"" << ChartFrame::height
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << 0.5 * (frame.left + frame.right) << "\" y=\"405\" font-family=\"sans-serif\""
        << " font-size=\"13\" text-anchor=\"middle\">sample size n (rejection rate vs n, setting "
        << curve.setting << ")</text>\n";

    // Axes.
    svg << "<line x1=\"" << frame.left << "\" y1=\"" << frame.bottom << "\" x2=\"" << frame.right
        << "\" y2=\"" << frame.bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << frame.left << "\" y1=\"" << frame.top << "\" x2=\"" << frame.left
        << "\" y2=\"" << frame.bottom << "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double y = frame.y(tick);
        svg << "<line x1=\"" << frame.left - 4 << "\" y1=\"" << y << "\" x2=\"" << frame.left
            << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << frame.left - 8 << "\" y=\"" << y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
            << format_csv_double(tick) << "</text>\n";
    }
    for (int n : sizes) {
        const double x = frame.x(n);
        svg << "<line x1=\"" << x << "\" y1=\"" << frame.bottom << "\" x2=\"" << x << "\" y2=\""
            << frame.bottom + 4 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << frame.bottom + 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << n
            << "</text>\n";
    }

    // Nominal level reference.
    svg << "<line x1=\"" << frame.left << "\" y1=\"" << frame.y(curve.alpha) << "\" x2=\""
        << frame.right << "\" y2=\"" << frame.y(curve.alpha)
        << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";

    for (std::size_t m = 0; m < methods.size(); ++m) {
        const std::string& method = methods[m];
        const char* color = method_color(method);
        std::ostringstream points;
        for (int n : sizes) {
            for (const PowerRow& row : curve.rows) {
                if (row.method == method && row.n == n) {
                    points << format_csv_double(frame.x(n)) << ','
                           << format_csv_double(frame.y(row.rate)) << ' ';
                }
            }
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << points.str() << "\"/>\n";
        for (int n : sizes) {
            for (const PowerRow& row : curve.rows) {
                if (row.method == method && row.n == n) {
                    svg << "<circle cx=\"" << format_csv_double(frame.x(n)) << "\" cy=\""
                        << format_csv_double(frame.y(row.rate)) << "\" r=\"3\" fill=\"" << color
                        << "\"/>\n";
                }
            }
        }
        const double legend_y = frame.top + 14.0 + 20.0 * static_cast<double>(m);
        svg << "<line x1=\"490\" y1=\"" << legend_y - 4 << "\" x2=\"514\" y2=\"" << legend_y - 4
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"520\" y=\"" << legend_y
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << method << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

void write_power_svg(const std::string& path, const PowerCurve& curve) {
    write_text_file(path, power_svg(curve));
}

}  // namespace fcc
