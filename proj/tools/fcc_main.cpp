#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fcc/baselines.hpp"
#include "fcc/bootstrap.hpp"
#include "fcc/errors.hpp"
#include "fcc/estimator.hpp"
#include "fcc/io.hpp"
#include "fcc/null_limits.hpp"
#include "fcc/partition.hpp"
#include "fcc/power.hpp"
#include "fcc/simgen.hpp"

namespace {

int default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Where a paired sample comes from: two sample files, or a generator
/// configured by --setting / --config with n, delta, seed.
struct DataOptions {
    std::string x_path;
    std::string y_path;
    std::string setting;
    std::string config_path;
    int n = 100;
    double delta = 0.5;
    std::uint64_t seed = 0;
    std::string sphere_metric = "geodesic";
    std::string spd_metric = "log_cholesky";

    bool from_files() const { return !x_path.empty() || !y_path.empty(); }
    bool from_generator() const { return !setting.empty() || !config_path.empty(); }
};

void add_data_flags(CLI::App* cmd, DataOptions& data) {
    cmd->add_option("--x", data.x_path, "predictor sample file");
    cmd->add_option("--y", data.y_path, "response sample file");
    cmd->add_option("--setting", data.setting,
                    "generator tag (s1..s5, wass_noise_1, wass_noise_2, spd_noise_1, spd_noise_2)");
    cmd->add_option("--config", data.config_path, "generator config file (key = value lines)");
    cmd->add_option("--n", data.n, "generated sample size")->capture_default_str();
    cmd->add_option("--delta", data.delta, "generator signal strength")->capture_default_str();
    cmd->add_option("--seed", data.seed, "random seed")->capture_default_str();
    cmd->add_option("--sphere-metric", data.sphere_metric, "chordal or geodesic")
        ->capture_default_str();
    cmd->add_option("--spd-metric", data.spd_metric, "log_cholesky or log_euclidean")
        ->capture_default_str();
}

fcc::SimConfig build_sim_config(const DataOptions& data, const CLI::App* cmd) {
    fcc::SimConfig sim;
    if (!data.setting.empty()) {
        sim = fcc::SimConfig::defaults_for(fcc::setting_from_string(data.setting));
    }
    if (!data.config_path.empty()) {
        const auto entries = fcc::read_config_file(data.config_path);
        if (data.setting.empty()) {
            sim = fcc::sim_config_from_entries(entries);
        } else {
            for (const auto& [key, value] : entries) {
                if (key == "setting") {
                    throw fcc::invalid_input_error(
                        "config file sets 'setting' but --setting was also given");
                }
                fcc::apply_config_entry(sim, key, value);
            }
        }
    }
    // Explicit flags win over config-file entries.
    if (cmd->count("--n") > 0) sim.n = data.n;
    if (cmd->count("--delta") > 0) sim.delta = data.delta;
    sim.seed = data.seed;
    if (cmd->count("--n") == 0 && sim.n <= 0) sim.n = 100;
    return sim;
}

struct LoadedPair {
    fcc::PairedSample sample;
    // Setting the data came from, when generated; drives partition defaults.
    bool generated = false;
    fcc::Setting setting = fcc::Setting::s1;
};

LoadedPair load_pair(const DataOptions& data, const CLI::App* cmd) {
    if (data.from_files() && data.from_generator()) {
        throw fcc::invalid_input_error("give either --x/--y files or a generator, not both");
    }
    LoadedPair loaded;
    if (data.from_files()) {
        if (data.x_path.empty() || data.y_path.empty()) {
            throw fcc::invalid_input_error("both --x and --y sample files are required");
        }
        const fcc::SampleFile x_file = fcc::read_sample_file(data.x_path);
        const fcc::SampleFile y_file = fcc::read_sample_file(data.y_path);
        auto variant_for = [&](const fcc::SampleFile& file) {
            if (file.kind == fcc::SpaceKind::sphere) {
                return fcc::metric_variant_from_string(data.sphere_metric);
            }
            if (file.kind == fcc::SpaceKind::spd) {
                return fcc::metric_variant_from_string(data.spd_metric);
            }
            return fcc::MetricVariant::none;
        };
        loaded.sample.space_x = fcc::make_space(x_file, variant_for(x_file));
        loaded.sample.space_y = fcc::make_space(y_file, variant_for(y_file));
        loaded.sample.x = std::move(x_file.objects);
        loaded.sample.y = std::move(y_file.objects);
        if (loaded.sample.x.size() != loaded.sample.y.size()) {
            throw fcc::invalid_input_error("predictor and response files differ in length");
        }
        return loaded;
    }
    if (!data.from_generator()) {
        throw fcc::invalid_input_error("no input: give --x/--y files or --setting/--config");
    }
    const fcc::SimConfig sim = build_sim_config(data, cmd);
    loaded.sample = fcc::generate(sim);
    loaded.generated = true;
    loaded.setting = sim.setting;
    return loaded;
}

void resolve_partition_params(const LoadedPair& loaded, int& h, int& min_cell) {
    const fcc::PartitionDefaults defaults =
        loaded.generated ? fcc::default_partition_params(loaded.setting)
                         : fcc::PartitionDefaults{15, 5};
    if (h <= 0) h = defaults.h;
    if (min_cell <= 0) min_cell = defaults.min_cell;
}

void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
    } else {
        fcc::write_text_file(path, content);
    }
}

std::vector<int> parse_n_list(const std::string& csv) {
    std::vector<int> sizes;
    std::istringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        std::size_t pos = 0;
        int value = 0;
        try {
            value = std::stoi(token, &pos);
        } catch (const std::exception&) {
            throw fcc::invalid_input_error("cannot parse sample size '" + token + "'");
        }
        if (pos != token.size() || value < 2) {
            throw fcc::invalid_input_error("invalid sample size '" + token + "'");
        }
        sizes.push_back(value);
    }
    if (sizes.empty()) throw fcc::invalid_input_error("empty --n-list");
    return sizes;
}

int run_estimate(const DataOptions& data, const CLI::App* cmd, int h, int min_cell,
                 const std::string& partition_csv, const std::string& out_path) {
    const LoadedPair loaded = load_pair(data, cmd);
    resolve_partition_params(loaded, h, min_cell);
    const fcc::Partition partition =
        fcc::build_partition(loaded.sample.x, loaded.sample.space_x, h, min_cell);
    const fcc::FccEstimate estimate =
        fcc::fcc_estimate(loaded.sample.x, loaded.sample.y, loaded.sample.space_y, partition);
    if (!partition_csv.empty()) {
        std::ofstream file(partition_csv);
        if (!file) throw fcc::io_error("cannot open '" + partition_csv + "' for writing", 0);
        fcc::write_partition_csv(file, partition);
    }
    emit(out_path, fcc::estimate_to_json(estimate).dump(2) + "\n");
    return 0;
}

int run_test(const DataOptions& data, const CLI::App* cmd, int h, int min_cell, int num_replicates,
             const std::string& multiplier, const std::string& norm, int threads,
             const std::string& out_path) {
    const LoadedPair loaded = load_pair(data, cmd);
    resolve_partition_params(loaded, h, min_cell);
    const fcc::Partition partition =
        fcc::build_partition(loaded.sample.x, loaded.sample.space_x, h, min_cell);
    fcc::NormalizationSpec spec = fcc::NormalizationSpec::identity();
    if (fcc::normalization_from_string(norm) == fcc::NormalizationKind::plugin_hessian) {
        spec = fcc::make_plugin_normalization(loaded.sample.y, loaded.sample.space_y, partition);
    }
    const fcc::TestResult result = fcc::wild_bootstrap_test(
        loaded.sample.x, loaded.sample.y, loaded.sample.space_y, partition, num_replicates,
        fcc::multiplier_from_string(multiplier), spec, data.seed, threads);
    emit(out_path,
         fcc::test_result_to_json(result, partition.n(), partition.num_cells()).dump(2) + "\n");
    return 0;
}

int run_nulltable(const DataOptions& data, const CLI::App* cmd, int h, int min_cell,
                  const std::string& form_name, int draws, const std::string& out_path) {
    const LoadedPair loaded = load_pair(data, cmd);
    resolve_partition_params(loaded, h, min_cell);
    const fcc::Partition partition =
        fcc::build_partition(loaded.sample.x, loaded.sample.space_x, h, min_cell);
    const fcc::FccEstimate estimate =
        fcc::fcc_estimate(loaded.sample.x, loaded.sample.y, loaded.sample.space_y, partition);

    fcc::SpectrumForm form = fcc::SpectrumForm::manifold;
    if (form_name == "auto") {
        if (loaded.sample.space_y.kind == fcc::SpaceKind::wasserstein) {
            form = fcc::SpectrumForm::wasserstein;
        }
    } else if (form_name == "manifold") {
        form = fcc::SpectrumForm::manifold;
    } else if (form_name == "wasserstein") {
        form = fcc::SpectrumForm::wasserstein;
    } else {
        throw fcc::invalid_input_error("unknown spectrum form '" + form_name +
                                       "' (expected auto, manifold, or wasserstein)");
    }

    const fcc::EmbeddedSample embedded =
        fcc::embed_responses(loaded.sample.space_y, loaded.sample.y);
    const fcc::SpectrumResult spectrum =
        fcc::fixed_m_spectrum(embedded, partition, estimate.v_f_hat, form);
    const double statistic = partition.n() * estimate.rho_hat;
    const fcc::StudentizedDiagnostic diagnostic =
        fcc::studentized_diagnostic(embedded, partition, estimate.rho_hat, estimate.v_f_hat);
    const fcc::WeightedChi2Tail tail = fcc::spectrum_tail(spectrum, statistic, draws);
    const int dof = partition.num_cells() - 1;
    const double chi2_reference =
        dof >= 1 ? fcc::chi2_upper_tail(statistic, dof) : (statistic <= 0.0 ? 1.0 : 0.0);

    std::ostringstream out;
    out << "index,gamma\n";
    for (int l = 0; l < spectrum.eigenvalues.size(); ++l) {
        out << (l + 1) << ',' << fcc::format_csv_double(spectrum.eigenvalues[l]) << '\n';
    }
    out << '\n';
    out << "stat,mu_hat,sigma_hat,z\n";
    out << fcc::format_csv_double(statistic) << ',' << fcc::format_csv_double(diagnostic.mu_hat)
        << ',' << fcc::format_csv_double(diagnostic.sigma_hat) << ','
        << fcc::format_csv_double(diagnostic.z_score) << '\n';
    out << '\n';
    out << "stat,p_weighted_chi2,mc_se,p_chi2_anova\n";
    out << fcc::format_csv_double(statistic) << ',' << fcc::format_csv_double(tail.value) << ','
        << fcc::format_csv_double(tail.std_err) << ',' << fcc::format_csv_double(chi2_reference)
        << '\n';
    emit(out_path, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frechet correlation coefficient: estimation, testing, and power studies"};
    app.require_subcommand(1);

    // estimate
    auto* estimate_cmd =
        app.add_subcommand("estimate", "estimate the correlation on a paired sample");
    DataOptions estimate_data;
    add_data_flags(estimate_cmd, estimate_data);
    int estimate_h = 0, estimate_min = 0;
    std::string estimate_partition_csv, estimate_out;
    estimate_cmd->add_option("--H", estimate_h, "requested number of partition cells");
    estimate_cmd->add_option("--min-cell", estimate_min, "minimum cell size");
    estimate_cmd->add_option("--partition-csv", estimate_partition_csv,
                             "also write the partition assignment CSV here");
    estimate_cmd->add_option("--out", estimate_out, "output path (default: stdout)");

    // test
    auto* test_cmd = app.add_subcommand("test", "wild bootstrap independence test");
    DataOptions test_data;
    add_data_flags(test_cmd, test_data);
    int test_h = 0, test_min = 0, test_b = 500;
    int test_threads = default_thread_count();
    std::string test_multiplier = "rademacher", test_norm = "identity", test_out;
    test_cmd->add_option("--H", test_h, "requested number of partition cells");
    test_cmd->add_option("--min-cell", test_min, "minimum cell size");
    test_cmd->add_option("--B", test_b, "bootstrap replicates")->capture_default_str();
    test_cmd->add_option("--multiplier", test_multiplier, "rademacher, gaussian, or mammen")
        ->capture_default_str();
    test_cmd->add_option("--norm", test_norm, "identity or plugin")->capture_default_str();
    test_cmd->add_option("--threads", test_threads, "worker threads")->capture_default_str();
    test_cmd->add_option("--out", test_out, "output path (default: stdout)");

    // power
    auto* power_cmd = app.add_subcommand("power", "Monte Carlo power study");
    std::string power_setting, power_config, power_n_list = "50,80,100,150";
    std::string power_methods = "fcc", power_multiplier = "rademacher", power_norm = "identity";
    std::string power_svg_path, power_out;
    double power_delta = 0.5, power_alpha = 0.05;
    int power_reps = 100, power_boot = 500, power_h = 0, power_min = 0;
    int power_threads = default_thread_count();
    std::uint64_t power_seed = 0;
    bool power_scalar = false;
    power_cmd->add_option("--setting", power_setting, "generator tag")->required();
    power_cmd->add_option("--config", power_config, "generator config file");
    power_cmd->add_option("--n-list", power_n_list, "comma-separated sample sizes")
        ->capture_default_str();
    power_cmd->add_option("--delta", power_delta, "signal strength")->capture_default_str();
    power_cmd->add_option("--reps", power_reps, "Monte Carlo replications")
        ->capture_default_str();
    power_cmd->add_option("--boot", power_boot, "resampling replicates per test")
        ->capture_default_str();
    power_cmd->add_option("--seed", power_seed, "random seed")->capture_default_str();
    power_cmd->add_option("--H", power_h, "requested number of partition cells");
    power_cmd->add_option("--min-cell", power_min, "minimum cell size");
    power_cmd->add_option("--multiplier", power_multiplier, "rademacher, gaussian, or mammen")
        ->capture_default_str();
    power_cmd->add_option("--norm", power_norm, "identity or plugin")->capture_default_str();
    power_cmd->add_option("--methods", power_methods, "comma-separated method list")
        ->capture_default_str();
    power_cmd->add_option("--alpha", power_alpha, "nominal level")->capture_default_str();
    power_cmd->add_option("--svg", power_svg_path, "also write an SVG chart here");
    power_cmd->add_option("--threads", power_threads, "worker threads")->capture_default_str();
    power_cmd->add_flag("--scalar", power_scalar, "run every method on the first coordinates");
    power_cmd->add_option("--out", power_out, "CSV output path (default: stdout)");

    // nulltable
    auto* null_cmd =
        app.add_subcommand("nulltable", "null-law spectrum and studentized diagnostic");
    DataOptions null_data;
    add_data_flags(null_cmd, null_data);
    int null_h = 0, null_min = 0, null_draws = 1000000;
    std::string null_form = "auto", null_out;
    null_cmd->add_option("--H,--M", null_h, "requested number of partition cells");
    null_cmd->add_option("--min-cell", null_min, "minimum cell size");
    null_cmd->add_option("--form", null_form, "auto, manifold, or wasserstein")
        ->capture_default_str();
    null_cmd->add_option("--draws", null_draws, "Monte Carlo draws for the tail probability")
        ->capture_default_str();
    null_cmd->add_option("--out", null_out, "output path (default: stdout)");

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "write a generated sample to files");
    DataOptions gen_data;
    add_data_flags(gen_cmd, gen_data);
    std::string gen_out_x, gen_out_y;
    gen_cmd->add_option("--out-x", gen_out_x, "predictor output file")->required();
    gen_cmd->add_option("--out-y", gen_out_y, "response output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (estimate_cmd->parsed()) {
            return run_estimate(estimate_data, estimate_cmd, estimate_h, estimate_min,
                                estimate_partition_csv, estimate_out);
        }
        if (test_cmd->parsed()) {
            return run_test(test_data, test_cmd, test_h, test_min, test_b, test_multiplier,
                            test_norm, test_threads, test_out);
        }
        if (power_cmd->parsed()) {
            fcc::PowerConfig config;
            config.sim = fcc::SimConfig::defaults_for(fcc::setting_from_string(power_setting));
            if (!power_config.empty()) {
                for (const auto& [key, value] : fcc::read_config_file(power_config)) {
                    if (key == "setting") {
                        throw fcc::invalid_input_error(
                            "config file sets 'setting' but --setting was also given");
                    }
                    fcc::apply_config_entry(config.sim, key, value);
                }
            }
            if (power_cmd->count("--delta") > 0) config.sim.delta = power_delta;
            config.n_list = parse_n_list(power_n_list);
            config.replications = power_reps;
            config.bootstrap_b = power_boot;
            config.seed = power_seed;
            config.h = power_h;
            config.min_cell = power_min;
            config.multiplier = fcc::multiplier_from_string(power_multiplier);
            config.normalization = fcc::normalization_from_string(power_norm);
            config.methods = fcc::methods_from_csv(power_methods);
            config.alpha = power_alpha;
            config.threads = power_threads;
            config.scalar_slice = power_scalar;
            const fcc::PowerCurve curve = fcc::run_power_study(config);
            emit(power_out, fcc::power_csv(curve));
            if (!power_svg_path.empty()) fcc::write_power_svg(power_svg_path, curve);
            return 0;
        }
        if (null_cmd->parsed()) {
            return run_nulltable(null_data, null_cmd, null_h, null_min, null_form, null_draws,
                                 null_out);
        }
        if (gen_cmd->parsed()) {
            if (gen_data.from_files()) {
                throw fcc::invalid_input_error("gen only takes generator options");
            }
            if (!gen_data.from_generator()) {
                throw fcc::invalid_input_error("gen needs --setting or --config");
            }
            const fcc::SimConfig sim = build_sim_config(gen_data, gen_cmd);
            const fcc::PairedSample sample = fcc::generate(sim);
            fcc::write_sample_file(gen_out_x, sample.x, sample.space_x);
            fcc::write_sample_file(gen_out_y, sample.y, sample.space_y);
            return 0;
        }
        throw fcc::invalid_input_error("no subcommand selected");
    } catch (const fcc::degenerate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fcc::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
