// famoel: run experiments and the standalone pieces (indicators, objective reduction, fairness
// metrics, plots, statistical comparison) from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "famoel/csv.hpp"
#include "famoel/experiment.hpp"
#include "famoel/fairness_metrics.hpp"
#include "famoel/indicators.hpp"
#include "famoel/objective_reduction.hpp"
#include "famoel/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace famoel;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct GlobalFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    std::optional<double> tau;
    std::optional<int> generations;
    std::optional<std::string> dataset;
    std::optional<std::string> schema;
};

struct RunFlags {
    std::optional<std::string> preset;
    std::optional<std::size_t> folds, trials, window, archive, ca, da, initial, offspring, hidden, epochs, batch;
    std::optional<std::size_t> hv_samples, threads;
    std::optional<int> warmup;
    std::optional<double> lr, sigma, alpha, dirichlet;
    std::optional<std::string> static_mask;
    bool dump_genomes = false;
};

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

json overrides_from(const GlobalFlags& g, const RunFlags& r) {
    json j = json::object();
    put(j, "seed", g.seed);
    put(j, "out", g.out);
    put(j, "mode", g.mode);
    put(j, "tau", g.tau);
    put(j, "generations", g.generations);
    put(j, "dataset", g.dataset);
    put(j, "schema", g.schema);
    put(j, "preset", r.preset);
    put(j, "folds", r.folds);
    put(j, "trials", r.trials);
    put(j, "warmup", r.warmup);
    put(j, "window", r.window);
    if (r.archive) {
        j["convergence_capacity"] = *r.archive;
        j["diversity_capacity"] = *r.archive;
    }
    put(j, "convergence_capacity", r.ca);
    put(j, "diversity_capacity", r.da);
    put(j, "initial_population", r.initial);
    put(j, "offspring", r.offspring);
    put(j, "learning_rate", r.lr);
    put(j, "mutation_strength", r.sigma);
    put(j, "hidden_nodes", r.hidden);
    put(j, "epochs", r.epochs);
    put(j, "batch_size", r.batch);
    put(j, "alpha", r.alpha);
    put(j, "dirichlet", r.dirichlet);
    put(j, "hv_samples", r.hv_samples);
    put(j, "threads", r.threads);
    if (r.dump_genomes) j["dump_genomes"] = true;
    if (r.static_mask) {
        json mask = json::array();
        std::stringstream ss(*r.static_mask);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            const bool numeric = std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; });
            if (numeric) {
                mask.push_back(std::stoul(item));
            } else {
                mask.push_back(item);
            }
        }
        j["static_mask"] = mask;
    }
    return j;
}

std::string joined(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

int cmd_run(const GlobalFlags& g, const RunFlags& r) {
    const std::optional<fs::path> file = g.config ? std::optional<fs::path>(*g.config) : std::nullopt;
    const ExperimentConfig cfg = parse_config(file, overrides_from(g, r));
    std::cerr << "famoel run: mode " << to_string(cfg.mode) << ", " << cfg.folds << " fold(s) x " << cfg.trials
              << " trial(s), " << cfg.generations << " generations -> " << cfg.out.string() << '\n';
    const auto result = run_experiment(cfg);
    for (const auto& run : result.runs) {
        std::cout << run.directory.string() << "  mask_size=" << run.final.mask_size
                  << "  val_hv=" << run.final.validation.hv << "  test_hv=" << run.final.test.hv << '\n';
    }
    std::cout << "summary: " << result.summary_path.string() << '\n';
    return 0;
}

int cmd_indicators(const std::string& input, const std::optional<std::string>& front_path, std::size_t samples,
                   std::uint64_t hv_seed) {
    const PointSet set = csv::read_matrix(input);
    const PointSet front = front_path ? csv::read_matrix(*front_path) : nondominated_filter(set);
    if (front.cols() != set.cols()) throw Error(ErrorCode::DimensionMismatch, "front and set widths differ");
    const auto v = compute_indicators(set, front, IndicatorConfig{samples, hv_seed});
    std::cout << "gd,pd,sp,hv\n";
    csv::write_row(std::cout, std::vector<double>{v.gd, v.pd, v.sp, v.hv});
    return 0;
}

int cmd_reduce(const std::vector<std::string>& matrices, const std::optional<std::string>& objectives, double tau,
               bool names) {
    if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorCode::InvalidValue, "tau must lie in (0, 1)");
    CorrelationHistory history;
    history.window = std::max<std::size_t>(1, matrices.size() + (objectives ? 1 : 0));
    for (const auto& path : matrices) history.append(CorrelationMatrix(csv::read_matrix(path)));
    if (objectives) history.append(mncie_matrix(csv::read_matrix(*objectives)));
    if (history.length() == 0) throw Error(ErrorCode::InvalidValue, "reduce needs --matrix or --objectives");
    const auto selected = select_from_matrix(averaged_matrix(history), tau);
    if (names && averaged_matrix(history).size() == kObjectiveCount) {
        std::string s;
        for (std::size_t i = 0; i < selected.size(); ++i) s += (i ? "," : "") + objective_names()[selected[i]];
        std::cout << s << '\n';
    } else {
        std::cout << joined(selected) << '\n';
    }
    return 0;
}

int cmd_metrics(const std::string& input, double alpha, double dirichlet) {
    const auto table = csv::read_file(input);
    auto col = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const auto cy = col("y");
    const auto cyhat = col("yhat");
    const auto cg = col("group");
    const auto cp = col("p");
    if (!cy || !cg || (!cyhat && !cp)) {
        throw Error(ErrorCode::SchemaMismatch, "metrics input needs columns y, group and yhat and/or p");
    }
    std::vector<int> y, yhat;
    std::vector<double> p;
    std::vector<Group> groups;
    for (const auto& row : table.rows) {
        y.push_back(static_cast<int>(csv::parse_double(row[*cy])));
        const double prob = cp ? csv::parse_double(row[*cp]) : csv::parse_double(row[*cyhat]);
        p.push_back(prob);
        yhat.push_back(cyhat ? static_cast<int>(csv::parse_double(row[*cyhat])) : (prob >= 0.5 ? 1 : 0));
        groups.push_back(csv::parse_double(row[*cg]) != 0.0 ? Group::Privileged : Group::Unprivileged);
    }
    MetricsConfig cfg{alpha, dirichlet};
    cfg.validate();
    const auto v = evaluate_predictions(y, yhat, p, groups, cfg);
    std::cout << "objective,value\n";
    for (std::size_t k = 0; k < kObjectiveCount; ++k) {
        std::cout << objective_names()[k] << ',' << csv::format_double(v[k]) << '\n';
    }
    return 0;
}

int cmd_plot(const std::vector<std::string>& runs, const std::string& out, bool tau_sweep) {
    std::vector<fs::path> inputs(runs.begin(), runs.end());
    for (const auto& p : emit_plots(inputs, out, PlotOptions{tau_sweep})) std::cout << p.string() << '\n';
    return 0;
}

// "name=dir" pairs; blocks are fold/trial of each run in dir/summary.csv.
std::vector<ComparisonSample> samples_from_experiments(const std::vector<std::string>& specs,
                                                       const std::string& indicator) {
    std::vector<ComparisonSample> samples;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidValue, "--experiment expects NAME=DIR");
        const std::string name = spec.substr(0, eq);
        const fs::path dir = spec.substr(eq + 1);
        if (!fs::exists(dir / "summary.csv")) throw Error(ErrorCode::MissingArtifacts, "no summary.csv in " + dir.string());
        std::string dataset = dir.filename().string();
        if (fs::exists(dir / "config.json")) {
            std::ifstream in(dir / "config.json");
            const auto cfg = json::parse(in);
            dataset = fs::path(cfg.value("dataset", dataset)).stem().string();
        }
        const auto table = csv::read_file(dir / "summary.csv");
        const auto it = std::find(table.header.begin(), table.header.end(), indicator);
        if (it == table.header.end()) throw Error(ErrorCode::InvalidValue, "unknown indicator " + indicator);
        const auto c = static_cast<std::size_t>(it - table.header.begin());
        for (const auto& row : table.rows) {
            if (row[0] == "mean" || row[0] == "std") continue;
            samples.push_back({dataset, name, row[0] + "/" + row[1], csv::parse_double(row[c])});
        }
    }
    return samples;
}

int cmd_compare(const std::optional<std::string>& input, const std::vector<std::string>& experiments,
                const std::string& indicator, const std::string& reference, bool higher_is_better, double alpha) {
    std::vector<ComparisonSample> samples;
    if (input) {
        const auto table = csv::read_file(*input);
        const std::vector<std::string> want = {"dataset", "algorithm", "block", "value"};
        if (table.header != want) {
            throw Error(ErrorCode::SchemaMismatch, "compare input header must be dataset,algorithm,block,value");
        }
        for (const auto& row : table.rows) samples.push_back({row[0], row[1], row[2], csv::parse_double(row[3])});
    }
    const auto more = samples_from_experiments(experiments, indicator);
    samples.insert(samples.end(), more.begin(), more.end());
    const auto report = friedman_compare(samples, reference, !higher_is_better, alpha);

    std::cout << "dataset";
    for (const auto& a : report.algorithms) std::cout << ',' << a << "_mean," << a << "_std," << a << "_vs_ref";
    std::cout << ",statistic,p_value\n";
    for (const auto& d : report.datasets) {
        std::cout << d.dataset;
        for (std::size_t j = 0; j < report.algorithms.size(); ++j) {
            std::cout << ',' << csv::format_double(d.means[j]) << ',' << csv::format_double(d.stddevs[j]) << ','
                      << (j == report.reference ? '*' : outcome_symbol(d.versus_reference[j]));
        }
        std::cout << ',' << csv::format_double(d.omnibus.statistic) << ',' << csv::format_double(d.omnibus.p_value)
                  << '\n';
    }
    std::cout << "win/tie/loss vs " << reference << ":";
    for (std::size_t j = 0; j < report.algorithms.size(); ++j) {
        if (j == report.reference) continue;
        const auto& t = report.totals[j];
        std::cout << ' ' << report.algorithms[j] << ' ' << t.win << '/' << t.tie << '/' << t.loss;
    }
    std::cout << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fairness-aware multiobjective evolutionary learning"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--config", g.config, "JSON configuration file");
    app.add_option("--seed", g.seed, "root seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--mode", g.mode, "famoel | moel | static-mask");
    app.add_option("--tau", g.tau, "selection threshold in (0, 1)");
    app.add_option("--generations", g.generations, "number of generations");
    app.add_option("--dataset", g.dataset, "dataset CSV");
    app.add_option("--schema", g.schema, "dataset schema JSON");

    RunFlags r;
    auto* run = app.add_subcommand("run", "run an experiment (folds x trials)");
    run->add_option("--preset", r.preset, "dataset preset (learning rate, sigma, hidden nodes)");
    run->add_option("--folds", r.folds);
    run->add_option("--trials", r.trials);
    run->add_option("--warmup", r.warmup);
    run->add_option("--window", r.window);
    run->add_option("--archive", r.archive, "capacity of both archives");
    run->add_option("--ca-size", r.ca);
    run->add_option("--da-size", r.da);
    run->add_option("--initial-population", r.initial);
    run->add_option("--offspring", r.offspring);
    run->add_option("--lr", r.lr);
    run->add_option("--sigma", r.sigma);
    run->add_option("--hidden", r.hidden);
    run->add_option("--epochs", r.epochs);
    run->add_option("--batch", r.batch);
    run->add_option("--alpha", r.alpha);
    run->add_option("--dirichlet", r.dirichlet);
    run->add_option("--hv-samples", r.hv_samples);
    run->add_option("--threads", r.threads);
    run->add_option("--static-mask", r.static_mask, "comma-separated indices or names, e.g. CE,f4,f7");
    run->add_flag("--dump-genomes", r.dump_genomes);

    std::string ind_input;
    std::optional<std::string> ind_front;
    std::size_t ind_samples = 100000;
    std::uint64_t ind_seed = IndicatorConfig{}.hv_seed;
    auto* ind = app.add_subcommand("indicators", "GD, PD, SP and HV of an objective CSV");
    ind->add_option("--input", ind_input, "population x objectives CSV")->required();
    ind->add_option("--front", ind_front, "reference front CSV (default: nondominated subset of the input)");
    ind->add_option("--hv-samples", ind_samples);
    ind->add_option("--hv-seed", ind_seed);

    std::vector<std::string> red_matrices;
    std::optional<std::string> red_objectives;
    bool red_names = false;
    auto* red = app.add_subcommand("reduce", "select representative objectives from correlation matrices");
    red->add_option("--matrix", red_matrices, "square correlation matrix CSV (several are averaged)");
    red->add_option("--objectives", red_objectives, "population x objectives CSV (correlation computed)");
    red->add_flag("--names", red_names, "print objective names for 26-objective input");

    std::string met_input;
    double met_alpha = 2.0, met_dirichlet = 1.0;
    auto* met = app.add_subcommand("metrics", "CE and f1..f25 from labels, predictions and groups");
    met->add_option("--input", met_input, "CSV with columns y, yhat and/or p, group (1 = privileged)")->required();
    met->add_option("--alpha", met_alpha);
    met->add_option("--dirichlet", met_dirichlet);

    std::vector<std::string> plot_runs;
    bool plot_tau = false;
    auto* plot = app.add_subcommand("plot", "SVG plots from run directories");
    plot->add_option("--runs", plot_runs, "run or experiment directories")->required();
    plot->add_flag("--tau-sweep", plot_tau, "always emit the tau sweep plot");

    std::optional<std::string> cmp_input;
    std::vector<std::string> cmp_experiments;
    std::string cmp_indicator = "test_hv";
    std::string cmp_reference = "famoel";
    bool cmp_higher = false;
    double cmp_alpha = 0.05;
    auto* cmp = app.add_subcommand("compare", "Friedman comparison against a reference algorithm");
    cmp->add_option("--input", cmp_input, "CSV dataset,algorithm,block,value");
    cmp->add_option("--experiment", cmp_experiments, "NAME=DIR of a finished experiment");
    cmp->add_option("--indicator", cmp_indicator, "summary.csv column for --experiment");
    cmp->add_option("--reference", cmp_reference);
    cmp->add_flag("--higher-is-better", cmp_higher);
    cmp->add_option("--alpha", cmp_alpha);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(g, r);
        if (*ind) return cmd_indicators(ind_input, ind_front, ind_samples, ind_seed);
        if (*red) return cmd_reduce(red_matrices, red_objectives, g.tau.value_or(0.22), red_names);
        if (*met) return cmd_metrics(met_input, met_alpha, met_dirichlet);
        if (*plot) return cmd_plot(plot_runs, g.out.value_or("plots"), plot_tau);
        if (*cmp) {
            if (cmp_higher == false && cmp_indicator.ends_with("hv")) cmp_higher = true;
            if (cmp_indicator.ends_with("pd")) cmp_higher = true;
            return cmd_compare(cmp_input, cmp_experiments, cmp_indicator, cmp_reference, cmp_higher, cmp_alpha);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_config_error() ? kExitConfig : kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
