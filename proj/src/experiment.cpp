#include "famoel/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>

#include "famoel/csv.hpp"
#include "famoel/data_ingest.hpp"
#include "famoel/parallel.hpp"

namespace famoel {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string normalize_name(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '-' || c == '_') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidValue, what); }

double get_double(const json& j, const char* key) {
    if (!j.is_number()) invalid(std::string(key) + " must be a number");
    return j.get<double>();
}

std::size_t get_count(const json& j, const char* key) {
    if (!j.is_number()) invalid(std::string(key) + " must be a number");
    const double v = j.get<double>();
    if (v < 0 || v != std::floor(v)) invalid(std::string(key) + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

int get_int(const json& j, const char* key) {
    if (!j.is_number()) invalid(std::string(key) + " must be a number");
    const double v = j.get<double>();
    if (v != std::floor(v)) invalid(std::string(key) + " must be an integer");
    if (v < 0) invalid(std::string(key) + " must not be negative");
    return static_cast<int>(v);
}

std::string get_string(const json& j, const char* key) {
    if (!j.is_string()) invalid(std::string(key) + " must be a string");
    return j.get<std::string>();
}

std::size_t objective_index(const json& j) {
    if (j.is_number_integer()) {
        const auto v = j.get<long long>();
        if (v < 0 || v >= static_cast<long long>(kObjectiveCount)) invalid("mask index out of range");
        return static_cast<std::size_t>(v);
    }
    if (j.is_string()) {
        const auto& names = objective_names();
        const std::string s = j.get<std::string>();
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == s) return i;
        }
        invalid("unknown objective '" + s + "'");
    }
    invalid("mask entries must be indices or objective names");
}

void apply_preset(ExperimentConfig& c, const std::string& name) {
    const auto& p = find_preset(name);
    c.preset = p.name;
    c.learning_rate = p.learning_rate;
    c.mutation_strength = p.mutation_strength;
    c.hidden_nodes = p.hidden_nodes;
}

void apply_overrides(ExperimentConfig& c, const json& j) {
    if (!j.is_object()) invalid("configuration must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (v.is_null()) continue;
        if (key == "preset") {
            continue;  // handled before the other keys
        } else if (key == "dataset") {
            c.dataset = get_string(v, "dataset");
        } else if (key == "schema") {
            c.schema = get_string(v, "schema");
        } else if (key == "mode") {
            try {
                c.mode = parse_mode(get_string(v, "mode"));
            } catch (const Error&) {
                throw;
            } catch (const std::exception& e) {
                invalid(e.what());
            }
        } else if (key == "static_mask") {
            if (!v.is_array()) invalid("static_mask must be an array");
            std::vector<std::size_t> mask;
            for (const auto& e : v) mask.push_back(objective_index(e));
            std::sort(mask.begin(), mask.end());
            mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
            c.static_mask = mask;
        } else if (key == "folds") {
            c.folds = get_count(v, "folds");
        } else if (key == "trials") {
            c.trials = get_count(v, "trials");
        } else if (key == "generations") {
            c.generations = get_int(v, "generations");
        } else if (key == "tau") {
            c.tau = get_double(v, "tau");
        } else if (key == "warmup") {
            c.warmup = get_int(v, "warmup");
        } else if (key == "window") {
            c.window = get_count(v, "window");
        } else if (key == "convergence_capacity") {
            c.convergence_capacity = get_count(v, "convergence_capacity");
        } else if (key == "diversity_capacity") {
            c.diversity_capacity = get_count(v, "diversity_capacity");
        } else if (key == "initial_population") {
            c.initial_population = get_count(v, "initial_population");
        } else if (key == "offspring") {
            c.offspring = get_count(v, "offspring");
        } else if (key == "learning_rate") {
            c.learning_rate = get_double(v, "learning_rate");
        } else if (key == "mutation_strength") {
            c.mutation_strength = get_double(v, "mutation_strength");
        } else if (key == "hidden_nodes") {
            c.hidden_nodes = get_count(v, "hidden_nodes");
        } else if (key == "epochs") {
            c.epochs = get_count(v, "epochs");
        } else if (key == "batch_size") {
            c.batch_size = get_count(v, "batch_size");
        } else if (key == "alpha") {
            c.alpha = get_double(v, "alpha");
        } else if (key == "dirichlet") {
            c.dirichlet = get_double(v, "dirichlet");
        } else if (key == "seed") {
            if (v.is_number_unsigned()) {
                c.seed = v.get<std::uint64_t>();
            } else {
                c.seed = get_count(v, "seed");
            }
        } else if (key == "out") {
            c.out = get_string(v, "out");
        } else if (key == "hv_samples") {
            c.hv_samples = get_count(v, "hv_samples");
        } else if (key == "threads") {
            c.threads = get_count(v, "threads");
        } else if (key == "dump_genomes") {
            if (!v.is_boolean()) invalid("dump_genomes must be a boolean");
            c.dump_genomes = v.get<bool>();
        } else {
            invalid("unknown configuration key '" + key + "'");
        }
    }
}

std::string indicator_header_prefix(const char* split) { return std::string(split) + "_"; }

const char* const kIndicatorNames[] = {"gd", "pd", "sp", "hv"};

std::vector<double> indicator_values(const IndicatorValues& v) { return {v.gd, v.pd, v.sp, v.hv}; }

std::vector<std::string> generation_header() {
    std::vector<std::string> h = {"generation", "mask_size"};
    for (const char* split : {"val", "test"}) {
        for (const char* name : kIndicatorNames) h.push_back(indicator_header_prefix(split) + name);
    }
    return h;
}

std::vector<double> generation_row(const GenerationIndicators& g) {
    std::vector<double> row = {static_cast<double>(g.generation), static_cast<double>(g.mask_size)};
    for (double v : indicator_values(g.validation)) row.push_back(v);
    for (double v : indicator_values(g.test)) row.push_back(v);
    return row;
}

void write_objectives(const fs::path& path, const std::vector<Individual>& population, bool test) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    const auto& names = objective_names();
    std::vector<std::string> header(names.begin(), names.end());
    csv::write_row(out, header);
    for (const auto& ind : population) csv::write_row(out, test ? ind.test_objectives : ind.objectives);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    return out;
}

}  // namespace

const std::vector<DatasetPreset>& dataset_presets() {
    static const std::vector<DatasetPreset> presets = {
        {"heart_health", 1e-4, 1e-4, 16},
        {"titanic", 1e-3, 1e-4, 8},
        {"german", 1e-4, 0.05, 64},
        {"student_performance", 1e-3, 1e-4, 64},
        {"compas", 1e-3, 0.05, 64},
        {"bank", 1e-3, 0.005, 64},
        {"adult", 1e-3, 0.05, 64},
        {"drug_consumption", 1e-3, 1e-4, 64},
        {"patient_treatment", 1e-4, 1e-4, 64},
        {"lsat", 1e-3, 0.005, 64},
        {"default", 1e-3, 0.01, 64},
        {"dutch", 1e-3, 0.01, 64},
    };
    return presets;
}

const DatasetPreset& find_preset(const std::string& name) {
    const std::string key = normalize_name(name);
    for (const auto& p : dataset_presets()) {
        if (normalize_name(p.name) == key) return p;
    }
    throw Error(ErrorCode::InvalidValue, "unknown preset '" + name + "'");
}

const std::vector<std::size_t>& representative_static_mask() {
    static const std::vector<std::size_t> mask = {0, 4, 7, 10, 16, 17, 25};
    return mask;
}

void ExperimentConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) invalid("tau must lie in (0, 1)");
    if (folds < 1) invalid("folds must be at least 1");
    if (trials < 1) invalid("trials must be at least 1");
    if (generations < 0) invalid("generations must not be negative");
    if (warmup < 0) invalid("warmup must not be negative");
    if (window < 1) invalid("window must be at least 1");
    if (convergence_capacity < 1 || diversity_capacity < 1) invalid("archive capacities must be positive");
    if (offspring < 1) invalid("offspring must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) invalid("learning_rate must be positive");
    if (!(mutation_strength >= 0.0) || !std::isfinite(mutation_strength)) {
        invalid("mutation_strength must be nonnegative");
    }
    if (hidden_nodes < 1) invalid("hidden_nodes must be positive");
    if (batch_size < 1) invalid("batch_size must be positive");
    if (hv_samples < 1) invalid("hv_samples must be positive");
    if (mode == Mode::StaticMask && static_mask.empty()) invalid("static-mask mode needs a nonempty mask");
    evolution_config(seed).validate();
}

EvolutionConfig ExperimentConfig::evolution_config(std::uint64_t run_seed) const {
    EvolutionConfig e;
    e.convergence_capacity = convergence_capacity;
    e.diversity_capacity = diversity_capacity;
    e.initial_population = initial_population;
    e.offspring_count = offspring;
    e.generations = generations;
    e.mutation_strength = mutation_strength;
    e.training.learning_rate = learning_rate;
    e.training.epochs = epochs;
    e.training.batch_size = batch_size;
    e.reduction.tau = tau;
    e.reduction.warmup = warmup;
    e.reduction.window = window;
    e.metrics.alpha = alpha;
    e.metrics.dirichlet_concentration = dirichlet;
    e.mode = mode;
    if (mode == Mode::StaticMask) e.static_mask = static_mask;
    e.seed = run_seed;
    e.threads = threads;
    return e;
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["dataset"] = c.dataset.string();
    j["schema"] = c.schema.string();
    j["preset"] = c.preset;
    j["mode"] = to_string(c.mode);
    j["static_mask"] = c.static_mask;
    j["folds"] = c.folds;
    j["trials"] = c.trials;
    j["generations"] = c.generations;
    j["tau"] = c.tau;
    j["warmup"] = c.warmup;
    j["window"] = c.window;
    j["convergence_capacity"] = c.convergence_capacity;
    j["diversity_capacity"] = c.diversity_capacity;
    j["initial_population"] = c.initial_population;
    j["offspring"] = c.offspring;
    j["learning_rate"] = c.learning_rate;
    j["mutation_strength"] = c.mutation_strength;
    j["hidden_nodes"] = c.hidden_nodes;
    j["epochs"] = c.epochs;
    j["batch_size"] = c.batch_size;
    j["alpha"] = c.alpha;
    j["dirichlet"] = c.dirichlet;
    j["seed"] = c.seed;
    j["out"] = c.out.string();
    j["hv_samples"] = c.hv_samples;
    j["threads"] = c.threads;
    j["dump_genomes"] = c.dump_genomes;
    return j;
}

ExperimentConfig parse_config(const std::optional<fs::path>& file, const json& overrides) {
    json from_file = json::object();
    if (file) {
        std::ifstream in(*file);
        if (!in) invalid("cannot open config file " + file->string());
        try {
            from_file = json::parse(in);
        } catch (const json::exception& e) {
            invalid("config file " + file->string() + ": " + e.what());
        }
        if (!from_file.is_object()) invalid("config file must hold a JSON object");
    }
    json flags = overrides.is_null() ? json::object() : overrides;
    if (!flags.is_object()) invalid("overrides must be a JSON object");

    ExperimentConfig c;
    if (flags.contains("preset") && !flags["preset"].is_null()) {
        apply_preset(c, get_string(flags["preset"], "preset"));
    } else if (from_file.contains("preset") && !from_file["preset"].is_null()) {
        apply_preset(c, get_string(from_file["preset"], "preset"));
    }
    apply_overrides(c, from_file);
    apply_overrides(c, flags);
    c.validate();
    return c;
}

std::uint64_t child_seed(std::uint64_t root, std::size_t fold, std::size_t trial) {
    return derive_seed(root, static_cast<std::uint32_t>(fold), static_cast<std::uint32_t>(trial));
}

std::vector<GenerationIndicators> run_indicators(const RunArtifacts& run, const IndicatorConfig& config) {
    std::vector<PointSet> validation;
    std::vector<PointSet> test;
    for (const auto& g : run.generations) {
        validation.push_back(g.validation_objectives);
        test.push_back(g.test_objectives);
    }
    const PointSet val_front = build_pseudo_front(validation);
    const PointSet test_front = build_pseudo_front(test);

    std::vector<GenerationIndicators> out(run.generations.size());
    for (std::size_t i = 0; i < run.generations.size(); ++i) {
        const auto& g = run.generations[i];
        out[i].generation = g.generation;
        out[i].mask_size = g.mask.size();
        out[i].validation = compute_indicators(g.validation_objectives, val_front, config);
        out[i].test = compute_indicators(g.test_objectives, test_front, config);
    }
    return out;
}

void write_run_artifacts(const fs::path& dir, const RunArtifacts& run,
                         const std::vector<GenerationIndicators>& indicators, const json& run_info,
                         bool dump_genomes) {
    fs::create_directories(dir);
    {
        auto out = open_out(dir / "run.json");
        out << run_info.dump(2) << '\n';
    }
    {
        auto out = open_out(dir / "generations.csv");
        csv::write_row(out, generation_header());
        for (const auto& g : indicators) csv::write_row(out, generation_row(g));
    }
    {
        auto out = open_out(dir / "timing.csv");
        csv::write_row(out, std::vector<std::string>{"generation", "wall_seconds"});
        for (const auto& g : run.generations) {
            csv::write_row(out, std::vector<double>{static_cast<double>(g.generation), g.wall_seconds});
        }
    }
    {
        auto out = open_out(dir / "mask.csv");
        std::vector<std::string> header = {"generation"};
        for (const auto& n : objective_names()) header.push_back(n);
        csv::write_row(out, header);
        for (const auto& g : run.generations) {
            if (g.generation == 0) continue;
            std::vector<double> row(kObjectiveCount + 1, 0.0);
            row[0] = g.generation;
            for (std::size_t k : g.mask.active) row[k + 1] = 1.0;
            csv::write_row(out, row);
        }
    }
    write_objectives(dir / "final_objectives.csv", run.final_population, false);
    write_objectives(dir / "final_test_objectives.csv", run.final_population, true);
    if (dump_genomes) {
        std::ofstream out(dir / "genomes.bin", std::ios::binary);
        if (!out) throw Error(ErrorCode::Io, "cannot write genomes.bin");
        const std::uint64_t n = run.final_population.size();
        for (int b = 0; b < 8; ++b) out.put(static_cast<char>((n >> (8 * b)) & 0xFF));
        for (const auto& ind : run.final_population) write_genome(out, ind.genome);
    }
}

void write_summary(const fs::path& path, const std::vector<RunSummary>& runs) {
    auto out = open_out(path);
    std::vector<std::string> header = {"fold", "trial", "seed"};
    for (const auto& h : generation_header()) header.push_back(h);
    csv::write_row(out, header);
    std::vector<std::vector<double>> rows;
    for (const auto& r : runs) {
        std::vector<std::string> cells = {std::to_string(r.fold), std::to_string(r.trial), std::to_string(r.seed)};
        const auto values = generation_row(r.final);
        rows.push_back(values);
        for (double v : values) cells.push_back(csv::format_double(v));
        csv::write_row(out, cells);
    }
    if (rows.empty()) return;
    const std::size_t width = rows.front().size();
    std::vector<double> mean(width, 0.0);
    std::vector<double> sd(width, 0.0);
    for (std::size_t c = 0; c < width; ++c) {
        for (const auto& r : rows) mean[c] += r[c];
        mean[c] /= static_cast<double>(rows.size());
        if (rows.size() > 1) {
            for (const auto& r : rows) sd[c] += (r[c] - mean[c]) * (r[c] - mean[c]);
            sd[c] = std::sqrt(sd[c] / static_cast<double>(rows.size() - 1));
        }
    }
    for (auto [label, values] : {std::pair{"mean", &mean}, std::pair{"std", &sd}}) {
        std::vector<std::string> cells = {label, "", ""};
        for (double v : *values) cells.push_back(csv::format_double(v));
        csv::write_row(out, cells);
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.dataset.empty() || config.schema.empty()) invalid("dataset and schema paths are required");
    const DatasetSchema schema = load_schema(config.schema);
    const RawTable raw = load_dataset(config.dataset, schema);
    const std::size_t n = raw.rows.size();
    const std::uint64_t split_seed = derive_seed(config.seed, 0xDA7A, 0);

    fs::create_directories(config.out);
    {
        auto out = open_out(config.out / "config.json");
        out << to_json(config).dump(2) << '\n';
    }

    const std::size_t n_runs = config.folds * config.trials;
    std::vector<RunSummary> summaries(n_runs);
    // Runs share the CPU budget; each run develops its offspring serially when runs overlap.
    const std::size_t outer = n_runs > 1 ? config.threads : 1;
    const std::size_t inner = n_runs > 1 ? 1 : config.threads;

    parallel_for(n_runs, outer, [&](std::size_t i) {
        const std::size_t fold = i / config.trials;
        const std::size_t trial = i % config.trials;
        const std::uint64_t seed = child_seed(config.seed, fold, trial);
        const SplitIndices idx =
            config.folds == 1 ? split(n, split_seed) : fold_split(n, config.folds, fold, split_seed);
        const SplitBundle bundle = make_split_bundle(raw, schema, idx, split_seed);
        const NetworkShape shape{bundle.train.n_features(), config.hidden_nodes};

        EvolutionConfig ec = config.evolution_config(seed);
        ec.threads = inner;
        const RunArtifacts run = run_evolution(ec, bundle, shape);
        const auto indicators = run_indicators(run, IndicatorConfig{config.hv_samples, IndicatorConfig{}.hv_seed});

        const fs::path dir = config.out / ("fold" + std::to_string(fold) + "_trial" + std::to_string(trial));
        json info;
        info["config"] = to_json(config);
        info["fold"] = fold;
        info["trial"] = trial;
        info["seed"] = seed;
        info["split_seed"] = split_seed;
        info["rows"] = {{"train", idx.train.size()}, {"validation", idx.validation.size()}, {"test", idx.test.size()},
                        {"dropped", raw.dropped_rows}};
        info["n_features"] = shape.n_inputs;
        info["genome_length"] = shape.genome_length();
        info["warnings"] = bundle.train.warnings;
        write_run_artifacts(dir, run, indicators, info, config.dump_genomes);

        summaries[i].fold = fold;
        summaries[i].trial = trial;
        summaries[i].seed = seed;
        summaries[i].final = indicators.back();
        summaries[i].directory = dir;
    });

    ExperimentResult result;
    result.runs = std::move(summaries);
    result.summary_path = config.out / "summary.csv";
    write_summary(result.summary_path, result.runs);
    return result;
}

}  // namespace famoel
