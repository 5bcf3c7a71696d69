#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "famoel/indicators.hpp"
#include "famoel/moea.hpp"

namespace famoel {

struct DatasetPreset {
    std::string name;
    double learning_rate;
    double mutation_strength;
    std::size_t hidden_nodes;
};

// Per-dataset learning rate, mutation strength and hidden width of the reference experiments.
const std::vector<DatasetPreset>& dataset_presets();
const DatasetPreset& find_preset(const std::string& name);

// CE, f4, f7, f10, f16, f17, f25
const std::vector<std::size_t>& representative_static_mask();

struct ExperimentConfig {
    std::filesystem::path dataset;
    std::filesystem::path schema;
    std::string preset;
    Mode mode = Mode::FaMoel;
    std::vector<std::size_t> static_mask = representative_static_mask();
    std::size_t folds = 5;
    std::size_t trials = 10;
    int generations = 100;
    double tau = 0.22;
    int warmup = 10;
    std::size_t window = 10;
    std::size_t convergence_capacity = 100;
    std::size_t diversity_capacity = 100;
    std::size_t initial_population = 0;
    std::size_t offspring = 100;
    double learning_rate = 1e-3;
    double mutation_strength = 0.05;
    std::size_t hidden_nodes = 64;
    std::size_t epochs = 1;
    std::size_t batch_size = 32;
    double alpha = 2.0;
    double dirichlet = 1.0;
    std::uint64_t seed = 1;
    std::filesystem::path out = "runs";
    std::size_t hv_samples = 100000;
    std::size_t threads = 0;
    bool dump_genomes = false;

    void validate() const;
    [[nodiscard]] EvolutionConfig evolution_config(std::uint64_t run_seed) const;
};

nlohmann::json to_json(const ExperimentConfig& config);

// Precedence: built-in defaults < dataset preset < config file < flag overrides. A preset may be
// named in the file or in the overrides ("preset" key). Throws InvalidValue on bad values.
ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file, const nlohmann::json& overrides);

// (fold, trial) -> run seed; injective for a fixed root.
std::uint64_t child_seed(std::uint64_t root, std::size_t fold, std::size_t trial);

struct GenerationIndicators {
    int generation = 0;
    std::size_t mask_size = 0;
    IndicatorValues validation;
    IndicatorValues test;
};

// Indicators of every logged population against the run's pooled pseudo-fronts (validation
// and test separately).
std::vector<GenerationIndicators> run_indicators(const RunArtifacts& run, const IndicatorConfig& config);

// run.json, generations.csv, timing.csv, mask.csv, final_objectives.csv,
// final_test_objectives.csv and optionally genomes.bin.
void write_run_artifacts(const std::filesystem::path& dir, const RunArtifacts& run,
                         const std::vector<GenerationIndicators>& indicators, const nlohmann::json& run_info,
                         bool dump_genomes);

struct RunSummary {
    std::size_t fold = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    GenerationIndicators final;
    std::filesystem::path directory;
};

struct ExperimentResult {
    std::vector<RunSummary> runs;
    std::filesystem::path summary_path;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes per-run rows followed by "mean" and "std" rows.
void write_summary(const std::filesystem::path& path, const std::vector<RunSummary>& runs);

// -- artifacts read back for plotting and aggregation --------------------------

struct LoadedRun {
    std::filesystem::path directory;
    std::vector<std::string> generation_columns;
    Matrix generations;  // rows of generations.csv
    Matrix masks;        // rows of mask.csv without the generation column
    nlohmann::json info;
};

LoadedRun load_run(const std::filesystem::path& dir);

// Run directories under `root` (those containing generations.csv), sorted by path. `root`
// itself counts when it is a run directory.
std::vector<std::filesystem::path> find_runs(const std::filesystem::path& root);

struct PlotOptions {
    bool tau_sweep = false;
};

// hv_curve.svg, mask_heatmap.svg, selection_frequency.svg (+ .csv), tau_sweep.svg.
// Runs are grouped by their parent experiment directory for the mean curves.
std::vector<std::filesystem::path> emit_plots(const std::vector<std::filesystem::path>& inputs,
                                              const std::filesystem::path& out_dir, const PlotOptions& options);

}  // namespace famoel
