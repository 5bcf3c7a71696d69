#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "famoel/common.hpp"
#include "famoel/data_ingest.hpp"
#include "famoel/fairness_metrics.hpp"
#include "famoel/neural_model.hpp"
#include "famoel/objective_reduction.hpp"

namespace famoel {

struct Individual {
    std::uint64_t id = 0;
    Genome genome;
    std::vector<double> objectives;       // validation objectives used for selection
    std::vector<double> test_objectives;  // reporting only, never read by selection
};

// -- variation -----------------------------------------------------------

Genome gaussian_mutation(Genome genome, double sigma, Rng& rng);

// o1 = u p + (1 - u) q,  o2 = u q + (1 - u) p  with one u_i ~ U(0, 1) per component.
std::pair<Genome, Genome> weight_crossover(const Genome& p, const Genome& q, Rng& rng);

// -- selection ------------------------------------------------------------

inline constexpr double kDefaultKappa = 0.05;

Matrix objective_matrix(std::span<const Individual> individuals);

// Additive-epsilon indicator fitness over masked, min-max normalized objectives:
//   fitness_k = sum_{j != k} -exp(-I(j, k) / kappa),  I(j, k) = max_i (a_ji - a_ki).
// Higher is better.
std::vector<double> epsilon_indicator_fitness(const Matrix& objectives, std::span<const std::size_t> mask,
                                              double kappa = kDefaultKappa);

// Pool = archive + newcomers; drops the lowest-fitness member (ties: larger id) and updates
// the remaining fitness until the pool fits. Result is sorted by id.
std::vector<Individual> update_convergence_archive(std::vector<Individual> archive,
                                                   std::span<const Individual> newcomers,
                                                   std::span<const std::size_t> mask, std::size_t capacity,
                                                   double kappa = kDefaultKappa);

// L_{1/m} dissimilarity between two normalized masked objective vectors.
double fractional_dissimilarity(std::span<const double> a, std::span<const double> b);

// Pool = mask-nondominated members of archive + newcomers; while over capacity, removes the
// member whose removal least reduces the total pairwise L_{1/m} dissimilarity (ties: larger id).
// Result is sorted by id.
std::vector<Individual> update_diversity_archive(std::vector<Individual> archive,
                                                 std::span<const Individual> newcomers,
                                                 std::span<const std::size_t> mask, std::size_t capacity);

using ParentPair = std::pair<const Individual*, const Individual*>;

// ceil(phi / 2) pairs: first parent uniform from the convergence archive, second uniform from
// the diversity archive. Falls back to whichever archive is nonempty.
std::vector<ParentPair> mating_selection(std::span<const Individual> convergence,
                                         std::span<const Individual> diversity, std::size_t phi, Rng& rng);

// -- the evolutionary loop -------------------------------------------------

enum class Mode { FaMoel, Moel, StaticMask };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& s);

struct EvolutionConfig {
    std::size_t convergence_capacity = 100;
    std::size_t diversity_capacity = 100;
    std::size_t initial_population = 0;  // 0 -> convergence_capacity
    std::size_t offspring_count = 100;    // phi
    int generations = 100;
    double mutation_strength = 0.05;  // sigma
    TrainingConfig training;
    ReductionConfig reduction;
    MetricsConfig metrics;
    Mode mode = Mode::FaMoel;
    std::optional<std::vector<std::size_t>> static_mask;
    double kappa = kDefaultKappa;
    std::uint64_t seed = 1;
    std::size_t threads = 0;  // 0 -> hardware concurrency

    [[nodiscard]] std::size_t population_size() const noexcept {
        return initial_population ? initial_population : convergence_capacity;
    }
    void validate() const;
};

struct GenerationRecord {
    int generation = 0;  // 0 is the initial population
    SelectionMask mask;
    std::vector<std::uint64_t> population_ids;
    Matrix validation_objectives;  // population x 26
    Matrix test_objectives;        // population x 26
    double wall_seconds = 0.0;
};

struct RunArtifacts {
    EvolutionConfig config;
    NetworkShape shape;
    std::vector<GenerationRecord> generations;
    std::vector<Individual> final_population;
    std::vector<CorrelationMatrix> correlation_history;
};

using GenerationCallback = std::function<void(const GenerationRecord&)>;

RunArtifacts run_evolution(const EvolutionConfig& config, const SplitBundle& splits, const NetworkShape& shape,
                           const GenerationCallback& on_generation = {});

// Population M = convergence archive + diversity archive, deduplicated by id, sorted by id.
std::vector<Individual> merge_population(std::span<const Individual> convergence,
                                         std::span<const Individual> diversity);

}  // namespace famoel
