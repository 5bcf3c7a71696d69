#include "famoel/moea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "famoel/indicators.hpp"
#include "famoel/parallel.hpp"

namespace famoel {

namespace {

// Masked objectives of `objectives` min-max normalized over its rows; constant columns -> 0.
Matrix normalized_masked(const Matrix& objectives, std::span<const std::size_t> mask) {
    Matrix out(objectives.rows(), mask.size());
    for (std::size_t c = 0; c < mask.size(); ++c) {
        const std::size_t k = mask[c];
        if (k >= objectives.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "mask index " + std::to_string(k) + " out of range");
        }
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < objectives.rows(); ++r) {
            lo = std::min(lo, objectives(r, k));
            hi = std::max(hi, objectives(r, k));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < objectives.rows(); ++r) {
            out(r, c) = range > 0.0 ? (objectives(r, k) - lo) / range : 0.0;
        }
    }
    return out;
}

Matrix epsilon_table(const Matrix& normalized) {
    const std::size_t n = normalized.rows();
    Matrix eps(n, n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (j == k) continue;
            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < normalized.cols(); ++c) {
                worst = std::max(worst, normalized(j, c) - normalized(k, c));
            }
            eps(j, k) = worst;
        }
    }
    return eps;
}

std::vector<double> masked_row(const Individual& ind, std::span<const std::size_t> mask) {
    std::vector<double> out(mask.size());
    for (std::size_t c = 0; c < mask.size(); ++c) out[c] = ind.objectives.at(mask[c]);
    return out;
}

void sort_by_id(std::vector<Individual>& v) {
    std::sort(v.begin(), v.end(), [](const Individual& a, const Individual& b) { return a.id < b.id; });
}

std::vector<Individual> mask_nondominated(std::vector<Individual> pool, std::span<const std::size_t> mask) {
    std::vector<std::vector<double>> rows;
    rows.reserve(pool.size());
    for (const auto& ind : pool) rows.push_back(masked_row(ind, mask));
    std::vector<Individual> kept;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pool.size() && !dominated; ++j) {
            dominated = j != i && dominates(rows[j], rows[i]);
        }
        if (!dominated) kept.push_back(std::move(pool[i]));
    }
    return kept;
}

}  // namespace

Genome gaussian_mutation(Genome genome, double sigma, Rng& rng) {
    if (sigma < 0) {
        throw Error(ErrorCode::InvalidValue, "mutation strength must be >= 0");
    }
    if (sigma == 0) {
        return genome;
    }
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& v : genome.values()) v += noise(rng);
    return genome;
}

std::pair<Genome, Genome> weight_crossover(const Genome& p, const Genome& q, Rng& rng) {
    if (p.size() != q.size()) {
        throw Error(ErrorCode::ShapeMismatch, "crossover parents differ in length");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Genome o1 = p;
    Genome o2 = q;
    for (std::size_t i = 0; i < p.size(); ++i) {
        // Same convex combination, written so that equal parents copy through bit-exactly.
        const double step = unit(rng) * (p[i] - q[i]);
        o1[i] = q[i] + step;
        o2[i] = p[i] - step;
    }
    return {std::move(o1), std::move(o2)};
}

Matrix objective_matrix(std::span<const Individual> individuals) {
    Matrix m;
    for (const auto& ind : individuals) m.append_row(ind.objectives);
    return m;
}

std::vector<double> epsilon_indicator_fitness(const Matrix& objectives, std::span<const std::size_t> mask,
                                              double kappa) {
    const std::size_t n = objectives.rows();
    const Matrix eps = epsilon_table(normalized_masked(objectives, mask));
    std::vector<double> fitness(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != k) fitness[k] -= std::exp(-eps(j, k) / kappa);
        }
    }
    return fitness;
}

std::vector<Individual> update_convergence_archive(std::vector<Individual> archive,
                                                   std::span<const Individual> newcomers,
                                                   std::span<const std::size_t> mask, std::size_t capacity,
                                                   double kappa) {
    archive.insert(archive.end(), newcomers.begin(), newcomers.end());
    sort_by_id(archive);
    if (archive.size() <= capacity) {
        return archive;
    }
    const Matrix eps = epsilon_table(normalized_masked(objective_matrix(archive), mask));
    const std::size_t n = archive.size();
    std::vector<double> fitness(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != k) fitness[k] -= std::exp(-eps(j, k) / kappa);
        }
    }
    std::vector<bool> alive(n, true);
    for (std::size_t remaining = n; remaining > capacity; --remaining) {
        std::size_t worst = n;
        for (std::size_t k = 0; k < n; ++k) {
            // ascending ids: `<=` hands ties to the later (larger id) member
            if (alive[k] && (worst == n || fitness[k] <= fitness[worst])) worst = k;
        }
        alive[worst] = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (alive[k]) fitness[k] += std::exp(-eps(worst, k) / kappa);
        }
    }
    std::vector<Individual> out;
    out.reserve(capacity);
    for (std::size_t k = 0; k < n; ++k) {
        if (alive[k]) out.push_back(std::move(archive[k]));
    }
    return out;
}

double fractional_dissimilarity(std::span<const double> a, std::span<const double> b) {
    const double m = static_cast<double>(a.size());
    if (a.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::pow(std::abs(a[k] - b[k]), 1.0 / m);
    return std::pow(acc, m);
}

std::vector<Individual> update_diversity_archive(std::vector<Individual> archive,
                                                 std::span<const Individual> newcomers,
                                                 std::span<const std::size_t> mask, std::size_t capacity) {
    archive.insert(archive.end(), newcomers.begin(), newcomers.end());
    sort_by_id(archive);
    archive = mask_nondominated(std::move(archive), mask);
    if (archive.size() <= capacity) {
        return archive;
    }
    const Matrix norm = normalized_masked(objective_matrix(archive), mask);
    const std::size_t n = archive.size();
    Matrix dist(n, n, 0.0);
    std::vector<double> contribution(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = fractional_dissimilarity(norm.row(i), norm.row(j));
            dist(i, j) = dist(j, i) = d;
            contribution[i] += d;
            contribution[j] += d;
        }
    }
    std::vector<bool> alive(n, true);
    for (std::size_t remaining = n; remaining > capacity; --remaining) {
        std::size_t victim = n;
        for (std::size_t k = 0; k < n; ++k) {
            if (alive[k] && (victim == n || contribution[k] <= contribution[victim])) victim = k;
        }
        alive[victim] = false;
        for (std::size_t k = 0; k < n; ++k) {
            if (alive[k]) contribution[k] -= dist(victim, k);
        }
    }
    std::vector<Individual> out;
    out.reserve(capacity);
    for (std::size_t k = 0; k < n; ++k) {
        if (alive[k]) out.push_back(std::move(archive[k]));
    }
    return out;
}

std::vector<ParentPair> mating_selection(std::span<const Individual> convergence,
                                         std::span<const Individual> diversity, std::size_t phi, Rng& rng) {
    if (convergence.empty() && diversity.empty()) {
        throw Error(ErrorCode::EmptyPopulation, "both archives are empty");
    }
    auto first_pool = convergence.empty() ? diversity : convergence;
    auto second_pool = diversity.empty() ? convergence : diversity;
    std::uniform_int_distribution<std::size_t> pick_first(0, first_pool.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_second(0, second_pool.size() - 1);
    std::vector<ParentPair> pairs;
    const std::size_t count = (phi + 1) / 2;
    pairs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Individual* a = &first_pool[pick_first(rng)];
        const Individual* b = &second_pool[pick_second(rng)];
        pairs.emplace_back(a, b);
    }
    return pairs;
}

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::FaMoel: return "famoel";
    case Mode::Moel: return "moel";
    case Mode::StaticMask: return "static-mask";
    }
    return "unknown";
}

Mode parse_mode(const std::string& s) {
    if (s == "famoel") return Mode::FaMoel;
    if (s == "moel") return Mode::Moel;
    if (s == "static-mask" || s == "static") return Mode::StaticMask;
    throw Error(ErrorCode::InvalidValue, "unknown mode '" + s + "' (famoel | moel | static-mask)");
}

void EvolutionConfig::validate() const {
    if (convergence_capacity == 0 || diversity_capacity == 0 || offspring_count == 0) {
        throw Error(ErrorCode::InvalidValue, "archive capacities and offspring count must be positive");
    }
    if (generations < 0) {
        throw Error(ErrorCode::InvalidValue, "generations must be >= 0");
    }
    if (!(mutation_strength >= 0.0)) {
        throw Error(ErrorCode::InvalidValue, "mutation strength must be >= 0");
    }
    if (!(training.learning_rate >= 0.0)) {
        throw Error(ErrorCode::InvalidValue, "learning rate must be >= 0");
    }
    if (!(kappa > 0.0)) {
        throw Error(ErrorCode::InvalidValue, "kappa must be positive");
    }
    reduction.validate();
    metrics.validate();
    if (mode == Mode::StaticMask) {
        if (!static_mask || static_mask->empty()) {
            throw Error(ErrorCode::InvalidValue, "static-mask mode requires a nonempty static mask");
        }
        for (std::size_t k : *static_mask) {
            if (k >= kObjectiveCount) {
                throw Error(ErrorCode::InvalidValue, "static mask index " + std::to_string(k) + " out of range");
            }
        }
    }
    if (mode == Mode::FaMoel && population_size() < 4) {
        throw Error(ErrorCode::InvalidValue, "famoel mode needs a population of at least 4");
    }
}

std::vector<Individual> merge_population(std::span<const Individual> convergence,
                                         std::span<const Individual> diversity) {
    std::map<std::uint64_t, const Individual*> by_id;
    for (const auto& ind : convergence) by_id.emplace(ind.id, &ind);
    for (const auto& ind : diversity) by_id.emplace(ind.id, &ind);
    std::vector<Individual> out;
    out.reserve(by_id.size());
    for (const auto& [id, ind] : by_id) out.push_back(*ind);
    return out;
}

namespace {

std::vector<double> to_vector(const ObjectiveVector& v) { return {v.begin(), v.end()}; }

// Partial training, then evaluation on validation (for selection) and test (for reporting).
void develop(Individual& ind, const EvolutionConfig& config, const SplitBundle& splits, const NetworkShape& shape) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint32_t>(ind.id >> 32),
                        static_cast<std::uint32_t>(ind.id & 0xFFFFFFFFu)));
    ind.genome = partial_train(std::move(ind.genome), shape, splits.train, config.training, rng);
    ind.objectives = to_vector(evaluate_individual(ind.genome, shape, splits.validation, config.metrics));
    if (splits.test.size() > 0) {
        ind.test_objectives = to_vector(evaluate_individual(ind.genome, shape, splits.test, config.metrics));
    }
}

GenerationRecord snapshot(int generation, const SelectionMask& mask, std::span<const Individual> population) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.mask = mask;
    rec.mask.generation = generation;
    for (const auto& ind : population) {
        rec.population_ids.push_back(ind.id);
        rec.validation_objectives.append_row(ind.objectives);
        if (!ind.test_objectives.empty()) rec.test_objectives.append_row(ind.test_objectives);
    }
    return rec;
}

}  // namespace

RunArtifacts run_evolution(const EvolutionConfig& config, const SplitBundle& splits, const NetworkShape& shape,
                           const GenerationCallback& on_generation) {
    config.validate();
    shape.validate();
    if (splits.train.n_features() != shape.n_inputs) {
        throw Error(ErrorCode::ShapeMismatch, "dataset has " + std::to_string(splits.train.n_features()) +
                                                  " features but the network expects " +
                                                  std::to_string(shape.n_inputs));
    }

    using Clock = std::chrono::steady_clock;
    RunArtifacts run;
    run.config = config;
    run.shape = shape;

    std::uint64_t next_id = 0;
    auto clock_start = Clock::now();

    // Initial models: init, partially train, evaluate.
    std::vector<Individual> initial(config.population_size());
    {
        Rng init_rng(derive_seed(config.seed, 0xFFFFFFFFu, 0));
        for (auto& ind : initial) {
            ind.id = next_id++;
            ind.genome = init_genome(shape, init_rng);
        }
        parallel_for(initial.size(), config.threads, [&](std::size_t i) { develop(initial[i], config, splits, shape); });
    }

    const auto full_mask = SelectionMask::full(kObjectiveCount);
    std::vector<Individual> convergence =
        update_convergence_archive({}, initial, full_mask.active, config.convergence_capacity, config.kappa);
    std::vector<Individual> diversity = update_diversity_archive({}, initial, full_mask.active, config.diversity_capacity);

    {
        auto rec = snapshot(0, full_mask, merge_population(convergence, diversity));
        rec.wall_seconds = std::chrono::duration<double>(Clock::now() - clock_start).count();
        if (on_generation) on_generation(rec);
        run.generations.push_back(std::move(rec));
    }

    std::optional<FairnessAwareSelector> selector;
    if (config.mode == Mode::FaMoel) {
        selector.emplace(config.reduction);
    }
    SelectionMask previous = full_mask;

    for (int t = 1; t <= config.generations; ++t) {
        clock_start = Clock::now();
        const auto population = merge_population(convergence, diversity);

        SelectionMask mask;
        switch (config.mode) {
        case Mode::FaMoel: mask = selector->step(t, objective_matrix(population)); break;
        case Mode::Moel: mask = SelectionMask::full(kObjectiveCount, t); break;
        case Mode::StaticMask: {
            mask.active = *config.static_mask;
            std::sort(mask.active.begin(), mask.active.end());
            mask.active.erase(std::unique(mask.active.begin(), mask.active.end()), mask.active.end());
            break;
        }
        }
        mask.generation = t;

        if (!(mask == previous)) {
            diversity = update_diversity_archive(std::move(diversity), {}, mask.active, config.diversity_capacity);
        }
        previous = mask;

        Rng rng(derive_seed(config.seed, static_cast<std::uint32_t>(t), 1));
        const auto pairs = mating_selection(convergence, diversity, config.offspring_count, rng);
        std::vector<Individual> offspring;
        offspring.reserve(pairs.size() * 2);
        for (const auto& [p, q] : pairs) {
            auto [c1, c2] = weight_crossover(p->genome, q->genome, rng);
            for (Genome* child : {&c1, &c2}) {
                Individual ind;
                ind.genome = gaussian_mutation(std::move(*child), config.mutation_strength, rng);
                offspring.push_back(std::move(ind));
            }
        }
        offspring.resize(std::min(offspring.size(), config.offspring_count));
        for (auto& ind : offspring) ind.id = next_id++;

        parallel_for(offspring.size(), config.threads,
                     [&](std::size_t i) { develop(offspring[i], config, splits, shape); });

        convergence = update_convergence_archive(std::move(convergence), offspring, mask.active,
                                                 config.convergence_capacity, config.kappa);
        diversity = update_diversity_archive(std::move(diversity), offspring, mask.active, config.diversity_capacity);

        auto rec = snapshot(t, mask, merge_population(convergence, diversity));
        rec.wall_seconds = std::chrono::duration<double>(Clock::now() - clock_start).count();
        if (on_generation) on_generation(rec);
        run.generations.push_back(std::move(rec));
    }

    run.final_population = merge_population(convergence, diversity);
    if (selector) {
        run.correlation_history = selector->history().matrices;
    }
    return run;
}

}  // namespace famoel
