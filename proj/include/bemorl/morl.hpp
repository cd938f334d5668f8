#pragma once

#include "bemorl/context.hpp"
#include "bemorl/env.hpp"
#include "bemorl/metrics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bemorl {

/// splitmix64 of (master, a, b); all trainer randomness is derived through it
/// so each stage can be replayed independently.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Per-component min/max scaling of observations onto [-1, 1].
struct ObsNormalizer {
    std::vector<double> lo;
    std::vector<double> hi;

    std::vector<double> apply(std::span<const double> obs) const;
    bool operator==(const ObsNormalizer&) const = default;
};

enum class PolicyOrigin { Random, Init, Extension };

const char* to_string(PolicyOrigin origin);
PolicyOrigin policy_origin_from_string(const std::string& s);

/// Deterministic affine state feedback a = clip(W * normalize(obs) + b, -1, 1).
/// `theta` holds W row-major (M x obs_dim) followed by b (M).
struct Policy {
    std::int64_t id = -1;
    std::vector<double> theta;
    PolicyOrigin origin = PolicyOrigin::Random;
    std::vector<double> train_weights; // preference used during initialization
    int target_objective = -1;         // objective maximized during extension
    std::int64_t parent_id = -1;
    bool stage_final = false;          // best policy of its optimization run
};

std::size_t policy_param_count(std::size_t num_zones);

class AffineController {
public:
    AffineController(std::span<const double> theta, const ObsNormalizer& normalizer, std::size_t num_zones);
    std::vector<double> act(std::span<const double> obs) const;

private:
    std::span<const double> theta_;
    const ObsNormalizer* normalizer_;
    std::size_t num_zones_;
    std::size_t obs_dim_;
};

/// Fixed contexts, seeds and episode count that define a return estimate.
struct EvalProtocol {
    std::vector<ContextSpec> contexts;
    std::vector<std::uint64_t> seeds;
    int episodes = 1;
    double gamma = 0.99;
};

/// Mean discounted return vector over contexts x seeds x episodes. Every
/// episode for seed s resets with s, so repeated episodes are identical.
ReturnVector evaluate_policy(std::span<const double> theta, const ObsNormalizer& normalizer, BuildingEnv& env,
                             const EvalProtocol& protocol);
ReturnVector evaluate_policy(const Policy& policy, const ObsNormalizer& normalizer, BuildingEnv& env,
                             const EvalProtocol& protocol);

/// Observation ranges seen under uniformly random actions.
ObsNormalizer fit_normalizer(BuildingEnv& env, std::span<const ContextSpec> contexts, std::uint64_t seed,
                             int episodes);

struct BufferEntry {
    Policy policy;
    ReturnVector returns; // under the buffer's canonical protocol
};

/// Append-only record of every evaluated policy.
struct PolicyBuffer {
    ObsNormalizer normalizer;
    EvalProtocol protocol;
    std::vector<BufferEntry> entries;
    std::int64_t next_id = 0;
    bool init_done = false;
    int extension_rounds_done = 0;
    std::vector<std::string> reports;

    std::int64_t append(Policy policy, ReturnVector returns);
    const BufferEntry& entry(std::int64_t id) const;
    ParetoFront front() const;
    std::vector<ReturnVector> all_returns() const;
};

struct CemSettings {
    int population = 16;
    double elite_fraction = 0.25;
    int iterations = 30;
    double init_sigma = 0.5;
    double min_sigma = 0.02;
    double extension_sigma = 0.25;
};

struct TrainerConfig {
    std::vector<std::vector<double>> init_weights = {{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}};
    CemSettings cem;
    double beta = 0.9;
    int extension_rounds = 1;
    std::size_t select_k = 6;
    std::vector<std::uint64_t> eval_seeds = {11, 12};
    int eval_episodes = 1;
    int train_contexts = 2;       // contexts per canonical estimate / per dynamic iteration
    int normalizer_episodes = 4;
    double penalty_init = 1.0;
    std::optional<double> gamma;  // defaults to the environment's discount
    unsigned threads = 1;

    std::size_t n_init_policies() const { return init_weights.size(); }
    void validate(std::size_t num_objectives) const;
};

TrainerConfig parse_trainer_config(const std::string& json_text);
std::string dump_trainer_config(const TrainerConfig& config);

using EnvFactory = std::function<BuildingEnv()>;

/// Where training contexts come from.
struct TrainingSetup {
    ContextSpec base;
    TrainMode mode = TrainMode::Static;
    UWallBounds bounds = kUWallBounds;
    std::vector<std::string> climates; // dynamic-mode climate mixture, empty = base climate
};

/// Seeded random policies drawn from the trainer's initial distribution.
std::vector<std::vector<double>> sample_random_thetas(std::size_t count, std::size_t num_zones, double sigma,
                                                      std::uint64_t seed);

/// Canonical protocol: `train_contexts` draws of the setup's sampler plus the
/// configured evaluation seeds.
EvalProtocol canonical_protocol(const TrainerConfig& config, const TrainingSetup& setup, double gamma,
                                std::uint64_t master_seed);

/// One CEM run per preference vector maximizing omega^T G. Every iteration's
/// elites and each run's best policy land in the buffer.
PolicyBuffer pareto_initialization(const TrainerConfig& config, const EnvFactory& factory, const TrainingSetup& setup,
                                   std::uint64_t master_seed);

/// Non-dominated buffer entries, truncated to the k largest crowding distances
/// (extremes first, ties by policy id).
std::vector<BufferEntry> select_policies(const PolicyBuffer& buffer, std::size_t k);

/// Crowding distance of each point of a front (infinite at the extremes).
std::vector<double> crowding_distance(const std::vector<ReturnVector>& points);

/// For every selected parent and objective l, maximize G_l subject to
/// G_i >= beta * G_i(parent) for i != l via an adaptive quadratic penalty.
void pareto_extension(PolicyBuffer& buffer, std::span<const BufferEntry> selected, const TrainerConfig& config,
                      const EnvFactory& factory, const TrainingSetup& setup, std::uint64_t master_seed, int round);

struct TrainResult {
    PolicyBuffer buffer;
    ParetoFront front;
    ParetoFront init_front;
};

/// Initialization, selection and extension rounds. Passing a checkpointed
/// buffer resumes after its last completed stage.
TrainResult train(const TrainerConfig& config, const EnvFactory& factory, const TrainingSetup& setup,
                  std::uint64_t master_seed, std::optional<PolicyBuffer> resume = std::nullopt);

std::string checkpoint_json(const PolicyBuffer& buffer);
PolicyBuffer parse_checkpoint(const std::string& text);

} // namespace bemorl
