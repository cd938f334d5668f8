#pragma once

#include "bemorl/assets.hpp"
#include "bemorl/context.hpp"
#include "bemorl/thermal.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bemorl {

enum class RewardKind { Thermal, Cost, Ramp };

const char* to_string(RewardKind kind);
RewardKind reward_kind_from_string(const std::string& s);

struct EnvConfig {
    int horizon = 24;                      // control steps per episode
    double control_interval_s = 3600.0;
    double substep_s = 300.0;              // forward-Euler substep
    std::vector<double> setpoints = {22.0}; // one value broadcasts to all zones
    double gamma = 0.99;
    std::vector<RewardKind> rewards = {RewardKind::Thermal, RewardKind::Cost};
    double price_factor = 0.05;
    double start_hour = 0.0;               // offset into the weather series
    double init_temp_spread = 2.0;         // initial temps ~ U[T_set - s, T_set + s]
    ModelOptions model;

    void validate() const;
    std::size_t substeps() const;
};

EnvConfig parse_env_config(const std::string& json_text);
std::string dump_env_config(const EnvConfig& config);

/// What the agent sees. No context field: envelope and climate stay hidden.
struct Observation {
    std::vector<double> zone_temps;
    std::vector<double> occupant_heat;
    std::vector<double> solar_heat;
    double ground_temp = 0.0;
    double outdoor_temp = 0.0;
    double electricity_price = 0.0;
    std::vector<double> setpoints;
    double time_index = 0.0;

    /// Flattened in field order; length 4M + 4.
    std::vector<double> to_vector() const;
    static std::vector<std::string> field_names(std::size_t num_zones);
};

using RewardVector = std::vector<double>;

struct StepResult {
    Observation observation;
    RewardVector reward;
    bool done = false;
};

/// R_thermal = M - 0.05 * sum_i |T_i - T_i^s|.
double reward_thermal(std::span<const double> temps, std::span<const double> setpoints);
/// R_cost = M - price_factor * price * sum_i |P_i|, powers in kW.
double reward_cost(std::span<const double> powers_kw, double price, double price_factor);
/// R_ramp = M - | sum_i |P_i[t]| - sum_i |P_i[t-1]| |, powers in kW.
double reward_ramp(std::span<const double> powers_now_kw, std::span<const double> powers_prev_kw);

/// omega^T r, with omega validated against the probability simplex.
double scalarize(std::span<const double> omega, std::span<const double> reward);
void validate_preference(std::span<const double> omega);

/// Per-objective discounted sum over an episode's rewards.
std::vector<double> episode_return(std::span<const RewardVector> rewards, double gamma);

struct TrajectoryRow {
    int step = 0;
    double hour = 0.0;
    std::vector<double> temps;
    std::vector<double> actions;
    RewardVector rewards;
};

/// Multi-objective building environment over a fixed layout; the context
/// (envelope + climate) is chosen per episode at reset. Single-threaded and
/// stateful; use one instance per worker.
class BuildingEnv {
public:
    BuildingEnv(EnvConfig config, std::shared_ptr<const AssetLibrary> assets, std::string layout_id);

    Observation reset(const ContextSpec& context, std::uint64_t seed);
    StepResult step(std::span<const double> action);

    std::size_t num_zones() const noexcept { return num_zones_; }
    std::size_t action_dim() const noexcept { return num_zones_; }
    std::size_t obs_dim() const noexcept { return 4 * num_zones_ + 4; }
    std::size_t num_objectives() const noexcept { return config_.rewards.size(); }
    bool done() const noexcept { return done_; }
    int time_step() const noexcept { return t_; }

    const EnvConfig& config() const noexcept { return config_; }
    const AssetLibrary& assets() const noexcept { return *assets_; }
    const std::shared_ptr<const AssetLibrary>& asset_ptr() const noexcept { return assets_; }
    const std::string& layout_id() const noexcept { return layout_id_; }
    const std::vector<TrajectoryRow>& trajectory() const noexcept { return log_; }
    void set_logging(bool on) noexcept { logging_ = on; }
    const std::optional<BuildingModel>& model() const noexcept { return model_; }

private:
    std::size_t weather_index(double elapsed_s) const;
    Observation observe() const;
    double setpoint(std::size_t zone) const;

    EnvConfig config_;
    std::shared_ptr<const AssetLibrary> assets_;
    std::string layout_id_;
    const BuildingLayout* layout_ = nullptr;
    std::size_t num_zones_ = 0;

    std::optional<BuildingModel> model_;
    const WeatherProfile* weather_ = nullptr;
    ThermalState state_;
    std::vector<double> prev_power_kw_;
    int t_ = 0;
    bool started_ = false;
    bool done_ = false;
    bool logging_ = true;
    std::vector<TrajectoryRow> log_;
};

/// CSV with step, hour, per-zone temperature and action, per-objective reward.
void write_trajectory_csv(std::ostream& out, const BuildingEnv& env);

} // namespace bemorl
