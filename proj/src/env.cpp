#include "bemorl/env.hpp"

#include "bemorl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace bemorl {

const char* to_string(RewardKind kind) {
    switch (kind) {
    case RewardKind::Thermal: return "thermal";
    case RewardKind::Cost: return "cost";
    case RewardKind::Ramp: return "ramp";
    }
    return "unknown";
}

RewardKind reward_kind_from_string(const std::string& s) {
    if (s == "thermal") return RewardKind::Thermal;
    if (s == "cost") return RewardKind::Cost;
    if (s == "ramp") return RewardKind::Ramp;
    throw Error(ErrorKind::Config, "unknown reward '" + s + "' (expected thermal|cost|ramp)");
}

void EnvConfig::validate() const {
    require(horizon >= 1, ErrorKind::Config, "horizon must be at least 1");
    require(control_interval_s > 0.0 && substep_s > 0.0, ErrorKind::Config, "time steps must be positive");
    substeps();
    require(!setpoints.empty(), ErrorKind::Config, "setpoints must not be empty");
    require(gamma > 0.0 && gamma <= 1.0, ErrorKind::Config, "gamma must lie in (0, 1]");
    require(!rewards.empty(), ErrorKind::Config, "at least one reward must be selected");
    require(price_factor >= 0.0, ErrorKind::Config, "price_factor must be non-negative");
    require(start_hour >= 0.0, ErrorKind::Config, "start_hour must be non-negative");
    require(init_temp_spread >= 0.0, ErrorKind::Config, "init_temp_spread must be non-negative");
}

std::size_t EnvConfig::substeps() const {
    const double ratio = control_interval_s / substep_s;
    const double rounded = std::round(ratio);
    require(rounded >= 1.0 && std::abs(ratio - rounded) < 1e-9, ErrorKind::Config,
            "control interval must be an integer multiple of the substep");
    return static_cast<std::size_t>(rounded);
}

EnvConfig parse_env_config(const std::string& json_text) {
    EnvConfig c;
    try {
        const auto j = nlohmann::json::parse(json_text);
        c.horizon = j.value("horizon", c.horizon);
        c.control_interval_s = j.value("control_interval_s", c.control_interval_s);
        c.substep_s = j.value("substep_s", c.substep_s);
        if (j.contains("setpoints")) {
            if (j["setpoints"].is_number()) {
                c.setpoints = {j["setpoints"].get<double>()};
            } else {
                c.setpoints = j["setpoints"].get<std::vector<double>>();
            }
        }
        c.gamma = j.value("gamma", c.gamma);
        if (j.contains("rewards")) {
            c.rewards.clear();
            for (const auto& r : j["rewards"]) c.rewards.push_back(reward_kind_from_string(r.get<std::string>()));
        }
        c.price_factor = j.value("price_factor", c.price_factor);
        c.start_hour = j.value("start_hour", c.start_hour);
        c.init_temp_spread = j.value("init_temp_spread", c.init_temp_spread);
        if (j.contains("model")) {
            const auto& m = j["model"];
            c.model.air_heat_capacity = m.value("air_heat_capacity", c.model.air_heat_capacity);
            c.model.air_density = m.value("air_density", c.model.air_density);
            c.model.envelope_mass_per_m2 = m.value("envelope_mass_per_m2", c.model.envelope_mass_per_m2);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("env config error: ") + e.what());
    }
    c.validate();
    return c;
}

std::string dump_env_config(const EnvConfig& c) {
    nlohmann::json rewards = nlohmann::json::array();
    for (auto r : c.rewards) rewards.push_back(to_string(r));
    nlohmann::json j{{"horizon", c.horizon},
                     {"control_interval_s", c.control_interval_s},
                     {"substep_s", c.substep_s},
                     {"setpoints", c.setpoints},
                     {"gamma", c.gamma},
                     {"rewards", rewards},
                     {"price_factor", c.price_factor},
                     {"start_hour", c.start_hour},
                     {"init_temp_spread", c.init_temp_spread},
                     {"model",
                      {{"air_heat_capacity", c.model.air_heat_capacity},
                       {"air_density", c.model.air_density},
                       {"envelope_mass_per_m2", c.model.envelope_mass_per_m2}}}};
    return j.dump(2);
}

std::vector<double> Observation::to_vector() const {
    std::vector<double> v;
    v.reserve(4 * zone_temps.size() + 4);
    v.insert(v.end(), zone_temps.begin(), zone_temps.end());
    v.insert(v.end(), occupant_heat.begin(), occupant_heat.end());
    v.insert(v.end(), solar_heat.begin(), solar_heat.end());
    v.push_back(ground_temp);
    v.push_back(outdoor_temp);
    v.push_back(electricity_price);
    v.insert(v.end(), setpoints.begin(), setpoints.end());
    v.push_back(time_index);
    return v;
}

std::vector<std::string> Observation::field_names(std::size_t num_zones) {
    std::vector<std::string> names;
    for (const char* prefix : {"zone_temp_", "occupant_heat_", "solar_heat_"}) {
        for (std::size_t i = 0; i < num_zones; ++i) names.push_back(prefix + std::to_string(i));
    }
    names.insert(names.end(), {"ground_temp", "outdoor_temp", "electricity_price"});
    for (std::size_t i = 0; i < num_zones; ++i) names.push_back("setpoint_" + std::to_string(i));
    names.push_back("time_index");
    return names;
}

double reward_thermal(std::span<const double> temps, std::span<const double> setpoints) {
    require(temps.size() == setpoints.size(), ErrorKind::Config, "temps and setpoints differ in length");
    double error = 0.0;
    for (std::size_t i = 0; i < temps.size(); ++i) error += std::abs(temps[i] - setpoints[i]);
    return static_cast<double>(temps.size()) - 0.05 * error;
}

double reward_cost(std::span<const double> powers_kw, double price, double price_factor) {
    require(price >= 0.0, ErrorKind::Validation, "electricity price must be non-negative");
    double total = 0.0;
    for (double p : powers_kw) total += std::abs(p);
    return static_cast<double>(powers_kw.size()) - price_factor * price * total;
}

double reward_ramp(std::span<const double> powers_now_kw, std::span<const double> powers_prev_kw) {
    require(powers_now_kw.size() == powers_prev_kw.size(), ErrorKind::Config, "power vectors differ in length");
    double now = 0.0, prev = 0.0;
    for (double p : powers_now_kw) now += std::abs(p);
    for (double p : powers_prev_kw) prev += std::abs(p);
    return static_cast<double>(powers_now_kw.size()) - std::abs(now - prev);
}

void validate_preference(std::span<const double> omega) {
    require(!omega.empty(), ErrorKind::Validation, "preference vector is empty");
    double sum = 0.0;
    for (double w : omega) {
        require(std::isfinite(w) && w >= 0.0, ErrorKind::Validation, "preference weights must be non-negative");
        sum += w;
    }
    require(std::abs(sum - 1.0) <= 1e-9, ErrorKind::Validation, "preference weights must sum to 1");
}

double scalarize(std::span<const double> omega, std::span<const double> reward) {
    require(omega.size() == reward.size(), ErrorKind::Validation, "preference and reward lengths differ");
    validate_preference(omega);
    return std::inner_product(omega.begin(), omega.end(), reward.begin(), 0.0);
}

std::vector<double> episode_return(std::span<const RewardVector> rewards, double gamma) {
    if (rewards.empty()) return {};
    std::vector<double> g(rewards.front().size(), 0.0);
    double discount = 1.0;
    for (const auto& r : rewards) {
        require(r.size() == g.size(), ErrorKind::Config, "reward vectors differ in length");
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += discount * r[i];
        discount *= gamma;
    }
    return g;
}

BuildingEnv::BuildingEnv(EnvConfig config, std::shared_ptr<const AssetLibrary> assets, std::string layout_id)
    : config_(std::move(config)), assets_(std::move(assets)), layout_id_(std::move(layout_id)) {
    require(assets_ != nullptr, ErrorKind::Config, "environment needs an asset library");
    config_.validate();
    layout_ = &assets_->layout(layout_id_);
    num_zones_ = layout_->num_zones();
    require(config_.setpoints.size() == 1 || config_.setpoints.size() == num_zones_, ErrorKind::Config,
            "setpoints must have one entry or one per zone");
}

double BuildingEnv::setpoint(std::size_t zone) const {
    return config_.setpoints.size() == 1 ? config_.setpoints.front() : config_.setpoints[zone];
}

std::size_t BuildingEnv::weather_index(double elapsed_s) const {
    const double seconds = config_.start_hour * 3600.0 + elapsed_s;
    const auto idx = static_cast<std::size_t>(std::floor(seconds / weather_->timestep_seconds + 1e-9));
    return std::min(idx, weather_->length() - 1);
}

Observation BuildingEnv::observe() const {
    const std::size_t idx = weather_index(t_ * config_.control_interval_s);
    Observation o;
    o.zone_temps = state_.zone_temps;
    o.occupant_heat.resize(num_zones_);
    o.solar_heat.resize(num_zones_);
    o.setpoints.resize(num_zones_);
    for (std::size_t i = 0; i < num_zones_; ++i) {
        const auto& z = layout_->zones[i];
        o.occupant_heat[i] = weather_->occupancy_frac[idx] * layout_->occupant_gain_w_per_m2 * z.floor_area_m2;
        o.solar_heat[i] = weather_->solar_wm2[idx] * z.window_area_m2 * layout_->solar_heat_gain_coefficient;
        o.setpoints[i] = setpoint(i);
    }
    o.ground_temp = weather_->ground_temp_c[idx];
    o.outdoor_temp = weather_->outdoor_temp_c[idx];
    o.electricity_price = weather_->price_per_kwh[idx];
    o.time_index = static_cast<double>(t_);
    return o;
}

Observation BuildingEnv::reset(const ContextSpec& context, std::uint64_t seed) {
    require(context.layout_id == layout_id_, ErrorKind::Config,
            "context layout '" + context.layout_id + "' does not match environment layout '" + layout_id_ + "'");
    weather_ = &assets_->weather(context.climate_id);
    const double needed_s = config_.start_hour * 3600.0 + config_.horizon * config_.control_interval_s;
    require(needed_s <= weather_->length() * weather_->timestep_seconds, ErrorKind::Config,
            "weather profile '" + context.climate_id + "' is shorter than start_hour + horizon");

    model_.emplace(build_model(*layout_, context.u_wall, config_.model));

    std::mt19937_64 rng(seed);
    state_.zone_temps.assign(num_zones_, 0.0);
    for (std::size_t i = 0; i < num_zones_; ++i) {
        const double s = config_.init_temp_spread;
        std::uniform_real_distribution<double> dist(setpoint(i) - s, setpoint(i) + s);
        state_.zone_temps[i] = s > 0.0 ? dist(rng) : setpoint(i);
    }
    prev_power_kw_.assign(num_zones_, 0.0);
    t_ = 0;
    started_ = true;
    done_ = false;
    log_.clear();
    return observe();
}

StepResult BuildingEnv::step(std::span<const double> action) {
    require(started_, ErrorKind::Lifecycle, "step called before reset");
    require(!done_, ErrorKind::Lifecycle, "step called after the episode finished; call reset");
    require(action.size() == num_zones_, ErrorKind::Config,
            "action has " + std::to_string(action.size()) + " entries, expected " + std::to_string(num_zones_));

    std::vector<double> clipped(num_zones_), power_kw(num_zones_);
    HeatInputs in;
    in.controlled.resize(num_zones_);
    in.occupant.resize(num_zones_);
    in.solar.resize(num_zones_);
    for (std::size_t i = 0; i < num_zones_; ++i) {
        require(std::isfinite(action[i]), ErrorKind::Validation, "action must be finite");
        clipped[i] = std::clamp(action[i], -1.0, 1.0);
        in.controlled[i] = clipped[i] * model_->max_power(i);
        power_kw[i] = in.controlled[i] / 1000.0;
    }

    const double t0 = t_ * config_.control_interval_s;
    const std::size_t price_idx = weather_index(t0);
    const std::size_t n_sub = config_.substeps();
    for (std::size_t k = 0; k < n_sub; ++k) {
        const std::size_t idx = weather_index(t0 + k * config_.substep_s);
        for (std::size_t i = 0; i < num_zones_; ++i) {
            const auto& z = layout_->zones[i];
            in.occupant[i] = weather_->occupancy_frac[idx] * layout_->occupant_gain_w_per_m2 * z.floor_area_m2;
            in.solar[i] = weather_->solar_wm2[idx] * z.window_area_m2 * layout_->solar_heat_gain_coefficient;
        }
        in.outdoor_temp = weather_->outdoor_temp_c[idx];
        in.ground_temp = weather_->ground_temp_c[idx];
        state_ = bemorl::step(*model_, state_, in, config_.substep_s);
    }
    ++t_;
    done_ = t_ >= config_.horizon;

    std::vector<double> setpoints(num_zones_);
    for (std::size_t i = 0; i < num_zones_; ++i) setpoints[i] = setpoint(i);

    RewardVector reward;
    reward.reserve(config_.rewards.size());
    for (auto kind : config_.rewards) {
        switch (kind) {
        case RewardKind::Thermal: reward.push_back(reward_thermal(state_.zone_temps, setpoints)); break;
        case RewardKind::Cost:
            reward.push_back(reward_cost(power_kw, weather_->price_per_kwh[price_idx], config_.price_factor));
            break;
        case RewardKind::Ramp: reward.push_back(reward_ramp(power_kw, prev_power_kw_)); break;
        }
    }
    prev_power_kw_ = power_kw;

    if (logging_)
        log_.push_back({t_, config_.start_hour + t_ * config_.control_interval_s / 3600.0, state_.zone_temps, clipped,
                    reward});
    return {observe(), std::move(reward), done_};
}

void write_trajectory_csv(std::ostream& out, const BuildingEnv& env) {
    const auto old_precision = out.precision(17);
    const auto& layout = env.assets().layout(env.layout_id());
    out << "step,hour";
    for (const auto& z : layout.zones) out << ",temp_" << z.name;
    for (const auto& z : layout.zones) out << ",action_" << z.name;
    for (auto r : env.config().rewards) out << ",reward_" << to_string(r);
    out << '\n';
    for (const auto& row : env.trajectory()) {
        out << row.step << ',' << row.hour;
        for (double v : row.temps) out << ',' << v;
        for (double v : row.actions) out << ',' << v;
        for (double v : row.rewards) out << ',' << v;
        out << '\n';
    }
    out.precision(old_precision);
}

} // namespace bemorl
