#include "bemorl/thermal.hpp"

#include "bemorl/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bemorl {

namespace {

bool valid_resistance(double r) { return r == BuildingModel::kNoPath || (std::isfinite(r) && r > 0.0); }

} // namespace

BuildingModel::BuildingModel(std::vector<double> capacitance,
                             std::vector<double> resistance,
                             std::vector<double> outdoor_resistance,
                             std::vector<double> ground_resistance,
                             std::vector<double> max_power,
                             Connectivity connectivity)
    : capacitance_(std::move(capacitance)),
      resistance_(std::move(resistance)),
      outdoor_resistance_(std::move(outdoor_resistance)),
      ground_resistance_(std::move(ground_resistance)),
      max_power_(std::move(max_power)) {
    const std::size_t m = capacitance_.size();
    require(m >= 1, ErrorKind::Config, "building model needs at least one zone");
    require(resistance_.size() == m * m, ErrorKind::Config, "resistance matrix must be M x M");
    if (ground_resistance_.empty()) ground_resistance_.assign(m, kNoPath);
    require(outdoor_resistance_.size() == m && ground_resistance_.size() == m && max_power_.size() == m,
            ErrorKind::Config, "per-zone vectors must have length M");

    for (std::size_t i = 0; i < m; ++i) {
        require(std::isfinite(capacitance_[i]) && capacitance_[i] > 0.0, ErrorKind::Config,
                "capacitance of zone " + std::to_string(i) + " must be positive");
        require(std::isfinite(max_power_[i]) && max_power_[i] >= 0.0, ErrorKind::Config,
                "max_power of zone " + std::to_string(i) + " must be non-negative");
        require(valid_resistance(outdoor_resistance_[i]) && valid_resistance(ground_resistance_[i]),
                ErrorKind::Config, "boundary resistance of zone " + std::to_string(i) + " must be positive");
        resistance_[i * m + i] = kNoPath;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double rij = resistance_[i * m + j];
            const double rji = resistance_[j * m + i];
            require(rij == rji, ErrorKind::Config,
                    "resistance matrix not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            require(valid_resistance(rij), ErrorKind::Config,
                    "resistance (" + std::to_string(i) + "," + std::to_string(j) + ") must be positive");
        }
    }

    if (connectivity == Connectivity::Skip) return;

    // Every zone must reach a boundary node through the adjacency graph.
    std::vector<char> reached(m, 0);
    std::vector<std::size_t> frontier;
    for (std::size_t i = 0; i < m; ++i) {
        if (has_outdoor(i) || has_ground(i)) {
            reached[i] = 1;
            frontier.push_back(i);
        }
    }
    while (!frontier.empty()) {
        const std::size_t i = frontier.back();
        frontier.pop_back();
        for (std::size_t j = 0; j < m; ++j) {
            if (!reached[j] && linked(i, j)) {
                reached[j] = 1;
                frontier.push_back(j);
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        require(reached[i], ErrorKind::Config,
                "zone " + std::to_string(i) + " has no heat path to the outdoor or ground boundary");
    }
}

double BuildingModel::resistance(std::size_t i, std::size_t j) const {
    const std::size_t m = num_zones();
    if (i >= m || j >= m) throw Error(ErrorKind::Config, "zone index out of range");
    return resistance_[i * m + j];
}

double BuildingModel::total_conductance(std::size_t i) const {
    double g = 0.0;
    for (std::size_t j = 0; j < num_zones(); ++j) {
        if (linked(i, j)) g += 1.0 / resistance(i, j);
    }
    if (has_outdoor(i)) g += 1.0 / outdoor_resistance(i);
    if (has_ground(i)) g += 1.0 / ground_resistance(i);
    return g;
}

std::vector<double> derivative(const BuildingModel& model, const ThermalState& state, const HeatInputs& inputs) {
    const std::size_t m = model.num_zones();
    require(state.zone_temps.size() == m, ErrorKind::Config, "state has wrong number of zones");
    require(inputs.controlled.size() == m && inputs.occupant.size() == m && inputs.solar.size() == m,
            ErrorKind::Config, "heat inputs have wrong number of zones");

    const auto& t = state.zone_temps;
    std::vector<double> dt(m);
    for (std::size_t i = 0; i < m; ++i) {
        double flow = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (model.linked(i, j)) flow += (t[j] - t[i]) / model.resistance(i, j);
        }
        if (model.has_outdoor(i)) flow += (inputs.outdoor_temp - t[i]) / model.outdoor_resistance(i);
        if (model.has_ground(i)) flow += (inputs.ground_temp - t[i]) / model.ground_resistance(i);
        flow += inputs.controlled[i] + inputs.occupant[i] + inputs.solar[i];
        dt[i] = flow / model.capacitance(i);
    }
    return dt;
}

double max_stable_dt(const BuildingModel& model) {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.num_zones(); ++i) {
        bound = std::min(bound, model.capacitance(i) / model.total_conductance(i));
    }
    return bound;
}

ThermalState step(const BuildingModel& model, const ThermalState& state, const HeatInputs& inputs, double dt) {
    require(dt > 0.0 && std::isfinite(dt), ErrorKind::Config, "step length must be positive");
    for (std::size_t i = 0; i < model.num_zones(); ++i) {
        const double zone_bound = model.capacitance(i) / model.total_conductance(i);
        if (dt > zone_bound) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "explicit Euler step dt=" << dt << " s is unstable for zone " << i
                << "; maximum stable dt is " << max_stable_dt(model) << " s";
            throw Error(ErrorKind::Stability, msg.str());
        }
    }
    const auto rate = derivative(model, state, inputs);
    ThermalState next = state;
    for (std::size_t i = 0; i < rate.size(); ++i) next.zone_temps[i] += dt * rate[i];
    return next;
}

void clip_controlled(const BuildingModel& model, HeatInputs& inputs) {
    for (std::size_t i = 0; i < inputs.controlled.size() && i < model.num_zones(); ++i) {
        const double p = model.max_power(i);
        inputs.controlled[i] = std::clamp(inputs.controlled[i], -p, p);
    }
}

} // namespace bemorl
