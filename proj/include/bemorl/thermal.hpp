#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace bemorl {

/// Lumped RC-network model of an M-zone building.
///
/// Zone temperatures obey C_i dT_i/dt = sum_j (T_j - T_i)/R_ij + (T_e - T_i)/R_ie
/// + (T_g - T_i)/R_ig + Q^h_i + Q^a_i + Q^s_i. Missing heat paths are stored as an
/// infinite resistance (zero conductance). The constructor validates symmetry,
/// positivity and connectivity to a boundary, so a constructed model is always
/// well posed.
class BuildingModel {
public:
    static constexpr double kNoPath = std::numeric_limits<double>::infinity();

    /// `Skip` admits closed systems with no boundary link (conservation checks).
    enum class Connectivity { Required, Skip };

    /// `resistance` is row-major M x M; diagonal entries are ignored.
    BuildingModel(std::vector<double> capacitance,
                  std::vector<double> resistance,
                  std::vector<double> outdoor_resistance,
                  std::vector<double> ground_resistance,
                  std::vector<double> max_power,
                  Connectivity connectivity = Connectivity::Required);

    std::size_t num_zones() const noexcept { return capacitance_.size(); }

    double capacitance(std::size_t i) const { return capacitance_.at(i); }
    double resistance(std::size_t i, std::size_t j) const;
    double outdoor_resistance(std::size_t i) const { return outdoor_resistance_.at(i); }
    double ground_resistance(std::size_t i) const { return ground_resistance_.at(i); }
    double max_power(std::size_t i) const { return max_power_.at(i); }

    bool linked(std::size_t i, std::size_t j) const { return i != j && resistance(i, j) != kNoPath; }
    bool has_outdoor(std::size_t i) const { return outdoor_resistance(i) != kNoPath; }
    bool has_ground(std::size_t i) const { return ground_resistance(i) != kNoPath; }

    /// Sum of conductances (W/°C) leaving zone i.
    double total_conductance(std::size_t i) const;

    const std::vector<double>& capacitances() const noexcept { return capacitance_; }
    const std::vector<double>& max_powers() const noexcept { return max_power_; }

private:
    std::vector<double> capacitance_;
    std::vector<double> resistance_;
    std::vector<double> outdoor_resistance_;
    std::vector<double> ground_resistance_;
    std::vector<double> max_power_;
};

struct ThermalState {
    std::vector<double> zone_temps; // °C
};

/// Heat flows in W, temperatures in °C.
struct HeatInputs {
    std::vector<double> controlled; // signed: heating > 0, cooling < 0
    std::vector<double> occupant;
    std::vector<double> solar;
    double outdoor_temp = 0.0;
    double ground_temp = 0.0;
};

/// dT_i/dt in °C/s.
std::vector<double> derivative(const BuildingModel& model, const ThermalState& state, const HeatInputs& inputs);

/// One forward-Euler step of length `dt` seconds with inputs held constant.
/// Throws a stability error when dt exceeds `max_stable_dt(model)`.
ThermalState step(const BuildingModel& model, const ThermalState& state, const HeatInputs& inputs, double dt);

/// Explicit-Euler bound min_i C_i / sum(conductances of zone i), in seconds.
double max_stable_dt(const BuildingModel& model);

/// Clips each controlled input to [-max_power_i, max_power_i].
void clip_controlled(const BuildingModel& model, HeatInputs& inputs);

} // namespace bemorl
