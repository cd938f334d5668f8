#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bemorl {

/// Hourly (or uniformly sampled) exogenous drivers for one climate.
struct WeatherProfile {
    std::string name;
    double timestep_seconds = 3600.0;
    std::vector<double> outdoor_temp_c;
    std::vector<double> ground_temp_c;
    std::vector<double> solar_wm2;
    std::vector<double> occupancy_frac;
    std::vector<double> price_per_kwh;

    std::size_t length() const { return outdoor_temp_c.size(); }
    /// Throws an ingest error if series lengths differ or values are out of range.
    void validate() const;
};

inline constexpr const char* kWeatherHeader = "hour,outdoor_temp_c,ground_temp_c,solar_wm2,occupancy_frac,price_per_kwh";

/// Parses the weather CSV. Errors carry the 1-based line number.
WeatherProfile parse_weather_csv(std::istream& in, const std::string& name);
WeatherProfile read_weather_csv(const std::filesystem::path& path, const std::string& name);
void write_weather_csv(std::ostream& out, const WeatherProfile& profile);

} // namespace bemorl
