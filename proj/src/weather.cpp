#include "bemorl/weather.hpp"

#include "bemorl/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace bemorl {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, std::size_t line, const std::string& name) {
    field = trim(field);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw Error(ErrorKind::Ingest, name + ": line " + std::to_string(line) + ": non-numeric field '" +
                                           std::string(field) + "'");
    }
    return value;
}

} // namespace

void WeatherProfile::validate() const {
    const std::size_t n = outdoor_temp_c.size();
    require(n > 0, ErrorKind::Ingest, name + ": weather profile is empty");
    require(ground_temp_c.size() == n && solar_wm2.size() == n && occupancy_frac.size() == n &&
                price_per_kwh.size() == n,
            ErrorKind::Ingest, name + ": weather series have different lengths");
    require(timestep_seconds > 0.0, ErrorKind::Ingest, name + ": timestep must be positive");
    for (std::size_t i = 0; i < n; ++i) {
        const std::string row = name + ": row " + std::to_string(i + 1);
        require(price_per_kwh[i] >= 0.0, ErrorKind::Ingest, row + ": negative price");
        require(solar_wm2[i] >= 0.0, ErrorKind::Ingest, row + ": negative solar gain");
        require(occupancy_frac[i] >= 0.0 && occupancy_frac[i] <= 1.0, ErrorKind::Ingest,
                row + ": occupancy fraction outside [0,1]");
    }
}

WeatherProfile parse_weather_csv(std::istream& in, const std::string& name) {
    WeatherProfile w;
    w.name = name;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw Error(ErrorKind::Ingest, name + ": empty weather file");
    ++line_no;
    require(trim(line) == kWeatherHeader, ErrorKind::Ingest,
            name + ": line 1: expected header '" + std::string(kWeatherHeader) + "'");

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        require(fields.size() == 6, ErrorKind::Ingest,
                name + ": line " + std::to_string(line_no) + ": expected 6 fields, got " +
                    std::to_string(fields.size()));
        const double hour = parse_number(fields[0], line_no, name);
        require(hour == static_cast<double>(w.length()), ErrorKind::Ingest,
                name + ": line " + std::to_string(line_no) + ": hour index out of sequence");
        w.outdoor_temp_c.push_back(parse_number(fields[1], line_no, name));
        w.ground_temp_c.push_back(parse_number(fields[2], line_no, name));
        const double solar = parse_number(fields[3], line_no, name);
        const double occ = parse_number(fields[4], line_no, name);
        const double price = parse_number(fields[5], line_no, name);
        require(solar >= 0.0, ErrorKind::Ingest, name + ": line " + std::to_string(line_no) + ": negative solar gain");
        require(occ >= 0.0 && occ <= 1.0, ErrorKind::Ingest,
                name + ": line " + std::to_string(line_no) + ": occupancy fraction outside [0,1]");
        require(price >= 0.0, ErrorKind::Ingest, name + ": line " + std::to_string(line_no) + ": negative price");
        w.solar_wm2.push_back(solar);
        w.occupancy_frac.push_back(occ);
        w.price_per_kwh.push_back(price);
    }
    w.validate();
    return w;
}

WeatherProfile read_weather_csv(const std::filesystem::path& path, const std::string& name) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Asset, "cannot open weather file " + path.string());
    return parse_weather_csv(in, name);
}

void write_weather_csv(std::ostream& out, const WeatherProfile& profile) {
    const auto old_precision = out.precision(17);
    out << kWeatherHeader << '\n';
    for (std::size_t i = 0; i < profile.length(); ++i) {
        out << i << ',' << profile.outdoor_temp_c[i] << ',' << profile.ground_temp_c[i] << ','
            << profile.solar_wm2[i] << ',' << profile.occupancy_frac[i] << ',' << profile.price_per_kwh[i] << '\n';
    }
    out.precision(old_precision);
}

} // namespace bemorl
