#include "bemorl/layout.hpp"

#include "bemorl/error.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bemorl {

namespace {

constexpr std::array<const char*, kNumWallKinds> kWallNames = {
    "intwall", "floor", "outwall", "roof", "ceiling", "groundfloor", "window"};

double non_negative(const nlohmann::json& j, const char* key, const std::string& where) {
    const double v = j.value(key, 0.0);
    require(std::isfinite(v) && v >= 0.0, ErrorKind::Config, where + ": '" + key + "' must be a non-negative number");
    return v;
}

} // namespace

const char* wall_kind_name(WallKind kind) { return kWallNames[static_cast<std::size_t>(kind)]; }

WallKind wall_kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kNumWallKinds; ++i) {
        if (name == kWallNames[i]) return static_cast<WallKind>(i);
    }
    throw Error(ErrorKind::Config, "unknown wall kind '" + name + "'");
}

double BuildingLayout::bounding_area(std::size_t i) const {
    const auto& z = zones.at(i);
    double area = z.external_wall_area_m2 + z.window_area_m2 + z.roof_area_m2 + z.ground_area_m2;
    for (const auto& adj : adjacency) {
        if (adj.a == i || adj.b == i) area += adj.area_m2;
    }
    return area;
}

BuildingLayout parse_layout(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("layout is not valid JSON: ") + e.what());
    }

    BuildingLayout layout;
    try {
        layout.name = j.value("name", std::string("unnamed"));
        layout.solar_heat_gain_coefficient = j.value("solar_heat_gain_coefficient", 0.5);
        layout.occupant_gain_w_per_m2 = j.value("occupant_gain_w_per_m2", 10.0);
        require(j.contains("zones") && j["zones"].is_array() && !j["zones"].empty(), ErrorKind::Config,
                "layout needs a non-empty 'zones' array");
        for (const auto& z : j["zones"]) {
            ZoneGeometry g;
            g.name = z.at("name").get<std::string>();
            const std::string where = "zone '" + g.name + "'";
            g.floor_area_m2 = non_negative(z, "floor_area_m2", where);
            g.height_m = non_negative(z, "height_m", where);
            g.external_wall_area_m2 = non_negative(z, "external_wall_area_m2", where);
            g.window_area_m2 = non_negative(z, "window_area_m2", where);
            g.roof_area_m2 = non_negative(z, "roof_area_m2", where);
            g.ground_area_m2 = non_negative(z, "ground_area_m2", where);
            g.max_power_w = non_negative(z, "max_power_w", where);
            require(g.floor_area_m2 > 0.0 && g.height_m > 0.0, ErrorKind::Config, where + " needs positive volume");
            for (const auto& other : layout.zones) {
                require(other.name != g.name, ErrorKind::Config, "duplicate zone name '" + g.name + "'");
            }
            layout.zones.push_back(std::move(g));
        }

        auto zone_index = [&](const std::string& name) {
            for (std::size_t i = 0; i < layout.zones.size(); ++i) {
                if (layout.zones[i].name == name) return i;
            }
            throw Error(ErrorKind::Config, "adjacency references unknown zone '" + name + "'");
        };
        for (const auto& a : j.value("adjacency", nlohmann::json::array())) {
            const auto names = a.at("zones").get<std::vector<std::string>>();
            require(names.size() == 2, ErrorKind::Config, "adjacency 'zones' must name exactly two zones");
            Adjacency adj;
            adj.a = zone_index(names[0]);
            adj.b = zone_index(names[1]);
            require(adj.a != adj.b, ErrorKind::Config, "zone '" + names[0] + "' cannot be adjacent to itself");
            adj.kind = wall_kind_from_name(a.value("kind", std::string("intwall")));
            require(adj.kind == WallKind::IntWall || adj.kind == WallKind::Floor || adj.kind == WallKind::Ceiling,
                    ErrorKind::Config, "inter-zone adjacency must be intwall, floor or ceiling");
            adj.area_m2 = a.at("area_m2").get<double>();
            require(std::isfinite(adj.area_m2) && adj.area_m2 > 0.0, ErrorKind::Config,
                    "adjacency " + names[0] + "-" + names[1] + " declares a zero shared area");
            for (const auto& prev : layout.adjacency) {
                require(!((prev.a == adj.a && prev.b == adj.b) || (prev.a == adj.b && prev.b == adj.a)),
                        ErrorKind::Config, "duplicate adjacency " + names[0] + "-" + names[1]);
            }
            layout.adjacency.push_back(adj);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("layout schema error: ") + e.what());
    }
    return layout;
}

BuildingLayout load_layout(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Asset, "cannot open layout file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_layout(ss.str());
}

std::string dump_layout(const BuildingLayout& layout) {
    nlohmann::json j;
    j["name"] = layout.name;
    j["solar_heat_gain_coefficient"] = layout.solar_heat_gain_coefficient;
    j["occupant_gain_w_per_m2"] = layout.occupant_gain_w_per_m2;
    j["zones"] = nlohmann::json::array();
    for (const auto& z : layout.zones) {
        j["zones"].push_back({{"name", z.name},
                              {"floor_area_m2", z.floor_area_m2},
                              {"height_m", z.height_m},
                              {"external_wall_area_m2", z.external_wall_area_m2},
                              {"window_area_m2", z.window_area_m2},
                              {"roof_area_m2", z.roof_area_m2},
                              {"ground_area_m2", z.ground_area_m2},
                              {"max_power_w", z.max_power_w}});
    }
    j["adjacency"] = nlohmann::json::array();
    for (const auto& a : layout.adjacency) {
        j["adjacency"].push_back({{"zones", {layout.zones[a.a].name, layout.zones[a.b].name}},
                                  {"kind", wall_kind_name(a.kind)},
                                  {"area_m2", a.area_m2}});
    }
    return j.dump(2);
}

} // namespace bemorl
