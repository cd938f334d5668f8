#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bemorl {

/// Envelope element kinds. The order matches the U-wall index order.
enum class WallKind { IntWall = 0, Floor, OutWall, Roof, Ceiling, GroundFloor, Window };

inline constexpr std::size_t kNumWallKinds = 7;

const char* wall_kind_name(WallKind kind);
WallKind wall_kind_from_name(const std::string& name);

struct ZoneGeometry {
    std::string name;
    double floor_area_m2 = 0.0;
    double height_m = 0.0;
    double external_wall_area_m2 = 0.0; // opaque part only
    double window_area_m2 = 0.0;
    double roof_area_m2 = 0.0;
    double ground_area_m2 = 0.0;
    double max_power_w = 0.0;

    double volume_m3() const { return floor_area_m2 * height_m; }
};

/// Inter-zone heat path through a shared surface. `kind` is intwall for
/// partition walls and floor/ceiling for stacked zones.
struct Adjacency {
    std::size_t a = 0;
    std::size_t b = 0;
    WallKind kind = WallKind::IntWall;
    double area_m2 = 0.0;
};

/// Building geometry. Resistances are not stored here; they follow from a
/// U-wall vector (see context.hpp).
struct BuildingLayout {
    std::string name;
    std::vector<ZoneGeometry> zones;
    std::vector<Adjacency> adjacency;
    double solar_heat_gain_coefficient = 0.5;
    double occupant_gain_w_per_m2 = 10.0;

    std::size_t num_zones() const { return zones.size(); }
    /// Sum of every envelope and partition surface bounding zone i.
    double bounding_area(std::size_t i) const;
};

BuildingLayout parse_layout(const std::string& json_text);
BuildingLayout load_layout(const std::filesystem::path& path);
std::string dump_layout(const BuildingLayout& layout);

} // namespace bemorl
