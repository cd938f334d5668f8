#pragma once

#include "bemorl/context.hpp"
#include "bemorl/layout.hpp"
#include "bemorl/weather.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bemorl {

/// Climate ids shipped with the asset library. Warm_Marine is the training climate.
inline const std::vector<std::string> kClimateIds = {"Mixed_Marine", "Cool_Marine", "Warm_Humid",
                                                     "Warm_Dry",     "Hot_Humid",   "Warm_Marine"};

/// Read-only store of layouts and weather profiles keyed by id.
class AssetLibrary {
public:
    AssetLibrary() = default;

    /// Loads `layouts/*.json` and `weather/*.csv` under `root`; ids are file stems.
    static AssetLibrary load(const std::filesystem::path& root);

    void add_layout(const std::string& id, BuildingLayout layout);
    void add_weather(const std::string& id, WeatherProfile profile);

    const BuildingLayout& layout(const std::string& id) const;
    const WeatherProfile& weather(const std::string& id) const;
    bool has_layout(const std::string& id) const { return layouts_.count(id) != 0; }
    bool has_weather(const std::string& id) const { return weather_.count(id) != 0; }

    std::vector<std::string> layout_ids() const;
    std::vector<std::string> climate_ids() const;

    const std::filesystem::path& root() const noexcept { return root_; }

private:
    std::filesystem::path root_;
    std::map<std::string, BuildingLayout> layouts_;
    std::map<std::string, WeatherProfile> weather_;
};

/// Resolves the climate id against the installed library.
WeatherProfile load_weather(const AssetLibrary& assets, const std::string& climate_id);

/// Default asset root: $BEMORL_ASSETS if set, else the compiled-in source path.
std::filesystem::path default_asset_root();

struct AssetCheck {
    std::string subject;
    bool ok = true;
    std::string detail;
};

/// Structural validation of every asset: each layout builds at the U-wall
/// extremes and its stability bound exceeds `substep_seconds`; each climate
/// covers `min_length` samples.
std::vector<AssetCheck> validate_assets(const AssetLibrary& assets, double substep_seconds, std::size_t min_length);

/// Context file: {"name", "layout", "climate", "u_wall": {intwall: .., ...}} or
/// "u_wall_seed" in place of "u_wall" (sampled from the standard bounds).
ContextSpec parse_context(const std::string& json_text);
std::string dump_context(const ContextSpec& context);

/// A JSON array of context objects, or {"contexts": [...]}.
std::vector<ContextSpec> parse_context_list(const std::string& json_text);
std::vector<ContextSpec> load_context_list(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

} // namespace bemorl
