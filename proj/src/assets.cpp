#include "bemorl/assets.hpp"

#include "bemorl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#ifndef BEMORL_DEFAULT_ASSET_DIR
#define BEMORL_DEFAULT_ASSET_DIR "assets"
#endif

namespace bemorl {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::Asset, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AssetLibrary AssetLibrary::load(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    require(fs::is_directory(root), ErrorKind::Asset, "asset directory " + root.string() + " does not exist");
    AssetLibrary lib;
    lib.root_ = root;

    auto sorted_entries = [](const fs::path& dir, const std::string& ext) {
        std::vector<fs::path> out;
        if (!fs::is_directory(dir)) return out;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    for (const auto& p : sorted_entries(root / "layouts", ".json")) {
        lib.add_layout(p.stem().string(), load_layout(p));
    }
    for (const auto& p : sorted_entries(root / "weather", ".csv")) {
        lib.add_weather(p.stem().string(), read_weather_csv(p, p.stem().string()));
    }
    return lib;
}

void AssetLibrary::add_layout(const std::string& id, BuildingLayout layout) { layouts_[id] = std::move(layout); }

void AssetLibrary::add_weather(const std::string& id, WeatherProfile profile) {
    profile.validate();
    weather_[id] = std::move(profile);
}

const BuildingLayout& AssetLibrary::layout(const std::string& id) const {
    const auto it = layouts_.find(id);
    require(it != layouts_.end(), ErrorKind::Asset, "unknown layout id '" + id + "'");
    return it->second;
}

const WeatherProfile& AssetLibrary::weather(const std::string& id) const {
    const auto it = weather_.find(id);
    require(it != weather_.end(), ErrorKind::Asset, "unknown climate id '" + id + "'");
    return it->second;
}

std::vector<std::string> AssetLibrary::layout_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : layouts_) ids.push_back(id);
    return ids;
}

std::vector<std::string> AssetLibrary::climate_ids() const {
    std::vector<std::string> ids;
    for (const auto& [id, _] : weather_) ids.push_back(id);
    return ids;
}

WeatherProfile load_weather(const AssetLibrary& assets, const std::string& climate_id) {
    return assets.weather(climate_id);
}

std::filesystem::path default_asset_root() {
    if (const char* env = std::getenv("BEMORL_ASSETS"); env != nullptr && *env != '\0') return env;
    return BEMORL_DEFAULT_ASSET_DIR;
}

std::vector<AssetCheck> validate_assets(const AssetLibrary& assets, double substep_seconds, std::size_t min_length) {
    std::vector<AssetCheck> checks;
    UWallVector corner_hi, corner_lo;
    for (std::size_t k = 0; k < kNumWallKinds; ++k) {
        corner_hi.values[k] = kUWallBounds[k].hi;
        corner_lo.values[k] = kUWallBounds[k].lo;
    }
    for (const auto& id : assets.layout_ids()) {
        AssetCheck c{"layout " + id, true, {}};
        try {
            build_model(assets.layout(id), corner_lo);
            // Conductance grows with every U component, so the upper corner
            // gives the tightest stability bound over the whole context space.
            const double bound = max_stable_dt(build_model(assets.layout(id), corner_hi));
            std::ostringstream msg;
            msg << "max_stable_dt at upper U corner = " << bound << " s";
            c.detail = msg.str();
            c.ok = bound > substep_seconds;
        } catch (const Error& e) {
            c.ok = false;
            c.detail = e.what();
        }
        checks.push_back(c);
    }
    for (const auto& id : kClimateIds) {
        AssetCheck c{"climate " + id, true, {}};
        if (!assets.has_weather(id)) {
            c.ok = false;
            c.detail = "missing";
        } else {
            const auto& w = assets.weather(id);
            c.ok = w.length() >= min_length;
            c.detail = std::to_string(w.length()) + " samples";
        }
        checks.push_back(c);
    }
    return checks;
}

namespace {

ContextSpec context_from_json(const nlohmann::json& j) {
    ContextSpec c;
    try {
        c.name = j.value("name", std::string());
        c.layout_id = j.value("layout", std::string());
        c.climate_id = j.at("climate").get<std::string>();
        if (j.contains("u_wall")) {
            const auto& u = j.at("u_wall");
            for (std::size_t k = 0; k < kNumWallKinds; ++k) {
                c.u_wall.values[k] = u.at(wall_kind_name(static_cast<WallKind>(k))).get<double>();
            }
        } else if (j.contains("u_wall_seed")) {
            c.u_wall = sample_uwall(j.at("u_wall_seed").get<std::uint64_t>());
        } else {
            c.u_wall = midpoint_uwall();
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("context schema error: ") + e.what());
    }
    if (c.name.empty()) c.name = c.climate_id;
    require(within_bounds(c.u_wall), ErrorKind::Config, "context '" + c.name + "' has a U-factor outside its bounds");
    return c;
}

} // namespace

ContextSpec parse_context(const std::string& json_text) {
    try {
        return context_from_json(nlohmann::json::parse(json_text));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("context is not valid JSON: ") + e.what());
    }
}

std::string dump_context(const ContextSpec& context) {
    nlohmann::json u;
    for (std::size_t k = 0; k < kNumWallKinds; ++k) {
        u[wall_kind_name(static_cast<WallKind>(k))] = context.u_wall.values[k];
    }
    nlohmann::json j{{"name", context.name}, {"layout", context.layout_id}, {"climate", context.climate_id},
                     {"u_wall", u}};
    return j.dump(2);
}

std::vector<ContextSpec> parse_context_list(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("context list is not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("contexts")) j = j["contexts"];
    require(j.is_array(), ErrorKind::Config, "context list must be an array");
    std::vector<ContextSpec> out;
    for (const auto& item : j) out.push_back(context_from_json(item));
    return out;
}

std::vector<ContextSpec> load_context_list(const std::filesystem::path& path) {
    return parse_context_list(read_text_file(path));
}

} // namespace bemorl
