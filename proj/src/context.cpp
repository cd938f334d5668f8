#include "bemorl/context.hpp"

#include "bemorl/error.hpp"

#include <cmath>

namespace bemorl {

bool within_bounds(const UWallVector& u, const UWallBounds& bounds) {
    for (std::size_t k = 0; k < kNumWallKinds; ++k) {
        if (!(u.values[k] >= bounds[k].lo && u.values[k] <= bounds[k].hi)) return false;
    }
    return true;
}

UWallVector sample_uwall(std::mt19937_64& rng, const UWallBounds& bounds) {
    UWallVector u;
    for (std::size_t k = 0; k < kNumWallKinds; ++k) {
        const auto [lo, hi] = bounds[k];
        if (lo == hi) {
            // Consume a draw so degenerate bounds keep the stream aligned.
            rng();
            u.values[k] = lo;
            continue;
        }
        std::uniform_real_distribution<double> dist(lo, hi);
        u.values[k] = dist(rng);
    }
    return u;
}

UWallVector sample_uwall(std::uint64_t seed, const UWallBounds& bounds) {
    std::mt19937_64 rng(seed);
    return sample_uwall(rng, bounds);
}

UWallVector midpoint_uwall(const UWallBounds& bounds) {
    UWallVector u;
    for (std::size_t k = 0; k < kNumWallKinds; ++k) u.values[k] = 0.5 * (bounds[k].lo + bounds[k].hi);
    return u;
}

BuildingModel build_model(const BuildingLayout& layout, const UWallVector& u, const ModelOptions& options) {
    const std::size_t m = layout.num_zones();
    require(m >= 1, ErrorKind::Config, "layout '" + layout.name + "' has no zones");
    for (std::size_t k = 0; k < kNumWallKinds; ++k) {
        require(std::isfinite(u.values[k]) && u.values[k] > 0.0, ErrorKind::Config,
                std::string("U-factor '") + wall_kind_name(static_cast<WallKind>(k)) + "' must be positive");
    }

    std::vector<double> resistance(m * m, BuildingModel::kNoPath);
    for (const auto& adj : layout.adjacency) {
        require(adj.area_m2 > 0.0, ErrorKind::Config,
                "adjacency " + layout.zones.at(adj.a).name + "-" + layout.zones.at(adj.b).name +
                    " declares a zero shared area");
        const double r = 1.0 / (u[adj.kind] * adj.area_m2);
        resistance[adj.a * m + adj.b] = r;
        resistance[adj.b * m + adj.a] = r;
    }

    std::vector<double> capacitance(m), outdoor(m), ground(m), max_power(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& z = layout.zones[i];
        const double g_out = u[WallKind::OutWall] * z.external_wall_area_m2 + u[WallKind::Window] * z.window_area_m2 +
                             u[WallKind::Roof] * z.roof_area_m2;
        outdoor[i] = g_out > 0.0 ? 1.0 / g_out : BuildingModel::kNoPath;
        const double g_ground = u[WallKind::GroundFloor] * z.ground_area_m2;
        ground[i] = g_ground > 0.0 ? 1.0 / g_ground : BuildingModel::kNoPath;
        capacitance[i] = options.air_heat_capacity * options.air_density * z.volume_m3() +
                         options.envelope_mass_per_m2 * layout.bounding_area(i);
        max_power[i] = z.max_power_w;
    }
    return BuildingModel(std::move(capacitance), std::move(resistance), std::move(outdoor), std::move(ground),
                         std::move(max_power));
}

const char* to_string(TrainMode mode) { return mode == TrainMode::Static ? "static" : "dynamic"; }

TrainMode train_mode_from_string(const std::string& s) {
    if (s == "static") return TrainMode::Static;
    if (s == "dynamic") return TrainMode::Dynamic;
    throw Error(ErrorKind::Config, "unknown train mode '" + s + "' (expected static|dynamic)");
}

ContextSampler::ContextSampler(TrainMode mode, ContextSpec base, std::uint64_t seed, UWallBounds bounds,
                               std::vector<std::string> climates)
    : mode_(mode), base_(std::move(base)), rng_(seed), bounds_(bounds), climates_(std::move(climates)) {}

ContextSpec ContextSampler::next() {
    ++draws_;
    if (mode_ == TrainMode::Static) return base_;
    ContextSpec c = base_;
    c.u_wall = sample_uwall(rng_, bounds_);
    if (!climates_.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, climates_.size() - 1);
        c.climate_id = climates_[pick(rng_)];
    }
    c.name = base_.name + "#" + std::to_string(draws_);
    return c;
}

} // namespace bemorl
