#pragma once

#include "bemorl/layout.hpp"
#include "bemorl/thermal.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bemorl {

/// Envelope U-factors in W/(m²·°C), indexed by WallKind:
/// intwall, floor, outwall, roof, ceiling, groundfloor, window.
struct UWallVector {
    std::array<double, kNumWallKinds> values{};

    double operator[](WallKind k) const { return values[static_cast<std::size_t>(k)]; }
    double& operator[](WallKind k) { return values[static_cast<std::size_t>(k)]; }
    bool operator==(const UWallVector&) const = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

using UWallBounds = std::array<Interval, kNumWallKinds>;

/// Sampling ranges extracted from DOE reference buildings.
inline constexpr UWallBounds kUWallBounds = {{
    {0.774, 6.299}, // intwall
    {0.386, 3.145}, // floor
    {0.269, 2.191}, // outwall
    {0.160, 1.304}, // roof
    {0.386, 3.145}, // ceiling
    {0.386, 3.145}, // groundfloor
    {1.950, 3.622}, // window
}};

bool within_bounds(const UWallVector& u, const UWallBounds& bounds = kUWallBounds);

/// Each component independently uniform on its interval; deterministic per seed.
UWallVector sample_uwall(std::uint64_t seed, const UWallBounds& bounds = kUWallBounds);
UWallVector sample_uwall(std::mt19937_64& rng, const UWallBounds& bounds = kUWallBounds);

/// Midpoint of every bound; the default static training envelope.
UWallVector midpoint_uwall(const UWallBounds& bounds = kUWallBounds);

struct ModelOptions {
    double air_heat_capacity = 1005.0;    // J/(kg·°C)
    double air_density = 1.2;             // kg/m³
    double envelope_mass_per_m2 = 1.0e4;  // J/(m²·°C) surcharge per bounding surface
};

/// R = 1/(U·A) per surface; the outdoor path combines opaque wall, window and
/// roof in parallel; the ground path uses the groundfloor U-factor.
BuildingModel build_model(const BuildingLayout& layout, const UWallVector& u, const ModelOptions& options = {});

/// One point of the context space: an envelope plus a climate on a layout.
struct ContextSpec {
    std::string name;
    std::string layout_id;
    std::string climate_id;
    UWallVector u_wall;

    bool operator==(const ContextSpec&) const = default;
};

enum class TrainMode { Static, Dynamic };

const char* to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

/// Stream of training contexts. Static mode repeats the base context; dynamic
/// mode draws a fresh envelope (and optionally a climate) for every call.
class ContextSampler {
public:
    ContextSampler(TrainMode mode, ContextSpec base, std::uint64_t seed, UWallBounds bounds = kUWallBounds,
                   std::vector<std::string> climates = {});

    ContextSpec next();
    TrainMode mode() const noexcept { return mode_; }
    const ContextSpec& base() const noexcept { return base_; }

private:
    TrainMode mode_;
    ContextSpec base_;
    std::mt19937_64 rng_;
    UWallBounds bounds_;
    std::vector<std::string> climates_;
    std::uint64_t draws_ = 0;
};

} // namespace bemorl
