#pragma once

// Generators and independent reference implementations shared by the tests.

#include "bemorl/assets.hpp"
#include "bemorl/metrics.hpp"
#include "bemorl/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <vector>

namespace testing {

inline std::filesystem::path asset_dir() {
#ifdef BEMORL_TEST_ASSET_DIR
    return BEMORL_TEST_ASSET_DIR;
#else
    return bemorl::default_asset_root();
#endif
}

inline std::shared_ptr<const bemorl::AssetLibrary> shipped_assets() {
    static auto lib = std::make_shared<const bemorl::AssetLibrary>(bemorl::AssetLibrary::load(asset_dir()));
    return lib;
}

/// Random connected M-zone model: a spanning chain plus random extra links,
/// with zone 0 always on the outdoor boundary.
inline bemorl::BuildingModel random_model(std::mt19937_64& rng, std::size_t m, bool boundary = true) {
    std::uniform_real_distribution<double> cap(5e5, 5e6);
    std::uniform_real_distribution<double> res(0.005, 0.1);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    const double none = bemorl::BuildingModel::kNoPath;
    std::vector<double> c(m), r(m * m, none), re(m, none), rg(m, none), pmax(m, 5000.0);
    for (auto& x : c) x = cap(rng);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (j == i + 1 || coin(rng) < 0.3) r[i * m + j] = r[j * m + i] = res(rng);
        }
        if (boundary && (i == 0 || coin(rng) < 0.5)) re[i] = res(rng);
        if (boundary && coin(rng) < 0.3) rg[i] = res(rng);
    }
    return bemorl::BuildingModel(c, r, re, rg, pmax,
                                 boundary ? bemorl::BuildingModel::Connectivity::Required
                                          : bemorl::BuildingModel::Connectivity::Skip);
}

/// Single zone with only an outdoor link.
inline bemorl::BuildingModel single_zone(double r, double c, double max_power = 1000.0) {
    return bemorl::BuildingModel({c}, {bemorl::BuildingModel::kNoPath}, {r}, {}, {max_power});
}

inline bemorl::HeatInputs zero_inputs(std::size_t m, double t_out = 0.0, double t_ground = 0.0) {
    return bemorl::HeatInputs{std::vector<double>(m, 0.0), std::vector<double>(m, 0.0), std::vector<double>(m, 0.0),
                              t_out, t_ground};
}

// Layout "flat" (chain of zones) in climate "Flat": T_e = T_g = 22, no sun, nobody home, constant price.
inline std::shared_ptr<const bemorl::AssetLibrary> flat_assets(std::size_t zones = 1) {
    auto lib = std::make_shared<bemorl::AssetLibrary>();
    bemorl::BuildingLayout l;
    l.name = "flat";
    for (std::size_t i = 0; i < zones; ++i) {
        l.zones.push_back(bemorl::ZoneGeometry{"z" + std::to_string(i), 50.0, 3.0, 30.0, 5.0, 50.0, 50.0, 5000.0});
        if (i > 0) l.adjacency.push_back(bemorl::Adjacency{i - 1, i, bemorl::WallKind::IntWall, 20.0});
    }
    lib->add_layout("flat", l);
    bemorl::WeatherProfile w;
    w.name = "Flat";
    const std::size_t n = 48;
    w.outdoor_temp_c.assign(n, 22.0);
    w.ground_temp_c.assign(n, 22.0);
    w.solar_wm2.assign(n, 0.0);
    w.occupancy_frac.assign(n, 0.0);
    w.price_per_kwh.assign(n, 0.2);
    lib->add_weather("Flat", w);
    return lib;
}

/// Random mutually non-dominated 2-D points: sample a decreasing staircase.
inline std::vector<bemorl::ReturnVector> random_front_2d(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<double> xs(n), ys(n);
    for (auto& x : xs) x = u(rng);
    for (auto& y : ys) y = u(rng);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end(), std::greater<>());
    std::vector<bemorl::ReturnVector> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({xs[i], ys[i]});
    return pts;
}

/// Random points on the positive part of a sphere (mutually non-dominated).
inline std::vector<bemorl::ReturnVector> random_front_sphere(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<bemorl::ReturnVector> pts;
    while (pts.size() < n) {
        bemorl::ReturnVector p(dim);
        double norm = 0.0;
        for (auto& x : p) {
            x = std::abs(g(rng));
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : p) x = 1.0 + 4.0 * x / norm;
        pts.push_back(p);
    }
    return pts;
}

/// Box-sampling hypervolume estimate, written independently of the library.
inline double monte_carlo_hv(const std::vector<bemorl::ReturnVector>& pts, const std::vector<double>& ref,
                             std::size_t samples, std::uint64_t seed) {
    const std::size_t n = ref.size();
    std::vector<double> hi = ref;
    for (const auto& p : pts)
        for (std::size_t i = 0; i < n; ++i) hi[i] = std::max(hi[i], p[i]);
    double box = 1.0;
    for (std::size_t i = 0; i < n; ++i) box *= hi[i] - ref[i];
    std::mt19937_64 rng(seed);
    std::vector<std::uniform_real_distribution<double>> axes;
    for (std::size_t i = 0; i < n; ++i) axes.emplace_back(ref[i], hi[i]);
    std::vector<double> z(n);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < n; ++i) z[i] = axes[i](rng);
        hits += std::any_of(pts.begin(), pts.end(), [&](const bemorl::ReturnVector& p) {
            for (std::size_t i = 0; i < n; ++i)
                if (z[i] > p[i]) return false;
            return true;
        });
    }
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

/// Inclusion-exclusion over all subsets; exact but exponential, for small fronts.
inline double inclusion_exclusion_hv(const std::vector<bemorl::ReturnVector>& pts, const std::vector<double>& ref) {
    const std::size_t k = pts.size();
    double total = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        std::vector<double> meet(ref.size(), std::numeric_limits<double>::infinity());
        int bits = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (!(mask & (1u << j))) continue;
            ++bits;
            for (std::size_t i = 0; i < ref.size(); ++i) meet[i] = std::min(meet[i], pts[j][i]);
        }
        double vol = 1.0;
        for (std::size_t i = 0; i < ref.size(); ++i) vol *= std::max(0.0, meet[i] - ref[i]);
        total += (bits % 2 ? 1.0 : -1.0) * vol;
    }
    return total;
}

} // namespace testing
