#include "bemorl/metrics.hpp"

#include "bemorl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace bemorl {

bool dominates(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), ErrorKind::Validation, "dominance check on vectors of different length");
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strictly = true;
    }
    return strictly;
}

ParetoFront pareto_filter(std::span<const ReturnVector> points, std::span<const std::int64_t> ids) {
    require(!points.empty(), ErrorKind::Validation, "pareto_filter needs at least one point");
    require(ids.empty() || ids.size() == points.size(), ErrorKind::Validation, "ids and points differ in length");
    const std::size_t n = points.front().size();
    for (const auto& p : points) {
        require(p.size() == n, ErrorKind::Validation, "points have different numbers of objectives");
        for (double v : p) require(std::isfinite(v), ErrorKind::Validation, "front point is not finite");
    }

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (j == i) continue;
            // A duplicate is dropped unless it is the first occurrence.
            dominated = dominates(points[j], points[i]) || (j < i && points[j] == points[i]);
        }
        if (!dominated) keep.push_back(i);
    }
    std::stable_sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    ParetoFront front;
    for (std::size_t i : keep) {
        front.points_.push_back(points[i]);
        front.ids_.push_back(ids.empty() ? static_cast<std::int64_t>(i) : ids[i]);
    }
    return front;
}

namespace {

using Points = std::vector<ReturnVector>;

// Exact hypervolume of the first `dim` coordinates of `pts`, all >= ref.
double hv_exact(Points pts, std::span<const double> ref, std::size_t dim) {
    if (pts.empty()) return 0.0;
    if (dim == 1) {
        double best = ref[0];
        for (const auto& p : pts) best = std::max(best, p[0]);
        return best - ref[0];
    }
    if (dim == 2) {
        std::sort(pts.begin(), pts.end(), [](const ReturnVector& a, const ReturnVector& b) {
            return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1];
        });
        double area = 0.0;
        double y_cover = ref[1];
        for (const auto& p : pts) {
            if (p[1] > y_cover) {
                area += (p[0] - ref[0]) * (p[1] - y_cover);
                y_cover = p[1];
            }
        }
        return area;
    }
    // Sweep the last axis from the top: between consecutive levels the slice
    // is the (dim-1)-volume of every point at or above the slab.
    const std::size_t axis = dim - 1;
    std::sort(pts.begin(), pts.end(), [axis](const ReturnVector& a, const ReturnVector& b) { return a[axis] > b[axis]; });
    double volume = 0.0;
    Points slice;
    slice.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        slice.push_back(pts[i]);
        const double lower = i + 1 < pts.size() ? pts[i + 1][axis] : ref[axis];
        const double height = pts[i][axis] - lower;
        if (height > 0.0) volume += height * hv_exact(slice, ref, dim - 1);
    }
    return volume;
}

double hv_monte_carlo(const Points& pts, std::span<const double> ref, const HypervolumeOptions& options) {
    const std::size_t n = ref.size();
    std::vector<double> upper(ref.begin(), ref.end());
    for (const auto& p : pts) {
        for (std::size_t i = 0; i < n; ++i) upper[i] = std::max(upper[i], p[i]);
    }
    double box = 1.0;
    for (std::size_t i = 0; i < n; ++i) box *= upper[i] - ref[i];
    if (box == 0.0 || options.monte_carlo_samples == 0) return 0.0;

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> z(n);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < options.monte_carlo_samples; ++s) {
        for (std::size_t i = 0; i < n; ++i) z[i] = ref[i] + unit(rng) * (upper[i] - ref[i]);
        for (const auto& p : pts) {
            bool inside = true;
            for (std::size_t i = 0; i < n && inside; ++i) inside = z[i] <= p[i];
            if (inside) {
                ++hits;
                break;
            }
        }
    }
    return box * static_cast<double>(hits) / static_cast<double>(options.monte_carlo_samples);
}

} // namespace

double hypervolume(const ParetoFront& front, std::span<const double> ref, const HypervolumeOptions& options) {
    if (front.empty()) return 0.0;
    const std::size_t n = front.num_objectives();
    require(ref.size() == n, ErrorKind::Validation, "reference point has the wrong number of objectives");

    std::ostringstream bad;
    bool any_bad = false;
    for (std::size_t j = 0; j < front.size(); ++j) {
        const auto& p = front.points()[j];
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) ok = ok && p[i] >= ref[i];
        if (!ok) {
            bad << (any_bad ? ", " : "") << "policy " << front.policy_ids()[j] << " (";
            for (std::size_t i = 0; i < n; ++i) bad << (i ? "," : "") << p[i];
            bad << ")";
            any_bad = true;
        }
    }
    require(!any_bad, ErrorKind::Validation, "reference point is not dominated by: " + bad.str());

    if (n <= 4) return hv_exact(front.points(), ref, n);
    return hv_monte_carlo(front.points(), ref, options);
}

double expected_utility(const ParetoFront& front, const ExpectedUtilityOptions& options) {
    require(!front.empty(), ErrorKind::Validation, "expected utility of an empty front");
    const std::size_t n = front.num_objectives();
    auto best = [&](std::span<const double> w) {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& p : front.points()) m = std::max(m, std::inner_product(w.begin(), w.end(), p.begin(), 0.0));
        return m;
    };

    if (n == 1) return best(std::vector<double>{1.0});
    if (n == 2) {
        const std::size_t k_max = std::max<std::size_t>(options.grid_resolution, 1);
        double total = 0.0;
        for (std::size_t k = 0; k <= k_max; ++k) {
            const double w0 = static_cast<double>(k) / static_cast<double>(k_max);
            const double w[2] = {w0, 1.0 - w0};
            total += best(w);
        }
        return total / static_cast<double>(k_max + 1);
    }

    require(options.n_weights > 0, ErrorKind::Validation, "expected utility needs at least one weight sample");
    std::mt19937_64 rng(options.seed);
    std::gamma_distribution<double> gamma(1.0, 1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t s = 0; s < options.n_weights; ++s) {
        double sum = 0.0;
        for (auto& x : w) sum += (x = gamma(rng));
        for (auto& x : w) x /= sum;
        total += best(w);
    }
    return total / static_cast<double>(options.n_weights);
}

double sparsity(const ParetoFront& front) {
    if (front.size() < 2) return 0.0;
    const std::size_t n = front.num_objectives();
    double total = 0.0;
    std::vector<double> column(front.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < front.size(); ++j) column[j] = front.points()[j][i];
        std::sort(column.begin(), column.end());
        for (std::size_t k = 0; k + 1 < column.size(); ++k) {
            const double gap = column[k] - column[k + 1];
            total += gap * gap;
        }
    }
    return total / static_cast<double>(front.size() - 1);
}

std::vector<double> reference_point(std::span<const ReturnVector> points, double margin) {
    require(!points.empty(), ErrorKind::Validation, "reference point needs at least one point");
    std::vector<double> ref = points.front();
    for (const auto& p : points) {
        require(p.size() == ref.size(), ErrorKind::Validation, "points have different numbers of objectives");
        for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = std::min(ref[i], p[i]);
    }
    for (auto& r : ref) r -= r == 0.0 ? margin : margin * std::abs(r);
    return ref;
}

MetricsReport evaluate_front(const ParetoFront& front, std::span<const double> ref, const ExpectedUtilityOptions& eu,
                             const HypervolumeOptions& hv) {
    MetricsReport r;
    r.hv = hypervolume(front, ref, hv);
    r.eu = expected_utility(front, eu);
    r.sp = sparsity(front);
    r.ref.assign(ref.begin(), ref.end());
    r.front_size = front.size();
    r.eu_samples = front.num_objectives() == 2 ? eu.grid_resolution + 1 : eu.n_weights;
    r.seed = eu.seed;
    return r;
}

std::string metrics_report_json(const MetricsReport& r) {
    nlohmann::json j{{"hv", r.hv},         {"eu", r.eu},   {"sp", r.sp}, {"ref_point", r.ref},
                     {"front_size", r.front_size}, {"eu_samples", r.eu_samples}, {"seed", r.seed}};
    return j.dump(2);
}

void write_front_csv(std::ostream& out, const ParetoFront& front) {
    const auto old_precision = out.precision(17);
    out << "policy_id";
    for (std::size_t i = 0; i < front.num_objectives(); ++i) out << ",g_" << (i + 1);
    out << '\n';
    for (std::size_t j = 0; j < front.size(); ++j) {
        out << front.policy_ids()[j];
        for (double v : front.points()[j]) out << ',' << v;
        out << '\n';
    }
    out.precision(old_precision);
}

ParetoFront read_front_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::Ingest, "front CSV is empty");
    require(line.rfind("policy_id", 0) == 0, ErrorKind::Ingest, "front CSV: line 1: expected 'policy_id,g_1,...'");
    const auto n = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    std::vector<ReturnVector> points;
    std::vector<std::int64_t> ids;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        require(cells.size() == n + 1, ErrorKind::Ingest, "front CSV: line " + std::to_string(line_no) + ": wrong field count");
        try {
            ids.push_back(std::stoll(cells[0]));
            ReturnVector p;
            for (std::size_t i = 1; i < cells.size(); ++i) p.push_back(std::stod(cells[i]));
            points.push_back(std::move(p));
        } catch (const std::exception&) {
            throw Error(ErrorKind::Ingest, "front CSV: line " + std::to_string(line_no) + ": non-numeric field");
        }
    }
    return pareto_filter(points, ids);
}

} // namespace bemorl
