#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bemorl {

using ReturnVector = std::vector<double>;

/// a dominates b iff a_i >= b_i for every i and a != b (maximization).
bool dominates(std::span<const double> a, std::span<const double> b);

/// Strictly non-dominated, duplicate-free set of return vectors with the ids of
/// the policies that produced them. Only `pareto_filter` creates one.
class ParetoFront {
public:
    ParetoFront() = default;

    const std::vector<ReturnVector>& points() const noexcept { return points_; }
    const std::vector<std::int64_t>& policy_ids() const noexcept { return ids_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    std::size_t num_objectives() const { return points_.empty() ? 0 : points_.front().size(); }

private:
    friend ParetoFront pareto_filter(std::span<const ReturnVector>, std::span<const std::int64_t>);
    std::vector<ReturnVector> points_;
    std::vector<std::int64_t> ids_;
};

/// Maximal elements under `dominates`; duplicates keep the first id. Output is
/// sorted ascending in the first objective (ties on later objectives). When
/// `ids` is empty, input positions are used.
ParetoFront pareto_filter(std::span<const ReturnVector> points, std::span<const std::int64_t> ids = {});

struct HypervolumeOptions {
    std::size_t monte_carlo_samples = 1'000'000; // only used above 4 objectives
    std::uint64_t seed = 0;
};

/// Lebesgue measure of the union of boxes [ref, p]. Exact for up to four
/// objectives (2-D sweep, dimension-sweep slicing above); Monte Carlo beyond.
double hypervolume(const ParetoFront& front, std::span<const double> ref, const HypervolumeOptions& options = {});

struct ExpectedUtilityOptions {
    std::size_t grid_resolution = 100;  // K for two objectives
    std::size_t n_weights = 10'000;     // Dirichlet draws for three or more
    std::uint64_t seed = 0;
};

/// Mean over preferences of the best scalarized return on the front.
double expected_utility(const ParetoFront& front, const ExpectedUtilityOptions& options = {});

/// Mean squared gap between neighbours in each objective's sorted values,
/// normalized by |P| - 1; zero for a single point.
double sparsity(const ParetoFront& front);

/// Componentwise minimum minus `margin` times its magnitude (or `margin`
/// itself where the minimum is zero).
std::vector<double> reference_point(std::span<const ReturnVector> points, double margin = 0.01);

struct MetricsReport {
    double hv = 0.0;
    double eu = 0.0;
    double sp = 0.0;
    std::vector<double> ref;
    std::size_t front_size = 0;
    std::size_t eu_samples = 0;
    std::uint64_t seed = 0;
};

MetricsReport evaluate_front(const ParetoFront& front, std::span<const double> ref,
                             const ExpectedUtilityOptions& eu = {}, const HypervolumeOptions& hv = {});
std::string metrics_report_json(const MetricsReport& report);

/// CSV `policy_id,g_1,...,g_n`.
void write_front_csv(std::ostream& out, const ParetoFront& front);
/// Reads a front CSV and re-filters it.
ParetoFront read_front_csv(std::istream& in);

} // namespace bemorl
