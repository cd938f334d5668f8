#pragma once

#include "bemorl/assets.hpp"
#include "bemorl/env.hpp"
#include "bemorl/metrics.hpp"
#include "bemorl/morl.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bemorl {

struct MetricsConfig {
    std::optional<std::vector<double>> ref_point; // frozen reference; derived from all evaluated points if absent
    double ref_margin = 0.01;
    std::size_t eu_grid = 100;
    std::size_t eu_samples = 10'000;
    std::uint64_t eu_seed = 0;
};

struct ExperimentSpec {
    std::string name = "experiment";
    std::string label;                      // row label, defaults to Static-Train / Dynamic-Train
    std::string layout_id = "two_zone";
    TrainMode mode = TrainMode::Static;
    ContextSpec train_context;
    UWallBounds train_bounds = kUWallBounds;
    std::vector<std::string> train_climates;
    std::vector<ContextSpec> eval_contexts;
    std::vector<std::uint64_t> eval_seeds = {101, 102};
    EnvConfig env;
    TrainerConfig trainer;
    MetricsConfig metrics;
    int runs = 5;
    std::uint64_t master_seed = 2025;
    bool identical_run_seeds = false;       // every run reuses the master seed

    std::string row_label() const;
    std::uint64_t run_seed(int run) const;
    void validate(const AssetLibrary& assets) const;
};

/// JSON spec; relative "eval_contexts_file" paths resolve against `base_dir`,
/// then against the asset root.
ExperimentSpec parse_experiment_spec(const std::string& json_text, const AssetLibrary& assets,
                                     const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& path, const AssetLibrary& assets);
std::string dump_experiment_spec(const ExperimentSpec& spec);

/// Fronts of one run in every evaluation context.
struct RunOutcome {
    std::uint64_t seed = 0;
    std::vector<ParetoFront> fronts; // one per eval context
};

struct ExperimentOutcome {
    ExperimentSpec spec;
    std::vector<RunOutcome> runs;

    std::vector<ReturnVector> all_points() const;
    /// Union over runs of one context's fronts; ids are run * 1e6 + policy id.
    ParetoFront merged_front(std::size_t context) const;
};

/// Trains every run and evaluates its final front in every eval context. If a
/// run fails, completed runs are written under `partial_dir`/partial first.
ExperimentOutcome collect_experiment(const ExperimentSpec& spec, std::shared_ptr<const AssetLibrary> assets,
                                     const std::filesystem::path& partial_dir = {});

struct Cell {
    double mean = 0.0;
    double std = 0.0;
};

struct TableRow {
    std::string metric; // HV, EU or SP
    std::string label;  // training mode label, empty for single-mode tables
    std::vector<Cell> cells;
};

struct ReportTable {
    std::string title;
    std::vector<std::string> columns;
    std::vector<TableRow> rows;
    std::vector<double> ref_point;
    std::vector<std::uint64_t> run_seeds;
    int runs = 0;

    std::string to_json() const;
    std::string to_text() const;
};

inline constexpr const char* kMetricNames[3] = {"HV", "EU", "SP"};

/// Mean and population standard deviation over runs of HV, EU and SP per context.
std::vector<TableRow> tabulate(const ExperimentOutcome& outcome, std::span<const double> ref,
                               const std::string& label);

std::vector<double> resolve_reference(const MetricsConfig& config, std::span<const ExperimentOutcome* const> outcomes);

/// Runs one experiment and writes report.json, table.txt and per-context front
/// CSVs under `out_dir` (when non-empty).
ReportTable run_experiment(const ExperimentSpec& spec, std::shared_ptr<const AssetLibrary> assets,
                           const std::filesystem::path& out_dir = {});

/// Two specs with the same eval contexts; rows interleave per metric in
/// argument order. Fronts land in out_dir/<label>/.
ReportTable compare_modes(const ExperimentSpec& first, const ExperimentSpec& second,
                          std::shared_ptr<const AssetLibrary> assets, const std::filesystem::path& out_dir = {});

struct FrontPlotRow {
    std::string mode;
    std::string context;
    std::int64_t policy_id = 0;
    ReturnVector returns;
};

/// Long-format rows `mode,context,policy_id,g_thermal,g_cost` from the
/// `<mode>/fronts/<context>.csv` files of one or more result directories.
std::vector<FrontPlotRow> collect_front_plot_data(const std::vector<std::filesystem::path>& result_dirs);
void write_front_plot_csv(std::ostream& out, const std::vector<FrontPlotRow>& rows);
std::vector<FrontPlotRow> read_front_plot_csv(std::istream& in);

std::string slugify(const std::string& name);

} // namespace bemorl
