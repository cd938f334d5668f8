// Command-line driver: asset checks, training, evaluation and experiment tables.

#include "bemorl/assets.hpp"
#include "bemorl/env.hpp"
#include "bemorl/error.hpp"
#include "bemorl/harness.hpp"
#include "bemorl/metrics.hpp"
#include "bemorl/morl.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace bemorl;

namespace {

struct Options {
    std::string assets_dir;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string mode;
    std::string contexts_file;
};

std::shared_ptr<const AssetLibrary> open_assets(const Options& o) {
    const fs::path root = o.assets_dir.empty() ? default_asset_root() : fs::path(o.assets_dir);
    return std::make_shared<const AssetLibrary>(AssetLibrary::load(root));
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    require(static_cast<bool>(out), ErrorKind::Config, "cannot write " + path.string());
    out << text;
}

fs::path out_path(const Options& o, const std::string& fallback) {
    return o.out_dir.empty() ? fs::path(fallback) : fs::path(o.out_dir);
}

void apply_overrides(ExperimentSpec& spec, const Options& o, const AssetLibrary& assets) {
    if (o.seed) spec.master_seed = *o.seed;
    if (!o.mode.empty()) {
        spec.mode = train_mode_from_string(o.mode);
        spec.label.clear();
    }
    if (!o.contexts_file.empty()) {
        spec.eval_contexts = load_context_list(o.contexts_file);
        for (auto& c : spec.eval_contexts)
            if (c.layout_id.empty()) c.layout_id = spec.layout_id;
    }
    spec.validate(assets);
}

int cmd_assets_validate(const Options& o, double substep, std::size_t min_length) {
    const auto assets = open_assets(o);
    bool all_ok = true;
    for (const auto& check : validate_assets(*assets, substep, min_length)) {
        nlohmann::json j{{"subject", check.subject}, {"ok", check.ok}, {"detail", check.detail}};
        std::cout << j.dump() << '\n';
        all_ok = all_ok && check.ok;
    }
    if (!all_ok) throw Error(ErrorKind::Asset, "asset validation failed");
    return 0;
}

struct TrainArgs {
    std::string layout = "two_zone";
    std::string context_file;
    std::string env_file;
    std::string trainer_file;
    std::string resume_file;
};

int cmd_train(const Options& o, const TrainArgs& a) {
    const auto assets = open_assets(o);
    EnvConfig env = a.env_file.empty() ? EnvConfig{} : parse_env_config(read_text_file(a.env_file));
    TrainerConfig trainer = a.trainer_file.empty() ? TrainerConfig{} : parse_trainer_config(read_text_file(a.trainer_file));

    TrainingSetup setup;
    if (a.context_file.empty()) {
        setup.base = ContextSpec{"train", a.layout, "Warm_Marine", midpoint_uwall()};
    } else {
        setup.base = parse_context(read_text_file(a.context_file));
        if (setup.base.layout_id.empty()) setup.base.layout_id = a.layout;
    }
    setup.mode = o.mode.empty() ? TrainMode::Static : train_mode_from_string(o.mode);
    require(setup.base.layout_id == a.layout, ErrorKind::Config, "context layout does not match --layout");
    assets->layout(a.layout);
    assets->weather(setup.base.climate_id);

    std::optional<PolicyBuffer> resume;
    if (!a.resume_file.empty()) resume = parse_checkpoint(read_text_file(a.resume_file));

    const std::uint64_t seed = o.seed.value_or(2025);
    EnvFactory factory = [&] { return BuildingEnv(env, assets, a.layout); };
    const TrainResult result = train(trainer, factory, setup, seed, std::move(resume));

    const fs::path dir = out_path(o, "train_out");
    write_file(dir / "checkpoint.json", checkpoint_json(result.buffer));
    std::ostringstream front;
    write_front_csv(front, result.front);
    write_file(dir / "front.csv", front.str());

    const auto ref = reference_point(result.buffer.all_returns());
    const auto report = evaluate_front(result.front, ref);
    write_file(dir / "metrics.json", metrics_report_json(report));
    std::cout << nlohmann::json{{"out_dir", dir.string()},
                                {"policies", result.buffer.entries.size()},
                                {"front_size", result.front.size()},
                                {"hv", report.hv},
                                {"eu", report.eu},
                                {"sp", report.sp}}
                     .dump()
              << '\n';
    return 0;
}

int cmd_evaluate(const Options& o, const std::string& checkpoint_file, const std::string& env_file,
                 const std::vector<std::uint64_t>& seeds) {
    require(!o.contexts_file.empty(), ErrorKind::Config, "evaluate needs --contexts");
    const auto assets = open_assets(o);
    const PolicyBuffer buffer = parse_checkpoint(read_text_file(checkpoint_file));
    EnvConfig env_cfg = env_file.empty() ? EnvConfig{} : parse_env_config(read_text_file(env_file));
    auto contexts = load_context_list(o.contexts_file);
    require(!contexts.empty() && !buffer.protocol.contexts.empty(), ErrorKind::Config, "nothing to evaluate");
    const std::string layout = buffer.protocol.contexts.front().layout_id;
    for (auto& c : contexts)
        if (c.layout_id.empty()) c.layout_id = layout;

    BuildingEnv env(env_cfg, assets, layout);
    const ParetoFront train_front = buffer.front();
    std::vector<ParetoFront> fronts;
    std::vector<ReturnVector> all;
    for (const auto& c : contexts) {
        EvalProtocol protocol{{c}, seeds, 1, buffer.protocol.gamma};
        if (o.seed) protocol.seeds = {*o.seed};
        std::vector<ReturnVector> points;
        for (auto id : train_front.policy_ids())
            points.push_back(evaluate_policy(buffer.entry(id).policy, buffer.normalizer, env, protocol));
        all.insert(all.end(), points.begin(), points.end());
        fronts.push_back(pareto_filter(points, train_front.policy_ids()));
    }

    const auto ref = reference_point(all);
    const fs::path dir = out_path(o, "eval_out");
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        std::ostringstream csv;
        write_front_csv(csv, fronts[i]);
        write_file(dir / "fronts" / (slugify(contexts[i].name) + ".csv"), csv.str());
        const auto r = evaluate_front(fronts[i], ref);
        summary.push_back({{"context", contexts[i].name}, {"hv", r.hv}, {"eu", r.eu}, {"sp", r.sp},
                           {"front_size", r.front_size}});
    }
    nlohmann::json report{{"ref_point", ref}, {"contexts", summary}};
    write_file(dir / "metrics.json", report.dump(2));
    std::cout << report.dump() << '\n';
    return 0;
}

int cmd_experiment_run(const Options& o, const std::string& spec_file) {
    const auto assets = open_assets(o);
    ExperimentSpec spec = load_experiment_spec(spec_file, *assets);
    apply_overrides(spec, o, *assets);
    const fs::path dir = out_path(o, "results/" + slugify(spec.name));
    const ReportTable table = run_experiment(spec, assets, dir);
    std::cout << table.to_text();
    return 0;
}

int cmd_experiment_compare(const Options& o, const std::string& first_file, const std::string& second_file) {
    const auto assets = open_assets(o);
    ExperimentSpec first = load_experiment_spec(first_file, *assets);
    Options shared = o;
    shared.mode.clear();
    apply_overrides(first, shared, *assets);
    ExperimentSpec second;
    if (second_file.empty()) {
        // One spec: compare its static and dynamic variants.
        second = first;
        first.mode = TrainMode::Static;
        second.mode = TrainMode::Dynamic;
        first.label.clear();
        second.label.clear();
    } else {
        second = load_experiment_spec(second_file, *assets);
        apply_overrides(second, shared, *assets);
    }
    const fs::path dir = out_path(o, "results/" + slugify(first.name));
    const ReportTable table = compare_modes(first, second, assets, dir);
    std::cout << table.to_text();
    return 0;
}

int cmd_export_front_data(const std::vector<std::string>& dirs, const std::string& out_file) {
    std::vector<fs::path> paths(dirs.begin(), dirs.end());
    const auto rows = collect_front_plot_data(paths);
    if (out_file.empty() || out_file == "-") {
        write_front_plot_csv(std::cout, rows);
    } else {
        std::ostringstream csv;
        write_front_plot_csv(csv, rows);
        write_file(out_file, csv.str());
    }
    return 0;
}

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective building control: training, evaluation and experiment tables"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--assets", opt.assets_dir, "Asset library root (default: $BEMORL_ASSETS or built-in)");
        cmd->add_option("--seed", opt.seed, "Master seed");
        cmd->add_option("--out-dir", opt.out_dir, "Output directory");
    };

    auto* assets_cmd = app.add_subcommand("assets", "Asset library utilities");
    assets_cmd->require_subcommand(1);
    auto* validate = assets_cmd->add_subcommand("validate", "Check layouts and climate profiles");
    double substep = 300.0;
    std::size_t min_length = 24;
    add_common(validate);
    validate->add_option("--substep", substep, "Euler substep to check against, seconds");
    validate->add_option("--min-length", min_length, "Minimum climate length, samples");

    auto* train_cmd = app.add_subcommand("train", "Train one Pareto set and write a checkpoint");
    TrainArgs targs;
    add_common(train_cmd);
    train_cmd->add_option("--mode", opt.mode, "static or dynamic")->check(CLI::IsMember({"static", "dynamic"}));
    train_cmd->add_option("--layout", targs.layout, "Layout id");
    train_cmd->add_option("--context", targs.context_file, "Training context JSON");
    train_cmd->add_option("--env", targs.env_file, "Environment config JSON");
    train_cmd->add_option("--trainer", targs.trainer_file, "Trainer config JSON");
    train_cmd->add_option("--resume", targs.resume_file, "Checkpoint to resume from");

    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint's front in a set of contexts");
    std::string checkpoint_file;
    std::string eval_env_file;
    std::vector<std::uint64_t> eval_seeds = {101, 102};
    add_common(eval_cmd);
    eval_cmd->add_option("checkpoint", checkpoint_file, "Checkpoint JSON")->required();
    eval_cmd->add_option("--contexts", opt.contexts_file, "Context list JSON")->required();
    eval_cmd->add_option("--env", eval_env_file, "Environment config JSON");
    eval_cmd->add_option("--eval-seeds", eval_seeds, "Episode reset seeds");

    auto* exp_cmd = app.add_subcommand("experiment", "Run experiment specs");
    exp_cmd->require_subcommand(1);
    auto* run_cmd = exp_cmd->add_subcommand("run", "Single-mode table over the spec's eval contexts");
    std::string spec_file;
    std::string spec_file2;
    add_common(run_cmd);
    run_cmd->add_option("spec", spec_file, "Experiment spec JSON")->required();
    run_cmd->add_option("--mode", opt.mode, "Override training mode")->check(CLI::IsMember({"static", "dynamic"}));
    run_cmd->add_option("--contexts", opt.contexts_file, "Override eval contexts");
    auto* cmp_cmd = exp_cmd->add_subcommand("compare", "Two-mode table; one spec compares static vs dynamic");
    add_common(cmp_cmd);
    cmp_cmd->add_option("spec", spec_file, "First experiment spec")->required();
    cmp_cmd->add_option("spec2", spec_file2, "Second experiment spec");
    cmp_cmd->add_option("--contexts", opt.contexts_file, "Override eval contexts");

    auto* export_cmd = app.add_subcommand("export", "Export result data");
    export_cmd->require_subcommand(1);
    auto* front_cmd = export_cmd->add_subcommand("front-data", "Long-format Pareto-front CSV for plotting");
    std::vector<std::string> result_dirs;
    std::string out_file;
    front_cmd->add_option("dirs", result_dirs, "Result directories")->required();
    front_cmd->add_option("-o,--output", out_file, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error("Usage", e.what());
        return 2;
    }

    try {
        if (*validate) return cmd_assets_validate(opt, substep, min_length);
        if (*train_cmd) return cmd_train(opt, targs);
        if (*eval_cmd) return cmd_evaluate(opt, checkpoint_file, eval_env_file, eval_seeds);
        if (*run_cmd) return cmd_experiment_run(opt, spec_file);
        if (*cmp_cmd) return cmd_experiment_compare(opt, spec_file, spec_file2);
        if (*front_cmd) return cmd_export_front_data(result_dirs, out_file);
    } catch (const Error& e) {
        print_error(to_string(e.kind()), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("Internal", e.what());
        return 1;
    }
    return 0;
}
