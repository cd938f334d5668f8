#include "bemorl/harness.hpp"

#include "bemorl/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace bemorl {

namespace fs = std::filesystem;

std::string slugify(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out.empty() ? "unnamed" : out;
}

std::string ExperimentSpec::row_label() const {
    if (!label.empty()) return label;
    return mode == TrainMode::Static ? "Static-Train" : "Dynamic-Train";
}

std::uint64_t ExperimentSpec::run_seed(int run) const {
    return identical_run_seeds ? master_seed : derive_seed(master_seed, 0xE5, static_cast<std::uint64_t>(run));
}

void ExperimentSpec::validate(const AssetLibrary& assets) const {
    require(runs >= 1, ErrorKind::Config, "experiment needs at least one run");
    require(!eval_contexts.empty(), ErrorKind::Config, "experiment needs at least one eval context");
    require(!eval_seeds.empty(), ErrorKind::Config, "experiment needs at least one eval seed");
    assets.layout(layout_id);
    require(train_context.layout_id == layout_id, ErrorKind::Config, "train context uses a different layout");
    assets.weather(train_context.climate_id);
    for (const auto& c : train_climates) assets.weather(c);
    for (const auto& c : eval_contexts) {
        require(c.layout_id == layout_id, ErrorKind::Config, "eval context '" + c.name + "' uses a different layout");
        assets.weather(c.climate_id);
    }
    env.validate();
}

namespace {

std::vector<ContextSpec> contexts_from_json(const nlohmann::json& j, const std::string& layout) {
    nlohmann::json list = j;
    for (auto& c : list) {
        if (!c.contains("layout")) c["layout"] = layout;
    }
    return parse_context_list(list.dump());
}

ContextSpec context_with_layout(nlohmann::json j, const std::string& layout) {
    if (!j.contains("layout")) j["layout"] = layout;
    return parse_context(j.dump());
}

} // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text, const AssetLibrary& assets,
                                     const fs::path& base_dir) {
    ExperimentSpec s;
    try {
        const auto j = nlohmann::json::parse(json_text);
        s.name = j.value("name", s.name);
        s.label = j.value("label", s.label);
        s.layout_id = j.value("layout", s.layout_id);
        s.mode = train_mode_from_string(j.value("mode", std::string("static")));
        s.train_context = context_with_layout(
            j.value("train_context", nlohmann::json{{"name", "train"}, {"climate", "Warm_Marine"}}), s.layout_id);
        if (j.contains("train_climates")) s.train_climates = j["train_climates"].get<std::vector<std::string>>();
        if (j.contains("train_bounds")) {
            // Optional override of the dynamic-mode sampling ranges: {"roof": [lo, hi], ...}.
            for (auto& [key, value] : j["train_bounds"].items()) {
                const auto k = static_cast<std::size_t>(wall_kind_from_name(key));
                const auto range = value.get<std::vector<double>>();
                require(range.size() == 2 && range[0] <= range[1], ErrorKind::Config,
                        "train_bounds." + key + " must be [lo, hi]");
                s.train_bounds[k] = {range[0], range[1]};
            }
        }
        if (j.contains("eval_contexts")) {
            s.eval_contexts = contexts_from_json(j["eval_contexts"], s.layout_id);
        } else if (j.contains("eval_contexts_file")) {
            fs::path p = j["eval_contexts_file"].get<std::string>();
            if (p.is_relative()) {
                const fs::path near = base_dir / p;
                p = fs::exists(near) ? near : assets.root() / p;
            }
            auto parsed = nlohmann::json::parse(read_text_file(p));
            if (parsed.is_object() && parsed.contains("contexts")) parsed = parsed["contexts"];
            s.eval_contexts = contexts_from_json(parsed, s.layout_id);
        }
        if (j.contains("eval_seeds")) s.eval_seeds = j["eval_seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("env")) s.env = parse_env_config(j["env"].dump());
        if (j.contains("trainer")) s.trainer = parse_trainer_config(j["trainer"].dump());
        if (j.contains("metrics")) {
            const auto& m = j["metrics"];
            if (m.contains("ref_point") && !m["ref_point"].is_null()) {
                s.metrics.ref_point = m["ref_point"].get<std::vector<double>>();
            }
            s.metrics.ref_margin = m.value("ref_margin", s.metrics.ref_margin);
            s.metrics.eu_grid = m.value("eu_grid", s.metrics.eu_grid);
            s.metrics.eu_samples = m.value("eu_samples", s.metrics.eu_samples);
            s.metrics.eu_seed = m.value("eu_seed", s.metrics.eu_seed);
        }
        s.runs = j.value("runs", s.runs);
        s.master_seed = j.value("master_seed", s.master_seed);
        s.identical_run_seeds = j.value("identical_run_seeds", s.identical_run_seeds);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("experiment spec error: ") + e.what());
    }
    s.validate(assets);
    return s;
}

ExperimentSpec load_experiment_spec(const fs::path& path, const AssetLibrary& assets) {
    return parse_experiment_spec(read_text_file(path), assets, path.parent_path());
}

std::string dump_experiment_spec(const ExperimentSpec& s) {
    auto ctx = [](const ContextSpec& c) { return nlohmann::json::parse(dump_context(c)); };
    nlohmann::json evals = nlohmann::json::array();
    for (const auto& c : s.eval_contexts) evals.push_back(ctx(c));
    nlohmann::json bounds;
    for (std::size_t k = 0; k < kNumWallKinds; ++k) {
        bounds[wall_kind_name(static_cast<WallKind>(k))] = {s.train_bounds[k].lo, s.train_bounds[k].hi};
    }
    nlohmann::json j{{"name", s.name},
                     {"label", s.label},
                     {"layout", s.layout_id},
                     {"mode", to_string(s.mode)},
                     {"train_context", ctx(s.train_context)},
                     {"train_bounds", bounds},
                     {"train_climates", s.train_climates},
                     {"eval_contexts", evals},
                     {"eval_seeds", s.eval_seeds},
                     {"env", nlohmann::json::parse(dump_env_config(s.env))},
                     {"trainer", nlohmann::json::parse(dump_trainer_config(s.trainer))},
                     {"metrics",
                      {{"ref_point", s.metrics.ref_point ? nlohmann::json(*s.metrics.ref_point) : nlohmann::json()},
                       {"ref_margin", s.metrics.ref_margin},
                       {"eu_grid", s.metrics.eu_grid},
                       {"eu_samples", s.metrics.eu_samples},
                       {"eu_seed", s.metrics.eu_seed}}},
                     {"runs", s.runs},
                     {"master_seed", s.master_seed},
                     {"identical_run_seeds", s.identical_run_seeds}};
    return j.dump(2);
}

std::vector<ReturnVector> ExperimentOutcome::all_points() const {
    std::vector<ReturnVector> out;
    for (const auto& run : runs) {
        for (const auto& f : run.fronts) out.insert(out.end(), f.points().begin(), f.points().end());
    }
    return out;
}

ParetoFront ExperimentOutcome::merged_front(std::size_t context) const {
    std::vector<ReturnVector> points;
    std::vector<std::int64_t> ids;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const auto& f = runs[r].fronts.at(context);
        for (std::size_t i = 0; i < f.size(); ++i) {
            points.push_back(f.points()[i]);
            ids.push_back(static_cast<std::int64_t>(r) * 1'000'000 + f.policy_ids()[i]);
        }
    }
    return pareto_filter(points, ids);
}

namespace {
void write_fronts(const ExperimentOutcome& outcome, const fs::path& dir);
void write_text(const fs::path& path, const std::string& text);
}

ExperimentOutcome collect_experiment(const ExperimentSpec& spec, std::shared_ptr<const AssetLibrary> assets,
                                     const fs::path& partial_dir) {
    spec.validate(*assets);
    ExperimentOutcome outcome;
    outcome.spec = spec;
    const EnvFactory factory = [&spec, assets] { return BuildingEnv(spec.env, assets, spec.layout_id); };
    TrainingSetup setup{spec.train_context, spec.mode, spec.train_bounds, spec.train_climates};
    if (spec.mode == TrainMode::Static) setup.bounds = kUWallBounds;

    auto env = factory();
    for (int r = 0; r < spec.runs; ++r) {
        RunOutcome run;
        run.seed = spec.run_seed(r);
        try {
            const auto trained = train(spec.trainer, factory, setup, run.seed);
            const auto& buffer = trained.buffer;
            for (const auto& context : spec.eval_contexts) {
                EvalProtocol protocol{{context}, spec.eval_seeds, 1, buffer.protocol.gamma};
                std::vector<ReturnVector> points;
                std::vector<std::int64_t> ids;
                for (const auto id : trained.front.policy_ids()) {
                    points.push_back(evaluate_policy(buffer.entry(id).policy, buffer.normalizer, env, protocol));
                    ids.push_back(id);
                }
                run.fronts.push_back(pareto_filter(points, ids));
            }
        } catch (const Error& e) {
            std::string where = "no partial results written";
            if (!partial_dir.empty()) {
                const auto dir = partial_dir / "partial" / slugify(spec.row_label());
                write_fronts(outcome, dir);
                nlohmann::json record{{"experiment", spec.name},
                                      {"failed_run", r},
                                      {"completed_runs", outcome.runs.size()},
                                      {"error", to_string(e.kind())},
                                      {"message", e.what()}};
                write_text(dir / "failure.json", record.dump(2));
                where = "partial results in " + dir.string();
            }
            throw Error(e.kind(), "run " + std::to_string(r) + " of '" + spec.name + "' failed: " + e.what() + " (" +
                                      where + ")");
        }
        outcome.runs.push_back(std::move(run));
    }
    return outcome;
}

std::vector<double> resolve_reference(const MetricsConfig& config, std::span<const ExperimentOutcome* const> outcomes) {
    if (config.ref_point) return *config.ref_point;
    std::vector<ReturnVector> all;
    for (const auto* o : outcomes) {
        const auto pts = o->all_points();
        all.insert(all.end(), pts.begin(), pts.end());
    }
    return reference_point(all, config.ref_margin);
}

std::vector<TableRow> tabulate(const ExperimentOutcome& outcome, std::span<const double> ref,
                               const std::string& label) {
    const auto& spec = outcome.spec;
    ExpectedUtilityOptions eu{spec.metrics.eu_grid, spec.metrics.eu_samples, spec.metrics.eu_seed};
    std::vector<TableRow> rows(3);
    for (int m = 0; m < 3; ++m) {
        rows[m].metric = kMetricNames[m];
        rows[m].label = label;
    }
    for (std::size_t c = 0; c < spec.eval_contexts.size(); ++c) {
        std::vector<std::array<double, 3>> values;
        for (const auto& run : outcome.runs) {
            const auto report = evaluate_front(run.fronts[c], ref, eu);
            values.push_back({report.hv, report.eu, report.sp});
        }
        for (int m = 0; m < 3; ++m) {
            double mean = 0.0;
            for (const auto& v : values) mean += v[m];
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (const auto& v : values) var += (v[m] - mean) * (v[m] - mean);
            var /= static_cast<double>(values.size());
            rows[m].cells.push_back({mean, std::sqrt(var)});
        }
    }
    return rows;
}

std::string ReportTable::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& c : r.cells) cells.push_back({{"mean", c.mean}, {"std", c.std}});
        rows_json.push_back({{"metric", r.metric}, {"label", r.label}, {"cells", cells}});
    }
    nlohmann::json j{{"title", title},
                     {"columns", columns},
                     {"rows", rows_json},
                     {"ref_point", ref_point},
                     {"runs", runs},
                     {"run_seeds", run_seeds},
                     {"presentation_scale", {{"HV", 1e7}, {"EU", 1e3}, {"SP", 1e5}}}};
    return j.dump(2);
}

std::string ReportTable::to_text() const {
    std::ostringstream out;
    out << title << "\n";
    out << std::left << std::setw(7) << "Metric" << std::setw(16) << "Training";
    for (const auto& c : columns) out << " | " << std::setw(22) << c;
    out << "\n";
    out << std::setprecision(6);
    for (const auto& r : rows) {
        out << std::left << std::setw(7) << r.metric << std::setw(16) << (r.label.empty() ? "-" : r.label);
        for (const auto& c : r.cells) {
            std::ostringstream cell;
            cell << std::setprecision(6) << c.mean << " +- " << std::setprecision(3) << c.std;
            out << " | " << std::setw(22) << cell.str();
        }
        out << "\n";
    }
    out << "reference point:";
    for (double v : ref_point) out << ' ' << std::setprecision(17) << v;
    out << "\nruns: " << runs << "\n";
    return out.str();
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Config, "cannot write " + path.string());
    out << text;
}

void write_fronts(const ExperimentOutcome& outcome, const fs::path& dir) {
    fs::create_directories(dir);
    if (outcome.runs.empty()) return;
    const auto& contexts = outcome.spec.eval_contexts;
    for (std::size_t c = 0; c < contexts.size(); ++c) {
        std::ostringstream merged;
        write_front_csv(merged, outcome.merged_front(c));
        write_text(dir / "fronts" / (slugify(contexts[c].name) + ".csv"), merged.str());
        for (std::size_t r = 0; r < outcome.runs.size(); ++r) {
            std::ostringstream one;
            write_front_csv(one, outcome.runs[r].fronts[c]);
            write_text(dir / "runs" / ("run" + std::to_string(r)) / (slugify(contexts[c].name) + ".csv"), one.str());
        }
    }
}

std::vector<std::string> column_names(const ExperimentSpec& spec) {
    std::vector<std::string> cols;
    for (const auto& c : spec.eval_contexts) {
        const bool self = c.climate_id == spec.train_context.climate_id && c.u_wall == spec.train_context.u_wall;
        cols.push_back(self ? c.name + "*" : c.name);
    }
    return cols;
}

} // namespace

ReportTable run_experiment(const ExperimentSpec& spec, std::shared_ptr<const AssetLibrary> assets,
                           const fs::path& out_dir) {
    const auto outcome = collect_experiment(spec, assets, out_dir);
    const ExperimentOutcome* ptrs[] = {&outcome};
    const auto ref = resolve_reference(spec.metrics, ptrs);

    ReportTable table;
    table.title = spec.name;
    table.columns = column_names(spec);
    table.rows = tabulate(outcome, ref, "");
    table.ref_point = ref;
    table.runs = spec.runs;
    for (const auto& r : outcome.runs) table.run_seeds.push_back(r.seed);

    if (!out_dir.empty()) {
        write_text(out_dir / "report.json", table.to_json());
        write_text(out_dir / "table.txt", table.to_text());
        write_fronts(outcome, out_dir / slugify(spec.row_label()));
    }
    return table;
}

ReportTable compare_modes(const ExperimentSpec& first, const ExperimentSpec& second,
                          std::shared_ptr<const AssetLibrary> assets, const fs::path& out_dir) {
    require(first.eval_contexts.size() == second.eval_contexts.size(), ErrorKind::Config,
            "compared experiments must share their eval contexts");
    for (std::size_t i = 0; i < first.eval_contexts.size(); ++i) {
        const auto& a = first.eval_contexts[i];
        const auto& b = second.eval_contexts[i];
        require(a.name == b.name && a.climate_id == b.climate_id && a.u_wall == b.u_wall, ErrorKind::Config,
                "eval context mismatch at column " + std::to_string(i) + " ('" + a.name + "' vs '" + b.name + "')");
    }
    require(first.row_label() != second.row_label(), ErrorKind::Config, "compared experiments need distinct labels");

    const auto a = collect_experiment(first, assets, out_dir);
    const auto b = collect_experiment(second, assets, out_dir);
    const ExperimentOutcome* ptrs[] = {&a, &b};
    const auto ref = resolve_reference(first.metrics, ptrs);

    const auto rows_a = tabulate(a, ref, first.row_label());
    const auto rows_b = tabulate(b, ref, second.row_label());

    ReportTable table;
    table.title = first.name + " vs " + second.name;
    for (const auto& c : first.eval_contexts) table.columns.push_back(c.name);
    for (int m = 0; m < 3; ++m) {
        table.rows.push_back(rows_a[m]);
        table.rows.push_back(rows_b[m]);
    }
    table.ref_point = ref;
    table.runs = first.runs;
    for (const auto& r : a.runs) table.run_seeds.push_back(r.seed);

    if (!out_dir.empty()) {
        write_text(out_dir / "report.json", table.to_json());
        write_text(out_dir / "table.txt", table.to_text());
        write_fronts(a, out_dir / slugify(first.row_label()));
        write_fronts(b, out_dir / slugify(second.row_label()));
    }
    return table;
}

std::vector<FrontPlotRow> collect_front_plot_data(const std::vector<fs::path>& result_dirs) {
    std::vector<FrontPlotRow> rows;
    for (const auto& dir : result_dirs) {
        require(fs::is_directory(dir), ErrorKind::Ingest, "result directory " + dir.string() + " does not exist");
        std::vector<fs::path> modes;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_directory() && fs::is_directory(e.path() / "fronts")) modes.push_back(e.path());
        }
        std::sort(modes.begin(), modes.end());
        for (const auto& mode_dir : modes) {
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(mode_dir / "fronts")) {
                if (e.path().extension() == ".csv") files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                std::ifstream in(f);
                const auto front = read_front_csv(in);
                for (std::size_t i = 0; i < front.size(); ++i) {
                    rows.push_back({mode_dir.filename().string(), f.stem().string(), front.policy_ids()[i],
                                    front.points()[i]});
                }
            }
        }
    }
    return rows;
}

void write_front_plot_csv(std::ostream& out, const std::vector<FrontPlotRow>& rows) {
    const std::size_t n = rows.empty() ? 2 : rows.front().returns.size();
    out << "mode,context,policy_id";
    if (n == 2) {
        out << ",g_thermal,g_cost";
    } else {
        for (std::size_t i = 0; i < n; ++i) out << ",g_" << (i + 1);
    }
    out << '\n';
    const auto old_precision = out.precision(17);
    for (const auto& r : rows) {
        out << r.mode << ',' << r.context << ',' << r.policy_id;
        for (double v : r.returns) out << ',' << v;
        out << '\n';
    }
    out.precision(old_precision);
}

std::vector<FrontPlotRow> read_front_plot_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorKind::Ingest, "plot data CSV is empty");
    require(line.rfind("mode,context,policy_id", 0) == 0, ErrorKind::Ingest, "plot data CSV: unexpected header");
    std::vector<FrontPlotRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        require(cells.size() >= 4, ErrorKind::Ingest, "plot data CSV: line " + std::to_string(line_no) + ": too few fields");
        FrontPlotRow r;
        r.mode = cells[0];
        r.context = cells[1];
        try {
            r.policy_id = std::stoll(cells[2]);
            for (std::size_t i = 3; i < cells.size(); ++i) r.returns.push_back(std::stod(cells[i]));
        } catch (const std::exception&) {
            throw Error(ErrorKind::Ingest, "plot data CSV: line " + std::to_string(line_no) + ": non-numeric field");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace bemorl
