// Python extension: episodic environment handle with vector rewards.

#include "bemorl/assets.hpp"
#include "bemorl/env.hpp"
#include "bemorl/error.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <array>
#include <cctype>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace bemorl;

namespace {

constexpr std::array<ErrorKind, 6> kKinds = {ErrorKind::Config,    ErrorKind::Stability, ErrorKind::Ingest,
                                             ErrorKind::Asset,     ErrorKind::Lifecycle, ErrorKind::Validation};
std::array<PyObject*, 6> kind_types{};
PyObject* base_type = nullptr;

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw Error(ErrorKind::Validation, "action must be one-dimensional");
    return {a.data(), a.data() + a.size()};
}

struct Setup {
    EnvConfig config;
    ContextSpec context;
    std::shared_ptr<const AssetLibrary> assets;
};

Setup load_setup(const fs::path& config_path, const fs::path& context_path, const std::optional<fs::path>& assets) {
    Setup s;
    s.config = parse_env_config(read_text_file(config_path));
    s.context = parse_context(read_text_file(context_path));
    if (s.context.layout_id.empty()) s.context.layout_id = "two_zone";
    s.assets = std::make_shared<const AssetLibrary>(AssetLibrary::load(assets ? *assets : default_asset_root()));
    // Resolve ids now so a bad context fails at construction.
    s.assets->layout(s.context.layout_id);
    s.assets->weather(s.context.climate_id);
    return s;
}

class EnvHandle {
public:
    EnvHandle(const fs::path& config_path, const fs::path& context_path, std::uint64_t seed,
              const std::optional<fs::path>& assets)
        : setup_(load_setup(config_path, context_path, assets)), seed_(seed) {
        env_.emplace(setup_.config, setup_.assets, setup_.context.layout_id);
        env_->set_logging(false);
        obs_dim_ = env_->obs_dim();
        action_dim_ = env_->action_dim();
        n_objectives_ = env_->num_objectives();
    }

    py::array_t<double> reset(std::optional<std::uint64_t> seed) {
        return to_array(live().reset(setup_.context, seed.value_or(seed_)).to_vector());
    }

    py::tuple step(const py::array_t<double, py::array::c_style | py::array::forcecast>& action) {
        auto& env = live();
        const auto r = env.step(from_array(action));
        py::dict info;
        info["time_step"] = env.time_step();
        info["context"] = setup_.context.name;
        return py::make_tuple(to_array(r.observation.to_vector()), to_array(r.reward), r.done, info);
    }

    void close() { env_.reset(); }
    bool closed() const { return !env_.has_value(); }

    std::size_t obs_dim() const { return obs_dim_; }
    std::size_t action_dim() const { return action_dim_; }
    std::size_t n_objectives() const { return n_objectives_; }
    std::vector<std::string> field_names() const { return Observation::field_names(action_dim_); }

private:
    BuildingEnv& live() {
        if (!env_) throw Error(ErrorKind::Lifecycle, "environment handle is closed");
        return *env_;
    }

    Setup setup_;
    std::uint64_t seed_;
    std::optional<BuildingEnv> env_;
    std::size_t obs_dim_ = 0;
    std::size_t action_dim_ = 0;
    std::size_t n_objectives_ = 0;
};

// Reference rollout that never crosses the language boundary per step.
py::dict native_rollout(const fs::path& config_path, const fs::path& context_path, std::uint64_t seed,
                        const std::vector<std::vector<double>>& actions, const std::optional<fs::path>& assets) {
    const auto s = load_setup(config_path, context_path, assets);
    BuildingEnv env(s.config, s.assets, s.context.layout_id);
    env.set_logging(false);
    std::vector<std::vector<double>> observations{env.reset(s.context, seed).to_vector()};
    std::vector<std::vector<double>> rewards;
    std::vector<bool> dones;
    for (const auto& a : actions) {
        if (env.done()) observations.back() = env.reset(s.context, seed).to_vector();
        const auto r = env.step(a);
        observations.push_back(r.observation.to_vector());
        rewards.push_back(r.reward);
        dones.push_back(r.done);
    }
    py::dict out;
    out["observations"] = observations;
    out["rewards"] = rewards;
    out["dones"] = dones;
    return out;
}

} // namespace

PYBIND11_MODULE(_bemorl, m) {
    m.doc() = "Native core of the multi-objective building control environment";

    static py::exception<Error> base(m, "BemorlError");
    base_type = base.ptr();
    for (std::size_t k = 0; k < kKinds.size(); ++k) {
        std::string name = to_string(kKinds[k]);
        name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
        name += "Error";
        const std::string qualified = "bemorl._bemorl." + name;
        kind_types[k] = PyErr_NewException(qualified.c_str(), base_type, nullptr);
        m.add_object(name.c_str(), py::handle(kind_types[k]));
    }
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            for (std::size_t k = 0; k < kKinds.size(); ++k) {
                if (kKinds[k] == e.kind()) {
                    PyErr_SetString(kind_types[k], e.what());
                    return;
                }
            }
            PyErr_SetString(base_type, e.what());
        }
    });

    py::class_<EnvHandle>(m, "EnvHandle")
        .def("reset", &EnvHandle::reset, py::arg("seed") = py::none())
        .def("step", &EnvHandle::step, py::arg("action"))
        .def("close", &EnvHandle::close)
        .def_property_readonly("closed", &EnvHandle::closed)
        .def_property_readonly("obs_dim", &EnvHandle::obs_dim)
        .def_property_readonly("action_dim", &EnvHandle::action_dim)
        .def_property_readonly("n_objectives", &EnvHandle::n_objectives)
        .def_property_readonly("field_names", &EnvHandle::field_names);

    m.def(
        "make_env",
        [](const fs::path& config_path, const fs::path& context_path, std::uint64_t seed,
           const std::optional<fs::path>& assets) {
            return std::make_unique<EnvHandle>(config_path, context_path, seed, assets);
        },
        py::arg("config_path"), py::arg("context_path"), py::arg("seed") = 0, py::arg("assets") = py::none());

    m.def("native_rollout", &native_rollout, py::arg("config_path"), py::arg("context_path"), py::arg("seed"),
          py::arg("actions"), py::arg("assets") = py::none());

    m.def(
        "reward_thermal",
        [](const std::vector<double>& temps, const std::vector<double>& setpoints) {
            return reward_thermal(temps, setpoints);
        },
        py::arg("temps"), py::arg("setpoints"));
    m.def(
        "reward_cost",
        [](const std::vector<double>& powers_kw, double price, double price_factor) {
            return reward_cost(powers_kw, price, price_factor);
        },
        py::arg("powers_kw"), py::arg("price"), py::arg("price_factor") = 0.05);
    m.def(
        "scalarize",
        [](const std::vector<double>& omega, const std::vector<double>& reward) { return scalarize(omega, reward); },
        py::arg("omega"), py::arg("reward"));
}
