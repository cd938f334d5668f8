#include "bemorl/morl.hpp"

#include "bemorl/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

namespace bemorl {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(master) ^ a) ^ b);
}

std::vector<double> ObsNormalizer::apply(std::span<const double> obs) const {
    require(obs.size() == lo.size() && obs.size() == hi.size(), ErrorKind::Config,
            "observation length does not match the normalizer");
    std::vector<double> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const double range = hi[i] - lo[i];
        out[i] = range > 0.0 ? 2.0 * (obs[i] - lo[i]) / range - 1.0 : 0.0;
    }
    return out;
}

const char* to_string(PolicyOrigin origin) {
    switch (origin) {
    case PolicyOrigin::Random: return "random";
    case PolicyOrigin::Init: return "init";
    case PolicyOrigin::Extension: return "extension";
    }
    return "unknown";
}

PolicyOrigin policy_origin_from_string(const std::string& s) {
    if (s == "random") return PolicyOrigin::Random;
    if (s == "init") return PolicyOrigin::Init;
    if (s == "extension") return PolicyOrigin::Extension;
    throw Error(ErrorKind::Ingest, "unknown policy origin '" + s + "'");
}

std::size_t policy_param_count(std::size_t num_zones) { return num_zones * (4 * num_zones + 4) + num_zones; }

AffineController::AffineController(std::span<const double> theta, const ObsNormalizer& normalizer,
                                   std::size_t num_zones)
    : theta_(theta), normalizer_(&normalizer), num_zones_(num_zones), obs_dim_(4 * num_zones + 4) {
    require(theta.size() == policy_param_count(num_zones), ErrorKind::Config,
            "policy has " + std::to_string(theta.size()) + " parameters, expected " +
                std::to_string(policy_param_count(num_zones)));
}

std::vector<double> AffineController::act(std::span<const double> obs) const {
    const auto x = normalizer_->apply(obs);
    std::vector<double> a(num_zones_);
    const double* bias = theta_.data() + num_zones_ * obs_dim_;
    for (std::size_t i = 0; i < num_zones_; ++i) {
        const double* row = theta_.data() + i * obs_dim_;
        double v = bias[i];
        for (std::size_t j = 0; j < obs_dim_; ++j) v += row[j] * x[j];
        a[i] = std::clamp(v, -1.0, 1.0);
    }
    return a;
}

ReturnVector evaluate_policy(std::span<const double> theta, const ObsNormalizer& normalizer, BuildingEnv& env,
                             const EvalProtocol& protocol) {
    require(!protocol.contexts.empty() && !protocol.seeds.empty() && protocol.episodes >= 1, ErrorKind::Config,
            "evaluation protocol needs contexts, seeds and at least one episode");
    const AffineController controller(theta, normalizer, env.num_zones());
    env.set_logging(false);
    ReturnVector total(env.num_objectives(), 0.0);
    std::size_t count = 0;
    std::vector<RewardVector> rewards;
    for (const auto& context : protocol.contexts) {
        for (const auto seed : protocol.seeds) {
            for (int e = 0; e < protocol.episodes; ++e) {
                auto obs = env.reset(context, seed).to_vector();
                rewards.clear();
                bool done = false;
                while (!done) {
                    auto result = env.step(controller.act(obs));
                    obs = result.observation.to_vector();
                    rewards.push_back(std::move(result.reward));
                    done = result.done;
                }
                const auto g = episode_return(rewards, protocol.gamma);
                for (std::size_t i = 0; i < total.size(); ++i) total[i] += g[i];
                ++count;
            }
        }
    }
    env.set_logging(true);
    for (auto& v : total) v /= static_cast<double>(count);
    return total;
}

ReturnVector evaluate_policy(const Policy& policy, const ObsNormalizer& normalizer, BuildingEnv& env,
                             const EvalProtocol& protocol) {
    return evaluate_policy(policy.theta, normalizer, env, protocol);
}

ObsNormalizer fit_normalizer(BuildingEnv& env, std::span<const ContextSpec> contexts, std::uint64_t seed,
                             int episodes) {
    require(!contexts.empty() && episodes >= 1, ErrorKind::Config, "normalizer needs contexts and episodes");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    ObsNormalizer n;
    n.lo.assign(env.obs_dim(), std::numeric_limits<double>::infinity());
    n.hi.assign(env.obs_dim(), -std::numeric_limits<double>::infinity());
    auto record = [&](const std::vector<double>& obs) {
        for (std::size_t i = 0; i < obs.size(); ++i) {
            n.lo[i] = std::min(n.lo[i], obs[i]);
            n.hi[i] = std::max(n.hi[i], obs[i]);
        }
    };
    env.set_logging(false);
    std::vector<double> action(env.action_dim());
    for (int e = 0; e < episodes; ++e) {
        const auto& context = contexts[static_cast<std::size_t>(e) % contexts.size()];
        record(env.reset(context, rng()).to_vector());
        bool done = false;
        while (!done) {
            for (auto& a : action) a = unit(rng);
            const auto result = env.step(action);
            record(result.observation.to_vector());
            done = result.done;
        }
    }
    env.set_logging(true);
    return n;
}

std::int64_t PolicyBuffer::append(Policy policy, ReturnVector returns) {
    policy.id = next_id++;
    entries.push_back({std::move(policy), std::move(returns)});
    return entries.back().policy.id;
}

const BufferEntry& PolicyBuffer::entry(std::int64_t id) const {
    for (const auto& e : entries) {
        if (e.policy.id == id) return e;
    }
    throw Error(ErrorKind::Validation, "policy id " + std::to_string(id) + " not in buffer");
}

std::vector<ReturnVector> PolicyBuffer::all_returns() const {
    std::vector<ReturnVector> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.returns);
    return out;
}

ParetoFront PolicyBuffer::front() const {
    require(!entries.empty(), ErrorKind::Validation, "policy buffer is empty");
    std::vector<std::int64_t> ids;
    for (const auto& e : entries) ids.push_back(e.policy.id);
    return pareto_filter(all_returns(), ids);
}

void TrainerConfig::validate(std::size_t num_objectives) const {
    require(!init_weights.empty(), ErrorKind::Config, "trainer needs at least one initialization preference");
    for (const auto& w : init_weights) {
        require(w.size() == num_objectives, ErrorKind::Config, "initialization preference has the wrong length");
        validate_preference(w);
    }
    require(cem.population >= 4, ErrorKind::Config, "CEM population must be at least 4");
    require(cem.elite_fraction > 0.0 && cem.elite_fraction < 1.0, ErrorKind::Config,
            "elite fraction must lie in (0, 1)");
    require(cem.iterations >= 1, ErrorKind::Config, "CEM needs at least one iteration");
    require(cem.init_sigma > 0.0 && cem.min_sigma >= 0.0 && cem.extension_sigma > 0.0, ErrorKind::Config,
            "CEM noise levels must be positive");
    require(beta > 0.0 && beta < 1.0, ErrorKind::Config, "beta must lie in (0, 1)");
    require(extension_rounds >= 0, ErrorKind::Config, "extension_rounds must be non-negative");
    require(select_k >= 1, ErrorKind::Config, "select_k must be at least 1");
    require(!eval_seeds.empty() && eval_episodes >= 1 && train_contexts >= 1, ErrorKind::Config,
            "evaluation needs seeds, episodes and contexts");
    require(normalizer_episodes >= 1, ErrorKind::Config, "normalizer_episodes must be at least 1");
    require(penalty_init > 0.0, ErrorKind::Config, "penalty_init must be positive");
    require(!gamma || (*gamma > 0.0 && *gamma <= 1.0), ErrorKind::Config, "gamma must lie in (0, 1]");
    require(threads >= 1, ErrorKind::Config, "threads must be at least 1");
}

TrainerConfig parse_trainer_config(const std::string& json_text) {
    TrainerConfig c;
    try {
        const auto j = nlohmann::json::parse(json_text);
        if (j.contains("init_weights")) c.init_weights = j["init_weights"].get<std::vector<std::vector<double>>>();
        if (j.contains("cem")) {
            const auto& m = j["cem"];
            c.cem.population = m.value("population", c.cem.population);
            c.cem.elite_fraction = m.value("elite_fraction", c.cem.elite_fraction);
            c.cem.iterations = m.value("iterations", c.cem.iterations);
            c.cem.init_sigma = m.value("init_sigma", c.cem.init_sigma);
            c.cem.min_sigma = m.value("min_sigma", c.cem.min_sigma);
            c.cem.extension_sigma = m.value("extension_sigma", c.cem.extension_sigma);
        }
        c.beta = j.value("beta", c.beta);
        c.extension_rounds = j.value("extension_rounds", c.extension_rounds);
        c.select_k = j.value("select_k", c.select_k);
        if (j.contains("eval_seeds")) c.eval_seeds = j["eval_seeds"].get<std::vector<std::uint64_t>>();
        c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
        c.train_contexts = j.value("train_contexts", c.train_contexts);
        c.normalizer_episodes = j.value("normalizer_episodes", c.normalizer_episodes);
        c.penalty_init = j.value("penalty_init", c.penalty_init);
        if (j.contains("gamma") && !j["gamma"].is_null()) c.gamma = j["gamma"].get<double>();
        c.threads = j.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Config, std::string("trainer config error: ") + e.what());
    }
    return c;
}

std::string dump_trainer_config(const TrainerConfig& c) {
    nlohmann::json j{{"init_weights", c.init_weights},
                     {"cem",
                      {{"population", c.cem.population},
                       {"elite_fraction", c.cem.elite_fraction},
                       {"iterations", c.cem.iterations},
                       {"init_sigma", c.cem.init_sigma},
                       {"min_sigma", c.cem.min_sigma},
                       {"extension_sigma", c.cem.extension_sigma}}},
                     {"beta", c.beta},
                     {"extension_rounds", c.extension_rounds},
                     {"select_k", c.select_k},
                     {"eval_seeds", c.eval_seeds},
                     {"eval_episodes", c.eval_episodes},
                     {"train_contexts", c.train_contexts},
                     {"normalizer_episodes", c.normalizer_episodes},
                     {"penalty_init", c.penalty_init},
                     {"threads", c.threads}};
    j["gamma"] = c.gamma ? nlohmann::json(*c.gamma) : nlohmann::json(nullptr);
    return j.dump(2);
}

std::vector<std::vector<double>> sample_random_thetas(std::size_t count, std::size_t num_zones, double sigma,
                                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<std::vector<double>> out(count, std::vector<double>(policy_param_count(num_zones)));
    for (auto& theta : out) {
        for (auto& v : theta) v = normal(rng);
    }
    return out;
}

namespace {

// Stage tags for derive_seed.
enum : std::uint64_t {
    kTagCanonical = 1,
    kTagNormalizer = 2,
    kTagInitCem = 3,
    kTagInitContexts = 4,
    kTagExtCem = 5,
    kTagExtContexts = 6,
};

std::vector<ReturnVector> evaluate_batch(const std::vector<std::vector<double>>& thetas,
                                         const ObsNormalizer& normalizer, const EnvFactory& factory,
                                         const EvalProtocol& protocol, unsigned threads) {
    std::vector<ReturnVector> out(thetas.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(thetas.size())));
    if (workers == 1) {
        auto env = factory();
        for (std::size_t i = 0; i < thetas.size(); ++i) out[i] = evaluate_policy(thetas[i], normalizer, env, protocol);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                auto env = factory();
                for (std::size_t i = w; i < thetas.size(); i += workers) {
                    out[i] = evaluate_policy(thetas[i], normalizer, env, protocol);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

bool all_finite(const ReturnVector& g) {
    return std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); });
}

/// Diagonal-Gaussian cross-entropy method.
class Cem {
public:
    Cem(std::vector<double> mean, double sigma, const CemSettings& settings, std::uint64_t seed)
        : mean_(std::move(mean)), sigma_(mean_.size(), sigma), settings_(settings), rng_(seed) {}

    std::vector<std::vector<double>> ask() {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<std::vector<double>> pop(static_cast<std::size_t>(settings_.population), mean_);
        for (auto& theta : pop) {
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += sigma_[i] * normal(rng_);
        }
        return pop;
    }

    /// Indices of the elites, best first; refits the sampling distribution.
    std::vector<std::size_t> tell(const std::vector<std::vector<double>>& pop, const std::vector<double>& fitness) {
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
        const auto n_elite = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(settings_.elite_fraction * static_cast<double>(pop.size()))));
        order.resize(std::min(n_elite, order.size()));

        for (std::size_t i = 0; i < mean_.size(); ++i) {
            double m = 0.0;
            for (auto e : order) m += pop[e][i];
            m /= static_cast<double>(order.size());
            double var = 0.0;
            for (auto e : order) var += (pop[e][i] - m) * (pop[e][i] - m);
            var /= static_cast<double>(order.size());
            mean_[i] = m;
            sigma_[i] = std::max(std::sqrt(var), settings_.min_sigma);
        }
        return order;
    }

private:
    std::vector<double> mean_;
    std::vector<double> sigma_;
    CemSettings settings_;
    std::mt19937_64 rng_;
};

double resolve_gamma(const TrainerConfig& config, const BuildingEnv& env) {
    return config.gamma.value_or(env.config().gamma);
}

EvalProtocol draw_protocol(ContextSampler& sampler, const TrainerConfig& config, double gamma) {
    EvalProtocol p;
    for (int i = 0; i < config.train_contexts; ++i) p.contexts.push_back(sampler.next());
    p.seeds = config.eval_seeds;
    p.episodes = config.eval_episodes;
    p.gamma = gamma;
    return p;
}

bool satisfies_constraints(const ReturnVector& g, const ReturnVector& parent, std::size_t target, double beta) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i == target) continue;
        const double eps = 1e-6 * std::abs(parent[i]);
        if (g[i] < beta * parent[i] - eps) return false;
    }
    return true;
}

} // namespace

EvalProtocol canonical_protocol(const TrainerConfig& config, const TrainingSetup& setup, double gamma,
                                std::uint64_t master_seed) {
    ContextSampler sampler(setup.mode, setup.base, derive_seed(master_seed, kTagCanonical), setup.bounds,
                           setup.climates);
    return draw_protocol(sampler, config, gamma);
}

PolicyBuffer pareto_initialization(const TrainerConfig& config, const EnvFactory& factory, const TrainingSetup& setup,
                                   std::uint64_t master_seed) {
    auto env = factory();
    config.validate(env.num_objectives());
    const double gamma = resolve_gamma(config, env);

    PolicyBuffer buffer;
    buffer.protocol = canonical_protocol(config, setup, gamma, master_seed);
    buffer.normalizer = fit_normalizer(env, buffer.protocol.contexts, derive_seed(master_seed, kTagNormalizer),
                                       config.normalizer_episodes);
    const bool canonical_fitness = setup.mode == TrainMode::Static;

    for (std::size_t w = 0; w < config.init_weights.size(); ++w) {
        const auto& omega = config.init_weights[w];
        const std::uint64_t cem_seed = derive_seed(master_seed, kTagInitCem, w);
        ContextSampler sampler(setup.mode, setup.base, derive_seed(master_seed, kTagInitContexts, w), setup.bounds,
                               setup.climates);

        auto theta0 = sample_random_thetas(1, env.num_zones(), config.cem.init_sigma, cem_seed).front();
        const auto g0 = evaluate_policy(theta0, buffer.normalizer, env, buffer.protocol);
        if (!all_finite(g0)) {
            buffer.reports.push_back("init omega " + std::to_string(w) + ": initial policy returned non-finite values");
            continue;
        }
        Policy start;
        start.theta = theta0;
        start.origin = PolicyOrigin::Init;
        start.train_weights = omega;
        std::int64_t best_id = buffer.append(start, g0);
        double best_score = scalarize(omega, g0);

        Cem cem(theta0, config.cem.init_sigma, config.cem, derive_seed(cem_seed, 1));
        bool diverged = false;
        for (int it = 0; it < config.cem.iterations && !diverged; ++it) {
            const auto protocol = canonical_fitness ? buffer.protocol : draw_protocol(sampler, config, gamma);
            const auto pop = cem.ask();
            const auto returns = evaluate_batch(pop, buffer.normalizer, factory, protocol, config.threads);
            std::vector<double> fitness(pop.size());
            for (std::size_t i = 0; i < pop.size(); ++i) {
                if (!all_finite(returns[i])) {
                    diverged = true;
                    break;
                }
                fitness[i] = scalarize(omega, returns[i]);
            }
            if (diverged) {
                buffer.reports.push_back("init omega " + std::to_string(w) + ": non-finite returns at iteration " +
                                         std::to_string(it) + ", run aborted");
                break;
            }
            const auto elites = cem.tell(pop, fitness);
            for (auto e : elites) {
                const auto g = canonical_fitness ? returns[e] : evaluate_policy(pop[e], buffer.normalizer, env, buffer.protocol);
                Policy p;
                p.theta = pop[e];
                p.origin = PolicyOrigin::Init;
                p.train_weights = omega;
                const auto id = buffer.append(std::move(p), g);
                const double score = scalarize(omega, g);
                if (score > best_score) {
                    best_score = score;
                    best_id = id;
                }
            }
        }
        for (auto& e : buffer.entries) {
            if (e.policy.id == best_id) e.policy.stage_final = true;
        }
    }
    buffer.init_done = true;
    return buffer;
}

std::vector<double> crowding_distance(const std::vector<ReturnVector>& points) {
    const std::size_t n = points.size();
    std::vector<double> dist(n, 0.0);
    if (n == 0) return dist;
    const std::size_t m = points.front().size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < m; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return points[a][k] < points[b][k]; });
        const double lo = points[order.front()][k];
        const double hi = points[order.back()][k];
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (hi <= lo) continue;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            dist[order[i]] += (points[order[i + 1]][k] - points[order[i - 1]][k]) / (hi - lo);
        }
    }
    return dist;
}

std::vector<BufferEntry> select_policies(const PolicyBuffer& buffer, std::size_t k) {
    const auto front = buffer.front();
    std::vector<std::size_t> chosen(front.size());
    std::iota(chosen.begin(), chosen.end(), 0);
    if (front.size() > k) {
        const auto cd = crowding_distance(front.points());
        std::stable_sort(chosen.begin(), chosen.end(), [&](std::size_t a, std::size_t b) {
            if (cd[a] != cd[b]) return cd[a] > cd[b];
            return front.policy_ids()[a] < front.policy_ids()[b];
        });
        chosen.resize(k);
        std::sort(chosen.begin(), chosen.end());
    }
    std::vector<BufferEntry> out;
    for (auto i : chosen) out.push_back(buffer.entry(front.policy_ids()[i]));
    return out;
}

void pareto_extension(PolicyBuffer& buffer, std::span<const BufferEntry> selected, const TrainerConfig& config,
                      const EnvFactory& factory, const TrainingSetup& setup, std::uint64_t master_seed, int round) {
    require(!selected.empty(), ErrorKind::Validation, "extension needs at least one selected policy");
    auto env = factory();
    config.validate(env.num_objectives());
    const double gamma = buffer.protocol.gamma;
    const bool canonical_fitness = setup.mode == TrainMode::Static;
    const std::size_t n_obj = env.num_objectives();

    for (const auto& parent : selected) {
        const auto& g_parent = parent.returns;
        for (std::size_t l = 0; l < n_obj; ++l) {
            const std::uint64_t tag = static_cast<std::uint64_t>(parent.policy.id) * 64 + l;
            const std::uint64_t round_seed = derive_seed(master_seed, kTagExtCem, static_cast<std::uint64_t>(round));
            ContextSampler sampler(setup.mode, setup.base,
                                   derive_seed(derive_seed(master_seed, kTagExtContexts, round), tag), setup.bounds,
                                   setup.climates);
            Cem cem(parent.policy.theta, config.cem.extension_sigma, config.cem, derive_seed(round_seed, tag));

            double lambda = config.penalty_init;
            std::int64_t best_id = -1;
            double best_target = -std::numeric_limits<double>::infinity();
            bool diverged = false;
            for (int it = 0; it < config.cem.iterations && !diverged; ++it) {
                const auto protocol = canonical_fitness ? buffer.protocol : draw_protocol(sampler, config, gamma);
                const auto pop = cem.ask();
                const auto returns = evaluate_batch(pop, buffer.normalizer, factory, protocol, config.threads);
                std::vector<double> fitness(pop.size());
                for (std::size_t i = 0; i < pop.size() && !diverged; ++i) {
                    if (!all_finite(returns[i])) {
                        diverged = true;
                        break;
                    }
                    double penalty = 0.0;
                    for (std::size_t c = 0; c < n_obj; ++c) {
                        if (c == l) continue;
                        const double shortfall = std::max(0.0, config.beta * g_parent[c] - returns[i][c]);
                        penalty += shortfall * shortfall;
                    }
                    fitness[i] = returns[i][l] - lambda * penalty;
                }
                if (diverged) {
                    buffer.reports.push_back("extension of policy " + std::to_string(parent.policy.id) +
                                             " objective " + std::to_string(l) + ": non-finite returns, aborted");
                    break;
                }
                const auto elites = cem.tell(pop, fitness);
                for (auto e : elites) {
                    const auto g = canonical_fitness ? returns[e]
                                                     : evaluate_policy(pop[e], buffer.normalizer, env, buffer.protocol);
                    if (!satisfies_constraints(g, g_parent, l, config.beta)) continue;
                    Policy p;
                    p.theta = pop[e];
                    p.origin = PolicyOrigin::Extension;
                    p.target_objective = static_cast<int>(l);
                    p.parent_id = parent.policy.id;
                    const auto id = buffer.append(std::move(p), g);
                    if (g[l] > best_target) {
                        best_target = g[l];
                        best_id = id;
                    }
                }
                if (!satisfies_constraints(returns[elites.front()], g_parent, l, config.beta)) lambda *= 2.0;
            }
            if (best_id < 0) {
                buffer.reports.push_back("extension of policy " + std::to_string(parent.policy.id) + " objective " +
                                         std::to_string(l) + ": constraints never satisfied, discarded");
                continue;
            }
            for (auto& e : buffer.entries) {
                if (e.policy.id == best_id) e.policy.stage_final = true;
            }
        }
    }
}

TrainResult train(const TrainerConfig& config, const EnvFactory& factory, const TrainingSetup& setup,
                  std::uint64_t master_seed, std::optional<PolicyBuffer> resume) {
    TrainResult result;
    if (resume && resume->init_done) {
        result.buffer = std::move(*resume);
    } else {
        result.buffer = pareto_initialization(config, factory, setup, master_seed);
    }
    auto& buffer = result.buffer;
    require(!buffer.entries.empty(), ErrorKind::Validation, "initialization produced no policies");

    std::vector<ReturnVector> init_points;
    std::vector<std::int64_t> init_ids;
    for (const auto& e : buffer.entries) {
        if (e.policy.origin != PolicyOrigin::Extension) {
            init_points.push_back(e.returns);
            init_ids.push_back(e.policy.id);
        }
    }
    result.init_front = pareto_filter(init_points, init_ids);

    for (int round = buffer.extension_rounds_done; round < config.extension_rounds; ++round) {
        const auto selected = select_policies(buffer, config.select_k);
        pareto_extension(buffer, selected, config, factory, setup, master_seed, round);
        buffer.extension_rounds_done = round + 1;
    }
    result.front = buffer.front();
    return result;
}

namespace {

nlohmann::json context_to_json(const ContextSpec& c) {
    std::vector<double> u(c.u_wall.values.begin(), c.u_wall.values.end());
    return {{"name", c.name}, {"layout", c.layout_id}, {"climate", c.climate_id}, {"u_wall", u}};
}

ContextSpec context_from_json(const nlohmann::json& j) {
    ContextSpec c;
    c.name = j.at("name").get<std::string>();
    c.layout_id = j.at("layout").get<std::string>();
    c.climate_id = j.at("climate").get<std::string>();
    const auto u = j.at("u_wall").get<std::vector<double>>();
    require(u.size() == kNumWallKinds, ErrorKind::Ingest, "checkpoint context has the wrong U-wall length");
    std::copy(u.begin(), u.end(), c.u_wall.values.begin());
    return c;
}

} // namespace

std::string checkpoint_json(const PolicyBuffer& b) {
    nlohmann::json contexts = nlohmann::json::array();
    for (const auto& c : b.protocol.contexts) contexts.push_back(context_to_json(c));
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : b.entries) {
        const auto& p = e.policy;
        entries.push_back({{"id", p.id},
                           {"origin", to_string(p.origin)},
                           {"train_weights", p.train_weights},
                           {"target_objective", p.target_objective},
                           {"parent_id", p.parent_id},
                           {"stage_final", p.stage_final},
                           {"returns", e.returns},
                           {"theta", p.theta}});
    }
    nlohmann::json j{{"format", "bemorl-checkpoint"},
                     {"version", 1},
                     {"init_done", b.init_done},
                     {"extension_rounds_done", b.extension_rounds_done},
                     {"next_id", b.next_id},
                     {"normalizer", {{"lo", b.normalizer.lo}, {"hi", b.normalizer.hi}}},
                     {"protocol",
                      {{"contexts", contexts},
                       {"seeds", b.protocol.seeds},
                       {"episodes", b.protocol.episodes},
                       {"gamma", b.protocol.gamma}}},
                     {"reports", b.reports},
                     {"entries", entries}};
    return j.dump(1);
}

PolicyBuffer parse_checkpoint(const std::string& text) {
    PolicyBuffer b;
    try {
        const auto j = nlohmann::json::parse(text);
        require(j.value("format", std::string()) == "bemorl-checkpoint", ErrorKind::Ingest,
                "not a policy buffer checkpoint");
        require(j.value("version", 0) == 1, ErrorKind::Ingest, "unsupported checkpoint version");
        b.init_done = j.at("init_done").get<bool>();
        b.extension_rounds_done = j.at("extension_rounds_done").get<int>();
        b.next_id = j.at("next_id").get<std::int64_t>();
        b.normalizer.lo = j.at("normalizer").at("lo").get<std::vector<double>>();
        b.normalizer.hi = j.at("normalizer").at("hi").get<std::vector<double>>();
        const auto& p = j.at("protocol");
        for (const auto& c : p.at("contexts")) b.protocol.contexts.push_back(context_from_json(c));
        b.protocol.seeds = p.at("seeds").get<std::vector<std::uint64_t>>();
        b.protocol.episodes = p.at("episodes").get<int>();
        b.protocol.gamma = p.at("gamma").get<double>();
        b.reports = j.value("reports", std::vector<std::string>{});
        for (const auto& e : j.at("entries")) {
            BufferEntry entry;
            entry.policy.id = e.at("id").get<std::int64_t>();
            entry.policy.origin = policy_origin_from_string(e.at("origin").get<std::string>());
            entry.policy.train_weights = e.at("train_weights").get<std::vector<double>>();
            entry.policy.target_objective = e.at("target_objective").get<int>();
            entry.policy.parent_id = e.at("parent_id").get<std::int64_t>();
            entry.policy.stage_final = e.at("stage_final").get<bool>();
            entry.policy.theta = e.at("theta").get<std::vector<double>>();
            entry.returns = e.at("returns").get<std::vector<double>>();
            b.entries.push_back(std::move(entry));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Ingest, std::string("checkpoint parse error: ") + e.what());
    }
    return b;
}

} // namespace bemorl
