#include "snd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "snd/kernels.hpp"

namespace snd::sim {

namespace {

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : value) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

long parse_long(const std::string& s) {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

// "a,b,c" or "start:step:end" (end inclusive within half a step)
std::vector<double> parse_grid(const std::string& value) {
    if (value.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : value) {
            if (c == ':') {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        if (parts.size() != 3) throw std::invalid_argument("grid range needs start:step:end");
        const double start = parse_double(parts[0]);
        const double step = parse_double(parts[1]);
        const double end = parse_double(parts[2]);
        if (step <= 0.0) throw std::invalid_argument("grid step must be positive");
        std::vector<double> out;
        for (double v = start; v <= end + step * 0.5; v += step) out.push_back(v);
        return out;
    }
    std::vector<double> out;
    for (const auto& tok : split_list(value)) out.push_back(parse_double(tok));
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
    if (v == "off" || v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("bad boolean: " + v);
}

std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::uint64_t key_of(double v) {
    return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(v * 1e6)));
}

}  // namespace

double ExperimentConfig::bernoulli_probability() const {
    return bernoulli_p > 0.0 ? bernoulli_p : 1.0 - std::exp2(-n_bc);
}

void ExperimentConfig::validate() const {
    if (snr_db.empty()) throw std::invalid_argument("snr_db grid is empty");
    if (g_grid.empty()) throw std::invalid_argument("g_grid is empty");
    for (double g : g_grid)
        if (g <= 0.0) throw std::invalid_argument("loads must be positive");
    if (slots_per_frame < 1) throw std::invalid_argument("slots_per_frame must be >= 1");
    if (n_bc < 1 || n_bc > 16) throw std::invalid_argument("n_bc must be in [1,16]");
    if (repetitions < 1 || repetitions > slots_per_frame)
        throw std::invalid_argument("repetitions must be in [1, slots_per_frame]");
    if (bernoulli_p > 1.0) throw std::invalid_argument("bernoulli_p must be in (0,1]");
    if (k_max < 1 || k_max > 10) throw std::invalid_argument("k_max must be in [1,10]");
    if (strategies.empty()) throw std::invalid_argument("no strategies selected");
    for (const auto& s : strategies)
        if (s != "aloha" && !phydec::strategy_from_name(s))
            throw std::invalid_argument("unknown strategy: " + s);
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (population < 1) throw std::invalid_argument("population must be >= 1");
    if (max_bp_iters < 1) throw std::invalid_argument("max_bp_iters must be >= 1");
    if (collision_sizes.empty()) throw std::invalid_argument("collision_sizes is empty");
    for (int k : collision_sizes)
        if (k < 1 || k > 10) throw std::invalid_argument("collision sizes must be in [1,10]");
    if (bound_trials < 1) throw std::invalid_argument("bound_trials must be >= 1");
    if (code_source == "default" && (code_length <= 0 || code_length % 24 != 0))
        throw std::invalid_argument("default code length must be a positive multiple of 24");
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    std::map<std::string, std::string> m;
    std::vector<std::string> tmp;
    for (double v : snr_db) tmp.push_back(fmt(v));
    m["snr_db"] = join(tmp, ",");
    tmp.clear();
    for (double v : g_grid) tmp.push_back(fmt(v));
    m["g_grid"] = join(tmp, ",");
    m["slots_per_frame"] = std::to_string(slots_per_frame);
    m["n_bc"] = std::to_string(n_bc);
    m["policy"] = policy == frame::Policy::fixed ? "fixed" : "bernoulli";
    m["repetitions"] = std::to_string(repetitions);
    m["bernoulli_p"] = fmt(bernoulli_probability());
    m["k_max"] = std::to_string(k_max);
    m["strategies"] = join(strategies, ",");
    m["code"] = code_source;
    m["code_length"] = std::to_string(code_length);
    m["code_seed"] = std::to_string(code_seed);
    m["trials"] = std::to_string(trials);
    m["seed"] = std::to_string(seed);
    m["out"] = out;
    m["population"] = std::to_string(population);
    m["refinement"] = refinement ? "on" : "off";
    m["max_bp_iters"] = std::to_string(max_bp_iters);
    tmp.clear();
    for (int v : collision_sizes) tmp.push_back(std::to_string(v));
    m["collision_sizes"] = join(tmp, ",");
    m["bound_trials"] = std::to_string(bound_trials);
    return m;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "snr_db")
        cfg.snr_db = parse_grid(value);
    else if (key == "g_grid")
        cfg.g_grid = parse_grid(value);
    else if (key == "slots_per_frame")
        cfg.slots_per_frame = static_cast<int>(parse_long(value));
    else if (key == "n_bc")
        cfg.n_bc = static_cast<int>(parse_long(value));
    else if (key == "policy") {
        if (value == "fixed")
            cfg.policy = frame::Policy::fixed;
        else if (value == "bernoulli")
            cfg.policy = frame::Policy::bernoulli;
        else
            throw std::invalid_argument("policy must be fixed or bernoulli");
    } else if (key == "repetitions")
        cfg.repetitions = static_cast<int>(parse_long(value));
    else if (key == "bernoulli_p")
        cfg.bernoulli_p = parse_double(value);
    else if (key == "k_max")
        cfg.k_max = static_cast<int>(parse_long(value));
    else if (key == "strategies")
        cfg.strategies = split_list(value);
    else if (key == "code")
        cfg.code_source = value;
    else if (key == "code_length")
        cfg.code_length = static_cast<int>(parse_long(value));
    else if (key == "code_seed")
        cfg.code_seed = parse_u64(value);
    else if (key == "trials")
        cfg.trials = parse_long(value);
    else if (key == "seed")
        cfg.seed = parse_u64(value);
    else if (key == "out")
        cfg.out = value;
    else if (key == "population")
        cfg.population = parse_long(value);
    else if (key == "refinement")
        cfg.refinement = parse_bool(value);
    else if (key == "max_bp_iters")
        cfg.max_bp_iters = static_cast<int>(parse_long(value));
    else if (key == "collision_sizes") {
        cfg.collision_sizes.clear();
        for (const auto& tok : split_list(value))
            cfg.collision_sizes.push_back(static_cast<int>(parse_long(tok)));
    } else if (key == "bound_trials")
        cfg.bound_trials = parse_long(value);
    else
        throw std::invalid_argument("unknown config key: " + key);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": empty key or value");
        apply_override(cfg, key, value);
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

code::CodeSpec load_code(const ExperimentConfig& cfg) {
    code::CodeSpec spec = cfg.code_source == "default"
                              ? code::make_default_code(cfg.code_length, cfg.code_seed)
                              : code::load_alist_file(cfg.code_source);
    if (spec.k % cfg.n_bc != 0)
        throw std::invalid_argument("n_bc must divide the message length k=" +
                                    std::to_string(spec.k));
    return spec;
}

TrialScenario build_trial(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                          const gf::Field& field, double snr_db, double load, long trial,
                          bool aloha_variant) {
    frame::TrafficConfig tcfg;
    tcfg.load = load;
    tcfg.slots = cfg.slots_per_frame;
    tcfg.population = cfg.population;
    tcfg.policy = cfg.policy;
    tcfg.repetitions = aloha_variant ? 1 : cfg.repetitions;
    tcfg.bernoulli_p = cfg.bernoulli_probability();
    tcfg.message_bits = spec.k;

    const std::uint64_t cell = derive_seed(
        cfg.seed, {key_of(snr_db), key_of(load), static_cast<std::uint64_t>(trial),
                   aloha_variant ? 0xa10aull : 0ull});
    Rng traffic_rng(derive_seed(cell, {1}));
    Rng fading_rng(derive_seed(cell, {2}));
    Rng noise_rng(derive_seed(cell, {3}));

    TrialScenario sc;
    sc.plan = frame::generate_traffic(tcfg, field, traffic_rng);
    sc.slot_users.assign(static_cast<std::size_t>(tcfg.slots), {});
    std::vector<std::vector<gf::Elem>> slot_coeffs(static_cast<std::size_t>(tcfg.slots));
    for (std::size_t u = 0; u < sc.plan.users.size(); ++u) {
        for (const auto& r : sc.plan.users[u].replicas) {
            sc.slot_users[static_cast<std::size_t>(r.slot)].push_back(static_cast<int>(u));
            slot_coeffs[static_cast<std::size_t>(r.slot)].push_back(r.coeff);
        }
    }

    sc.observations.reserve(static_cast<std::size_t>(tcfg.slots));
    for (int j = 0; j < tcfg.slots; ++j) {
        const auto& users = sc.slot_users[static_cast<std::size_t>(j)];
        std::vector<code::Message> msgs;
        std::vector<code::Codeword> cws;
        for (std::size_t l = 0; l < users.size(); ++l) {
            auto pm = frame::precode(sc.plan.users[static_cast<std::size_t>(users[l])].message,
                                     slot_coeffs[static_cast<std::size_t>(j)][l], field);
            cws.push_back(code::encode(pm, spec));
            msgs.push_back(std::move(pm));
        }
        auto real = channel::draw_fading(static_cast<int>(users.size()), snr_db, fading_rng);
        sc.observations.push_back(channel::synthesize_slot(std::move(cws), std::move(msgs),
                                                           std::move(real), noise_rng));
    }
    return sc;
}

frame::FrameOutcome decode_trial(const TrialScenario& scenario, const code::CodeSpec& spec,
                                 const gf::Field& field, phydec::Strategy strategy,
                                 const phydec::Options& opts) {
    std::vector<phydec::SlotResult> results;
    results.reserve(scenario.observations.size());
    for (const auto& obs : scenario.observations)
        results.push_back(phydec::decode_slot(obs, spec, strategy, opts));

    const auto system = frame::assemble_system(scenario.plan, scenario.slot_users, results, field);
    auto outcome = frame::solve_frame(system, scenario.plan, field.degree());
    for (const auto& r : results) {
        outcome.innovative_sum += r.innovative;
        outcome.blocked_slots += r.blocked ? 1 : 0;
        outcome.work += r.work;
    }
    return outcome;
}

namespace {

struct StrategyPlan {
    std::string name;
    phydec::Strategy strategy;
    bool aloha;
};

std::vector<StrategyPlan> strategy_plans(const ExperimentConfig& cfg) {
    std::vector<StrategyPlan> out;
    for (const auto& name : cfg.strategies) {
        if (name == "aloha")
            out.push_back({name, phydec::Strategy::separate, true});
        else
            out.push_back({name, *phydec::strategy_from_name(name), false});
    }
    return out;
}

void parallel_trials(long trials, int workers, const std::function<void(long)>& body) {
    if (workers <= 1) {
        for (long t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (long t = w; t < trials; t += workers) body(t);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<ResultRow> run_simulate(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                                    int workers) {
    cfg.validate();
    const gf::Field field(cfg.n_bc);
    const auto plans = strategy_plans(cfg);
    const bool any_shared = std::any_of(plans.begin(), plans.end(),
                                        [](const StrategyPlan& p) { return !p.aloha; });

    // rows grouped per strategy, cells in (snr, load) order
    std::vector<std::vector<ResultRow>> grouped(plans.size());

    for (double snr : cfg.snr_db) {
        for (double load : cfg.g_grid) {
            std::vector<std::vector<frame::FrameOutcome>> outcomes(
                plans.size(), std::vector<frame::FrameOutcome>(static_cast<std::size_t>(cfg.trials)));

            parallel_trials(cfg.trials, workers, [&](long t) {
                TrialScenario shared;
                if (any_shared) shared = build_trial(cfg, spec, field, snr, load, t, false);
                TrialScenario aloha;
                bool aloha_built = false;
                for (std::size_t s = 0; s < plans.size(); ++s) {
                    phydec::Options opts;
                    opts.k_max = plans[s].aloha ? 1 : cfg.k_max;
                    opts.refinement = cfg.refinement;
                    opts.max_bp_iters = cfg.max_bp_iters;
                    const TrialScenario* sc = &shared;
                    if (plans[s].aloha) {
                        if (!aloha_built) {
                            aloha = build_trial(cfg, spec, field, snr, load, t, true);
                            aloha_built = true;
                        }
                        sc = &aloha;
                    }
                    outcomes[s][static_cast<std::size_t>(t)] =
                        decode_trial(*sc, spec, field, plans[s].strategy, opts);
                }
            });

            for (std::size_t s = 0; s < plans.size(); ++s) {
                ResultRow row;
                row.strategy = plans[s].name;
                row.snr_db = snr;
                row.load = load;
                row.metrics = frame::compute_metrics(outcomes[s], spec.rate());
                row.trials = cfg.trials;
                row.seed = cfg.seed;
                grouped[s].push_back(std::move(row));
            }
        }
    }

    std::vector<ResultRow> rows;
    for (auto& g : grouped)
        for (auto& r : g) rows.push_back(std::move(r));
    return rows;
}

std::vector<SlotStudyRow> run_slot_study(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                                         int workers) {
    cfg.validate();
    const auto plans = strategy_plans(cfg);
    for (const auto& p : plans)
        if (p.aloha) throw std::invalid_argument("aloha has no slot-study variant");

    std::vector<std::vector<SlotStudyRow>> grouped(plans.size());
    for (double snr : cfg.snr_db) {
        for (int collision : cfg.collision_sizes) {
            std::vector<std::vector<long>> innov(plans.size(),
                                                 std::vector<long>(static_cast<std::size_t>(cfg.trials)));
            std::vector<std::vector<long>> attempts = innov;
            std::vector<std::vector<long>> iters = innov;

            parallel_trials(cfg.trials, workers, [&](long t) {
                const std::uint64_t cell = derive_seed(
                    cfg.seed, {0x510d7ull, key_of(snr), static_cast<std::uint64_t>(collision),
                               static_cast<std::uint64_t>(t)});
                Rng msg_rng(derive_seed(cell, {1}));
                Rng fading_rng(derive_seed(cell, {2}));
                Rng noise_rng(derive_seed(cell, {3}));

                std::vector<code::Message> msgs;
                std::vector<code::Codeword> cws;
                for (int u = 0; u < collision; ++u) {
                    code::Message m(static_cast<std::size_t>(spec.k));
                    for (auto& b : m) b = static_cast<std::uint8_t>(msg_rng.next_u64() & 1u);
                    cws.push_back(code::encode(m, spec));
                    msgs.push_back(std::move(m));
                }
                auto real = channel::draw_fading(collision, snr, fading_rng);
                const auto slot = channel::synthesize_slot(std::move(cws), std::move(msgs),
                                                           std::move(real), noise_rng);

                for (std::size_t s = 0; s < plans.size(); ++s) {
                    phydec::Options opts;
                    opts.k_max = collision;  // the study never discards its own collision size
                    opts.refinement = cfg.refinement;
                    opts.max_bp_iters = cfg.max_bp_iters;
                    const auto res = phydec::decode_slot(slot, spec, plans[s].strategy, opts);
                    innov[s][static_cast<std::size_t>(t)] = res.innovative;
                    attempts[s][static_cast<std::size_t>(t)] = res.work.decode_attempts;
                    iters[s][static_cast<std::size_t>(t)] = res.work.bp_iterations;
                }
            });

            for (std::size_t s = 0; s < plans.size(); ++s) {
                SlotStudyRow row;
                row.strategy = plans[s].name;
                row.snr_db = snr;
                row.collision = collision;
                row.trials = cfg.trials;
                row.seed = cfg.seed;
                double mean = 0.0;
                for (long v : innov[s]) mean += static_cast<double>(v);
                mean /= static_cast<double>(cfg.trials);
                double var = 0.0;
                for (long v : innov[s]) var += (v - mean) * (v - mean);
                if (cfg.trials > 1) var /= static_cast<double>(cfg.trials - 1);
                row.innov_mean = mean;
                row.ci_innov = 1.96 * std::sqrt(var / static_cast<double>(cfg.trials));
                double am = 0.0, im = 0.0;
                for (long v : attempts[s]) am += static_cast<double>(v);
                for (long v : iters[s]) im += static_cast<double>(v);
                row.attempts_mean = am / static_cast<double>(cfg.trials);
                row.iters_mean = im / static_cast<double>(cfg.trials);
                grouped[s].push_back(row);
            }
        }
    }

    std::vector<SlotStudyRow> rows;
    for (auto& g : grouped)
        for (auto& r : g) rows.push_back(r);
    return rows;
}

std::string simulate_csv(const std::vector<ResultRow>& rows) {
    std::string out =
        "strategy,snr_db,G,phi,sum_rate,plr,energy_eff,innov_mean,ci_phi,ci_plr,ci_innov,trials,"
        "seed\n";
    for (const auto& r : rows) {
        out += r.strategy + "," + fmt(r.snr_db) + "," + fmt(r.load) + "," + fmt(r.metrics.phi) +
               "," + fmt(r.metrics.sum_rate) + "," + fmt(r.metrics.plr) + "," +
               fmt(r.metrics.energy_eff) + "," + fmt(r.metrics.innov_mean) + "," +
               fmt(r.metrics.ci_phi) + "," + fmt(r.metrics.ci_plr) + "," +
               fmt(r.metrics.ci_innov) + "," + std::to_string(r.trials) + "," +
               std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string slot_study_csv(const std::vector<SlotStudyRow>& rows) {
    std::string out =
        "strategy,snr_db,K,innov_mean,ci_innov,attempts_mean,bp_iters_mean,trials,seed\n";
    for (const auto& r : rows) {
        out += r.strategy + "," + fmt(r.snr_db) + "," + std::to_string(r.collision) + "," +
               fmt(r.innov_mean) + "," + fmt(r.ci_innov) + "," + fmt(r.attempts_mean) + "," +
               fmt(r.iters_mean) + "," + std::to_string(r.trials) + "," + std::to_string(r.seed) +
               "\n";
    }
    return out;
}

std::string bound_csv(const std::vector<bound::BoundRow>& rows, const ExperimentConfig& cfg) {
    std::string out = "G,S,n_bc,phi_ub,phi_ub_alt,p_full_rank,p_enough\n";
    for (const auto& r : rows) {
        out += fmt(r.load) + "," + std::to_string(cfg.slots_per_frame) + "," +
               std::to_string(cfg.n_bc) + "," + fmt(r.phi_ub) + "," + fmt(r.phi_ub_alt) + "," +
               fmt(r.p_full_rank) + "," + fmt(r.p_enough) + "\n";
    }
    return out;
}

std::string metadata_json(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                          const std::map<std::string, std::string>& extra) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["config"] = cfg.echo();
    char fp[32];
    std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(spec.fingerprint));
    j["code"] = {{"n", spec.n}, {"k", spec.k}, {"rate", spec.rate()}, {"fingerprint", fp}};
    j["kernel_backend"] = kernels::backend_name(kernels::active_backend());
    for (const auto& [k, v] : extra) j[k] = v;
    return j.dump(2) + "\n";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace snd::sim
