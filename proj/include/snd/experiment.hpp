#pragma once

#include <map>
#include <string>
#include <vector>

#include "snd/bound.hpp"
#include "snd/frame.hpp"

namespace snd::sim {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
    std::vector<double> snr_db{15.0};
    std::vector<double> g_grid{1.0};
    int slots_per_frame = 10;
    int n_bc = 8;
    frame::Policy policy = frame::Policy::fixed;
    int repetitions = 2;
    double bernoulli_p = -1.0;  // <= 0 means 1 - 2^-n_bc
    int k_max = 7;
    // "aloha" is accepted as a pseudo-strategy: separate decoding with one
    // replica and singleton slots only (k_max forced to 1).
    std::vector<std::string> strategies{"separate", "sic", "snd-sic", "jd", "snd-jd"};
    std::string code_source = "default";  // "default" or an alist path
    int code_length = 576;
    std::uint64_t code_seed = code::kDefaultCodeSeed;
    long trials = 200;
    std::uint64_t seed = 1;
    std::string out = "results";
    long population = 1000000;
    bool refinement = true;
    int max_bp_iters = 50;
    std::vector<int> collision_sizes{2, 4};  // slot-study only
    long bound_trials = 10000;

    double bernoulli_probability() const;
    void validate() const;  // throws std::invalid_argument with a message
    std::map<std::string, std::string> echo() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

code::CodeSpec load_code(const ExperimentConfig& cfg);

struct ResultRow {
    std::string strategy;
    double snr_db = 0.0;
    double load = 0.0;
    frame::Metrics metrics;
    long trials = 0;
    std::uint64_t seed = 0;
};

struct SlotStudyRow {
    std::string strategy;
    double snr_db = 0.0;
    int collision = 0;
    double innov_mean = 0.0;
    double ci_innov = 0.0;
    double attempts_mean = 0.0;
    double iters_mean = 0.0;
    long trials = 0;
    std::uint64_t seed = 0;
};

// Frame scenario shared by every strategy of one trial: traffic, precoding,
// encoding and channel synthesis. Decoding happens per strategy on top.
struct TrialScenario {
    frame::Plan plan;
    std::vector<std::vector<int>> slot_users;
    std::vector<channel::SlotObservation> observations;
};

TrialScenario build_trial(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                          const gf::Field& field, double snr_db, double load, long trial,
                          bool aloha_variant);

frame::FrameOutcome decode_trial(const TrialScenario& scenario, const code::CodeSpec& spec,
                                 const gf::Field& field, phydec::Strategy strategy,
                                 const phydec::Options& opts);

std::vector<ResultRow> run_simulate(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                                    int workers);
std::vector<SlotStudyRow> run_slot_study(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                                         int workers);

std::string simulate_csv(const std::vector<ResultRow>& rows);
std::string slot_study_csv(const std::vector<SlotStudyRow>& rows);
std::string bound_csv(const std::vector<bound::BoundRow>& rows, const ExperimentConfig& cfg);
std::string metadata_json(const ExperimentConfig& cfg, const code::CodeSpec& spec,
                          const std::map<std::string, std::string>& extra);

void write_file(const std::string& path, const std::string& content);

}  // namespace snd::sim
