#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "snd/bp.hpp"
#include "snd/channel.hpp"

namespace snd::phydec {

enum class Strategy { separate, sic, snd_sic, jd, snd_jd };

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

struct Options {
    int k_max = 7;           // collisions beyond this are discarded undecoded
    bool refinement = true;  // constrained retry pass in snd_sic
    int max_bp_iters = code::kDefaultBpIters;
};

// One recovered equation: which colliders participate and the XOR of their
// encoder-input messages. Only genie-verified payloads are stored.
struct Combination {
    std::vector<std::uint8_t> indicator;  // length K
    code::Message payload;
};

struct WorkCounters {
    long decode_attempts = 0;
    long bp_iterations = 0;
    long skipped_dependent = 0;  // subsets pruned by the rank pre-check

    WorkCounters& operator+=(const WorkCounters& o) {
        decode_attempts += o.decode_attempts;
        bp_iterations += o.bp_iterations;
        skipped_dependent += o.skipped_dependent;
        return *this;
    }
};

struct SlotResult {
    Strategy strategy = Strategy::separate;
    std::vector<Combination> combinations;
    int innovative = 0;    // GF(2) rank of the stacked indicators
    bool blocked = false;  // collision exceeded k_max
    WorkCounters work;
};

// Stable ln(sum exp(x_j)) folded over max(a,b) + log1p(exp(-|a-b|)).
double jacln2(double a, double b);
double jacln(std::span<const double> values);

// Noiseless levels of every interferer hypothesis: entry b is
// sum_k gains[k] * mu((b>>k)&1).
std::vector<double> hypothesis_levels(std::span<const double> gains);

// Per-sample L-value of one user's coded bit, marginalized over all 2^(K-1)
// hypotheses of the other users. user is a 0-based index into gains.
double llr_separate(double y, std::span<const double> gains, std::size_t user);

// Per-sample L-value of the XOR of a subset of users (their gains given),
// over the even/odd-parity hypothesis sets.
double llr_combination(double y, std::span<const double> subset_gains);

// Batched variants used by the decoders (kernel-dispatched).
std::vector<double> separate_llrs(const channel::SlotObservation& slot, std::size_t user);
std::vector<double> combination_llrs(const channel::SlotObservation& slot,
                                     std::span<const std::size_t> subset);

SlotResult decode_slot(const channel::SlotObservation& slot, const code::CodeSpec& spec,
                       Strategy strategy, const Options& opts = {});

int innovative_count(const SlotResult& result);

}  // namespace snd::phydec
