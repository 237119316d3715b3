#pragma once

#include <string>
#include <utility>
#include <vector>

#include "snd/code.hpp"

namespace snd::bound {

struct TableEntry {
    int collision = 0;        // K
    int subset = 0;           // i
    double estimate = 0.0;    // Monte Carlo frequency
    double half_width = 0.0;  // 95% binomial half-width
    long trials = 0;
};

// Estimated probability of decoding the XOR of the i strongest signals from a
// collision of size K, at fixed (SNR, rate). p_tilde(K) is the envelope over i.
struct DecodeProbabilityTable {
    int k_max = 0;
    double snr_db = 0.0;
    double rate = 0.0;
    std::vector<TableEntry> entries;

    double p_hat(int collision, int subset) const;
    double p_tilde(int collision) const;  // max over subset sizes; 0 beyond k_max

    std::string serialize() const;
    static DecodeProbabilityTable parse(const std::string& text);
};

DecodeProbabilityTable estimate_ptilde(int k_max, double snr_db, const code::CodeSpec& spec,
                                       long trials, std::uint64_t seed, int workers = 1,
                                       int max_bp_iters = 50);

// Mean and variance of the per-slot decoded-combination count for n_tx active
// users each transmitting with probability p: binomial mixture over the
// collision size K with eta_K = 2^K - 1 attempts at probability p_tilde(K).
std::pair<double, double> epsilon_moments(int n_tx, double p,
                                          const DecodeProbabilityTable& table);

struct BoundConfig {
    std::vector<double> g_grid;
    int slots = 10;  // S
    int n_bc = 8;    // q = 2^n_bc, bernoulli p = 1 - 2^-n_bc
    double tail_eps = 1e-9;
    bool renormalize = true;  // lattice-normalized Gaussian weights (raw mode off)
};

struct BoundRow {
    double load = 0.0;        // G
    double phi_ub = 0.0;      // (1/S) sum N^tx Pois(N^tx) P[enough combinations]
    double phi_ub_alt = 0.0;  // alternative G-weighted form, reported for comparison
    double p_full_rank = 0.0;   // with the random-matrix rank factor at field order q
    double p_enough = 0.0;      // without it (q -> infinity limit)
};

std::vector<BoundRow> evaluate(const BoundConfig& cfg, const DecodeProbabilityTable& table);

}  // namespace snd::bound
