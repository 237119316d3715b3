#include "snd/bound.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "snd/bp.hpp"
#include "snd/channel.hpp"
#include "snd/gf2m.hpp"
#include "snd/phydec.hpp"

namespace snd::bound {

double DecodeProbabilityTable::p_hat(int collision, int subset) const {
    for (const auto& e : entries)
        if (e.collision == collision && e.subset == subset) return e.estimate;
    throw std::out_of_range("no table entry for this (K, i)");
}

double DecodeProbabilityTable::p_tilde(int collision) const {
    if (collision > k_max) return 0.0;
    double best = 0.0;
    bool found = false;
    for (const auto& e : entries) {
        if (e.collision != collision) continue;
        best = std::max(best, e.estimate);
        found = true;
    }
    if (!found) throw std::out_of_range("no table entries for this collision size");
    return best;
}

std::string DecodeProbabilityTable::serialize() const {
    std::ostringstream out;
    out << "# decode probability table\n";
    out << "# k_max snr_db rate\n";
    out << k_max << " " << snr_db << " " << rate << "\n";
    out << "# K i estimate half_width trials\n";
    for (const auto& e : entries)
        out << e.collision << " " << e.subset << " " << e.estimate << " " << e.half_width << " "
            << e.trials << "\n";
    return out.str();
}

DecodeProbabilityTable DecodeProbabilityTable::parse(const std::string& text) {
    std::istringstream in(text);
    DecodeProbabilityTable t;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!header_done) {
            if (ls >> t.k_max >> t.snr_db >> t.rate) header_done = true;
            continue;
        }
        TableEntry e;
        if (ls >> e.collision >> e.subset >> e.estimate >> e.half_width >> e.trials)
            t.entries.push_back(e);
    }
    if (!header_done || t.entries.empty()) throw std::runtime_error("malformed probability table");
    return t;
}

DecodeProbabilityTable estimate_ptilde(int k_max, double snr_db, const code::CodeSpec& spec,
                                       long trials, std::uint64_t seed, int workers,
                                       int max_bp_iters) {
    if (trials < 1 || k_max < 1) throw std::invalid_argument("estimate_ptilde domain");
    DecodeProbabilityTable table;
    table.k_max = k_max;
    table.snr_db = snr_db;
    table.rate = spec.rate();

    for (int collision = 1; collision <= k_max; ++collision) {
        for (int subset = 1; subset <= collision; ++subset) {
            std::vector<long> hits(static_cast<std::size_t>(std::max(workers, 1)), 0);
            auto run = [&](int w) {
                long local = 0;
                for (long t = w; t < trials; t += workers) {
                    Rng rng(derive_seed(seed, {0xb0u, static_cast<std::uint64_t>(collision),
                                               static_cast<std::uint64_t>(subset),
                                               static_cast<std::uint64_t>(t)}));
                    Rng fading = rng.fork(1);
                    Rng noise = rng.fork(2);

                    std::vector<code::Message> msgs;
                    std::vector<code::Codeword> cws;
                    for (int u = 0; u < collision; ++u) {
                        code::Message m(static_cast<std::size_t>(spec.k));
                        for (auto& b : m) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
                        cws.push_back(code::encode(m, spec));
                        msgs.push_back(std::move(m));
                    }
                    auto real = channel::draw_fading(collision, snr_db, fading);
                    auto slot = channel::synthesize_slot(std::move(cws), std::move(msgs),
                                                         std::move(real), noise);

                    // the i strongest users
                    std::vector<std::size_t> order(static_cast<std::size_t>(collision));
                    std::iota(order.begin(), order.end(), 0);
                    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                        return slot.realization.gains[a] > slot.realization.gains[b];
                    });
                    order.resize(static_cast<std::size_t>(subset));

                    const auto llrs = subset == 1 ? phydec::separate_llrs(slot, order.front())
                                                  : phydec::combination_llrs(slot, order);
                    const auto dec = code::decode_soft(llrs, spec, max_bp_iters);
                    if (!dec.message) continue;
                    std::uint32_t mask = 0;
                    for (std::size_t u : order) mask |= 1u << u;
                    code::Message expected;
                    for (std::size_t u = 0; u < slot.truth.messages.size(); ++u) {
                        if (!((mask >> u) & 1u)) continue;
                        if (expected.empty())
                            expected = slot.truth.messages[u];
                        else
                            for (std::size_t j = 0; j < expected.size(); ++j)
                                expected[j] ^= slot.truth.messages[u][j];
                    }
                    if (*dec.message == expected) ++local;
                }
                hits[static_cast<std::size_t>(w)] = local;
            };
            if (workers > 1) {
                std::vector<std::thread> pool;
                for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
                for (auto& th : pool) th.join();
            } else {
                run(0);
            }
            const long total = std::accumulate(hits.begin(), hits.end(), 0l);
            TableEntry e;
            e.collision = collision;
            e.subset = subset;
            e.trials = trials;
            e.estimate = static_cast<double>(total) / static_cast<double>(trials);
            e.half_width =
                1.96 * std::sqrt(std::max(e.estimate * (1.0 - e.estimate), 0.0) /
                                 static_cast<double>(trials));
            table.entries.push_back(e);
        }
    }
    return table;
}

namespace {

double log_binom(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

std::pair<double, double> epsilon_moments(int n_tx, double p,
                                          const DecodeProbabilityTable& table) {
    if (n_tx < 1) throw std::invalid_argument("need at least one active user");
    double mean = 0.0;
    double second = 0.0;
    for (int k = 1; k <= n_tx; ++k) {
        const double pt = table.p_tilde(k);
        if (pt == 0.0) continue;
        const double w = std::exp(log_binom(n_tx, k) + k * std::log(p) +
                                  (n_tx - k) * std::log1p(-p));
        const double eta = std::exp2(k) - 1.0;
        mean += w * eta * pt;
        second += w * (eta * pt * (1.0 - pt) + eta * pt * eta * pt);
    }
    return {mean, second - mean * mean};
}

namespace {

// Probability mass assigned to integer m-range [lo, hi] by a Gaussian with the
// given moments, optionally normalized over the full lattice [0, lattice_hi].
double gaussian_lattice_mass(double mean, double var, double lo, double hi, double lattice_hi,
                             bool renormalize) {
    if (hi < lo) return 0.0;
    if (var < 1e-12) {
        const double point = std::round(mean);
        return (point >= lo - 0.5 && point <= hi + 0.5) ? 1.0 : 0.0;
    }
    const double sd = std::sqrt(var);
    auto window_sum = [&](double a, double b) {
        a = std::max(a, std::floor(mean - 12.0 * sd));
        b = std::min(b, std::ceil(mean + 12.0 * sd));
        double s = 0.0;
        for (double m = std::ceil(a); m <= b; m += 1.0) {
            const double z = (m - mean) / sd;
            s += std::exp(-0.5 * z * z);
        }
        return s / (sd * std::sqrt(2.0 * 3.14159265358979323846));
    };
    const double num = window_sum(lo, hi);
    if (!renormalize) return num;
    const double den = window_sum(0.0, lattice_hi);
    return den > 0.0 ? std::min(num / den, 1.0) : 0.0;
}

}  // namespace

std::vector<BoundRow> evaluate(const BoundConfig& cfg, const DecodeProbabilityTable& table) {
    if (cfg.g_grid.empty()) throw std::invalid_argument("empty load grid");
    if (cfg.slots < 1 || cfg.n_bc < 1) throw std::invalid_argument("bound config out of range");
    const double q = std::exp2(cfg.n_bc);
    const double p = 1.0 - std::exp2(-cfg.n_bc);

    std::vector<BoundRow> rows;
    for (double g : cfg.g_grid) {
        const double gs = g * cfg.slots;
        if (gs > 600.0) throw std::invalid_argument("load too large for the Poisson evaluation");

        BoundRow row;
        row.load = g;
        double pois = std::exp(-gs);  // P[N^tx = 0]
        double cumulative = pois;

        // N^tx = 0 contributes only to the G-weighted alternative form
        row.phi_ub_alt += pois * 1.0;

        int n_tx = 0;
        while (cumulative < 1.0 - cfg.tail_eps || n_tx < static_cast<int>(gs)) {
            ++n_tx;
            if (n_tx > 2000)
                throw std::runtime_error("Poisson truncation did not reach the tail bound");
            pois *= gs / n_tx;
            cumulative += pois;
            if (pois < cfg.tail_eps * 1e-3 && n_tx > gs) break;

            const auto [mean_slot, var_slot] = epsilon_moments(n_tx, p, table);
            const double mean_fr = cfg.slots * mean_slot;
            const double var_fr = cfg.slots * var_slot;
            const double m_hi = cfg.slots * (std::exp2(n_tx) - 1.0);

            const double mass = gaussian_lattice_mass(mean_fr, var_fr, n_tx, m_hi, m_hi,
                                                      cfg.renormalize);
            row.p_enough += pois * mass;
            row.phi_ub += pois * n_tx * mass / cfg.slots;
            row.phi_ub_alt += pois * mass;

            // finite-field version: weight each m by the full-rank probability
            if (var_fr < 1e-12) {
                const double point = std::round(mean_fr);
                if (point >= n_tx - 0.5 && point <= m_hi + 0.5) {
                    const int delta = std::max(0, static_cast<int>(point) - n_tx);
                    row.p_full_rank += pois * gf::full_rank_probability(n_tx, delta, q);
                }
            } else {
                const double sd = std::sqrt(var_fr);
                const double lo = std::max(static_cast<double>(n_tx),
                                           std::floor(mean_fr - 12.0 * sd));
                const double hi = std::min(m_hi, std::ceil(mean_fr + 12.0 * sd));
                double num = 0.0;
                for (double m = std::ceil(lo); m <= hi; m += 1.0) {
                    const double z = (m - mean_fr) / sd;
                    num += std::exp(-0.5 * z * z) *
                           gf::full_rank_probability(n_tx, static_cast<int>(m) - n_tx, q);
                }
                num /= sd * std::sqrt(2.0 * 3.14159265358979323846);
                if (cfg.renormalize) {
                    const double den = gaussian_lattice_mass(mean_fr, var_fr, 0.0, m_hi, m_hi, false);
                    num = den > 0.0 ? num / den : 0.0;
                }
                row.p_full_rank += pois * std::min(num, 1.0);
            }
        }
        row.phi_ub_alt *= g;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace snd::bound
