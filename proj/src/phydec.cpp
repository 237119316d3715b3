#include "snd/phydec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "snd/gf2m.hpp"
#include "snd/kernels.hpp"

namespace snd::phydec {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::separate: return "separate";
        case Strategy::sic: return "sic";
        case Strategy::snd_sic: return "snd-sic";
        case Strategy::jd: return "jd";
        case Strategy::snd_jd: return "snd-jd";
    }
    return "?";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
    if (name == "separate") return Strategy::separate;
    if (name == "sic") return Strategy::sic;
    if (name == "snd-sic" || name == "snd_sic") return Strategy::snd_sic;
    if (name == "jd") return Strategy::jd;
    if (name == "snd-jd" || name == "snd_jd") return Strategy::snd_jd;
    return std::nullopt;
}

double jacln2(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

double jacln(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("jacln of empty set");
    double acc = values.front();
    for (std::size_t i = 1; i < values.size(); ++i) acc = jacln2(acc, values[i]);
    return acc;
}

std::vector<double> hypothesis_levels(std::span<const double> gains) {
    const std::size_t k = gains.size();
    if (k > 20) throw std::invalid_argument("hypothesis space too large");
    std::vector<double> levels(std::size_t{1} << k);
    double base = 0.0;
    for (double g : gains) base -= g;
    levels[0] = base;
    for (std::size_t b = 1; b < levels.size(); ++b) {
        const unsigned bit = std::countr_zero(b);
        levels[b] = levels[b & (b - 1)] + 2.0 * gains[bit];
    }
    return levels;
}

namespace {

std::vector<std::uint8_t> bit_target(std::size_t k, std::size_t user) {
    std::vector<std::uint8_t> t(std::size_t{1} << k);
    for (std::size_t b = 0; b < t.size(); ++b) t[b] = static_cast<std::uint8_t>((b >> user) & 1);
    return t;
}

std::vector<std::uint8_t> parity_target(std::size_t k) {
    std::vector<std::uint8_t> t(std::size_t{1} << k);
    for (std::size_t b = 0; b < t.size(); ++b)
        t[b] = static_cast<std::uint8_t>(std::popcount(b) & 1);
    return t;
}

std::vector<double> marginal_batch(std::span<const double> samples, std::span<const double> gains,
                                   std::span<const std::uint8_t> target) {
    const auto levels = hypothesis_levels(gains);
    std::vector<double> out(samples.size());
    kernels::marginal_llr(samples.data(), samples.size(), levels.data(), target.data(),
                          levels.size(), out.data());
    return out;
}

// Incremental GF(2) row space, rows kept with distinct leading bits.
struct Gf2Basis {
    std::vector<std::uint32_t> rows;

    std::uint32_t reduce(std::uint32_t v) const {
        for (std::uint32_t r : rows) {
            const int h = 31 - std::countl_zero(r);
            if ((v >> h) & 1u) v ^= r;
        }
        return v;
    }
    bool is_independent(std::uint32_t v) const { return reduce(v) != 0; }
    bool insert(std::uint32_t v) {
        v = reduce(v);
        if (v == 0) return false;
        rows.push_back(v);
        return true;
    }
};

code::Message xor_truth(const channel::SlotTruth& truth, std::uint32_t mask) {
    code::Message acc;
    for (std::size_t i = 0; mask; ++i, mask >>= 1) {
        if (!(mask & 1u)) continue;
        if (acc.empty())
            acc = truth.messages[i];
        else
            for (std::size_t j = 0; j < acc.size(); ++j) acc[j] ^= truth.messages[i][j];
    }
    return acc;
}

std::vector<std::uint8_t> mask_to_indicator(std::uint32_t mask, std::size_t k) {
    std::vector<std::uint8_t> ind(k, 0);
    for (std::size_t i = 0; i < k; ++i) ind[i] = static_cast<std::uint8_t>((mask >> i) & 1);
    return ind;
}

struct SicState {
    std::vector<Combination> rows;
    std::vector<std::uint32_t> row_masks;
    std::vector<double> residual;
    std::vector<std::size_t> remaining;
    WorkCounters work;
};

SicState run_sic(const channel::SlotObservation& slot, const code::CodeSpec& spec,
                 const Options& opts) {
    const auto& gains = slot.realization.gains;
    SicState st;
    st.residual = slot.samples;
    st.remaining.resize(gains.size());
    std::iota(st.remaining.begin(), st.remaining.end(), 0);

    bool progressed = true;
    while (progressed && !st.remaining.empty()) {
        progressed = false;
        std::vector<std::size_t> order = st.remaining;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (gains[a] != gains[b]) return gains[a] > gains[b];
            return a < b;
        });
        for (std::size_t user : order) {
            std::vector<double> local_gains;
            std::size_t local_pos = 0;
            for (std::size_t i = 0; i < st.remaining.size(); ++i) {
                if (st.remaining[i] == user) local_pos = local_gains.size();
                local_gains.push_back(gains[st.remaining[i]]);
            }
            const auto target = bit_target(local_gains.size(), local_pos);
            const auto llrs = marginal_batch(st.residual, local_gains, target);
            const auto dec = code::decode_soft(llrs, spec, opts.max_bp_iters);
            ++st.work.decode_attempts;
            st.work.bp_iterations += dec.iterations;
            if (!dec.message || *dec.message != slot.truth.messages[user]) continue;

            st.rows.push_back({mask_to_indicator(1u << user, gains.size()), *dec.message});
            st.row_masks.push_back(1u << user);
            const auto cw = code::encode(*dec.message, spec);
            for (std::size_t t = 0; t < st.residual.size(); ++t)
                st.residual[t] -= gains[user] * channel::bpsk(cw[t]);
            st.remaining.erase(std::find(st.remaining.begin(), st.remaining.end(), user));
            progressed = true;
            break;  // restart from the strongest remaining user
        }
    }
    return st;
}

// Subset attempt order: size ascending, then descending gain sum, then mask.
std::vector<std::uint32_t> ordered_subsets(std::span<const double> gains,
                                           std::span<const std::size_t> members,
                                           int min_size) {
    std::vector<std::uint32_t> masks;
    const std::uint32_t full = (1u << members.size()) - 1u;
    for (std::uint32_t m = 1; m <= full; ++m)
        if (std::popcount(m) >= min_size) masks.push_back(m);
    auto gain_sum = [&](std::uint32_t m) {
        double s = 0.0;
        for (std::size_t i = 0; i < members.size(); ++i)
            if ((m >> i) & 1u) s += gains[members[i]];
        return s;
    };
    std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa < pb;
        const double ga = gain_sum(a), gb = gain_sum(b);
        if (ga != gb) return ga > gb;
        return a < b;
    });
    return masks;
}

std::uint32_t local_to_global(std::uint32_t local, std::span<const std::size_t> members) {
    std::uint32_t g = 0;
    for (std::size_t i = 0; i < members.size(); ++i)
        if ((local >> i) & 1u) g |= 1u << members[i];
    return g;
}

// Constrained L-values for the refinement pass: marginalize over all
// remaining-user hypotheses, restricted per position to those consistent with
// the already-decoded combination codewords. Positions sharing a constraint
// pattern are batched through the marginal kernel.
std::vector<double> constrained_llrs(std::span<const double> residual,
                                     std::span<const double> local_gains,
                                     std::uint32_t target_mask,
                                     std::span<const std::pair<std::uint32_t, code::Codeword>> constraints) {
    const std::size_t k1 = local_gains.size();
    const std::size_t nlev = std::size_t{1} << k1;
    const std::size_t nc = constraints.size();
    const auto levels = hypothesis_levels(local_gains);

    std::vector<std::uint32_t> sig(nlev, 0);
    for (std::size_t b = 0; b < nlev; ++b)
        for (std::size_t r = 0; r < nc; ++r)
            sig[b] |= static_cast<std::uint32_t>(std::popcount(b & constraints[r].first) & 1) << r;

    const std::size_t n = residual.size();
    std::vector<std::uint32_t> req(n, 0);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t r = 0; r < nc; ++r)
            req[t] |= static_cast<std::uint32_t>(constraints[r].second[t] & 1) << r;

    std::vector<double> out(n);
    std::vector<std::size_t> pos;
    std::vector<double> gathered;
    std::vector<double> partial;
    std::vector<std::uint8_t> target(nlev);
    for (std::uint32_t cls = 0; cls < (1u << nc); ++cls) {
        pos.clear();
        for (std::size_t t = 0; t < n; ++t)
            if (req[t] == cls) pos.push_back(t);
        if (pos.empty()) continue;
        for (std::size_t b = 0; b < nlev; ++b)
            target[b] = sig[b] == cls
                            ? static_cast<std::uint8_t>(std::popcount(b & target_mask) & 1)
                            : std::uint8_t{2};
        gathered.resize(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) gathered[i] = residual[pos[i]];
        partial.resize(pos.size());
        kernels::marginal_llr(gathered.data(), gathered.size(), levels.data(), target.data(),
                              nlev, partial.data());
        for (std::size_t i = 0; i < pos.size(); ++i) out[pos[i]] = partial[i];
    }
    return out;
}

void run_separate(const channel::SlotObservation& slot, const code::CodeSpec& spec,
                  const Options& opts, SlotResult& res) {
    const auto& gains = slot.realization.gains;
    const auto levels = hypothesis_levels(gains);
    std::vector<double> llrs(slot.samples.size());
    for (std::size_t user = 0; user < gains.size(); ++user) {
        const auto target = bit_target(gains.size(), user);
        kernels::marginal_llr(slot.samples.data(), slot.samples.size(), levels.data(),
                              target.data(), levels.size(), llrs.data());
        const auto dec = code::decode_soft(llrs, spec, opts.max_bp_iters);
        ++res.work.decode_attempts;
        res.work.bp_iterations += dec.iterations;
        if (dec.message && *dec.message == slot.truth.messages[user])
            res.combinations.push_back({mask_to_indicator(1u << user, gains.size()), *dec.message});
    }
}

void run_snd_sic(const channel::SlotObservation& slot, const code::CodeSpec& spec,
                 const Options& opts, SlotResult& res, bool with_combinations) {
    const auto& gains = slot.realization.gains;
    SicState st = run_sic(slot, spec, opts);
    res.combinations = std::move(st.rows);
    res.work += st.work;
    if (!with_combinations || st.remaining.size() < 2) return;

    Gf2Basis basis;
    for (std::uint32_t m : st.row_masks) basis.insert(m);

    std::vector<std::pair<std::uint32_t, code::Codeword>> decoded_combos;  // local mask + codeword
    for (std::uint32_t local : ordered_subsets(gains, st.remaining, 2)) {
        const std::uint32_t global = local_to_global(local, st.remaining);
        if (!basis.is_independent(global)) {
            ++res.work.skipped_dependent;
            continue;
        }
        std::vector<double> subset_gains;
        for (std::size_t i = 0; i < st.remaining.size(); ++i)
            if ((local >> i) & 1u) subset_gains.push_back(gains[st.remaining[i]]);
        const auto target = parity_target(subset_gains.size());
        const auto llrs = marginal_batch(st.residual, subset_gains, target);
        const auto dec = code::decode_soft(llrs, spec, opts.max_bp_iters);
        ++res.work.decode_attempts;
        res.work.bp_iterations += dec.iterations;
        if (dec.message && *dec.message == xor_truth(slot.truth, global)) {
            res.combinations.push_back({mask_to_indicator(global, gains.size()), *dec.message});
            basis.insert(global);
            decoded_combos.emplace_back(local, code::encode(*dec.message, spec));
        }
    }

    if (!opts.refinement || decoded_combos.empty()) return;

    // one constrained retry round, now including singletons
    std::vector<double> local_gains;
    for (std::size_t u : st.remaining) local_gains.push_back(gains[u]);
    for (std::uint32_t local : ordered_subsets(gains, st.remaining, 1)) {
        const std::uint32_t global = local_to_global(local, st.remaining);
        if (!basis.is_independent(global)) {
            ++res.work.skipped_dependent;
            continue;
        }
        const auto llrs = constrained_llrs(st.residual, local_gains, local, decoded_combos);
        const auto dec = code::decode_soft(llrs, spec, opts.max_bp_iters);
        ++res.work.decode_attempts;
        res.work.bp_iterations += dec.iterations;
        if (dec.message && *dec.message == xor_truth(slot.truth, global)) {
            res.combinations.push_back({mask_to_indicator(global, gains.size()), *dec.message});
            basis.insert(global);
        }
    }
}

void run_jd(const channel::SlotObservation& slot, const code::CodeSpec& spec, const Options& opts,
            SlotResult& res, bool with_combinations) {
    const auto& gains = slot.realization.gains;
    const int k = static_cast<int>(gains.size());
    const auto levels = hypothesis_levels(gains);
    code::SymbolDist dist(k, static_cast<int>(slot.samples.size()));
    kernels::symbol_scores(slot.samples.data(), slot.samples.size(), levels.data(), levels.size(),
                           dist.p.data());
    const auto joint = code::decode_joint(dist, spec, opts.max_bp_iters);
    ++res.work.decode_attempts;
    res.work.bp_iterations += joint.iterations;

    if (!with_combinations) {
        for (int u = 0; u < k; ++u)
            if (joint.messages[static_cast<std::size_t>(u)] == slot.truth.messages[static_cast<std::size_t>(u)])
                res.combinations.push_back(
                    {mask_to_indicator(1u << u, gains.size()), joint.messages[static_cast<std::size_t>(u)]});
        return;
    }

    for (std::uint32_t mask = 1; mask < (1u << k); ++mask) {
        code::Message est;
        for (int u = 0; u < k; ++u) {
            if (!((mask >> u) & 1u)) continue;
            if (est.empty())
                est = joint.messages[static_cast<std::size_t>(u)];
            else
                for (std::size_t j = 0; j < est.size(); ++j)
                    est[j] ^= joint.messages[static_cast<std::size_t>(u)][j];
        }
        if (est == xor_truth(slot.truth, mask))
            res.combinations.push_back({mask_to_indicator(mask, gains.size()), std::move(est)});
    }
}

int indicator_rank(const std::vector<Combination>& combos, std::size_t k) {
    if (combos.empty() || k == 0) return 0;
    gf::Matrix m(gf::Field(1), 0, k);
    std::vector<gf::Elem> row(k);
    for (const auto& c : combos) {
        for (std::size_t i = 0; i < k; ++i) row[i] = c.indicator[i];
        m.append_row(row);
    }
    return static_cast<int>(m.rank());
}

}  // namespace

double llr_separate(double y, std::span<const double> gains, std::size_t user) {
    if (user >= gains.size()) throw std::invalid_argument("user index out of range");
    const auto levels = hypothesis_levels(gains);
    std::vector<double> ones, zeros;
    for (std::size_t b = 0; b < levels.size(); ++b) {
        const double d = y - levels[b];
        ((b >> user) & 1u ? ones : zeros).push_back(-(d * d));
    }
    return jacln(ones) - jacln(zeros);
}

double llr_combination(double y, std::span<const double> subset_gains) {
    if (subset_gains.size() < 2) throw std::invalid_argument("combination needs at least two users");
    const auto levels = hypothesis_levels(subset_gains);
    std::vector<double> odd, even;
    for (std::size_t b = 0; b < levels.size(); ++b) {
        const double d = y - levels[b];
        (std::popcount(b) & 1 ? odd : even).push_back(-(d * d));
    }
    return jacln(odd) - jacln(even);
}

std::vector<double> separate_llrs(const channel::SlotObservation& slot, std::size_t user) {
    const auto& gains = slot.realization.gains;
    return marginal_batch(slot.samples, gains, bit_target(gains.size(), user));
}

std::vector<double> combination_llrs(const channel::SlotObservation& slot,
                                     std::span<const std::size_t> subset) {
    std::vector<double> subset_gains;
    for (std::size_t u : subset) subset_gains.push_back(slot.realization.gains[u]);
    return marginal_batch(slot.samples, subset_gains, parity_target(subset_gains.size()));
}

SlotResult decode_slot(const channel::SlotObservation& slot, const code::CodeSpec& spec,
                       Strategy strategy, const Options& opts) {
    SlotResult res;
    res.strategy = strategy;
    const std::size_t k = slot.realization.gains.size();
    if (k == 0) return res;
    if (static_cast<int>(k) > opts.k_max) {
        res.blocked = true;
        return res;
    }
    switch (strategy) {
        case Strategy::separate: run_separate(slot, spec, opts, res); break;
        case Strategy::sic: run_snd_sic(slot, spec, opts, res, false); break;
        case Strategy::snd_sic: run_snd_sic(slot, spec, opts, res, true); break;
        case Strategy::jd: run_jd(slot, spec, opts, res, false); break;
        case Strategy::snd_jd: run_jd(slot, spec, opts, res, true); break;
    }
    res.innovative = indicator_rank(res.combinations, k);
    return res;
}

int innovative_count(const SlotResult& result) {
    std::size_t k = 0;
    for (const auto& c : result.combinations) k = std::max(k, c.indicator.size());
    return indicator_rank(result.combinations, k);
}

}  // namespace snd::phydec
