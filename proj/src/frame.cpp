#include "snd/frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace snd::frame {

Plan generate_traffic(const TrafficConfig& cfg, const gf::Field& field, Rng& rng) {
    if (cfg.load <= 0.0 || cfg.slots < 1 || cfg.population < 1)
        throw std::invalid_argument("traffic config out of range");
    if (cfg.policy == Policy::fixed && cfg.repetitions > cfg.slots)
        throw std::invalid_argument("more repetitions than slots in the frame");
    if (cfg.policy == Policy::bernoulli && (cfg.bernoulli_p <= 0.0 || cfg.bernoulli_p > 1.0))
        throw std::invalid_argument("bernoulli probability out of range");

    Plan plan;
    plan.slots = cfg.slots;
    long n = rng.poisson(cfg.load * cfg.slots);
    n = std::min(n, cfg.population);

    const auto nonzero_coeff = [&]() -> gf::Elem {
        if (field.order() == 2) return 1;
        return static_cast<gf::Elem>(rng.uniform_int(1, static_cast<int>(field.order()) - 1));
    };

    for (long i = 0; i < n; ++i) {
        ActiveUser user;
        user.message.resize(static_cast<std::size_t>(cfg.message_bits));
        for (auto& b : user.message) b = static_cast<std::uint8_t>(rng.next_u64() & 1u);
        if (cfg.policy == Policy::fixed) {
            std::vector<int> slots(static_cast<std::size_t>(cfg.slots));
            for (int s = 0; s < cfg.slots; ++s) slots[static_cast<std::size_t>(s)] = s;
            for (int d = 0; d < cfg.repetitions; ++d) {
                const int pick = rng.uniform_int(d, cfg.slots - 1);
                std::swap(slots[static_cast<std::size_t>(d)], slots[static_cast<std::size_t>(pick)]);
            }
            std::sort(slots.begin(), slots.begin() + cfg.repetitions);
            for (int d = 0; d < cfg.repetitions; ++d)
                user.replicas.push_back({slots[static_cast<std::size_t>(d)], nonzero_coeff()});
        } else {
            for (int s = 0; s < cfg.slots; ++s)
                if (rng.uniform() < cfg.bernoulli_p) user.replicas.push_back({s, nonzero_coeff()});
        }
        plan.users.push_back(std::move(user));
    }
    return plan;
}

std::vector<gf::Elem> pack_symbols(const code::Message& bits, int n_bc) {
    if (n_bc < 1 || bits.size() % static_cast<std::size_t>(n_bc) != 0)
        throw std::invalid_argument("symbol width must divide the bit count");
    std::vector<gf::Elem> out(bits.size() / static_cast<std::size_t>(n_bc));
    for (std::size_t g = 0; g < out.size(); ++g) {
        gf::Elem v = 0;
        for (int j = 0; j < n_bc; ++j)
            v = static_cast<gf::Elem>(v | (bits[g * static_cast<std::size_t>(n_bc) +
                                                static_cast<std::size_t>(j)] & 1u)
                                              << j);
        out[g] = v;
    }
    return out;
}

code::Message unpack_symbols(std::span<const gf::Elem> symbols, int n_bc) {
    code::Message out(symbols.size() * static_cast<std::size_t>(n_bc));
    for (std::size_t g = 0; g < symbols.size(); ++g)
        for (int j = 0; j < n_bc; ++j)
            out[g * static_cast<std::size_t>(n_bc) + static_cast<std::size_t>(j)] =
                static_cast<std::uint8_t>((symbols[g] >> j) & 1u);
    return out;
}

code::Message precode(const code::Message& u, gf::Elem alpha, const gf::Field& field) {
    if (alpha == 0) throw std::invalid_argument("precoding coefficient must be nonzero");
    auto symbols = pack_symbols(u, field.degree());
    for (auto& s : symbols) s = field.mul(s, alpha);
    return unpack_symbols(symbols, field.degree());
}

EquationSystem assemble_system(const Plan& plan,
                               std::span<const std::vector<int>> slot_users,
                               std::span<const phydec::SlotResult> slot_results,
                               const gf::Field& field) {
    if (slot_users.size() != slot_results.size())
        throw std::invalid_argument("slot list size mismatch");
    const std::size_t n_tx = plan.users.size();
    EquationSystem sys(field, n_tx);

    // coefficient lookup: (user, slot) -> alpha
    std::vector<std::vector<std::pair<int, gf::Elem>>> coeff(n_tx);
    for (std::size_t u = 0; u < n_tx; ++u)
        for (const auto& r : plan.users[u].replicas) coeff[u].emplace_back(r.slot, r.coeff);

    std::vector<gf::Elem> row(n_tx);
    for (std::size_t j = 0; j < slot_results.size(); ++j) {
        std::set<std::vector<std::uint8_t>> seen;  // dedup identical indicators per slot
        for (const auto& comb : slot_results[j].combinations) {
            if (comb.indicator.size() != slot_users[j].size())
                throw std::invalid_argument("indicator width does not match the slot");
            if (!seen.insert(comb.indicator).second) continue;
            std::fill(row.begin(), row.end(), 0);
            for (std::size_t l = 0; l < comb.indicator.size(); ++l) {
                if (!comb.indicator[l]) continue;
                const int user = slot_users[j][l];
                if (user < 0 || static_cast<std::size_t>(user) >= n_tx)
                    throw std::invalid_argument("indicator references unknown user");
                gf::Elem alpha = 0;
                for (const auto& [slot, a] : coeff[static_cast<std::size_t>(user)])
                    if (slot == static_cast<int>(j)) alpha = a;
                if (alpha == 0) throw std::invalid_argument("user has no replica in this slot");
                row[static_cast<std::size_t>(user)] = alpha;
            }
            sys.equations.append_row(row);
            sys.rhs.push_back(pack_symbols(comb.payload, field.degree()));
        }
    }
    return sys;
}

FrameOutcome solve_frame(const EquationSystem& system, const Plan& plan, int n_bc) {
    FrameOutcome out;
    out.slots = plan.slots;
    out.transmitted = static_cast<long>(plan.users.size());
    for (const auto& u : plan.users) out.replicas_sent += static_cast<long>(u.replicas.size());

    const auto sol = gf::solve_partial(system.equations, system.rhs);
    if (sol.inconsistent)
        throw std::logic_error("frame system inconsistent despite verified payloads");
    out.rank = sol.rank;
    for (std::size_t u = 0; u < sol.values.size(); ++u) {
        if (!sol.values[u]) continue;
        const auto bits = unpack_symbols(*sol.values[u], n_bc);
        if (bits != plan.users[u].message)
            throw std::logic_error("recovered message does not match the transmitted one");
        out.recovered_users.push_back(static_cast<int>(u));
    }
    out.recovered = static_cast<long>(out.recovered_users.size());
    out.lost = out.transmitted - out.recovered;
    return out;
}

Metrics compute_metrics(std::span<const FrameOutcome> outcomes, double code_rate) {
    if (outcomes.empty()) throw std::invalid_argument("no outcomes");
    Metrics m;
    m.frames = static_cast<long>(outcomes.size());
    long slots = 0, recovered = 0, transmitted = 0, lost = 0, replicas = 0, innov = 0;
    for (const auto& o : outcomes) {
        slots += o.slots;
        recovered += o.recovered;
        transmitted += o.transmitted;
        lost += o.lost;
        replicas += o.replicas_sent;
        innov += o.innovative_sum;
    }
    m.phi = static_cast<double>(recovered) / static_cast<double>(slots);
    m.sum_rate = code_rate * m.phi;
    m.g_realized = static_cast<double>(transmitted) / static_cast<double>(slots);
    m.no_traffic = transmitted == 0;
    m.plr = m.no_traffic ? 0.0 : static_cast<double>(lost) / static_cast<double>(transmitted);
    m.energy_eff = recovered == 0 ? std::numeric_limits<double>::infinity()
                                  : static_cast<double>(replicas) / static_cast<double>(recovered);
    m.innov_mean = static_cast<double>(innov) / static_cast<double>(slots);

    // normal-approximation half-widths
    double var_phi = 0.0, var_innov = 0.0;
    for (const auto& o : outcomes) {
        const double phi_f = static_cast<double>(o.recovered) / o.slots;
        const double innov_f = static_cast<double>(o.innovative_sum) / o.slots;
        var_phi += (phi_f - m.phi) * (phi_f - m.phi);
        var_innov += (innov_f - m.innov_mean) * (innov_f - m.innov_mean);
    }
    if (m.frames > 1) {
        var_phi /= static_cast<double>(m.frames - 1);
        var_innov /= static_cast<double>(m.frames - 1);
        m.ci_phi = 1.96 * std::sqrt(var_phi / static_cast<double>(m.frames));
        m.ci_innov = 1.96 * std::sqrt(var_innov / static_cast<double>(m.frames));
    }
    if (transmitted > 0)
        m.ci_plr = 1.96 * std::sqrt(std::max(m.plr * (1.0 - m.plr), 0.0) /
                                    static_cast<double>(transmitted));
    return m;
}

}  // namespace snd::frame
