#pragma once

#include "snd/gf2m.hpp"
#include "snd/phydec.hpp"

namespace snd::frame {

enum class Policy { fixed, bernoulli };

struct Replica {
    int slot = 0;
    gf::Elem coeff = 1;  // nonzero precoding coefficient for this replica
};

struct ActiveUser {
    code::Message message;
    std::vector<Replica> replicas;
};

struct Plan {
    int slots = 0;  // S
    std::vector<ActiveUser> users;
};

struct TrafficConfig {
    double load = 1.0;          // G, packets per slot offered by the population
    int slots = 10;             // S
    long population = 1000000;  // M
    Policy policy = Policy::fixed;
    int repetitions = 2;        // fixed policy: replicas per message
    double bernoulli_p = 0.5;   // bernoulli policy: per-slot transmit probability
    int message_bits = 288;
};

// Packet count per frame is Poisson(G*S); replica slots follow the policy
// (fixed: d distinct slots; bernoulli: at most one replica per slot, each slot
// with probability p). Coefficients are uniform over the nonzero field elements.
Plan generate_traffic(const TrafficConfig& cfg, const gf::Field& field, Rng& rng);

// Little-endian packing: bit j of group g is bit j of symbol g.
std::vector<gf::Elem> pack_symbols(const code::Message& bits, int n_bc);
code::Message unpack_symbols(std::span<const gf::Elem> symbols, int n_bc);

// Multiply each n_bc-bit group of u, read as a field element, by alpha.
code::Message precode(const code::Message& u, gf::Elem alpha, const gf::Field& field);

// One row per decoded combination: coefficient alpha_{u,j} in the column of
// each indicated user, decoded XOR payload re-read as field symbols on the right.
struct EquationSystem {
    gf::Matrix equations;
    std::vector<std::vector<gf::Elem>> rhs;

    explicit EquationSystem(const gf::Field& field, std::size_t unknowns)
        : equations(field, 0, unknowns) {}
};

EquationSystem assemble_system(const Plan& plan,
                               std::span<const std::vector<int>> slot_users,
                               std::span<const phydec::SlotResult> slot_results,
                               const gf::Field& field);

struct FrameOutcome {
    long transmitted = 0;  // N^tx
    long recovered = 0;
    long lost = 0;
    long replicas_sent = 0;
    long innovative_sum = 0;  // sum of per-slot ranks
    long blocked_slots = 0;
    int slots = 0;
    std::size_t rank = 0;  // rank of the frame system
    std::vector<int> recovered_users;
    phydec::WorkCounters work;
};

// Gaussian recovery of every uniquely determined message; recovered symbol
// vectors are unpacked back to bits and must match the plan (the payloads are
// genie-verified, so an inconsistent system is a logic error).
FrameOutcome solve_frame(const EquationSystem& system, const Plan& plan, int n_bc);

struct Metrics {
    double phi = 0.0;         // recovered messages per slot
    double sum_rate = 0.0;    // R * phi
    double plr = 0.0;         // lost / transmitted, repetitions not counted
    double energy_eff = 0.0;  // replicas sent per recovered message
    double innov_mean = 0.0;  // mean slot rank
    double g_realized = 0.0;  // transmitted / slots
    double ci_phi = 0.0;
    double ci_plr = 0.0;
    double ci_innov = 0.0;
    long frames = 0;
    bool no_traffic = false;
};

Metrics compute_metrics(std::span<const FrameOutcome> outcomes, double code_rate);

}  // namespace snd::frame
