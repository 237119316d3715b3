#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace snd::code {

using Bits = std::vector<std::uint8_t>;
using Message = Bits;
using Codeword = Bits;

inline constexpr std::uint64_t kDefaultCodeSeed = 12345;

// Binary linear code shared by all users. `checks` drives belief propagation;
// the systematic encoding map (info_positions + parity_rules) is derived from
// the reduced parity matrix, so every encoded word satisfies every check.
struct CodeSpec {
    int n = 0;
    int k = 0;
    std::vector<std::vector<int>> checks;  // per check: sorted bit positions

    std::vector<int> info_positions;  // ascending, size k; message bit j lands here
    // pivot position <- XOR of info positions (from the reduced parity matrix)
    std::vector<std::pair<int, std::vector<int>>> parity_rules;

    // flat bipartite adjacency, edges grouped by check
    std::vector<int> chk_start;  // size checks+1
    std::vector<int> chk_var;    // size E
    std::vector<int> var_start;  // size n+1
    std::vector<int> var_edge;   // size E
    int max_check_degree = 0;

    std::uint64_t fingerprint = 0;

    double rate() const { return static_cast<double>(k) / n; }
    int num_edges() const { return static_cast<int>(chk_var.size()); }
};

CodeSpec make_code_from_checks(int n, std::vector<std::vector<int>> checks);

// Standard alist interchange text (padded or unpadded index lists, 1-based).
CodeSpec load_alist(const std::string& text);
CodeSpec load_alist_file(const std::string& path);

// Deterministic quasi-cyclic rate-1/2 code: progressive-edge-growth on a
// 12x24 protograph with variable degree 3, lifted by z = n/24 circulants with
// seeded shifts. n must be a positive multiple of 24.
CodeSpec make_default_code(int n, std::uint64_t seed = kDefaultCodeSeed);

Codeword encode(const Message& u, const CodeSpec& spec);
bool satisfies_checks(const Codeword& c, const CodeSpec& spec);
Message extract_message(const Codeword& c, const CodeSpec& spec);

Message xor_messages(std::span<const Message> msgs);

}  // namespace snd::code
