#pragma once

#include <optional>
#include <span>

#include "snd/code.hpp"

namespace snd::code {

inline constexpr double kLlrClamp = 69.07755278982137;  // ln(1e30)
inline constexpr double kProbFloor = 1e-30;
inline constexpr int kDefaultBpIters = 50;

struct SoftDecodeResult {
    std::optional<Message> message;
    int iterations = 0;
};

// Sum-product decoding in the log domain. L-value convention: positive favors
// bit 1. Succeeds when the hard decisions satisfy every check within
// max_iters; the returned message re-encodes to that codeword.
SoftDecodeResult decode_soft(std::span<const double> llrs, const CodeSpec& spec,
                             int max_iters = kDefaultBpIters);

// Per-position distributions over (F2)^K labels. Bit k of a label is user k's
// coded bit, so label b maps to signal sum_k h_k * mu((b>>k)&1).
struct SymbolDist {
    int users = 0;      // K
    int positions = 0;  // n
    std::vector<double> p;  // positions x 2^K, row-major

    SymbolDist() = default;
    SymbolDist(int users_, int positions_)
        : users(users_), positions(positions_),
          p(static_cast<std::size_t>(positions_) << users_, 0.0) {}

    int labels() const { return 1 << users; }
    double* row(int pos) { return p.data() + (static_cast<std::size_t>(pos) << users); }
    const double* row(int pos) const { return p.data() + (static_cast<std::size_t>(pos) << users); }

    void normalize();  // floor at kProbFloor, scale rows to unit sum
};

struct JointDecodeResult {
    std::vector<Message> messages;  // K per-user estimates, valid even without convergence
    bool converged = false;
    int iterations = 0;
};

// Belief propagation on the code's factor graph with 2^K-dimensional vector
// symbols; each check forces the componentwise XOR of its incident labels to
// zero. Check-node convolution over (F2)^K runs through the Walsh-Hadamard
// transform. Hard decisions split into K per-user messages.
JointDecodeResult decode_joint(const SymbolDist& dist, const CodeSpec& spec,
                               int max_iters = kDefaultBpIters);

}  // namespace snd::code
