#pragma once

// Independent oracles used by the tests: brute-force routes that never touch
// the implementation paths they check.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "snd/gf2m.hpp"

namespace oracles {

// Direct evaluation of the marginalized L-value: plain sums of exponentials,
// no Jacobian-logarithm folding, no max-shift.
inline double brute_llr_bit(double y, std::span<const double> gains, std::size_t user) {
    const std::size_t k = gains.size();
    double num = 0.0, den = 0.0;
    for (std::uint64_t b = 0; b < (1ull << k); ++b) {
        double level = 0.0;
        for (std::size_t i = 0; i < k; ++i) level += ((b >> i) & 1u) ? gains[i] : -gains[i];
        const double e = std::exp(-(y - level) * (y - level));
        if ((b >> user) & 1u)
            num += e;
        else
            den += e;
    }
    return std::log(num) - std::log(den);
}

inline double brute_llr_parity(double y, std::span<const double> gains) {
    const std::size_t k = gains.size();
    double odd = 0.0, even = 0.0;
    for (std::uint64_t b = 0; b < (1ull << k); ++b) {
        double level = 0.0;
        for (std::size_t i = 0; i < k; ++i) level += ((b >> i) & 1u) ? gains[i] : -gains[i];
        const double e = std::exp(-(y - level) * (y - level));
        if (std::popcount(b) & 1u)
            odd += e;
        else
            even += e;
    }
    return std::log(odd) - std::log(even);
}

// Direct O(q^2) convolution over the group (F2)^K: out[c] = sum_{a^b=c} x[a] y[b].
inline std::vector<double> group_convolution(std::span<const double> x,
                                             std::span<const double> y) {
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = 0; b < y.size(); ++b) out[a ^ b] += x[a] * y[b];
    return out;
}

// Rows are linearly independent iff no nonzero coefficient combination
// vanishes; checked by full enumeration over the field.
inline bool rows_independent(const snd::gf::Matrix& m, std::span<const std::size_t> rows) {
    const auto& f = m.field();
    const std::uint64_t q = f.order();
    std::uint64_t combos = 1;
    for (std::size_t i = 0; i < rows.size(); ++i) combos *= q;
    for (std::uint64_t c = 1; c < combos; ++c) {
        std::uint64_t rest = c;
        std::vector<snd::gf::Elem> acc(m.cols(), 0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto coeff = static_cast<snd::gf::Elem>(rest % q);
            rest /= q;
            if (coeff == 0) continue;
            for (std::size_t j = 0; j < m.cols(); ++j)
                acc[j] ^= f.mul(coeff, m.at(rows[i], j));
        }
        bool zero = true;
        for (auto v : acc) zero = zero && v == 0;
        if (zero) return false;
    }
    return true;
}

// Largest independent row subset, by enumeration of all subsets.
inline std::size_t rank_by_enumeration(const snd::gf::Matrix& m) {
    std::size_t best = 0;
    const std::size_t rows = m.rows();
    for (std::uint32_t mask = 1; mask < (1u << rows); ++mask) {
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < rows; ++i)
            if ((mask >> i) & 1u) subset.push_back(i);
        if (subset.size() <= best) continue;
        if (rows_independent(m, subset)) best = subset.size();
    }
    return best;
}

// Fraction of full-rank n x (n+delta) matrices over GF(2), by enumeration.
inline double full_rank_fraction_gf2(int n, int delta) {
    const int cols = n + delta;
    const std::uint64_t cells = static_cast<std::uint64_t>(n) * cols;
    const snd::gf::Field f2(1);
    std::uint64_t full = 0;
    for (std::uint64_t bits = 0; bits < (1ull << cells); ++bits) {
        snd::gf::Matrix m(f2, static_cast<std::size_t>(n), static_cast<std::size_t>(cols));
        for (std::uint64_t c = 0; c < cells; ++c)
            if ((bits >> c) & 1u)
                m.set(c / cols, c % cols, 1);
        if (m.rank_reference() == static_cast<std::size_t>(n)) ++full;
    }
    return static_cast<double>(full) / static_cast<double>(1ull << cells);
}

}  // namespace oracles
