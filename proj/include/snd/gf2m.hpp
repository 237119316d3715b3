#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace snd::gf {

using Elem = std::uint16_t;

// Reduction polynomial bitmasks include the x^m term: GF(16) with x^4+x+1 is {4, 0x13}.
struct FieldSpec {
    int m = 1;
    std::uint32_t reduction_poly = 0x3;

    // Smallest irreducible polynomial of degree m (as an integer bitmask).
    static std::uint32_t default_poly(int m);
};

bool is_irreducible(std::uint32_t poly, int m);

// GF(2^m), 1 <= m <= 16. Addition is XOR; multiplication reduces carry-less
// products by the reduction polynomial. Fields with m <= 12 build exp/log
// tables on construction and use them for mul/inv; mul_direct is always the
// shift-and-xor reference. Immutable and cheap to copy.
class Field {
  public:
    explicit Field(int m);
    Field(int m, std::uint32_t reduction_poly);
    explicit Field(const FieldSpec& spec) : Field(spec.m, spec.reduction_poly) {}

    int degree() const { return spec_.m; }
    std::uint32_t order() const { return 1u << spec_.m; }
    const FieldSpec& spec() const { return spec_; }
    bool has_tables() const { return tables_ != nullptr; }

    Elem add(Elem a, Elem b) const { return a ^ b; }
    Elem mul(Elem a, Elem b) const;
    Elem mul_direct(Elem a, Elem b) const;  // reference path, no tables
    Elem inv(Elem a) const;                 // throws std::domain_error on 0
    Elem pow(Elem a, unsigned e) const;

  private:
    struct Tables {
        std::vector<Elem> exp;  // size 2*(q-1)
        std::vector<int> log;   // size q, log[0] unused
    };

    FieldSpec spec_;
    std::shared_ptr<const Tables> tables_;
};

// Dense row-major matrix over one field. Rank uses a bit-packed fast path for
// GF(2); rank_reference is the generic elimination both paths must agree with.
class Matrix {
  public:
    Matrix(Field field, std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const Field& field() const { return field_; }

    Elem at(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, Elem v);
    std::span<const Elem> row(std::size_t r) const { return {entries_.data() + r * cols_, cols_}; }
    void append_row(std::span<const Elem> row);

    std::size_t rank() const;
    std::size_t rank_reference() const;

  private:
    Field field_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Elem> entries_;

    std::size_t rank_gf2_bitpacked() const;
};

// Reduction outcome of [A | b]. values[c] is set iff unknown c is uniquely
// determined by the system; inconsistent marks a zero row of A paired with a
// nonzero right-hand side (determined unknowns still come from the consistent
// part).
struct PartialSolution {
    std::vector<std::optional<std::vector<Elem>>> values;
    std::size_t rank = 0;
    bool inconsistent = false;

    std::size_t recovered_count() const;
};

// Right-hand sides are symbol vectors, one per row of A, all the same length.
PartialSolution solve_partial(const Matrix& a, const std::vector<std::vector<Elem>>& rhs);

// Probability that a random n x (n+delta) matrix over a field of order q has
// rank n: prod_{i=1..n} (1 - q^(i-1) / q^(n+delta)).
double full_rank_probability(int n, int delta, double q);

}  // namespace snd::gf
