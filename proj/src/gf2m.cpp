#include "snd/gf2m.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace snd::gf {

namespace {

int poly_degree(std::uint32_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

// Remainder of a modulo b over GF(2)[x].
std::uint32_t poly_mod(std::uint32_t a, std::uint32_t b) {
    const int db = poly_degree(b);
    int da = poly_degree(a);
    while (da >= db) {
        a ^= b << (da - db);
        da = poly_degree(a);
    }
    return a;
}

}  // namespace

bool is_irreducible(std::uint32_t poly, int m) {
    if (poly_degree(poly) != m) return false;
    if (m == 1) return true;
    if ((poly & 1u) == 0) return false;  // divisible by x
    // trial division by every polynomial of degree 1..m/2
    for (int d = 1; 2 * d <= m; ++d) {
        for (std::uint32_t q = (1u << d); q < (2u << d); ++q) {
            if (poly_mod(poly, q) == 0) return false;
        }
    }
    return true;
}

std::uint32_t FieldSpec::default_poly(int m) {
    if (m < 1 || m > 16) throw std::invalid_argument("field degree must be in [1,16]");
    static std::array<std::uint32_t, 17> cache{};
    if (cache[m] != 0) return cache[m];
    for (std::uint32_t p = (1u << m) + 1;; p += 2) {
        if (is_irreducible(p, m)) {
            cache[m] = p;
            return p;
        }
    }
}

Field::Field(int m) : Field(m, FieldSpec::default_poly(m)) {}

Field::Field(int m, std::uint32_t reduction_poly) {
    if (m < 1 || m > 16) throw std::invalid_argument("field degree must be in [1,16]");
    if (!is_irreducible(reduction_poly, m))
        throw std::invalid_argument("reduction polynomial is not irreducible of the stated degree");
    spec_ = {m, reduction_poly};
    if (m > 12) return;  // table-free above 2^12

    const std::uint32_t q = 1u << m;
    // find a generator, then fill exp/log
    for (Elem g = 2; g < q; ++g) {
        std::vector<Elem> exp;
        exp.reserve(2 * (q - 1));
        Elem x = 1;
        bool primitive = true;
        for (std::uint32_t i = 0; i < q - 1; ++i) {
            exp.push_back(x);
            x = mul_direct(x, g);
            if (x == 1 && i + 1 < q - 1) {
                primitive = false;
                break;
            }
        }
        if (!primitive || x != 1) continue;
        auto t = std::make_shared<Tables>();
        t->exp = exp;
        t->exp.insert(t->exp.end(), exp.begin(), exp.end());
        t->log.assign(q, 0);
        for (std::uint32_t i = 0; i < q - 1; ++i) t->log[exp[i]] = static_cast<int>(i);
        tables_ = std::move(t);
        return;
    }
    throw std::logic_error("no generator found");  // unreachable for valid fields
}

Elem Field::mul_direct(Elem a, Elem b) const {
    const int m = spec_.m;
    const std::uint32_t high_bit = 1u << m;
    std::uint32_t acc = 0;
    std::uint32_t aa = a;
    std::uint32_t bb = b;
    while (bb) {
        if (bb & 1u) acc ^= aa;
        bb >>= 1;
        aa <<= 1;
        if (aa & high_bit) aa ^= spec_.reduction_poly;
    }
    return static_cast<Elem>(acc);
}

Elem Field::mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    if (tables_) {
        const std::uint32_t q1 = order() - 1;
        const int idx = tables_->log[a] + tables_->log[b];
        return tables_->exp[static_cast<std::size_t>(idx) % (2 * q1)];
    }
    return mul_direct(a, b);
}

Elem Field::inv(Elem a) const {
    if (a == 0) throw std::domain_error("zero has no multiplicative inverse");
    const std::uint32_t q1 = order() - 1;
    if (tables_) return tables_->exp[q1 - static_cast<std::uint32_t>(tables_->log[a])];
    return pow(a, q1 - 1);  // a^(q-2)
}

Elem Field::pow(Elem a, unsigned e) const {
    Elem r = 1;
    Elem base = a;
    while (e) {
        if (e & 1u) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

Matrix::Matrix(Field field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), entries_(rows * cols, 0) {}

void Matrix::set(std::size_t r, std::size_t c, Elem v) {
    if (v >= field_.order()) throw std::invalid_argument("entry outside field");
    entries_[r * cols_ + c] = v;
}

void Matrix::append_row(std::span<const Elem> row) {
    if (row.size() != cols_) throw std::invalid_argument("row width mismatch");
    for (Elem v : row)
        if (v >= field_.order()) throw std::invalid_argument("entry outside field");
    entries_.insert(entries_.end(), row.begin(), row.end());
    ++rows_;
}

std::size_t Matrix::rank_reference() const {
    std::vector<Elem> w(entries_);
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows_ && w[pivot * cols_ + c] == 0) ++pivot;
        if (pivot == rows_) continue;
        std::swap_ranges(w.begin() + static_cast<std::ptrdiff_t>(pivot * cols_),
                         w.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * cols_),
                         w.begin() + static_cast<std::ptrdiff_t>(rank * cols_));
        const Elem pinv = field_.inv(w[rank * cols_ + c]);
        for (std::size_t j = c; j < cols_; ++j) w[rank * cols_ + j] = field_.mul(w[rank * cols_ + j], pinv);
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == rank) continue;
            const Elem f = w[r * cols_ + c];
            if (f == 0) continue;
            for (std::size_t j = c; j < cols_; ++j)
                w[r * cols_ + j] ^= field_.mul(f, w[rank * cols_ + j]);
        }
        ++rank;
    }
    return rank;
}

std::size_t Matrix::rank_gf2_bitpacked() const {
    const std::size_t words = (cols_ + 63) / 64;
    std::vector<std::uint64_t> packed(rows_ * words, 0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            if (entries_[r * cols_ + c]) packed[r * words + (c >> 6)] |= 1ull << (c & 63);

    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
        const std::size_t w = c >> 6;
        const std::uint64_t bit = 1ull << (c & 63);
        std::size_t pivot = rank;
        while (pivot < rows_ && !(packed[pivot * words + w] & bit)) ++pivot;
        if (pivot == rows_) continue;
        if (pivot != rank)
            std::swap_ranges(packed.begin() + static_cast<std::ptrdiff_t>(pivot * words),
                             packed.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * words),
                             packed.begin() + static_cast<std::ptrdiff_t>(rank * words));
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r != rank && (packed[r * words + w] & bit)) {
                for (std::size_t j = w; j < words; ++j) packed[r * words + j] ^= packed[rank * words + j];
            }
        }
        ++rank;
    }
    return rank;
}

std::size_t Matrix::rank() const {
    if (field_.degree() == 1) return rank_gf2_bitpacked();
    return rank_reference();
}

std::size_t PartialSolution::recovered_count() const {
    std::size_t n = 0;
    for (const auto& v : values)
        if (v) ++n;
    return n;
}

PartialSolution solve_partial(const Matrix& a, const std::vector<std::vector<Elem>>& rhs) {
    if (rhs.size() != a.rows()) throw std::invalid_argument("rhs row count mismatch");
    const std::size_t payload_len = rhs.empty() ? 0 : rhs.front().size();
    for (const auto& row : rhs)
        if (row.size() != payload_len) throw std::invalid_argument("rhs rows must share one length");

    const Field& f = a.field();
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::vector<Elem> w(rows * cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) w[r * cols + c] = a.at(r, c);
    std::vector<std::vector<Elem>> b(rhs);

    PartialSolution out;
    out.values.assign(cols, std::nullopt);

    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && w[pivot * cols + c] == 0) ++pivot;
        if (pivot == rows) continue;
        if (pivot != rank) {
            std::swap_ranges(w.begin() + static_cast<std::ptrdiff_t>(pivot * cols),
                             w.begin() + static_cast<std::ptrdiff_t>((pivot + 1) * cols),
                             w.begin() + static_cast<std::ptrdiff_t>(rank * cols));
            std::swap(b[pivot], b[rank]);
        }
        const Elem pinv = f.inv(w[rank * cols + c]);
        for (std::size_t j = c; j < cols; ++j) w[rank * cols + j] = f.mul(w[rank * cols + j], pinv);
        for (auto& sym : b[rank]) sym = f.mul(sym, pinv);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            const Elem fac = w[r * cols + c];
            if (fac == 0) continue;
            for (std::size_t j = c; j < cols; ++j) w[r * cols + j] ^= f.mul(fac, w[rank * cols + j]);
            for (std::size_t s = 0; s < payload_len; ++s) b[r][s] ^= f.mul(fac, b[rank][s]);
        }
        ++rank;
    }
    out.rank = rank;

    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t nonzero = 0;
        std::size_t col = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            if (w[r * cols + c] != 0) {
                ++nonzero;
                col = c;
            }
        }
        if (nonzero == 0) {
            for (Elem s : b[r])
                if (s != 0) out.inconsistent = true;
        } else if (nonzero == 1) {
            out.values[col] = b[r];  // pivot already scaled to 1
        }
    }
    return out;
}

double full_rank_probability(int n, int delta, double q) {
    if (n < 1 || delta < 0 || q < 2.0) throw std::invalid_argument("full_rank_probability domain");
    double prod = 1.0;
    for (int i = 1; i <= n; ++i) prod *= 1.0 - std::pow(q, static_cast<double>(i - 1 - n - delta));
    return prod;
}

}  // namespace snd::gf
