#include "snd/gf2m.hpp"

#include "oracles.hpp"
#include "snd/random.hpp"
#include "testing.hpp"

using namespace snd;

int main() {
    TEST_CASE("default polynomials are irreducible of the right degree") {
        for (int m = 1; m <= 16; ++m) {
            const auto p = gf::FieldSpec::default_poly(m);
            CHECK(gf::is_irreducible(p, m));
        }
        CHECK(gf::FieldSpec::default_poly(2) == 0x7);   // x^2+x+1
        CHECK(gf::FieldSpec::default_poly(4) == 0x13);  // x^4+x+1
    }
    TEST_END;

    TEST_CASE("reducible polynomial is rejected") {
        CHECK_THROWS(gf::Field(4, 0x15));  // x^4+x^2+1 = (x^2+x+1)^2
        CHECK_THROWS(gf::Field(3, 0x9));   // x^3+1 = (x+1)(x^2+x+1)
        CHECK_THROWS(gf::Field(3, 0x13));  // degree mismatch
    }
    TEST_END;

    TEST_CASE("multiplicative identity and absorbing zero in GF(16)") {
        const gf::Field f(4);
        for (gf::Elem a = 0; a < 16; ++a) {
            CHECK(f.mul(a, 1) == a);
            CHECK(f.mul(a, 0) == 0);
        }
    }
    TEST_END;

    TEST_CASE("GF(4) worked products and inverses") {
        const gf::Field f(2);  // x^2+x+1
        CHECK(f.mul(2, 2) == 3);  // x*x = x+1
        CHECK(f.inv(1) == 1);
        CHECK(f.inv(2) == 3);
        CHECK_THROWS(f.inv(0));
    }
    TEST_END;

    TEST_CASE("inverse found by exhaustive search matches gf_inv") {
        const gf::Field f(2);
        for (gf::Elem a = 1; a < 4; ++a) {
            gf::Elem found = 0;
            for (gf::Elem b = 1; b < 4; ++b)
                if (f.mul(a, b) == 1) found = b;
            CHECK(f.inv(a) == found);
        }
    }
    TEST_END;

    TEST_CASE("field axioms hold exhaustively for m <= 4") {
        for (int m = 1; m <= 4; ++m) {
            const gf::Field f(m);
            const unsigned q = f.order();
            for (unsigned a = 0; a < q; ++a) {
                for (unsigned b = 0; b < q; ++b) {
                    const auto ea = static_cast<gf::Elem>(a);
                    const auto eb = static_cast<gf::Elem>(b);
                    CHECK(f.mul(ea, eb) == f.mul(eb, ea));
                    for (unsigned c = 0; c < q; ++c) {
                        const auto ec = static_cast<gf::Elem>(c);
                        CHECK(f.mul(f.mul(ea, eb), ec) == f.mul(ea, f.mul(eb, ec)));
                        CHECK(f.mul(ea, static_cast<gf::Elem>(eb ^ ec)) ==
                              (f.mul(ea, eb) ^ f.mul(ea, ec)));
                    }
                }
                if (a != 0) CHECK(f.mul(static_cast<gf::Elem>(a), f.inv(static_cast<gf::Elem>(a))) == 1);
            }
        }
    }
    TEST_END;

    TEST_CASE("table-backed multiply agrees with the direct route") {
        for (int m : {2, 3, 4, 8}) {
            const gf::Field f(m);
            CHECK(f.has_tables());
            Rng rng(7);
            for (int t = 0; t < 2000; ++t) {
                const auto a = static_cast<gf::Elem>(rng.next_u64() & (f.order() - 1));
                const auto b = static_cast<gf::Elem>(rng.next_u64() & (f.order() - 1));
                CHECK(f.mul(a, b) == f.mul_direct(a, b));
            }
        }
        const gf::Field big(16);
        CHECK(!big.has_tables());
        Rng rng(9);
        for (int t = 0; t < 500; ++t) {
            const auto a = static_cast<gf::Elem>(rng.next_u64() & 0xffff);
            const auto b = static_cast<gf::Elem>(rng.next_u64() & 0xffff);
            if (a && b) CHECK(big.mul(big.mul(a, b), big.inv(b)) == a);
        }
    }
    TEST_END;

    TEST_CASE("rank of identity and of the dependent-row example") {
        const gf::Field f2(1);
        gf::Matrix id(f2, 3, 3);
        for (std::size_t i = 0; i < 3; ++i) id.set(i, i, 1);
        CHECK(id.rank() == 3);

        gf::Matrix m(f2, 3, 3);
        const int rows[3][3] = {{1, 0, 1}, {0, 1, 1}, {1, 1, 0}};  // row3 = row1 ^ row2
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) m.set(r, c, static_cast<gf::Elem>(rows[r][c]));
        CHECK(m.rank() == 2);
    }
    TEST_END;

    TEST_CASE("two-slot four-user example matrix is rank deficient over GF(2)") {
        const gf::Field f2(1);
        gf::Matrix m(f2, 4, 4);
        const int rows[4][4] = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 1, 0, 0}, {0, 1, 0, 1}};
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) m.set(r, c, static_cast<gf::Elem>(rows[r][c]));
        CHECK(m.rank() == 3);
    }
    TEST_END;

    TEST_CASE("bit-packed GF(2) rank equals the generic elimination") {
        const gf::Field f2(1);
        Rng rng(11);
        for (int t = 0; t < 200; ++t) {
            const std::size_t r = 1 + rng.next_u64() % 8;
            const std::size_t c = 1 + rng.next_u64() % 90;  // crosses the 64-bit word boundary
            gf::Matrix m(f2, r, c);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j)
                    m.set(i, j, static_cast<gf::Elem>(rng.next_u64() & 1));
            CHECK(m.rank() == m.rank_reference());
        }
    }
    TEST_END;

    TEST_CASE("rank equals the largest independent row subset (enumeration)") {
        Rng rng(13);
        for (const int m_deg : {1, 2}) {
            const gf::Field f(m_deg);
            for (int t = 0; t < 40; ++t) {
                const std::size_t r = 1 + rng.next_u64() % 5;
                const std::size_t c = 1 + rng.next_u64() % 5;
                gf::Matrix m(f, r, c);
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < c; ++j)
                        m.set(i, j, static_cast<gf::Elem>(rng.next_u64() % f.order()));
                CHECK(m.rank() == oracles::rank_by_enumeration(m));
            }
        }
    }
    TEST_END;

    TEST_CASE("partial solve: full-rank square system over GF(16) recovers everything") {
        const gf::Field f(4);
        Rng rng(17);
        for (int t = 0; t < 20; ++t) {
            gf::Matrix a(f, 4, 4);
            do {
                for (std::size_t i = 0; i < 4; ++i)
                    for (std::size_t j = 0; j < 4; ++j)
                        a.set(i, j, static_cast<gf::Elem>(rng.next_u64() % 16));
            } while (a.rank() < 4);
            std::vector<std::vector<gf::Elem>> x(4, std::vector<gf::Elem>(3));
            for (auto& row : x)
                for (auto& v : row) v = static_cast<gf::Elem>(rng.next_u64() % 16);
            std::vector<std::vector<gf::Elem>> b(4, std::vector<gf::Elem>(3, 0));
            for (std::size_t r = 0; r < 4; ++r)
                for (std::size_t cc = 0; cc < 4; ++cc)
                    for (std::size_t s = 0; s < 3; ++s) b[r][s] ^= f.mul(a.at(r, cc), x[cc][s]);
            const auto sol = gf::solve_partial(a, b);
            CHECK(!sol.inconsistent);
            CHECK(sol.rank == 4);
            CHECK(sol.recovered_count() == 4);
            for (std::size_t c = 0; c < 4; ++c) CHECK(*sol.values[c] == x[c]);
        }
    }
    TEST_END;

    TEST_CASE("partial solve: deficient system yields only the determined unknowns") {
        const gf::Field f2(1);
        gf::Matrix a(f2, 4, 4);
        const int rows[4][4] = {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 1, 0, 0}, {0, 1, 0, 1}};
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) a.set(r, c, static_cast<gf::Elem>(rows[r][c]));
        std::vector<std::vector<gf::Elem>> b{{1}, {0}, {1}, {1}};
        const auto sol = gf::solve_partial(a, b);
        CHECK(sol.rank == 3);
        CHECK(sol.recovered_count() < 4);
    }
    TEST_END;

    TEST_CASE("partial solve: empty system and inconsistency flag") {
        const gf::Field f(4);
        const gf::Matrix empty(f, 0, 5);
        const auto sol = gf::solve_partial(empty, {});
        CHECK(sol.recovered_count() == 0);
        CHECK(!sol.inconsistent);

        gf::Matrix a(f, 2, 2);
        a.set(0, 0, 1);
        // second row is zero but its rhs is not
        const auto bad = gf::solve_partial(a, {{5}, {7}});
        CHECK(bad.inconsistent);
        CHECK(bad.recovered_count() >= 1);  // x0 = 5 still comes out
    }
    TEST_END;

    TEST_CASE("full-rank probability worked values") {
        CHECK_CLOSE(gf::full_rank_probability(1, 0, 2), 0.5, 1e-15);
        CHECK_CLOSE(gf::full_rank_probability(2, 0, 2), 0.375, 1e-15);
        CHECK_CLOSE(gf::full_rank_probability(1, 1, 2), 0.75, 1e-15);
    }
    TEST_END;

    TEST_CASE("full-rank probability matches exhaustive enumeration up to 4 columns") {
        for (int n = 1; n <= 4; ++n)
            for (int delta = 0; n + delta <= 4; ++delta)
                CHECK_CLOSE(gf::full_rank_probability(n, delta, 2),
                            oracles::full_rank_fraction_gf2(n, delta), 1e-12);
    }
    TEST_END;

    TEST_CASE("full-rank probability is nondecreasing in delta and in q") {
        for (int n = 1; n <= 6; ++n) {
            for (int d = 0; d < 6; ++d) {
                CHECK(gf::full_rank_probability(n, d + 1, 2) >= gf::full_rank_probability(n, d, 2));
                CHECK(gf::full_rank_probability(n, d, 4) >= gf::full_rank_probability(n, d, 2));
                CHECK(gf::full_rank_probability(n, d, 256) >= gf::full_rank_probability(n, d, 4));
            }
        }
    }
    TEST_END;

    TEST_CASE("re-substitution: solved values satisfy every input equation") {
        const gf::Field f(3);
        Rng rng(23);
        for (int t = 0; t < 20; ++t) {
            const std::size_t n = 3 + rng.next_u64() % 3;
            gf::Matrix a(f, n, n);
            do {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        a.set(i, j, static_cast<gf::Elem>(rng.next_u64() % 8));
            } while (a.rank() < n);
            std::vector<std::vector<gf::Elem>> b(n, std::vector<gf::Elem>(2));
            for (auto& row : b)
                for (auto& v : row) v = static_cast<gf::Elem>(rng.next_u64() % 8);
            const auto sol = gf::solve_partial(a, b);
            CHECK(sol.recovered_count() == n);
            for (std::size_t r = 0; r < n; ++r) {
                std::vector<gf::Elem> acc(2, 0);
                for (std::size_t c = 0; c < n; ++c)
                    for (std::size_t s = 0; s < 2; ++s)
                        acc[s] ^= f.mul(a.at(r, c), (*sol.values[c])[s]);
                CHECK(acc == b[r]);
            }
        }
    }
    TEST_END;

    return testing::summary();
}
