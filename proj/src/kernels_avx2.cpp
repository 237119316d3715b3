#include "snd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace snd::kernels::avx2 {

bool available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

namespace {

// exp for 4 doubles: Cody-Waite range reduction + degree-13 Taylor on
// [-ln2/2, ln2/2], exponent reinserted via the IEEE-754 bit layout.
// Inputs below -708 flush to zero; callers never exceed +0.
inline __m256d exp4(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);  // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i pow2 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));

    const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
    return _mm256_andnot_pd(underflow, res);
}

inline __m256d neg_sq(__m256d d) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    return _mm256_xor_pd(_mm256_mul_pd(d, d), sign);
}

}  // namespace

void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out) {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d y4 = _mm256_loadu_pd(y + i);
        __m256d m1 = _mm256_set1_pd(ninf);
        __m256d m0 = _mm256_set1_pd(ninf);
        for (std::size_t b = 0; b < nlev; ++b) {
            if (target[b] > 1) continue;
            const __m256d e = neg_sq(_mm256_sub_pd(y4, _mm256_set1_pd(levels[b])));
            if (target[b] == 1)
                m1 = _mm256_max_pd(m1, e);
            else
                m0 = _mm256_max_pd(m0, e);
        }
        __m256d s1 = _mm256_setzero_pd();
        __m256d s0 = _mm256_setzero_pd();
        for (std::size_t b = 0; b < nlev; ++b) {
            if (target[b] > 1) continue;
            const __m256d e = neg_sq(_mm256_sub_pd(y4, _mm256_set1_pd(levels[b])));
            if (target[b] == 1)
                s1 = _mm256_add_pd(s1, exp4(_mm256_sub_pd(e, m1)));
            else
                s0 = _mm256_add_pd(s0, exp4(_mm256_sub_pd(e, m0)));
        }
        alignas(32) double am1[4], am0[4], as1[4], as0[4];
        _mm256_store_pd(am1, m1);
        _mm256_store_pd(am0, m0);
        _mm256_store_pd(as1, s1);
        _mm256_store_pd(as0, s0);
        for (int j = 0; j < 4; ++j)
            out[i + j] = (am1[j] + std::log(as1[j])) - (am0[j] + std::log(as0[j]));
    }
    if (i < n) scalar::marginal_llr(y + i, n - i, levels, target, nlev, out + i);
}

void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const __m256d y4 = _mm256_set1_pd(y[i]);
        double* row = out + i * nlev;
        std::size_t b = 0;
        for (; b + 4 <= nlev; b += 4) {
            const __m256d lv = _mm256_loadu_pd(levels + b);
            _mm256_storeu_pd(row + b, exp4(neg_sq(_mm256_sub_pd(y4, lv))));
        }
        for (; b < nlev; ++b) {
            const double d = y[i] - levels[b];
            row[b] = std::exp(-(d * d));
        }
    }
}

void wht(double* v, std::size_t len) {
    for (std::size_t half = 1; half < len; half <<= 1) {
        if (half < 4) {
            for (std::size_t i = 0; i < len; i += half << 1) {
                for (std::size_t j = i; j < i + half; ++j) {
                    const double a = v[j];
                    const double b = v[j + half];
                    v[j] = a + b;
                    v[j + half] = a - b;
                }
            }
            continue;
        }
        for (std::size_t i = 0; i < len; i += half << 1) {
            for (std::size_t j = i; j < i + half; j += 4) {
                const __m256d a = _mm256_loadu_pd(v + j);
                const __m256d b = _mm256_loadu_pd(v + j + half);
                _mm256_storeu_pd(v + j, _mm256_add_pd(a, b));
                _mm256_storeu_pd(v + j + half, _mm256_sub_pd(a, b));
            }
        }
    }
}

}  // namespace snd::kernels::avx2

#else  // non-x86: report unavailable, dispatch falls back to scalar

namespace snd::kernels::avx2 {
bool available() { return false; }
void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out) {
    scalar::marginal_llr(y, n, levels, target, nlev, out);
}
void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out) {
    scalar::symbol_scores(y, n, levels, nlev, out);
}
void wht(double* v, std::size_t len) { scalar::wht(v, len); }
}  // namespace snd::kernels::avx2

#endif
