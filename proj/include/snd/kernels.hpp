#pragma once

#include <cstddef>
#include <cstdint>

namespace snd::kernels {

// Hot inner loops of the receiver. Each kernel has a scalar reference
// implementation and an AVX2 variant; the free functions dispatch to the
// backend selected at startup (or forced by set_backend). The variants are
// equivalence-tested against each other in the kernel test suite.

enum class Backend { scalar, avx2 };

Backend active_backend();
bool set_backend(Backend b);  // false (and no change) if b is unavailable
void reset_backend();         // back to auto-detection
const char* backend_name(Backend b);

// Batched L-value marginalization over a fixed hypothesis set.
// levels[b] is the noiseless signal level of hypothesis b; target[b] routes it
// to the numerator set (1), the denominator set (0) or excludes it (any other
// value). out[i] = lse_{target=1} -(y[i]-level)^2  -  lse_{target=0} ditto,
// with lse the max-shifted log-sum-exp. Both sets must be nonempty.
void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out);

// Unnormalized per-position symbol scores: out[i*nlev + b] = exp(-(y[i]-levels[b])^2).
void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out);

// In-place Walsh-Hadamard transform; len must be a power of two. Unnormalized
// (apply twice to get len * identity).
void wht(double* v, std::size_t len);

namespace scalar {
void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out);
void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out);
void wht(double* v, std::size_t len);
}  // namespace scalar

namespace avx2 {
bool available();
void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out);
void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out);
void wht(double* v, std::size_t len);
}  // namespace avx2

inline void vec_mul(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

// Clamp every entry up to floor_value, then scale to unit sum.
inline void normalize_floor(double* v, std::size_t n, double floor_value) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] < floor_value) v[i] = floor_value;
        sum += v[i];
    }
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < n; ++i) v[i] *= inv;
}

}  // namespace snd::kernels
