#include <cmath>
#include <limits>

#include "snd/kernels.hpp"

namespace snd::kernels::scalar {

void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out) {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y[i];
        double m1 = ninf, m0 = ninf;
        for (std::size_t b = 0; b < nlev; ++b) {
            if (target[b] > 1) continue;
            const double d = yi - levels[b];
            const double e = -(d * d);
            if (target[b] == 1) {
                if (e > m1) m1 = e;
            } else {
                if (e > m0) m0 = e;
            }
        }
        double s1 = 0.0, s0 = 0.0;
        for (std::size_t b = 0; b < nlev; ++b) {
            if (target[b] > 1) continue;
            const double d = yi - levels[b];
            const double e = -(d * d);
            if (target[b] == 1)
                s1 += std::exp(e - m1);
            else
                s0 += std::exp(e - m0);
        }
        out[i] = (m1 + std::log(s1)) - (m0 + std::log(s0));
    }
}

void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y[i];
        double* row = out + i * nlev;
        for (std::size_t b = 0; b < nlev; ++b) {
            const double d = yi - levels[b];
            row[b] = std::exp(-(d * d));
        }
    }
}

void wht(double* v, std::size_t len) {
    for (std::size_t half = 1; half < len; half <<= 1) {
        for (std::size_t i = 0; i < len; i += half << 1) {
            for (std::size_t j = i; j < i + half; ++j) {
                const double a = v[j];
                const double b = v[j + half];
                v[j] = a + b;
                v[j + half] = a - b;
            }
        }
    }
}

}  // namespace snd::kernels::scalar
