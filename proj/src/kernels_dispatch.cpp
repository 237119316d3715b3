#include "snd/kernels.hpp"

namespace snd::kernels {

namespace {

struct Vtable {
    Backend backend;
    void (*marginal_llr)(const double*, std::size_t, const double*, const std::uint8_t*,
                         std::size_t, double*);
    void (*symbol_scores)(const double*, std::size_t, const double*, std::size_t, double*);
    void (*wht)(double*, std::size_t);
};

constexpr Vtable kScalar{Backend::scalar, &scalar::marginal_llr, &scalar::symbol_scores,
                         &scalar::wht};
constexpr Vtable kAvx2{Backend::avx2, &avx2::marginal_llr, &avx2::symbol_scores, &avx2::wht};

Vtable detect() { return avx2::available() ? kAvx2 : kScalar; }

Vtable& vtable() {
    static Vtable v = detect();
    return v;
}

}  // namespace

Backend active_backend() { return vtable().backend; }

bool set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2::available()) return false;
    vtable() = (b == Backend::avx2) ? kAvx2 : kScalar;
    return true;
}

void reset_backend() { vtable() = detect(); }

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void marginal_llr(const double* y, std::size_t n, const double* levels,
                  const std::uint8_t* target, std::size_t nlev, double* out) {
    vtable().marginal_llr(y, n, levels, target, nlev, out);
}

void symbol_scores(const double* y, std::size_t n, const double* levels,
                   std::size_t nlev, double* out) {
    vtable().symbol_scores(y, n, levels, nlev, out);
}

void wht(double* v, std::size_t len) { vtable().wht(v, len); }

}  // namespace snd::kernels
