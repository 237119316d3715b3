#include "snd/bp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snd/kernels.hpp"

namespace snd::code {

namespace {

inline double clamp_llr(double v) { return std::clamp(v, -kLlrClamp, kLlrClamp); }

}  // namespace

SoftDecodeResult decode_soft(std::span<const double> llrs, const CodeSpec& spec, int max_iters) {
    if (static_cast<int>(llrs.size()) != spec.n) throw std::invalid_argument("llr length mismatch");
    const std::size_t num_edges = spec.chk_var.size();
    const std::size_t num_checks = spec.checks.size();

    std::vector<double> v2c(num_edges);
    std::vector<double> c2v(num_edges, 0.0);
    for (std::size_t e = 0; e < num_edges; ++e)
        v2c[e] = clamp_llr(llrs[static_cast<std::size_t>(spec.chk_var[e])]);

    std::vector<double> tanh_buf(static_cast<std::size_t>(spec.max_check_degree));
    std::vector<double> fwd(static_cast<std::size_t>(spec.max_check_degree) + 1);
    std::vector<std::uint8_t> hard(static_cast<std::size_t>(spec.n));

    SoftDecodeResult out;
    for (int iter = 1; iter <= max_iters; ++iter) {
        out.iterations = iter;

        for (std::size_t c = 0; c < num_checks; ++c) {
            const int begin = spec.chk_start[c];
            const int deg = spec.chk_start[c + 1] - begin;
            for (int j = 0; j < deg; ++j)
                tanh_buf[static_cast<std::size_t>(j)] =
                    std::tanh(0.5 * v2c[static_cast<std::size_t>(begin + j)]);
            // sign from the parity algebra: extrinsic mean of (-1)^bit is the
            // product of the neighbours' means, each of which is -tanh(L/2)
            const double sign = (deg % 2 == 0) ? 1.0 : -1.0;
            fwd[0] = 1.0;
            for (int j = 0; j < deg; ++j)
                fwd[static_cast<std::size_t>(j) + 1] =
                    fwd[static_cast<std::size_t>(j)] * tanh_buf[static_cast<std::size_t>(j)];
            double suffix = 1.0;
            for (int j = deg - 1; j >= 0; --j) {
                const double prod = fwd[static_cast<std::size_t>(j)] * suffix;
                c2v[static_cast<std::size_t>(begin + j)] =
                    clamp_llr(sign * 2.0 * std::atanh(prod));
                suffix *= tanh_buf[static_cast<std::size_t>(j)];
            }
        }

        for (int v = 0; v < spec.n; ++v) {
            double total = llrs[static_cast<std::size_t>(v)];
            for (int ei = spec.var_start[v]; ei < spec.var_start[v + 1]; ++ei)
                total += c2v[static_cast<std::size_t>(spec.var_edge[ei])];
            hard[static_cast<std::size_t>(v)] = total > 0.0 ? 1 : 0;
            for (int ei = spec.var_start[v]; ei < spec.var_start[v + 1]; ++ei) {
                const std::size_t e = static_cast<std::size_t>(spec.var_edge[ei]);
                v2c[e] = clamp_llr(total - c2v[e]);
            }
        }

        bool clean = true;
        for (std::size_t c = 0; c < num_checks && clean; ++c) {
            std::uint8_t acc = 0;
            for (int j = spec.chk_start[c]; j < spec.chk_start[c + 1]; ++j)
                acc ^= hard[static_cast<std::size_t>(spec.chk_var[j])];
            clean = acc == 0;
        }
        if (clean) {
            out.message = extract_message(hard, spec);
            return out;
        }
    }
    return out;
}

void SymbolDist::normalize() {
    const std::size_t q = static_cast<std::size_t>(labels());
    for (int t = 0; t < positions; ++t) kernels::normalize_floor(row(t), q, kProbFloor);
}

JointDecodeResult decode_joint(const SymbolDist& dist, const CodeSpec& spec, int max_iters) {
    if (dist.positions != spec.n) throw std::invalid_argument("distribution length mismatch");
    if (dist.users < 1) throw std::invalid_argument("need at least one user");
    const std::size_t q = static_cast<std::size_t>(dist.labels());
    const std::size_t num_edges = spec.chk_var.size();
    const std::size_t num_checks = spec.checks.size();

    SymbolDist channel = dist;
    channel.normalize();

    std::vector<double> v2c(num_edges * q);
    std::vector<double> c2v(num_edges * q, 1.0);
    for (std::size_t e = 0; e < num_edges; ++e)
        std::copy_n(channel.row(spec.chk_var[e]), q, v2c.data() + e * q);

    const std::size_t maxdeg = static_cast<std::size_t>(spec.max_check_degree);
    std::vector<double> wht_in(maxdeg * q);
    std::vector<double> fwd((maxdeg + 1) * q);
    std::vector<double> suffix(q);
    std::vector<double> post(q);
    std::vector<int> labels(static_cast<std::size_t>(spec.n));

    JointDecodeResult out;
    for (int iter = 1; iter <= max_iters; ++iter) {
        out.iterations = iter;

        for (std::size_t c = 0; c < num_checks; ++c) {
            const int begin = spec.chk_start[c];
            const std::size_t deg = static_cast<std::size_t>(spec.chk_start[c + 1] - begin);
            for (std::size_t j = 0; j < deg; ++j) {
                double* w = wht_in.data() + j * q;
                std::copy_n(v2c.data() + (static_cast<std::size_t>(begin) + j) * q, q, w);
                kernels::wht(w, q);
            }
            std::fill_n(fwd.data(), q, 1.0);
            for (std::size_t j = 0; j < deg; ++j)
                kernels::vec_mul(fwd.data() + j * q, wht_in.data() + j * q,
                                 fwd.data() + (j + 1) * q, q);
            std::fill(suffix.begin(), suffix.end(), 1.0);
            for (std::size_t j = deg; j-- > 0;) {
                double* msg = c2v.data() + (static_cast<std::size_t>(begin) + j) * q;
                kernels::vec_mul(fwd.data() + j * q, suffix.data(), msg, q);
                kernels::wht(msg, q);  // self-inverse up to scale; normalization absorbs it
                kernels::normalize_floor(msg, q, kProbFloor);
                kernels::vec_mul(suffix.data(), wht_in.data() + j * q, suffix.data(), q);
            }
        }

        for (int v = 0; v < spec.n; ++v) {
            const int e_begin = spec.var_start[v];
            const int e_end = spec.var_start[v + 1];
            std::copy_n(channel.row(v), q, post.data());
            for (int ei = e_begin; ei < e_end; ++ei)
                kernels::vec_mul(post.data(),
                                 c2v.data() + static_cast<std::size_t>(spec.var_edge[ei]) * q,
                                 post.data(), q);
            kernels::normalize_floor(post.data(), q, kProbFloor);
            for (int ei = e_begin; ei < e_end; ++ei) {
                const std::size_t e = static_cast<std::size_t>(spec.var_edge[ei]);
                double* msg = v2c.data() + e * q;
                std::copy_n(channel.row(v), q, msg);
                for (int ej = e_begin; ej < e_end; ++ej) {
                    if (ej == ei) continue;
                    kernels::vec_mul(msg, c2v.data() + static_cast<std::size_t>(spec.var_edge[ej]) * q,
                                     msg, q);
                }
                kernels::normalize_floor(msg, q, kProbFloor);
            }
            int best = 0;
            for (std::size_t b = 1; b < q; ++b)
                if (post[b] > post[static_cast<std::size_t>(best)]) best = static_cast<int>(b);
            labels[static_cast<std::size_t>(v)] = best;
        }

        bool clean = true;
        for (std::size_t c = 0; c < num_checks && clean; ++c) {
            int acc = 0;
            for (int j = spec.chk_start[c]; j < spec.chk_start[c + 1]; ++j)
                acc ^= labels[static_cast<std::size_t>(spec.chk_var[j])];
            clean = acc == 0;
        }
        if (clean) {
            out.converged = true;
            break;
        }
    }

    out.messages.reserve(static_cast<std::size_t>(dist.users));
    Codeword cw(static_cast<std::size_t>(spec.n));
    for (int u = 0; u < dist.users; ++u) {
        for (int v = 0; v < spec.n; ++v)
            cw[static_cast<std::size_t>(v)] =
                static_cast<std::uint8_t>((labels[static_cast<std::size_t>(v)] >> u) & 1);
        out.messages.push_back(extract_message(cw, spec));
    }
    return out;
}

}  // namespace snd::code
