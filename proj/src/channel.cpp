#include "snd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace snd::channel {

Realization draw_fading(int k, double snr_db, Rng& rng) {
    if (k < 0) throw std::invalid_argument("negative user count");
    Realization real;
    real.snr_db = snr_db;
    real.gains.reserve(static_cast<std::size_t>(k));
    const double scale = std::sqrt(std::pow(10.0, snr_db / 10.0) / 2.0);
    for (int i = 0; i < k; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        real.gains.push_back(scale * std::sqrt(re * re + im * im));
    }
    return real;
}

SlotObservation synthesize_slot(std::vector<code::Codeword> bursts,
                                std::vector<code::Message> messages, Realization realization,
                                Rng& noise_rng, bool noise_enabled, std::size_t samples_if_empty) {
    if (bursts.size() != realization.gains.size())
        throw std::invalid_argument("burst/gain count mismatch");
    if (messages.size() != bursts.size())
        throw std::invalid_argument("burst/message count mismatch");
    const std::size_t n = bursts.empty() ? samples_if_empty : bursts.front().size();
    for (const auto& b : bursts)
        if (b.size() != n) throw std::invalid_argument("burst length mismatch");

    SlotObservation slot;
    slot.samples.assign(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double y = 0.0;
        for (std::size_t k = 0; k < bursts.size(); ++k)
            y += realization.gains[k] * bpsk(bursts[k][t]);
        if (noise_enabled) y += noise_rng.normal();
        slot.samples[t] = y;
    }
    slot.realization = std::move(realization);
    slot.truth.codewords = std::move(bursts);
    slot.truth.messages = std::move(messages);
    return slot;
}

}  // namespace snd::channel
