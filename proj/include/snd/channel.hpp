#pragma once

#include <vector>

#include "snd/code.hpp"
#include "snd/random.hpp"

namespace snd::channel {

// One slot's fading state: block fading, one nonnegative amplitude per user,
// normalized so E[h^2] equals the linear average SNR against unit-variance noise.
struct Realization {
    std::vector<double> gains;
    double snr_db = 0.0;
};

// Ground truth carried alongside the samples; used only for the ideal
// (genie-aided) error detection at the receiver.
struct SlotTruth {
    std::vector<code::Message> messages;    // encoder inputs, one per collider
    std::vector<code::Codeword> codewords;
};

struct SlotObservation {
    std::vector<double> samples;
    Realization realization;
    SlotTruth truth;
};

inline double bpsk(std::uint8_t bit) { return bit ? 1.0 : -1.0; }

Realization draw_fading(int k, double snr_db, Rng& rng);

// y[t] = sum_k h_k * mu(c_k[t]) + w[t], w ~ N(0,1) (or zero when disabled).
// samples_if_empty sets the slot length when no burst is present.
SlotObservation synthesize_slot(std::vector<code::Codeword> bursts,
                                std::vector<code::Message> messages, Realization realization,
                                Rng& noise_rng, bool noise_enabled = true,
                                std::size_t samples_if_empty = 0);

}  // namespace snd::channel
