#pragma once

#include <cstdint>
#include <string>

#include "fuelcast/core.hpp"

namespace fuelcast::synth {

/// Deterministic generator state (splitmix64): identical output on every
/// platform for a given seed.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

struct SynthConfig {
    std::uint64_t seed = 1;
    std::string region = "SYN";
    std::size_t days = 200;
    std::size_t fuels = 3;
    Date start = Date{std::chrono::year{2019} / 1 / 1};
    double base_total_mwh = 100000.0;
    double seasonal_amplitude = 0.10;  // weekly sinusoid in the shares
    double trend_amplitude = 0.20;     // slow drift between two base mixes
    double noise_amplitude = 0.02;
};

/// Seeded panel with a random base mix, a slow transition toward a second
/// mix, weekly share seasonality and noise. All amplitudes at zero produce
/// exactly time-constant shares and totals.
GenerationPanel make_synthetic_panel(const SynthConfig& config);

}  // namespace fuelcast::synth
