#include "batnet/modulator.hpp"

#include <cmath>
#include <numbers>

#include "batnet/constellation.hpp"
#include "batnet/errors.hpp"

namespace batnet {

namespace {

// Wrapped shortest-path phase step to the next symbol.  When the implied
// transition frequency would reach Nyquist, the step takes the long way
// round instead (the receiver never looks at transition segments, so only
// the spectral placement changes).
double transition_step(double from_phase, double to_phase, const ModemConfig& config) {
    double delta = wrap_phase(to_phase - from_phase);
    const double ramp_hz = delta * config.sample_rate_hz /
                           (2.0 * std::numbers::pi * config.transition_samples);
    if (config.carrier_freq_hz + ramp_hz >= config.sample_rate_hz / 2.0)
        delta -= 2.0 * std::numbers::pi;
    return delta;
}

}  // namespace

std::vector<double> phase_schedule(std::span<const int> symbols, const ModemConfig& config) {
    config.validate();

    const int period = config.symbol_period_samples;
    const int steady = config.steady_samples();
    const int ramp = config.transition_samples;
    const double omega = 2.0 * std::numbers::pi * config.carrier_freq_hz / config.sample_rate_hz;

    std::vector<double> phase(symbols.size() * period);
    double offset = symbols.empty() ? 0.0 : constellation_phase(symbols[0]);

    for (std::size_t p = 0; p < symbols.size(); ++p) {
        double delta = 0.0;  // the final symbol rides out on a plain carrier
        if (p + 1 < symbols.size())
            delta = transition_step(constellation_phase(symbols[p]),
                                    constellation_phase(symbols[p + 1]), config);

        const std::size_t base = p * period;
        for (int i = 0; i < steady; ++i)
            phase[base + i] = omega * static_cast<double>(base + i) + offset;
        for (int m = 0; m < ramp; ++m)
            phase[base + steady + m] = omega * static_cast<double>(base + steady + m) +
                                       offset + delta * (m + 1) / ramp;
        offset += delta;
    }
    return phase;
}

PcmBuffer modulate(std::span<const int> symbols, const ModemConfig& config) {
    const std::vector<double> phase = phase_schedule(symbols, config);

    PcmBuffer pcm;
    pcm.sample_rate_hz = config.sample_rate_hz;
    pcm.samples.resize(phase.size());
    for (std::size_t i = 0; i < phase.size(); ++i)
        pcm.samples[i] = config.amplitude * std::cos(phase[i]);
    return pcm;
}

}  // namespace batnet
