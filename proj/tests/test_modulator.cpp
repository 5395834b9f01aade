// Modulator: waveform shape, phase continuity, schedule structure, spectral
// placement, and the near-Nyquist transition handling.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "batnet/config.hpp"
#include "batnet/constellation.hpp"
#include "batnet/errors.hpp"
#include "batnet/frame.hpp"
#include "batnet/modulator.hpp"
#include "batnet/spectrum.hpp"
#include "testkit.hpp"

using namespace batnet;

static constexpr double kPi = std::numbers::pi;

static std::vector<int> random_symbols(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, 7);
    std::vector<int> symbols(static_cast<std::size_t>(n));
    for (auto& s : symbols) s = dist(rng);
    return symbols;
}

static void test_buffer_shape() {
    const ModemConfig cfg;
    const std::string hello = "Hello, world!";
    const Frame frame = build_frame(std::vector<std::uint8_t>(hello.begin(), hello.end()), cfg);
    const PcmBuffer pcm = modulate(frame.symbols, cfg);
    CHECK_EQ(pcm.samples.size(), 16000u);  // 100 periods x 160 samples
    CHECK_NEAR(pcm.sample_rate_hz, 48000.0, 0.0);
    for (double s : pcm.samples) CHECK(std::isfinite(s) && std::abs(s) <= cfg.amplitude + 1e-12);

    CHECK_EQ(modulate(std::vector<int>{}, cfg).samples.size(), 0u);

    // Determinism: bit-identical on repeat.
    const PcmBuffer again = modulate(frame.symbols, cfg);
    CHECK(again.samples == pcm.samples);
}

static void test_pure_tone() {
    const ModemConfig cfg;
    const std::vector<int> symbols(64, 3);  // constant symbol: no transitions
    const PcmBuffer pcm = modulate(symbols, cfg);
    const auto spec = real_fft(pcm.samples);
    std::size_t peak = 0;
    for (std::size_t k = 1; k < spec.size(); ++k)
        if (std::abs(spec[k]) > std::abs(spec[peak])) peak = k;
    const double bin_hz = cfg.sample_rate_hz / static_cast<double>(pcm.samples.size());
    CHECK_NEAR(static_cast<double>(peak) * bin_hz, cfg.carrier_freq_hz, bin_hz);

    // Constant symbol means globally linear phase.
    const std::vector<double> phase = phase_schedule(symbols, cfg);
    const double slope = 2.0 * kPi * cfg.carrier_freq_hz / cfg.sample_rate_hz;
    for (std::size_t n = 1; n < phase.size(); ++n)
        CHECK_NEAR(phase[n] - phase[n - 1], slope, 1e-9);
}

static void test_schedule_structure() {
    const ModemConfig cfg;
    const std::vector<int> symbols = random_symbols(48, 41);
    const std::vector<double> phase = phase_schedule(symbols, cfg);
    CHECK_EQ(phase.size(), symbols.size() * 160);

    const double w = 2.0 * kPi * cfg.carrier_freq_hz / cfg.sample_rate_hz;
    const int T = cfg.symbol_period_samples;
    const int steady = cfg.steady_samples();

    for (std::size_t k = 0; k < symbols.size(); ++k) {
        // Baseband phase during the steady segment equals the symbol phase.
        for (int off : {0, steady / 2, steady - 1}) {
            const std::size_t n = k * static_cast<std::size_t>(T) + static_cast<std::size_t>(off);
            const double bb = wrap_phase(phase[n] - w * static_cast<double>(n) -
                                         constellation_phase(symbols[k]));
            CHECK_NEAR(bb, 0.0, 1e-9);
        }
        // Per-sample increments take at most two distinct values per slot:
        // the carrier slope and the transition slope.
        double other = 0.0;
        bool has_other = false;
        for (int off = 1; off < T; ++off) {
            const std::size_t n = k * static_cast<std::size_t>(T) + static_cast<std::size_t>(off);
            const double d = phase[n] - phase[n - 1];
            if (std::abs(d - w) < 1e-9) continue;
            if (!has_other) {
                other = d;
                has_other = true;
            }
            CHECK_NEAR(d, other, 1e-9);
        }
    }

    // At the default config the carrier completes exactly 75 cycles per
    // slot, so slot-start phases equal the constellation phases outright.
    for (std::size_t k = 0; k < symbols.size(); ++k)
        CHECK_NEAR(wrap_phase(phase[k * 160] - constellation_phase(symbols[k])), 0.0, 1e-9);
}

static void test_transition_advance() {
    // Two symbols differing by pi/4: the ramp must advance the baseband
    // phase by exactly pi/4 across the transition samples.
    const ModemConfig cfg;
    const std::vector<int> symbols = {0, 1};
    const std::vector<double> phase = phase_schedule(symbols, cfg);
    const double w = 2.0 * kPi * cfg.carrier_freq_hz / cfg.sample_rate_hz;
    const int steady = cfg.steady_samples();
    // Last steady sample of slot 0 vs first steady sample of slot 1.
    const double before = phase[static_cast<std::size_t>(steady - 1)] -
                          w * static_cast<double>(steady - 1);
    const double after = phase[160] - w * 160.0;
    CHECK_NEAR(after - before, kPi / 4.0, 1e-9);
}

static void test_continuity() {
    const ModemConfig cfg;
    const std::vector<int> symbols = random_symbols(200, 42);
    const std::vector<double> phase = phase_schedule(symbols, cfg);
    const PcmBuffer pcm = modulate(symbols, cfg);

    // Instantaneous frequency stays positive and below Nyquist everywhere.
    double max_step = 0.0;
    for (std::size_t n = 1; n < phase.size(); ++n) {
        const double d = phase[n] - phase[n - 1];
        CHECK(d > 0.0 && d < kPi);
        max_step = std::max(max_step, d);
    }
    // Sample-to-sample jumps bounded by the steepest slope present.
    for (std::size_t n = 1; n < pcm.samples.size(); ++n)
        CHECK(std::abs(pcm.samples[n] - pcm.samples[n - 1]) <=
              max_step * cfg.amplitude + 1e-6);
}

static void test_near_nyquist_transitions() {
    // At 23.5 kHz an upward pi ramp would land on 24.25 kHz; the modulator
    // must take the long way round instead of crossing Nyquist.
    ModemConfig cfg;
    cfg.carrier_freq_hz = 23500.0;
    for (int ts : {96, 128, 160}) {
        cfg.symbol_period_samples = ts;
        const std::vector<int> symbols = random_symbols(64, 43 + ts);
        const std::vector<double> phase = phase_schedule(symbols, cfg);
        for (std::size_t n = 1; n < phase.size(); ++n) {
            const double d = phase[n] - phase[n - 1];
            CHECK(d > 0.0 && d < kPi);
        }
        // The steady segments still carry the right constellation phases.
        const double w = 2.0 * kPi * cfg.carrier_freq_hz / cfg.sample_rate_hz;
        for (std::size_t k = 0; k < symbols.size(); ++k) {
            const std::size_t n = k * static_cast<std::size_t>(ts) +
                                  static_cast<std::size_t>(cfg.steady_samples() / 2);
            CHECK_NEAR(wrap_phase(phase[n] - w * static_cast<double>(n) -
                                  constellation_phase(symbols[k])),
                       0.0, 1e-9);
        }
    }
}

static void test_energy_confinement() {
    const ModemConfig cfg;
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        const std::vector<int> symbols = random_symbols(64, seed);
        const PcmBuffer pcm = modulate(symbols, cfg);
        double total = 0.0;
        for (double x : pcm.samples) total += x * x;
        total /= static_cast<double>(pcm.samples.size());
        const double half = 2.0 * cfg.sample_rate_hz / cfg.symbol_period_samples;  // 600 Hz
        const double inband = band_power(pcm.samples, cfg.sample_rate_hz,
                                         cfg.carrier_freq_hz - half,
                                         cfg.carrier_freq_hz + half);
        CHECK(inband >= 0.95 * total);
    }
}

static void test_amplitude_scaling() {
    ModemConfig cfg;
    const std::vector<int> symbols = random_symbols(16, 77);
    const PcmBuffer full = modulate(symbols, cfg);
    cfg.amplitude = 0.2;
    const PcmBuffer quiet = modulate(symbols, cfg);
    for (std::size_t n = 0; n < full.samples.size(); ++n)
        CHECK_NEAR(quiet.samples[n], full.samples[n] * 0.25, 1e-12);
}

static void test_bad_config() {
    ModemConfig cfg;
    cfg.transition_samples = 160;  // no steady segment left
    CHECK_THROWS(ConfigInvalid, modulate(std::vector<int>{0, 1}, cfg));
}

int main() {
    test_buffer_shape();
    test_pure_tone();
    test_schedule_structure();
    test_transition_advance();
    test_continuity();
    test_near_nyquist_transitions();
    test_energy_confinement();
    test_amplitude_scaling();
    test_bad_config();
    return test_summary("test_modulator");
}
