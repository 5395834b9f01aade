// Demodulator: baseband mixing identities, preamble detection accuracy and
// rejection, soft-symbol sampling, and streaming/one-shot equivalence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "batnet/config.hpp"
#include "batnet/constellation.hpp"
#include "batnet/demodulator.hpp"
#include "batnet/errors.hpp"
#include "batnet/frame.hpp"
#include "batnet/modulator.hpp"
#include "testkit.hpp"

using namespace batnet;

static constexpr double kPi = std::numbers::pi;

static PcmBuffer tone(double freq_hz, double phase, double amplitude, std::size_t n) {
    PcmBuffer pcm;
    pcm.samples.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        pcm.samples[t] =
            amplitude * std::cos(2.0 * kPi * freq_hz * static_cast<double>(t) / 48000.0 + phase);
    return pcm;
}

static PcmBuffer embed(const PcmBuffer& pcm, std::size_t offset, std::size_t tail) {
    PcmBuffer out;
    out.sample_rate_hz = pcm.sample_rate_hz;
    out.samples.assign(offset, 0.0);
    out.samples.insert(out.samples.end(), pcm.samples.begin(), pcm.samples.end());
    out.samples.insert(out.samples.end(), tail, 0.0);
    return out;
}

static std::vector<std::uint8_t> random_payload(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint8_t> payload(n);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng() & 0xff);
    return payload;
}

static void test_mixing_identities() {
    const ModemConfig cfg;
    const int W = cfg.steady_samples();

    // Pure carrier at phase 0 -> constant ~0.5 away from the edges.
    {
        const BasebandSequence bb = mix_to_baseband(tone(22500.0, 0.0, 1.0, 48000), cfg);
        CHECK_EQ(bb.samples.size(), 48000u);
        for (std::size_t n = static_cast<std::size_t>(W); n + W < bb.samples.size(); ++n)
            CHECK(std::abs(bb.samples[n] - std::complex<double>(0.5, 0.0)) < 0.01);
    }
    // Phase pi/2 passes straight through.
    {
        const BasebandSequence bb = mix_to_baseband(tone(22500.0, kPi / 2.0, 1.0, 24000), cfg);
        for (std::size_t n = static_cast<std::size_t>(W); n + W < bb.samples.size(); ++n)
            CHECK(std::abs(bb.samples[n] - std::polar(0.5, kPi / 2.0)) < 0.01);
    }
    // 50 Hz off-carrier -> mean phase rotation of 2 pi 50 / f_s per sample.
    // The image of the tone sits at 2950 Hz where the averaging window only
    // attenuates (it nulls exact multiples of f_s / W), so individual slopes
    // wobble; the accumulated phase over many samples is what must match.
    {
        const BasebandSequence bb = mix_to_baseband(tone(22550.0, 0.0, 1.0, 24000), cfg);
        const double want = 2.0 * kPi * 50.0 / 48000.0;
        double total = 0.0;
        const std::size_t n0 = static_cast<std::size_t>(W);
        const std::size_t n1 = n0 + 4800;
        for (std::size_t n = n0; n < n1; ++n) {
            const double slope = std::arg(bb.samples[n + 1] * std::conj(bb.samples[n]));
            CHECK_NEAR(slope, want, 0.02);
            total += slope;
        }
        CHECK_NEAR(total, want * static_cast<double>(n1 - n0), 0.1);
    }
    // Input shorter than the window is rejected.
    CHECK_THROWS(BufferTooShort, mix_to_baseband(tone(22500.0, 0.0, 1.0, 64), cfg));
}

static void test_detection_accuracy() {
    const ModemConfig cfg;
    const Frame frame = build_frame(random_payload(16, 21), cfg);
    const PcmBuffer clean = modulate(frame.symbols, cfg);
    const PcmBuffer placed = embed(clean, 4321, 3000);

    const BasebandSequence bb = mix_to_baseband(placed, cfg);
    const auto sync = detect_preamble(bb, cfg);
    CHECK(sync.has_value());
    if (!sync) return;
    CHECK(sync->accepted);
    CHECK(std::llabs(sync->frame_start_sample - 4321) <= 2);

    // Expected reference phase: the transmitted preamble is at constellation
    // phase 0 relative to its own start, so mixing leaves -w * offset.
    const double w = 2.0 * kPi * cfg.carrier_freq_hz / cfg.sample_rate_hz;
    const double expect = wrap_phase(-w * 4321.0);
    CHECK(std::abs(wrap_phase(sync->reference_phase_rad - expect)) < 0.05);
    CHECK_NEAR(sync->preamble_magnitude, cfg.amplitude / 2.0, 0.02);

    // Silence alone produces nothing.
    PcmBuffer silence;
    silence.samples.assign(48000, 0.0);
    CHECK(!detect_preamble(mix_to_baseband(silence, cfg), cfg).has_value());
}

static void test_trailer_rejection() {
    const ModemConfig cfg;
    Frame frame = build_frame(random_payload(8, 22), cfg);
    // Overwrite the trailer slots with wrong symbols.
    frame.symbols[40] = 2;
    frame.symbols[41] = 6;
    frame.symbols[42] = 1;
    frame.symbols[43] = 5;
    const PcmBuffer pcm = embed(modulate(frame.symbols, cfg), 500, 500);
    CHECK(!detect_preamble(mix_to_baseband(pcm, cfg), cfg).has_value());
}

static void test_loopback_softs() {
    for (const auto& [freq, ts] : {std::pair{22500.0, 160}, std::pair{21000.0, 128}}) {
        ModemConfig cfg;
        cfg.carrier_freq_hz = freq;
        cfg.symbol_period_samples = ts;
        const Frame frame = build_frame(random_payload(32, 23), cfg);
        const PcmBuffer pcm = embed(modulate(frame.symbols, cfg), 777, 600);
        const BasebandSequence bb = mix_to_baseband(pcm, cfg);
        const auto sync = detect_preamble(bb, cfg);
        CHECK(sync.has_value());
        if (!sync) continue;

        const auto softs =
            sample_symbols(bb, *sync, static_cast<int>(frame.symbols.size()), cfg);
        CHECK_EQ(softs.size(), frame.symbols.size());
        for (std::size_t k = 0; k < softs.size(); ++k) {
            CHECK_EQ(softs[k].slot_index, static_cast<int>(k));
            const double err = wrap_phase(std::arg(softs[k].value) -
                                          constellation_phase(frame.symbols[k]));
            CHECK(std::abs(err) < 0.15);
        }
    }
}

static void test_constant_data_softs() {
    // A frame whose block region is all index 0 yields softs at
    // ~0.5 * amplitude * e^{i0} once the reference phase is removed.
    const ModemConfig cfg;
    std::vector<int> symbols(static_cast<std::size_t>(cfg.framing_symbols()), 0);
    for (int i = 0; i < cfg.preamble_symbols; ++i) symbols[static_cast<std::size_t>(i)] = 0;
    std::copy(cfg.sync_pattern.begin(), cfg.sync_pattern.end(),
              symbols.begin() + cfg.preamble_symbols);
    std::copy(cfg.trailer_pattern.begin(), cfg.trailer_pattern.end(),
              symbols.begin() + cfg.preamble_symbols + cfg.sync_pattern.size());
    symbols.insert(symbols.end(), 14, 0);

    const PcmBuffer pcm = embed(modulate(symbols, cfg), 1000, 1000);
    const BasebandSequence bb = mix_to_baseband(pcm, cfg);
    const auto sync = detect_preamble(bb, cfg);
    CHECK(sync.has_value());
    if (!sync) return;
    const auto softs = sample_symbols(bb, *sync, static_cast<int>(symbols.size()), cfg);
    for (std::size_t k = 0; k < softs.size(); ++k)
        CHECK(std::abs(softs[k].value -
                       std::polar(cfg.amplitude / 2.0,
                                  constellation_phase(symbols[k]))) < 0.02);

    // count = 0 is a no-op; overrunning the buffer throws.
    CHECK(sample_symbols(bb, *sync, 0, cfg).empty());
    CHECK_THROWS(BufferTooShort, sample_symbols(bb, *sync, 10000, cfg));
}

static void test_amplitude_invariance() {
    const ModemConfig cfg;
    const Frame frame = build_frame(random_payload(24, 24), cfg);
    const PcmBuffer base = embed(modulate(frame.symbols, cfg), 1500, 800);

    const BasebandSequence bb_ref = mix_to_baseband(base, cfg);
    const auto sync_ref = detect_preamble(bb_ref, cfg);
    CHECK(sync_ref.has_value());
    if (!sync_ref) return;
    const auto softs_ref =
        sample_symbols(bb_ref, *sync_ref, static_cast<int>(frame.symbols.size()), cfg);

    for (double c : {0.05, 0.3, 1.0}) {
        PcmBuffer scaled = base;
        for (double& s : scaled.samples) s *= c;
        const BasebandSequence bb = mix_to_baseband(scaled, cfg);
        const auto sync = detect_preamble(bb, cfg);
        CHECK(sync.has_value());
        if (!sync) continue;
        CHECK(std::llabs(sync->frame_start_sample - sync_ref->frame_start_sample) <= 1);
        const auto softs =
            sample_symbols(bb, *sync, static_cast<int>(frame.symbols.size()), cfg);
        for (std::size_t k = 0; k < softs.size(); ++k)
            CHECK_EQ(nearest_constellation_index(std::arg(softs[k].value)),
                     nearest_constellation_index(std::arg(softs_ref[k].value)));
    }
}

static void test_shift_equivariance() {
    const ModemConfig cfg;
    const Frame frame = build_frame(random_payload(12, 25), cfg);
    const PcmBuffer base = embed(modulate(frame.symbols, cfg), 2000, 500);
    const auto sync_ref = detect_preamble(mix_to_baseband(base, cfg), cfg);
    CHECK(sync_ref.has_value());
    if (!sync_ref) return;

    for (std::size_t shift : {1u, 7u, 160u, 1000u}) {
        const PcmBuffer moved = embed(base, shift, 0);
        const auto sync = detect_preamble(mix_to_baseband(moved, cfg), cfg);
        CHECK(sync.has_value());
        if (!sync) continue;
        CHECK_EQ(sync->frame_start_sample,
                 sync_ref->frame_start_sample + static_cast<std::int64_t>(shift));
    }
}

static void test_streaming_equivalence() {
    const ModemConfig cfg;
    const Frame frame = build_frame(random_payload(40, 26), cfg);
    const PcmBuffer pcm = embed(modulate(frame.symbols, cfg), 3333, 2000);

    const BasebandSequence bb = mix_to_baseband(pcm, cfg);
    const auto sync_ref = detect_preamble(bb, cfg);
    CHECK(sync_ref.has_value());
    if (!sync_ref) return;
    const int count = static_cast<int>(frame.symbols.size());
    const auto softs_ref = sample_symbols(bb, *sync_ref, count, cfg);

    std::mt19937_64 rng(27);
    for (int trial = 0; trial < 5; ++trial) {
        StreamingDemodulator stream(cfg);
        std::size_t fed = 0;
        std::uniform_int_distribution<std::size_t> chunk_dist(1, trial == 0 ? 3 : 4096);
        while (fed < pcm.samples.size()) {
            const std::size_t n = std::min(chunk_dist(rng), pcm.samples.size() - fed);
            stream.push(std::span<const double>(pcm.samples).subspan(fed, n));
            fed += n;
        }
        CHECK_EQ(stream.samples_pushed(), static_cast<std::int64_t>(pcm.samples.size()));
        CHECK(stream.sync().has_value());
        if (!stream.sync()) continue;
        // Bit-identical agreement with the one-shot path.
        CHECK_EQ(stream.sync()->frame_start_sample, sync_ref->frame_start_sample);
        CHECK(stream.sync()->reference_phase_rad == sync_ref->reference_phase_rad);
        CHECK(stream.symbols_available() >= count);
        const auto softs = stream.symbols(count);
        CHECK_EQ(softs.size(), softs_ref.size());
        for (std::size_t k = 0; k < softs.size(); ++k) {
            CHECK(softs[k].value == softs_ref[k].value);
            CHECK_EQ(softs[k].slot_index, softs_ref[k].slot_index);
        }
    }

    // No sync while only silence has been pushed.
    StreamingDemodulator idle(cfg);
    const std::vector<double> zeros(8000, 0.0);
    idle.push(zeros);
    CHECK(!idle.sync().has_value());
    CHECK_EQ(idle.symbols_available(), 0);
    CHECK(idle.symbols(4).empty());
}

int main() {
    test_mixing_identities();
    test_detection_accuracy();
    test_trailer_rejection();
    test_loopback_softs();
    test_constant_data_softs();
    test_amplitude_invariance();
    test_shift_equivariance();
    test_streaming_equivalence();
    return test_summary("test_demodulator");
}
