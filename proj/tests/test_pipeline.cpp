// Pipeline: transmit/receive round trips, embedding in longer captures,
// truncation, and phase tracking across a skewed channel.

#include <cstdint>
#include <random>
#include <vector>

#include "batnet/channel.hpp"
#include "batnet/config.hpp"
#include "batnet/errors.hpp"
#include "batnet/frame.hpp"
#include "batnet/pipeline.hpp"
#include "testkit.hpp"

using namespace batnet;

static std::vector<std::uint8_t> random_payload(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint8_t> payload(n);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng() & 0xff);
    return payload;
}

static void test_roundtrip() {
    const ModemConfig cfg;
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const auto payload = random_payload(rng() % 65, rng);
        const PcmBuffer pcm = transmit(payload, cfg);
        CHECK_EQ(pcm.samples.size(),
                 static_cast<std::size_t>(cfg.frame_symbols_for(payload.size())) *
                     static_cast<std::size_t>(cfg.symbol_period_samples));
        const ReceiveResult result = receive(pcm, cfg);
        CHECK(result.sync.has_value());
        CHECK(result.frame.has_value());
        if (!result.frame) continue;
        CHECK(result.frame->payload == payload);
        CHECK_EQ(result.frame->blocks_failed, 0);
        CHECK_EQ(result.block_softs.size(),
                 static_cast<std::size_t>(cfg.block_symbols()) *
                     static_cast<std::size_t>(result.frame->blocks_total));
    }
}

static void test_empty_payload() {
    const ModemConfig cfg;
    const PcmBuffer pcm = transmit({}, cfg);
    // Framing plus the lone header block.
    CHECK_EQ(pcm.samples.size(),
             static_cast<std::size_t>(cfg.framing_symbols() + cfg.block_symbols()) *
                 static_cast<std::size_t>(cfg.symbol_period_samples));
    const ReceiveResult result = receive(pcm, cfg);
    CHECK(result.frame.has_value());
    if (result.frame) CHECK(result.frame->payload.empty());
}

static void test_embedded_capture() {
    const ModemConfig cfg;
    std::mt19937_64 rng(52);
    for (std::size_t offset : {0u, 123u, 4321u, 20000u}) {
        const auto payload = random_payload(24, rng);
        const PcmBuffer pcm = transmit(payload, cfg);
        PcmBuffer capture;
        capture.samples.assign(offset, 0.0);
        capture.samples.insert(capture.samples.end(), pcm.samples.begin(),
                               pcm.samples.end());
        capture.samples.insert(capture.samples.end(), 5000, 0.0);
        const ReceiveResult result = receive(capture, cfg);
        CHECK(result.sync.has_value());
        CHECK(result.frame.has_value());
        if (result.frame) CHECK(result.frame->payload == payload);
        if (result.sync)
            CHECK(std::llabs(result.sync->frame_start_sample -
                             static_cast<std::int64_t>(offset)) <= 2);
    }
}

static void test_truncation() {
    const ModemConfig cfg;
    std::mt19937_64 rng(53);
    const auto payload = random_payload(32, rng);
    const PcmBuffer pcm = transmit(payload, cfg);

    // Cut off mid-payload: sync and header survive, some blocks do not.
    PcmBuffer cut = pcm;
    cut.samples.resize(pcm.samples.size() * 2 / 3);
    const ReceiveResult partial = receive(cut, cfg);
    CHECK(partial.sync.has_value());
    CHECK(partial.frame.has_value());
    if (partial.frame) {
        CHECK(partial.frame->blocks_failed > 0);
        CHECK_EQ(partial.frame->payload.size(), payload.size());
        CHECK(partial.frame->payload != payload);
    }

    // Far too short for even the detector to run.
    PcmBuffer stub = pcm;
    stub.samples.resize(64);
    const ReceiveResult nothing = receive(stub, cfg);
    CHECK(!nothing.sync.has_value());
    CHECK(!nothing.frame.has_value());
    CHECK(nothing.block_softs.empty());

    // Silence of a workable length: no sync either.
    PcmBuffer silence;
    silence.samples.assign(48000, 0.0);
    const ReceiveResult quiet = receive(silence, cfg);
    CHECK(!quiet.sync.has_value());
    CHECK(!quiet.frame.has_value());
}

static void test_phase_tracking_over_skew() {
    const ModemConfig cfg;
    std::mt19937_64 rng(54);
    const auto payload = random_payload(48, rng);
    const PcmBuffer pcm = transmit(payload, cfg);

    // A slow drift of ~2 rad/s at the carrier: harmless per block, fatal
    // accumulated over the frame unless the tracker follows it.
    ChannelProfile profile;
    profile.relative_velocity_mps = 0.005;
    const PcmBuffer warped = apply_channel(pcm, profile, cfg.carrier_freq_hz);

    const ReceiveResult tracked = receive(warped, cfg);
    CHECK(tracked.sync.has_value());
    CHECK(tracked.frame.has_value());
    if (tracked.frame) {
        CHECK(tracked.frame->payload == payload);
        CHECK_EQ(tracked.frame->blocks_failed, 0);
    }

    ReceiveOptions untracked;
    untracked.phase_tracking = false;
    const ReceiveResult frozen = receive(warped, cfg, untracked);
    const bool recovered = frozen.frame && frozen.frame->payload == payload &&
                           frozen.frame->blocks_failed == 0;
    CHECK(!recovered);

    // Tracking off is harmless when there is nothing to track.
    const ReceiveResult clean = receive(pcm, cfg, untracked);
    CHECK(clean.frame.has_value());
    if (clean.frame) CHECK(clean.frame->payload == payload);
}

static void test_payload_limit() {
    const ModemConfig cfg;
    const std::vector<std::uint8_t> big(kMaxPayloadBytes + 1, 0);
    CHECK_THROWS(PayloadTooLong, transmit(big, cfg));
    const std::vector<std::uint8_t> max_ok(64, 0xEE);
    const ReceiveResult result = receive(transmit(max_ok, cfg), cfg);
    CHECK(result.frame.has_value());
    if (result.frame) CHECK(result.frame->payload == max_ok);
}

int main() {
    test_roundtrip();
    test_empty_payload();
    test_embedded_capture();
    test_truncation();
    test_phase_tracking_over_skew();
    test_payload_limit();
    return test_summary("test_pipeline");
}
