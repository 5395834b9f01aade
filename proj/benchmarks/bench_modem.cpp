// Microbenchmarks for the hot paths: modulation, baseband mixing, block
// decoding, and the full loopback pipeline.

#include <complex>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "batnet/config.hpp"
#include "batnet/constellation.hpp"
#include "batnet/decoder.hpp"
#include "batnet/demodulator.hpp"
#include "batnet/frame.hpp"
#include "batnet/modulator.hpp"
#include "batnet/pipeline.hpp"

namespace {

using namespace batnet;

std::vector<std::uint8_t> make_payload(std::size_t bytes) {
    std::mt19937_64 rng(12345);
    std::vector<std::uint8_t> payload(bytes);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng() & 0xff);
    return payload;
}

void BM_Modulate(benchmark::State& state) {
    const ModemConfig config;
    const Frame frame = build_frame(make_payload(256), config);
    for (auto _ : state) {
        PcmBuffer pcm = modulate(frame.symbols, config);
        benchmark::DoNotOptimize(pcm.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(frame.symbols.size()));
}
BENCHMARK(BM_Modulate);

void BM_MixToBaseband(benchmark::State& state) {
    const ModemConfig config;
    const PcmBuffer pcm = transmit(make_payload(256), config);
    for (auto _ : state) {
        BasebandSequence bb = mix_to_baseband(pcm, config);
        benchmark::DoNotOptimize(bb.samples.data());
    }
    state.SetBytesProcessed(state.iterations() *
                            static_cast<std::int64_t>(pcm.samples.size() * sizeof(double)));
}
BENCHMARK(BM_MixToBaseband);

void BM_DecodeBlock(benchmark::State& state) {
    const ModemConfig config;
    // One coded block observed with mild phase error and noise.
    const Frame frame = build_frame(make_payload(2), config);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<SoftSymbol> softs;
    for (int k = 0; k < config.block_symbols(); ++k) {
        const int idx = frame.symbols[static_cast<std::size_t>(config.framing_symbols() + k)];
        SoftSymbol s;
        s.slot_index = k;
        s.value = std::polar(0.5, constellation_phase(idx) + 0.1) +
                  std::complex<double>(noise(rng), noise(rng));
        softs.push_back(s);
    }
    for (auto _ : state) {
        auto result = decode_block(softs, 0.0, config);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_DecodeBlock);

void BM_Pipeline(benchmark::State& state) {
    const ModemConfig config;
    const std::vector<std::uint8_t> payload = make_payload(64);
    for (auto _ : state) {
        const PcmBuffer pcm = transmit(payload, config);
        ReceiveResult rr = receive(pcm, config);
        benchmark::DoNotOptimize(rr.frame);
    }
}
BENCHMARK(BM_Pipeline);

}  // namespace

BENCHMARK_MAIN();
