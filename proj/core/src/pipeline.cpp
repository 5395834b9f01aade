#include "batnet/pipeline.hpp"

#include "batnet/errors.hpp"
#include "batnet/frame.hpp"
#include "batnet/modulator.hpp"

namespace batnet {

PcmBuffer transmit(std::span<const std::uint8_t> payload, const ModemConfig& config) {
    config.validate();
    const Frame frame = build_frame(payload, config);
    return modulate(frame.symbols, config);
}

ReceiveResult receive(const PcmBuffer& pcm, const ModemConfig& config,
                      const ReceiveOptions& opts) {
    config.validate();
    ReceiveResult out;
    if (static_cast<int>(pcm.samples.size()) < config.steady_samples())
        return out;  // not even one averaging window of input

    const BasebandSequence bb = mix_to_baseband(pcm, config);
    out.sync = detect_preamble(bb, config);
    if (!out.sync) return out;

    const int framing = config.framing_symbols();
    const int block_len = config.block_symbols();

    // The header block tells us how much more to sample, so read it first.
    std::vector<SoftSymbol> softs;
    try {
        softs = sample_symbols(bb, *out.sync, framing + block_len, config);
    } catch (const BufferTooShort&) {
        return out;  // capture ends inside the header; sync info only
    }
    out.block_softs.assign(softs.begin() + framing, softs.end());

    const auto header = decode_block(out.block_softs, 0.0, config);
    if (!header || header->data > kMaxPayloadBytes)
        return out;  // length unknown; nothing further can be decoded

    const int blocks = 1 + config.data_blocks_for(header->data);
    int want = framing + blocks * block_len;
    // A truncated capture still yields partial payload bytes, so sample as
    // many complete slots as actually fit.
    const auto fits = [&](int count) {
        const std::int64_t last = out.sync->frame_start_sample +
                                  static_cast<std::int64_t>(count - 1) * config.symbol_period_samples +
                                  config.steady_samples() / 2;
        return last < static_cast<std::int64_t>(bb.samples.size());
    };
    while (want > framing + block_len && !fits(want)) want -= block_len;

    softs = sample_symbols(bb, *out.sync, want, config);
    out.block_softs.assign(softs.begin() + framing, softs.end());
    out.frame = decode_frame(out.block_softs, config, opts.phase_tracking);
    return out;
}

}  // namespace batnet
