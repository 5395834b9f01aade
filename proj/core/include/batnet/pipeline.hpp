#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "batnet/config.hpp"
#include "batnet/decoder.hpp"
#include "batnet/demodulator.hpp"
#include "batnet/wav.hpp"

namespace batnet {

// End-to-end convenience layer: payload bytes <-> PCM buffers.

// Frames and modulates a payload.  Throws PayloadTooLong / ConfigInvalid.
PcmBuffer transmit(std::span<const std::uint8_t> payload, const ModemConfig& config);

struct ReceiveOptions {
    bool phase_tracking = true;
};

// Everything the receiver learned from one capture.  `sync` is empty when
// no frame was detected; `frame` is empty when the header block could not
// be recovered.  `block_softs` holds the sampled coded-block region
// (header first, framing slots excluded) for diagnostics and evaluation.
struct ReceiveResult {
    std::optional<SyncResult> sync;
    std::vector<SoftSymbol> block_softs;
    std::optional<FrameDecodeResult> frame;
};

ReceiveResult receive(const PcmBuffer& pcm, const ModemConfig& config,
                      const ReceiveOptions& opts = {});

}  // namespace batnet
