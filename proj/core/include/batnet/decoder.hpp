#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "batnet/config.hpp"
#include "batnet/demodulator.hpp"

namespace batnet {

// Nearest-point decision for one soft symbol after applying a phase
// correction.  Confidence is the cosine of the residual angular error.
struct HardDecision {
    int index = 0;
    double confidence = 0.0;
};

// Throws ZeroMagnitude when the soft value has no direction to decide on.
HardDecision hard_decide(const SoftSymbol& soft, double phase_correction_rad);

// Successful decode of one coded block.
struct BlockDecodeResult {
    std::uint32_t data = 0;         // the data bits (CRC stripped)
    double phase_correction = 0.0;  // extra rotation this block was decoded at,
                                    // relative to the accumulated phase
    double confidence = 0.0;        // mean cos of angular errors
    int flips_used = 0;
};

// Maximum-likelihood-flavoured block decode: tries a grid of rotations
// within +-phase_search_halfwidth_rad around the accumulated phase; at each
// rotation the hard-decided Gray bits must pass the CRC.  If no rotation
// passes cleanly, up to max_symbol_flips of the least-confident symbols are
// flipped to their adjacent constellation neighbours and the grid is tried
// again.  Among passing candidates the highest confidence wins (ties:
// smaller |rotation|, then fewer flips).  Returns nothing when every
// candidate fails the CRC.
std::optional<BlockDecodeResult> decode_block(std::span<const SoftSymbol> softs,
                                              double accumulated_phase,
                                              const ModemConfig& config);

struct FrameDecodeResult {
    std::vector<std::uint8_t> payload;
    int blocks_total = 0;
    int blocks_failed = 0;
    int flips_used = 0;
    // Accumulated phase after each block's correction was applied; entry b
    // is the rotation carried into block b + 1.
    std::vector<double> cumulative_phase_track;
    std::vector<std::uint8_t> block_ok;  // 1 = CRC passed for that block
};

// Decodes the coded-block section of a frame (header block first).  Failed
// data blocks contribute best-effort hard-decision bits and are counted in
// blocks_failed.  With phase_tracking off the accumulated phase stays at
// zero.  Returns nothing when the header block itself fails (the frame is
// abandoned since its length is unknown).
std::optional<FrameDecodeResult> decode_frame(std::span<const SoftSymbol> softs,
                                              const ModemConfig& config,
                                              bool phase_tracking = true);

}  // namespace batnet
