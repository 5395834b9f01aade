#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "batnet/config.hpp"

namespace batnet {

// A frame ready for modulation.  The symbol sequence is
//
//   preamble || sync || trailer || header block || data blocks
//
// where every coded block is 21 bits (16 data + 5 CRC) packed MSB-first
// into 7 Gray-coded symbols.  The header's data bits carry the payload
// length in bytes; data blocks carry the payload MSB-first with the final
// block zero-padded.
struct Frame {
    std::vector<std::uint8_t> payload;
    std::uint32_t header_block = 0;           // 21-bit coded header
    std::vector<std::uint32_t> data_blocks;   // 21-bit coded blocks
    std::vector<int> symbols;                 // full constellation-index sequence
};

// Packs 16 data bits and their checksum into one 21-bit coded block.
std::uint32_t encode_block(std::uint32_t data16, const ModemConfig& config);

// Splits a 21-bit coded block into 7 constellation indices, MSB-first.
std::vector<int> block_to_symbols(std::uint32_t block, const ModemConfig& config);

// Reassembles a 21-bit block from 7 constellation indices.
std::uint32_t symbols_to_block(std::span<const int> symbols, const ModemConfig& config);

// Builds the complete frame for a payload.  Throws PayloadTooLong above
// kMaxPayloadBytes.
Frame build_frame(std::span<const std::uint8_t> payload, const ModemConfig& config);

}  // namespace batnet
