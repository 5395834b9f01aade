#pragma once

#include <cstdint>

namespace batnet {

// CRC-5 over the data bits of a coded block.  Plain shift-register long
// division, most significant bit first, no reflection, no final XOR.
//
// `poly` carries the full polynomial including the x^width term (default
// 0x25 = x^5 + x^2 + 1); `init` is the initial register value.

std::uint32_t crc5_checksum(std::uint32_t data, int data_bits,
                            std::uint32_t poly = 0x25, int width = 5,
                            std::uint32_t init = 0x1f);

// Verifies a block laid out as data_bits of data followed by `width`
// checksum bits.  Runs the same register over all bits; a matching
// checksum drives the register to zero.
bool crc5_verify(std::uint32_t block, int data_bits,
                 std::uint32_t poly = 0x25, int width = 5,
                 std::uint32_t init = 0x1f);

}  // namespace batnet
