#include "batnet/crc5.hpp"

namespace batnet {

namespace {

// Feeds `nbits` of `bits` (MSB first) through the division register.
std::uint32_t run_register(std::uint32_t reg, std::uint32_t bits, int nbits,
                           std::uint32_t poly, int width) {
    const std::uint32_t mask = (1u << width) - 1u;
    const std::uint32_t low = poly & mask;  // polynomial without the x^width term
    for (int i = nbits - 1; i >= 0; --i) {
        const std::uint32_t in = (bits >> i) & 1u;
        const std::uint32_t top = (reg >> (width - 1)) & 1u;
        reg = (reg << 1) & mask;
        if (top ^ in) reg ^= low;
    }
    return reg;
}

}  // namespace

std::uint32_t crc5_checksum(std::uint32_t data, int data_bits,
                            std::uint32_t poly, int width, std::uint32_t init) {
    return run_register(init, data, data_bits, poly, width);
}

bool crc5_verify(std::uint32_t block, int data_bits,
                 std::uint32_t poly, int width, std::uint32_t init) {
    return run_register(init, block, data_bits + width, poly, width) == 0;
}

}  // namespace batnet
