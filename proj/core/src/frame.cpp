#include "batnet/frame.hpp"

#include <string>

#include "batnet/constellation.hpp"
#include "batnet/crc5.hpp"
#include "batnet/errors.hpp"

namespace batnet {

std::uint32_t encode_block(std::uint32_t data16, const ModemConfig& config) {
    const std::uint32_t crc = crc5_checksum(data16, config.block_data_bits,
                                            config.crc_poly, config.block_crc_bits,
                                            config.crc_init);
    return (data16 << config.block_crc_bits) | crc;
}

std::vector<int> block_to_symbols(std::uint32_t block, const ModemConfig& config) {
    const int n = config.block_symbols();
    std::vector<int> symbols(n);
    for (int i = 0; i < n; ++i) {
        const int shift = (n - 1 - i) * kBitsPerSymbol;
        symbols[i] = gray_encode(static_cast<int>((block >> shift) & 0x7));
    }
    return symbols;
}

std::uint32_t symbols_to_block(std::span<const int> symbols, const ModemConfig&) {
    std::uint32_t block = 0;
    for (int s : symbols) block = (block << kBitsPerSymbol) | static_cast<std::uint32_t>(gray_decode(s));
    return block;
}

Frame build_frame(std::span<const std::uint8_t> payload, const ModemConfig& config) {
    if (payload.size() > kMaxPayloadBytes)
        throw PayloadTooLong("payload of " + std::to_string(payload.size()) +
                             " bytes exceeds " + std::to_string(kMaxPayloadBytes));

    Frame frame;
    frame.payload.assign(payload.begin(), payload.end());

    // Header: payload length in bytes.
    frame.header_block = encode_block(static_cast<std::uint32_t>(payload.size()), config);

    // Payload bits, MSB first, chunked into 16-bit words; the last word is
    // zero-padded on the right.
    const int data_bits = config.block_data_bits;
    const std::size_t total_bits = payload.size() * 8;
    std::uint32_t word = 0;
    int filled = 0;
    for (std::size_t i = 0; i < total_bits; ++i) {
        const std::uint32_t bit = (payload[i / 8] >> (7 - i % 8)) & 1u;
        word = (word << 1) | bit;
        if (++filled == data_bits) {
            frame.data_blocks.push_back(encode_block(word, config));
            word = 0;
            filled = 0;
        }
    }
    if (filled > 0) {
        word <<= data_bits - filled;
        frame.data_blocks.push_back(encode_block(word, config));
    }

    // Symbol sequence: preamble || sync || trailer || header || data.
    frame.symbols.reserve(config.frame_symbols_for(payload.size()));
    frame.symbols.insert(frame.symbols.end(), config.preamble_symbols, 0);
    frame.symbols.insert(frame.symbols.end(), config.sync_pattern.begin(),
                         config.sync_pattern.end());
    frame.symbols.insert(frame.symbols.end(), config.trailer_pattern.begin(),
                         config.trailer_pattern.end());
    for (int s : block_to_symbols(frame.header_block, config)) frame.symbols.push_back(s);
    for (std::uint32_t block : frame.data_blocks)
        for (int s : block_to_symbols(block, config)) frame.symbols.push_back(s);

    return frame;
}

}  // namespace batnet
