#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace batnet {

// Number of constellation points.  The scheme is 8-PSK throughout; the
// constant exists so derived quantities (bits per symbol, adjacency) are
// spelled out rather than sprinkled as magic numbers.
inline constexpr int kConstellationSize = 8;
inline constexpr int kBitsPerSymbol = 3;

// All tunables of the air interface.  Both ends must agree on every field;
// nothing in the waveform is self-describing except the payload length
// carried in the header block.
struct ModemConfig {
    // --- sampling & carrier ---
    double sample_rate_hz = 48000.0;
    double carrier_freq_hz = 22500.0;

    // --- symbol timing (in samples) ---
    int symbol_period_samples = 160;  // one symbol slot
    int transition_samples = 32;      // phase-ramp tail of each slot

    // --- waveform ---
    double amplitude = 0.8;  // peak amplitude of the generated carrier

    // --- framing ---
    int preamble_symbols = 32;                           // constant-phase run
    std::vector<int> sync_pattern = {0, 4, 2, 6, 1, 5, 3, 7};
    std::vector<int> trailer_pattern = {0, 0, 4, 4};

    // --- block code (data + CRC per coded block) ---
    int block_data_bits = 16;
    int block_crc_bits = 5;
    std::uint32_t crc_poly = 0x25;  // x^5 + x^2 + 1, top bit included
    std::uint32_t crc_init = 0x1f;

    // --- decoder ---
    double phase_search_halfwidth_rad = 0.39269908169872414;  // pi/8
    int phase_search_steps = 17;
    int max_symbol_flips = 2;

    // --- preamble detector tunables ---
    double gate_threshold_factor = 0.1;   // of estimated amplitude / 2
    double sync_corr_threshold = 0.8;     // of the ideal correlation

    // Derived helpers -------------------------------------------------------

    // Steady-carrier portion of a symbol slot; also the demodulator's
    // moving-average window length.
    int steady_samples() const { return symbol_period_samples - transition_samples; }

    // Symbols per coded block: (16 + 5) / 3 = 7 by default.
    int block_symbols() const { return (block_data_bits + block_crc_bits) / kBitsPerSymbol; }

    int block_bits() const { return block_data_bits + block_crc_bits; }

    // Framing overhead before the first coded block.
    int framing_symbols() const {
        return preamble_symbols + static_cast<int>(sync_pattern.size()) +
               static_cast<int>(trailer_pattern.size());
    }

    // Coded blocks needed for a payload of the given byte length (header
    // block not included).
    int data_blocks_for(std::size_t payload_bytes) const;

    // Total symbol count of a frame carrying the given payload.
    int frame_symbols_for(std::size_t payload_bytes) const;

    double raw_bit_rate() const {
        return sample_rate_hz / symbol_period_samples * kBitsPerSymbol;
    }

    double effective_bit_rate() const {
        return raw_bit_rate() * block_data_bits / block_bits();
    }

    // Throws ConfigInvalid when any field is out of range or the fields are
    // mutually inconsistent.
    void validate() const;
};

inline constexpr std::size_t kMaxPayloadBytes = 8192;

// Loads `key = value` lines into a ModemConfig (keys are the field names
// above; '#' starts a comment).  Unknown keys throw ConfigInvalid.
ModemConfig load_config_file(const std::string& path);

}  // namespace batnet
