#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "batnet/config.hpp"
#include "batnet/wav.hpp"

namespace batnet {

// Complex baseband derived from real PCM: the input is mixed against
// e^{-i 2 pi f_c t / f_s} and smoothed with a moving average whose length
// equals the steady part of a symbol slot.  A pure carrier at phase phi
// therefore settles to ~0.5 * amplitude * e^{i phi}.
struct BasebandSequence {
    std::vector<std::complex<double>> samples;
    // Decayed running peak of |pcm|, used by the preamble detector as an
    // amplitude estimate so detection is invariant to input scaling.
    std::vector<double> input_peak;
    double sample_rate_hz = 48000.0;
    double carrier_freq_hz = 22500.0;
    int window_samples = 128;
};

// Where a frame was found and how to rotate it upright.
struct SyncResult {
    std::int64_t frame_start_sample = 0;  // first sample of the preamble
    double reference_phase_rad = 0.0;     // circular mean over the preamble
    double preamble_magnitude = 0.0;      // mean |bb| over the preamble
    bool accepted = false;                // trailer check passed
};

// One sampled symbol slot, already rotated by the reference phase.
struct SoftSymbol {
    std::complex<double> value;
    int slot_index = 0;  // 0 = first preamble slot
};

// Mixes PCM down to baseband.  Throws BufferTooShort when the input is
// shorter than the averaging window.
BasebandSequence mix_to_baseband(const PcmBuffer& pcm, const ModemConfig& config);

// Searches the baseband for one frame.  Stages: sustained-energy gate,
// differential-phase correlation against the sync pattern (offset search of
// +-1 symbol period in 1-sample steps), reference-phase estimate over the
// preamble, and a trailer check that discards false positives.  Returns
// nothing when no candidate survives all stages.
std::optional<SyncResult> detect_preamble(const BasebandSequence& bb,
                                          const ModemConfig& config);

// Samples `count` symbol slots starting at the frame start: slot k is read
// at frame_start + k * T_s + (T_s - T_t) / 2 and rotated by the reference
// phase.  Throws BufferTooShort when slots extend beyond the buffer.
std::vector<SoftSymbol> sample_symbols(const BasebandSequence& bb, const SyncResult& sync,
                                       int count, const ModemConfig& config);

namespace detail {

// Resumable preamble-detector state shared by the one-shot and streaming
// paths.  Positions are absolute sample indices.
struct DetectorState {
    std::int64_t scan = 0;
    std::int64_t gate_count = 0;
    std::int64_t suppress_until = 0;
    bool pending = false;
    std::int64_t pending_onset = 0;
    std::int64_t pending_fire = 0;
    std::int64_t pending_need = 0;
    std::optional<SyncResult> result;
};

}  // namespace detail

// Incremental front end: accepts PCM in arbitrary chunks and yields exactly
// the same sync decision and soft symbols as the one-shot functions fed the
// concatenated input.  Single-owner; not safe for concurrent use.  Keeps
// the whole mixed history in memory, so it is meant for session-sized
// buffers rather than unbounded capture.
class StreamingDemodulator {
  public:
    explicit StreamingDemodulator(ModemConfig config);

    void push(std::span<const double> chunk);

    std::int64_t samples_pushed() const { return pcm_count_; }

    // First accepted sync, if one has been found so far.
    const std::optional<SyncResult>& sync() const { return state_.result; }

    // Number of symbol slots that can currently be sampled for the synced
    // frame (0 while unsynced).
    int symbols_available() const;

    // Samples min(count, symbols_available()) slots.
    std::vector<SoftSymbol> symbols(int count) const;

  private:
    std::complex<double> baseband_at(std::int64_t n) const;
    std::int64_t frontier() const;

    ModemConfig config_;
    std::vector<std::complex<double>> prefix_;  // prefix sums of mixed input
    std::vector<double> peak_;
    std::int64_t pcm_count_ = 0;
    double peak_state_ = 0.0;
    detail::DetectorState state_;
};

}  // namespace batnet
