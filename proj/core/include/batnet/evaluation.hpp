#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "batnet/channel.hpp"
#include "batnet/config.hpp"
#include "batnet/demodulator.hpp"

namespace batnet {

// Outcome of scoring one transmission.  A symbol decided exactly scores 1,
// an adjacent constellation point scores 0.5, anything else 0; quality is
// the average.  raw_quality applies the same rule with the per-block phase
// track zeroed, i.e. what the receiver would have scored without phase
// feed-forward.
struct QualityReport {
    double quality = 0.0;
    double raw_quality = 0.0;
    int symbols_total = 0;
    int symbols_correct = 0;
    int symbols_adjacent = 0;
    int bit_errors = 0;   // Gray-bit disagreements across all symbols
    int blocks_failed = 0;
    int flips_used = 0;
    bool sync_found = false;
    bool payload_ok = false;  // decoded payload matched the transmitted one
    std::uint64_t seed = 0;
    ModemConfig config_snapshot;
    ChannelProfile profile_snapshot;
};

// Scores received soft symbols against the transmitted indices.  `phases`
// gives the rotation applied before each hard decision (normally the
// decoder's cumulative track expanded per symbol; pass zeros for the raw
// score).  All three spans must be the same length or LengthMismatch is
// thrown.  An empty input yields quality 0.  Only the scoring fields are
// filled in; sync/seed/snapshots are the caller's business.
QualityReport transmission_quality(std::span<const int> sent,
                                   std::span<const SoftSymbol> received,
                                   std::span<const double> phases);

// One end-to-end experiment: modulate `payload`, push it through `profile`,
// demodulate, and score.
struct TrialSpec {
    ModemConfig config;
    ChannelProfile profile;
    std::vector<std::uint8_t> payload;
    bool phase_tracking = true;
};

QualityReport run_trial(const TrialSpec& spec);

// Parameter sweep in the style of the field experiments: for each value of
// `axis` the same set of trials (same seeds, same payloads) is re-run, so
// values can be compared pairwise.
struct SweepOptions {
    bool phase_tracking = true;
    std::uint64_t seed0 = 0;
    // When empty, each trial i uses 64 pseudo-random bytes derived from
    // seed0 + i; otherwise this payload is sent in every trial.
    std::vector<std::uint8_t> payload;
};

struct SweepPoint {
    double axis_value = 0.0;
    int trial = 0;
    QualityReport report;
};

// axis must be one of: distance_m, tx_angle_deg, symbol_period_samples,
// snr_db, carrier_freq_hz.  Throws UnknownAxis otherwise.
std::vector<SweepPoint> run_sweep(const ModemConfig& base_config,
                                  const ChannelProfile& base_profile,
                                  const std::string& axis,
                                  std::span<const double> values, int trials,
                                  const SweepOptions& opts = {});

// CSV with a header row and one row per trial: the axis value followed by
// the scalar QualityReport fields.
void write_sweep_csv(std::ostream& out, const std::string& axis,
                     std::span<const SweepPoint> points);

// Frequency calibration: probe(freq_hz, trial) runs one transmission at
// that carrier and returns its report.  Each frequency is probed
// kCalibrationTrials times; the highest mean quality wins, ties going to
// the lowest frequency.  When no probe ever finds sync the first frequency
// is returned with any_sync = false.
inline constexpr int kCalibrationTrials = 4;

struct CalibrationResult {
    double best_freq_hz = 0.0;
    std::vector<double> mean_quality;  // parallel to the input frequencies
    bool any_sync = false;
};

CalibrationResult calibrate(
    const std::function<QualityReport(double freq_hz, int trial)>& probe,
    std::span<const double> frequencies);

// The default probe grid: 20.0 kHz to 23.5 kHz in 0.5 kHz steps.
std::vector<double> default_calibration_frequencies();

}  // namespace batnet
