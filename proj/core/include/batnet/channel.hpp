#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "batnet/wav.hpp"

namespace batnet {

// Piecewise-linear curve (gain against frequency or angle).  An empty
// curve means "flat 1.0"; outside the given range the end values extend.
struct ResponseCurve {
    std::vector<std::pair<double, double>> points;  // sorted by x

    bool flat() const { return points.empty(); }
    double at(double x) const;
};

struct Jammer {
    double freq_hz = 0.0;
    double amplitude = 0.0;
};

// Everything the simulated desk between the two devices does to the signal.
struct ChannelProfile {
    double distance_m = 1.0;
    double tx_angle_deg = 0.0;     // transmitter off-axis angle
    double rx_angle_deg = 0.0;
    double snr_db = std::numeric_limits<double>::infinity();
    double relative_velocity_mps = 0.0;
    double clock_skew_ppm = 0.0;
    double speed_of_sound_mps = 343.0;
    std::uint64_t rng_seed = 0;
    std::optional<Jammer> jammer;
    ResponseCurve tx_response;   // speaker gain vs frequency
    ResponseCurve rx_response;   // microphone gain vs frequency
    ResponseCurve angular_gain;  // gain vs off-axis angle; empty = built-in default

    // Gain for an off-axis angle in degrees (folded into [0, 180]).  The
    // built-in default is cardioid-like: 1 on axis, 0.25 behind.
    double angular_gain_at(double angle_deg) const;

    // Throws InvalidProfile when any field is out of range.
    void validate() const;
};

// Loads a `key = value` profile file; see docs/formats.md for the keys.
ChannelProfile load_profile_file(const std::string& path);

// Windowed-sinc resampler: output sample m takes the value of the input at
// position m * ratio, so the output length is floor(len / ratio) and a tone
// at f comes out at f * ratio.  Ratio must stay within [0.9, 1.1].
std::vector<double> resample(std::span<const double> x, double ratio);

// Runs PCM through the simulated channel: playback-rate change from clock
// skew and motion, device frequency responses, distance and off-axis
// attenuation, an optional jammer tone, and white noise scaled so the
// in-band SNR around carrier_hint_hz (+-2 kHz) would equal snr_db at the
// reference geometry (1 m, on-axis).  The result is clamped to [-1, 1].
PcmBuffer apply_channel(const PcmBuffer& pcm, const ChannelProfile& profile,
                        double carrier_hint_hz);

}  // namespace batnet
