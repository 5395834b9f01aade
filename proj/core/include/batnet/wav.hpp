#pragma once

#include <string>
#include <vector>

namespace batnet {

// A run of real audio samples.  Library code keeps samples as doubles in
// [-1, 1]; conversion to 16-bit PCM happens only at the WAV boundary.
struct PcmBuffer {
    std::vector<double> samples;
    double sample_rate_hz = 48000.0;

    double duration_s() const {
        return sample_rate_hz > 0 ? samples.size() / sample_rate_hz : 0.0;
    }
};

// Reads a mono 16-bit PCM WAV file.  Integer samples map to s / 32768.
// Throws WavError on malformed files or unsupported formats.
PcmBuffer read_wav(const std::string& path);

// Writes mono 16-bit PCM.  Floats are scaled by 32768, rounded half away
// from zero and clamped to [-32768, 32767].
void write_wav(const std::string& path, const PcmBuffer& pcm);

}  // namespace batnet
