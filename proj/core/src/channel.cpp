#include "batnet/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include "batnet/errors.hpp"
#include "batnet/spectrum.hpp"

namespace batnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSnrBandHalfWidthHz = 2000.0;

// Resampler kernel: 128 taps per side, Kaiser window.  Beta 8 gives about
// 80 dB of stopband, comfortably past the -60 dBc aliasing budget even for
// tones close to Nyquist.
constexpr int kResampleHalfTaps = 128;
constexpr double kKaiserBeta = 8.0;
constexpr int kKernelOversample = 256;  // table resolution per unit step

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

// Oversampled interpolation kernel for one cutoff, cached because building
// it costs tens of thousands of Bessel evaluations.
struct Kernel {
    double cutoff = 0.0;
    std::vector<double> table;  // h(p / kKernelOversample), p = 0..half*OS
};

const Kernel& kernel_for(double cutoff) {
    static std::mutex mutex;
    static Kernel cached;
    std::lock_guard<std::mutex> lock(mutex);
    if (cached.cutoff == cutoff && !cached.table.empty()) return cached;

    const int len = kResampleHalfTaps * kKernelOversample + 1;
    cached.cutoff = cutoff;
    cached.table.resize(len);
    const double i0_beta = std::cyl_bessel_i(0.0, kKaiserBeta);
    for (int p = 0; p < len; ++p) {
        const double t = static_cast<double>(p) / kKernelOversample;
        const double u = t / kResampleHalfTaps;  // 0..1 across the half window
        const double window = std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - u * u)) / i0_beta;
        cached.table[p] = 2.0 * cutoff * sinc(2.0 * cutoff * t) * window;
    }
    return cached;
}

double kernel_value(const Kernel& k, double t) {
    const double a = std::abs(t) * kKernelOversample;
    const std::size_t p = static_cast<std::size_t>(a);
    if (p + 1 >= k.table.size()) return 0.0;
    const double frac = a - static_cast<double>(p);
    return k.table[p] + frac * (k.table[p + 1] - k.table[p]);
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Parses "x:y x:y ..." pairs (comma or whitespace separated).
ResponseCurve parse_curve(const std::string& value, const std::string& what) {
    ResponseCurve curve;
    std::string token;
    std::stringstream ss(value);
    while (ss >> token) {
        while (!token.empty() && token.back() == ',') token.pop_back();
        if (token.empty()) continue;
        const std::size_t colon = token.find(':');
        if (colon == std::string::npos)
            throw InvalidProfile(what + ": expected x:y pairs");
        try {
            curve.points.emplace_back(std::stod(token.substr(0, colon)),
                                      std::stod(token.substr(colon + 1)));
        } catch (const std::exception&) {
            throw InvalidProfile(what + ": bad number in '" + token + "'");
        }
    }
    return curve;
}

double parse_snr(const std::string& value) {
    if (value == "inf" || value == "+inf" || value == "infinity")
        return std::numeric_limits<double>::infinity();
    return std::stod(value);
}

}  // namespace

double ResponseCurve::at(double x) const {
    if (points.empty()) return 1.0;
    if (x <= points.front().first) return points.front().second;
    if (x >= points.back().first) return points.back().second;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (x <= points[i].first) {
            const auto& [x0, y0] = points[i - 1];
            const auto& [x1, y1] = points[i];
            const double w = (x - x0) / (x1 - x0);
            return y0 + w * (y1 - y0);
        }
    }
    return points.back().second;
}

double ChannelProfile::angular_gain_at(double angle_deg) const {
    double folded = std::abs(std::remainder(angle_deg, 360.0));  // 0..180
    if (!angular_gain.flat()) return angular_gain.at(folded);
    // Default pattern: 1 on axis falling to 0.25 directly behind.
    return 0.625 + 0.375 * std::cos(folded * std::numbers::pi / 180.0);
}

void ChannelProfile::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidProfile(msg); };
    if (!(distance_m >= 0.1)) fail("distance_m must be at least 0.1");
    if (!std::isfinite(tx_angle_deg) || !std::isfinite(rx_angle_deg))
        fail("angles must be finite");
    if (std::isnan(snr_db)) fail("snr_db must be a number or inf");
    if (!std::isfinite(relative_velocity_mps)) fail("relative_velocity_mps must be finite");
    if (!std::isfinite(clock_skew_ppm)) fail("clock_skew_ppm must be finite");
    if (!(speed_of_sound_mps > 0.0)) fail("speed_of_sound_mps must be positive");
    if (jammer) {
        if (!(jammer->freq_hz > 0.0)) fail("jammer frequency must be positive");
        if (jammer->amplitude < 0.0 || jammer->amplitude > 1.0)
            fail("jammer amplitude must be in [0, 1]");
    }
    for (const ResponseCurve* curve : {&tx_response, &rx_response, &angular_gain}) {
        for (std::size_t i = 0; i < curve->points.size(); ++i) {
            const auto& [x, y] = curve->points[i];
            if (y < 0.0 || y > 1.0) fail("curve gains must be in [0, 1]");
            if (i > 0 && x <= curve->points[i - 1].first)
                fail("curve points must be strictly increasing in x");
        }
    }
}

ChannelProfile load_profile_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidProfile("cannot open profile: " + path);

    ChannelProfile profile;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidProfile(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        try {
            if (key == "distance_m") profile.distance_m = std::stod(value);
            else if (key == "tx_angle_deg") profile.tx_angle_deg = std::stod(value);
            else if (key == "rx_angle_deg") profile.rx_angle_deg = std::stod(value);
            else if (key == "snr_db") profile.snr_db = parse_snr(value);
            else if (key == "relative_velocity_mps") profile.relative_velocity_mps = std::stod(value);
            else if (key == "clock_skew_ppm") profile.clock_skew_ppm = std::stod(value);
            else if (key == "speed_of_sound_mps") profile.speed_of_sound_mps = std::stod(value);
            else if (key == "rng_seed") profile.rng_seed = std::stoull(value);
            else if (key == "jammer") {
                std::stringstream ss(value);
                Jammer j;
                if (!(ss >> j.freq_hz >> j.amplitude))
                    throw InvalidProfile("jammer needs '<freq_hz> <amplitude>'");
                profile.jammer = j;
            } else if (key == "tx_response") profile.tx_response = parse_curve(value, key);
            else if (key == "rx_response") profile.rx_response = parse_curve(value, key);
            else if (key == "angular_gain") profile.angular_gain = parse_curve(value, key);
            else
                throw InvalidProfile(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        } catch (const InvalidProfile&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidProfile(path + ":" + std::to_string(lineno) + ": bad value for '" + key + "'");
        }
    }
    profile.validate();
    return profile;
}

std::vector<double> resample(std::span<const double> x, double ratio) {
    if (!(ratio >= 0.9 && ratio <= 1.1))
        throw InvalidProfile("resample ratio must be within [0.9, 1.1]");
    if (x.empty()) return {};
    if (ratio == 1.0) return {x.begin(), x.end()};  // bit-exact identity

    // Anti-alias when compressing the time axis (ratio > 1 shifts content up).
    const double cutoff = 0.5 * std::min(1.0, 1.0 / ratio);
    const Kernel& kernel = kernel_for(cutoff);

    const std::size_t out_len = static_cast<std::size_t>(static_cast<double>(x.size()) / ratio);
    std::vector<double> out(out_len);
    const auto n = static_cast<std::int64_t>(x.size());
    for (std::size_t m = 0; m < out_len; ++m) {
        const double pos = static_cast<double>(m) * ratio;
        const auto i0 = static_cast<std::int64_t>(std::floor(pos));
        double acc = 0.0;
        for (std::int64_t i = i0 - kResampleHalfTaps + 1; i <= i0 + kResampleHalfTaps; ++i) {
            if (i < 0 || i >= n) continue;
            acc += x[static_cast<std::size_t>(i)] * kernel_value(kernel, static_cast<double>(i) - pos);
        }
        out[m] = acc;
    }
    return out;
}

PcmBuffer apply_channel(const PcmBuffer& pcm, const ChannelProfile& profile,
                        double carrier_hint_hz) {
    profile.validate();
    const double fs = pcm.sample_rate_hz;
    if (!(carrier_hint_hz > 0.0 && carrier_hint_hz < fs / 2.0))
        throw InvalidProfile("carrier hint must sit below Nyquist");
    if (profile.jammer && profile.jammer->freq_hz >= fs / 2.0)
        throw InvalidProfile("jammer frequency must sit below Nyquist");

    // 1. Playback-rate offset from clock skew and motion.
    const double ratio =
        1.0 + profile.clock_skew_ppm * 1e-6 + profile.relative_velocity_mps / profile.speed_of_sound_mps;
    std::vector<double> y = resample(pcm.samples, ratio);

    // 2. Device frequency responses (zero-phase, frequency domain).
    if (!profile.tx_response.flat() || !profile.rx_response.flat()) {
        apply_frequency_response(y, fs, [&](double f) {
            return profile.tx_response.at(f) * profile.rx_response.at(f);
        });
    }

    // 3. Reference in-band power before geometric losses: the requested SNR
    // is what a receiver at 1 m on-axis would see, so moving away or off
    // axis genuinely costs signal-to-noise.
    const double band_lo = std::max(0.0, carrier_hint_hz - kSnrBandHalfWidthHz);
    const double band_hi = std::min(fs / 2.0, carrier_hint_hz + kSnrBandHalfWidthHz);
    double ref_band_power = 0.0;
    if (std::isfinite(profile.snr_db))
        ref_band_power = band_power(y, fs, band_lo, band_hi);

    // 4. Geometric attenuation and directivity.
    const double gain = std::min(1.0, 1.0 / profile.distance_m) *
                        profile.angular_gain_at(profile.tx_angle_deg) *
                        profile.angular_gain_at(profile.rx_angle_deg);
    for (double& v : y) v *= gain;

    std::mt19937_64 rng(profile.rng_seed);

    // 5. Jammer tone with a seeded random phase.
    if (profile.jammer && profile.jammer->amplitude > 0.0) {
        std::uniform_real_distribution<double> phase_dist(0.0, kTwoPi);
        const double phi0 = phase_dist(rng);
        const double w = kTwoPi * profile.jammer->freq_hz / fs;
        for (std::size_t t = 0; t < y.size(); ++t)
            y[t] += profile.jammer->amplitude * std::cos(w * static_cast<double>(t) + phi0);
    }

    // 6. White noise sized so its share inside the band hits the target SNR.
    if (std::isfinite(profile.snr_db) && ref_band_power > 0.0) {
        const double band_width = band_hi - band_lo;
        const double noise_band_power = ref_band_power * std::pow(10.0, -profile.snr_db / 10.0);
        const double sigma2 = noise_band_power * (fs / 2.0) / band_width;
        std::normal_distribution<double> dist(0.0, std::sqrt(sigma2));
        for (double& v : y) v += dist(rng);
    }

    // 7. Receiver-side clamp (ADC saturation).
    for (double& v : y) v = std::clamp(v, -1.0, 1.0);

    PcmBuffer out;
    out.sample_rate_hz = fs;
    out.samples = std::move(y);
    return out;
}

}  // namespace batnet
