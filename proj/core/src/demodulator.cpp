#include "batnet/demodulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "batnet/constellation.hpp"
#include "batnet/errors.hpp"

namespace batnet {

namespace {

using Complex = std::complex<double>;
using std::int64_t;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fraction of the gate window that must sit above the energy threshold.
// Slightly below 1 so isolated noise dips cannot starve the gate.
constexpr double kGateOccupancy = 0.95;

// Half-life of the running input-peak tracker.
constexpr double kPeakHalfLifeS = 0.5;

// e^{-i 2 pi f_c t / f_s}, computed from the absolute sample index so the
// result never depends on how the input was chunked.
Complex mix_factor(const ModemConfig& config, int64_t t) {
    const double turns =
        std::fmod(config.carrier_freq_hz * static_cast<double>(t), config.sample_rate_hz) /
        config.sample_rate_hz;
    return std::polar(1.0, -kTwoPi * turns);
}

double peak_decay_per_sample(const ModemConfig& config) {
    return std::exp(std::log(0.5) / (kPeakHalfLifeS * config.sample_rate_hz));
}

// Appends mixed samples to the running prefix-sum and peak-tracker arrays.
void append_mixed(std::vector<Complex>& prefix, std::vector<double>& peak,
                  double& peak_state, int64_t& count, std::span<const double> chunk,
                  const ModemConfig& config) {
    if (prefix.empty()) prefix.push_back(Complex{0.0, 0.0});
    const double decay = peak_decay_per_sample(config);
    for (double x : chunk) {
        const int64_t t = count++;
        prefix.push_back(prefix.back() + x * mix_factor(config, t));
        peak_state = std::max(std::abs(x), peak_state * decay);
        peak.push_back(peak_state);
    }
}

// Centered moving average over the prefix sums, window clipped to the
// buffer.  Every consumer derives baseband values through this one path so
// streaming and one-shot processing agree bit for bit.
Complex baseband_from_prefix(const std::vector<Complex>& prefix, int64_t n, int window,
                             int64_t total) {
    int64_t lo = n - window / 2;
    int64_t hi = lo + window;
    if (lo < 0) lo = 0;
    if (hi > total) hi = total;
    return (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) /
           static_cast<double>(hi - lo);
}

// Geometry and thresholds shared by every detector stage.
struct DetectorParams {
    int period = 0;
    int steady = 0;
    int ramp = 0;
    int center = 0;
    int64_t gate_window = 0;
    int64_t gate_need = 0;
    int64_t preamble_len = 0;
    int n_sync = 0;
    int n_trailer = 0;
    std::vector<Complex> sync_rot;  // conj phasors of the sync differential phases
    std::vector<int> trailer;
    double corr_threshold = 0.8;
    double gate_factor = 0.1;
};

DetectorParams make_params(const ModemConfig& config) {
    DetectorParams p;
    p.period = config.symbol_period_samples;
    p.steady = config.steady_samples();
    p.ramp = config.transition_samples;
    p.center = p.steady / 2;
    p.gate_window = static_cast<int64_t>(config.preamble_symbols / 2) * p.period;
    p.gate_need = static_cast<int64_t>(std::ceil(kGateOccupancy * p.gate_window));
    p.preamble_len = static_cast<int64_t>(config.preamble_symbols) * p.period;
    p.n_sync = static_cast<int>(config.sync_pattern.size());
    p.n_trailer = static_cast<int>(config.trailer_pattern.size());
    for (int j = 0; j + 1 < p.n_sync; ++j) {
        const double d = wrap_phase(constellation_phase(config.sync_pattern[j + 1]) -
                                    constellation_phase(config.sync_pattern[j]));
        p.sync_rot.push_back(std::polar(1.0, -d));
    }
    p.trailer = config.trailer_pattern;
    p.corr_threshold = config.sync_corr_threshold;
    p.gate_factor = config.gate_threshold_factor;
    return p;
}

// Stage 2 statistic at one candidate offset: normalized correlation of the
// measured differential symbol phases against the sync pattern's, so a
// perfect match scores 1 regardless of carrier phase or amplitude.
template <class BB>
double sync_corr_at(const BB& bb, const DetectorParams& p, int64_t t0) {
    Complex prev = bb(t0 + p.center);
    Complex acc{0.0, 0.0};
    double mag = 0.0;
    for (int j = 1; j < p.n_sync; ++j) {
        const Complex z = bb(t0 + static_cast<int64_t>(j) * p.period + p.center);
        const Complex u = z * std::conj(prev);
        acc += u * p.sync_rot[j - 1];
        mag += std::abs(u);
        prev = z;
    }
    return mag > 0.0 ? std::abs(acc) / mag : 0.0;
}

template <class BB>
std::pair<double, int64_t> best_sync_offset(const BB& bb, const DetectorParams& p,
                                            int64_t lo, int64_t hi) {
    double best = -1.0;
    int64_t best_t0 = lo;
    for (int64_t t0 = lo; t0 <= hi; ++t0) {
        const double corr = sync_corr_at(bb, p, t0);
        if (corr > best) {
            best = corr;
            best_t0 = t0;
        }
    }
    return {best, best_t0};
}

// The correlation stays near its peak for as long as every probe point
// remains inside its slot's steady segment, so the surface has a wide flat
// top; residual leakage of the 2 f_c mixing image through the averaging
// window ripples that top and can push the argmax tens of samples off
// centre.  Offsets whose correlation is within this margin of the peak are
// treated as part of the plateau and the midpoint is taken instead.
constexpr double kPlateauDrop = 0.01;

using detail::DetectorState;

// Stages 2-4 for one gate event.  On success fills state.result; otherwise
// moves the gate's resume point one symbol period forward so the search
// sweeps across long interference instead of sticking to one offset.
template <class BB>
void evaluate_candidate(DetectorState& state, const DetectorParams& p, const BB& bb) {
    state.pending = false;
    const int64_t nominal = state.pending_onset + p.preamble_len;
    // A frame may start slightly before the buffer: every read is at least
    // center samples past the frame start, so that much negativity is safe.
    const int64_t lo = std::max(nominal - p.period, p.preamble_len - p.center);
    const int64_t hi = nominal + p.period;

    const auto [corr, peak_t0] = best_sync_offset(bb, p, lo, hi);
    if (corr < p.corr_threshold) {
        state.suppress_until = state.pending_fire + p.period;
        return;
    }

    // Recentre on the correlation plateau around the peak.
    const double plateau_floor = std::max(p.corr_threshold, corr - kPlateauDrop);
    int64_t run_lo = peak_t0;
    int64_t run_hi = peak_t0;
    while (run_lo - 1 >= lo && sync_corr_at(bb, p, run_lo - 1) >= plateau_floor) --run_lo;
    while (run_hi + 1 <= hi && sync_corr_at(bb, p, run_hi + 1) >= plateau_floor) ++run_hi;
    const int64_t sync_start = (run_lo + run_hi) / 2;

    const int64_t frame_start = sync_start - p.preamble_len;

    // Stage 3: circular mean over the constant-phase preamble, skipping the
    // filter ramp-in at the front and the phase ramp into the first sync
    // symbol at the back.
    int64_t a = frame_start + p.steady;
    int64_t b = sync_start - p.ramp;
    if (b <= a) {
        a = std::max<int64_t>(frame_start, 0);
        b = sync_start;
    }
    Complex sum{0.0, 0.0};
    double mag_sum = 0.0;
    for (int64_t n = a; n < b; ++n) {
        const Complex v = bb(n);
        sum += v;
        mag_sum += std::abs(v);
    }
    const double ref = std::arg(sum);
    const double preamble_mag = mag_sum / static_cast<double>(b - a);

    // Stage 4: the trailer symbols must decode exactly.
    const Complex derot = std::polar(1.0, -ref);
    for (int j = 0; j < p.n_trailer; ++j) {
        const int64_t idx =
            sync_start + static_cast<int64_t>(p.n_sync + j) * p.period + p.center;
        const Complex v = bb(idx) * derot;
        if (std::abs(v) == 0.0 ||
            nearest_constellation_index(std::arg(v)) != p.trailer[j]) {
            state.suppress_until = state.pending_fire + p.period;
            return;
        }
    }

    SyncResult result;
    result.frame_start_sample = frame_start;
    result.reference_phase_rad = ref;
    result.preamble_magnitude = preamble_mag;
    result.accepted = true;
    state.result = result;
}

// Advances the detector as far as the available samples permit.  `frontier`
// is the first baseband index whose averaging window is not yet complete;
// the detector never reads at or past it, which is what makes streaming
// and one-shot runs identical.
template <class BB, class PK>
void engine_advance(DetectorState& state, const DetectorParams& p, const BB& bb,
                    const PK& peak, int64_t frontier) {
    const auto above = [&](int64_t n) {
        return std::abs(bb(n)) > p.gate_factor * peak(n) / 2.0;
    };

    while (!state.result) {
        if (state.pending) {
            if (frontier < state.pending_need) return;  // wait for more input
            evaluate_candidate(state, p, bb);
            continue;
        }
        if (state.scan >= frontier) return;

        const int64_t n = state.scan++;
        if (above(n)) ++state.gate_count;
        const int64_t drop = n - p.gate_window;
        if (drop >= 0 && above(drop)) --state.gate_count;

        if (n >= state.suppress_until && state.gate_count >= p.gate_need) {
            // Stage 1 fired: estimate the energy onset from the run length.
            state.pending = true;
            state.pending_onset = n - state.gate_count + 1;
            state.pending_fire = n;
            const int64_t hi = state.pending_onset + p.preamble_len + p.period;
            state.pending_need =
                hi + static_cast<int64_t>(p.n_sync + p.n_trailer - 1) * p.period +
                p.center + 1;
        }
    }
}

}  // namespace

BasebandSequence mix_to_baseband(const PcmBuffer& pcm, const ModemConfig& config) {
    config.validate();
    const int window = config.steady_samples();
    const int64_t total = static_cast<int64_t>(pcm.samples.size());
    if (total < window)
        throw BufferTooShort("input shorter than the averaging window");

    std::vector<Complex> prefix;
    std::vector<double> peak;
    prefix.reserve(pcm.samples.size() + 1);
    peak.reserve(pcm.samples.size());
    double peak_state = 0.0;
    int64_t count = 0;
    append_mixed(prefix, peak, peak_state, count, pcm.samples, config);

    BasebandSequence bb;
    bb.sample_rate_hz = config.sample_rate_hz;
    bb.carrier_freq_hz = config.carrier_freq_hz;
    bb.window_samples = window;
    bb.input_peak = std::move(peak);
    bb.samples.resize(pcm.samples.size());
    for (int64_t n = 0; n < total; ++n)
        bb.samples[static_cast<std::size_t>(n)] =
            baseband_from_prefix(prefix, n, window, total);
    return bb;
}

std::optional<SyncResult> detect_preamble(const BasebandSequence& bb,
                                          const ModemConfig& config) {
    config.validate();
    const DetectorParams p = make_params(config);
    const int64_t total = static_cast<int64_t>(bb.samples.size());
    // The last half-window of baseband values averages a clipped window;
    // the detector stops short of them, exactly like the streaming path.
    const int64_t frontier = total - (p.steady - p.steady / 2);

    DetectorState state;
    engine_advance(
        state, p, [&](int64_t n) { return bb.samples[static_cast<std::size_t>(n)]; },
        [&](int64_t n) { return bb.input_peak[static_cast<std::size_t>(n)]; }, frontier);
    return state.result;
}

std::vector<SoftSymbol> sample_symbols(const BasebandSequence& bb, const SyncResult& sync,
                                       int count, const ModemConfig& config) {
    const int center = config.steady_samples() / 2;
    const int64_t last_idx = sync.frame_start_sample +
                             static_cast<int64_t>(count - 1) * config.symbol_period_samples +
                             center;
    if (count > 0 && (sync.frame_start_sample + center < 0 ||
                      last_idx >= static_cast<int64_t>(bb.samples.size())))
        throw BufferTooShort("requested symbols extend beyond the buffer");

    const Complex derot = std::polar(1.0, -sync.reference_phase_rad);
    std::vector<SoftSymbol> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        const int64_t idx = sync.frame_start_sample +
                            static_cast<int64_t>(k) * config.symbol_period_samples + center;
        out.push_back({bb.samples[static_cast<std::size_t>(idx)] * derot, k});
    }
    return out;
}

// --- streaming front end ----------------------------------------------------

StreamingDemodulator::StreamingDemodulator(ModemConfig config) : config_(std::move(config)) {
    config_.validate();
    prefix_.push_back(Complex{0.0, 0.0});
}

std::int64_t StreamingDemodulator::frontier() const {
    const int window = config_.steady_samples();
    const int64_t f = pcm_count_ - (window - window / 2);
    return f > 0 ? f : 0;
}

Complex StreamingDemodulator::baseband_at(std::int64_t n) const {
    return baseband_from_prefix(prefix_, n, config_.steady_samples(), pcm_count_);
}

void StreamingDemodulator::push(std::span<const double> chunk) {
    append_mixed(prefix_, peak_, peak_state_, pcm_count_, chunk, config_);
    const DetectorParams p = make_params(config_);
    engine_advance(
        state_, p, [&](int64_t n) { return baseband_at(n); },
        [&](int64_t n) { return peak_[static_cast<std::size_t>(n)]; }, frontier());
}

int StreamingDemodulator::symbols_available() const {
    if (!state_.result) return 0;
    const int center = config_.steady_samples() / 2;
    const int64_t room = frontier() - 1 - state_.result->frame_start_sample - center;
    if (room < 0) return 0;
    return static_cast<int>(room / config_.symbol_period_samples) + 1;
}

std::vector<SoftSymbol> StreamingDemodulator::symbols(int count) const {
    std::vector<SoftSymbol> out;
    if (!state_.result) return out;
    const int n = std::min(count, symbols_available());
    const int center = config_.steady_samples() / 2;
    const Complex derot = std::polar(1.0, -state_.result->reference_phase_rad);
    out.reserve(static_cast<std::size_t>(std::max(n, 0)));
    for (int k = 0; k < n; ++k) {
        const int64_t idx = state_.result->frame_start_sample +
                            static_cast<int64_t>(k) * config_.symbol_period_samples + center;
        out.push_back({baseband_at(idx) * derot, k});
    }
    return out;
}

}  // namespace batnet
