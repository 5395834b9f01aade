#include "batnet/evaluation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <random>

#include "batnet/constellation.hpp"
#include "batnet/decoder.hpp"
#include "batnet/errors.hpp"
#include "batnet/frame.hpp"
#include "batnet/pipeline.hpp"

namespace batnet {

namespace {

int gray_bit_distance(int a, int b) {
    return std::popcount(static_cast<unsigned>(gray_code(a) ^ gray_code(b)));
}

std::vector<std::uint8_t> trial_payload(std::uint64_t seed, std::size_t bytes) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<std::uint8_t> payload(bytes);
    for (auto& b : payload) b = static_cast<std::uint8_t>(dist(rng));
    return payload;
}

}  // namespace

QualityReport transmission_quality(std::span<const int> sent,
                                   std::span<const SoftSymbol> received,
                                   std::span<const double> phases) {
    if (sent.size() != received.size() || sent.size() != phases.size())
        throw LengthMismatch("transmission_quality: span lengths differ");

    QualityReport report;
    report.symbols_total = static_cast<int>(sent.size());
    double score = 0.0;
    double raw_score = 0.0;
    for (std::size_t k = 0; k < sent.size(); ++k) {
        const auto decide = [&](double phase) {
            // An empty (zero) soft symbol cannot be decided; score it as a
            // full miss rather than throwing mid-metric.
            if (std::abs(received[k].value) == 0.0) return -1;
            return hard_decide(received[k], phase).index;
        };
        const int tracked = decide(phases[k]);
        if (tracked == sent[k]) {
            ++report.symbols_correct;
            score += 1.0;
        } else if (tracked >= 0 && constellation_adjacent(tracked, sent[k])) {
            ++report.symbols_adjacent;
            score += 0.5;
        }
        report.bit_errors += tracked < 0 ? kBitsPerSymbol : gray_bit_distance(tracked, sent[k]);

        const int raw = decide(0.0);
        if (raw == sent[k]) raw_score += 1.0;
        else if (raw >= 0 && constellation_adjacent(raw, sent[k])) raw_score += 0.5;
    }
    if (report.symbols_total > 0) {
        report.quality = score / report.symbols_total;
        report.raw_quality = raw_score / report.symbols_total;
    }
    return report;
}

QualityReport run_trial(const TrialSpec& spec) {
    const PcmBuffer tx = transmit(spec.payload, spec.config);
    const PcmBuffer rx = apply_channel(tx, spec.profile, spec.config.carrier_freq_hz);

    ReceiveOptions opts;
    opts.phase_tracking = spec.phase_tracking;
    const ReceiveResult rr = receive(rx, spec.config, opts);

    // Ground truth: the coded-block region of the transmitted frame.
    const Frame frame = build_frame(spec.payload, spec.config);
    const int framing = spec.config.framing_symbols();
    const std::vector<int> sent(frame.symbols.begin() + framing, frame.symbols.end());

    const int total_blocks = 1 + spec.config.data_blocks_for(spec.payload.size());

    QualityReport report;
    if (!rr.sync) {
        // Missed sync scores zero; report it distinctly.
        report.symbols_total = static_cast<int>(sent.size());
        report.bit_errors = static_cast<int>(sent.size()) * kBitsPerSymbol;
        report.blocks_failed = total_blocks;
    } else {
        // Pad a truncated capture with undecidable symbols so the
        // denominator always covers the whole transmitted frame.
        std::vector<SoftSymbol> softs(rr.block_softs.begin(), rr.block_softs.end());
        softs.resize(sent.size());

        std::vector<double> phases(sent.size(), 0.0);
        if (rr.frame) {
            const auto& track = rr.frame->cumulative_phase_track;
            for (std::size_t k = 0; k < phases.size(); ++k) {
                const std::size_t block = k / static_cast<std::size_t>(spec.config.block_symbols());
                if (block < track.size()) phases[k] = track[block];
            }
        }
        report = transmission_quality(sent, softs, phases);
        report.sync_found = true;
        if (rr.frame) {
            report.blocks_failed = rr.frame->blocks_failed;
            report.flips_used = rr.frame->flips_used;
            report.payload_ok = rr.frame->payload == spec.payload;
        } else {
            report.blocks_failed = total_blocks;
        }
    }
    report.seed = spec.profile.rng_seed;
    report.config_snapshot = spec.config;
    report.profile_snapshot = spec.profile;
    return report;
}

std::vector<SweepPoint> run_sweep(const ModemConfig& base_config,
                                  const ChannelProfile& base_profile,
                                  const std::string& axis,
                                  std::span<const double> values, int trials,
                                  const SweepOptions& opts) {
    if (trials < 1) throw UnknownAxis("run_sweep: trials must be at least 1");

    enum class Axis { Distance, TxAngle, SymbolPeriod, Snr, Carrier };
    Axis ax;
    if (axis == "distance_m") ax = Axis::Distance;
    else if (axis == "tx_angle_deg") ax = Axis::TxAngle;
    else if (axis == "symbol_period_samples") ax = Axis::SymbolPeriod;
    else if (axis == "snr_db") ax = Axis::Snr;
    else if (axis == "carrier_freq_hz") ax = Axis::Carrier;
    else throw UnknownAxis("run_sweep: unknown axis '" + axis + "'");

    std::vector<SweepPoint> points;
    points.reserve(values.size() * static_cast<std::size_t>(trials));
    for (const double value : values) {
        TrialSpec spec;
        spec.config = base_config;
        spec.profile = base_profile;
        spec.phase_tracking = opts.phase_tracking;
        switch (ax) {
            case Axis::Distance: spec.profile.distance_m = value; break;
            case Axis::TxAngle: spec.profile.tx_angle_deg = value; break;
            case Axis::SymbolPeriod:
                spec.config.symbol_period_samples = static_cast<int>(std::lround(value));
                break;
            case Axis::Snr: spec.profile.snr_db = value; break;
            case Axis::Carrier: spec.config.carrier_freq_hz = value; break;
        }
        spec.config.validate();

        // The same seeds and payloads repeat at every axis value so that
        // adjacent values see paired channel realisations.
        for (int i = 0; i < trials; ++i) {
            spec.profile.rng_seed = opts.seed0 + static_cast<std::uint64_t>(i);
            spec.payload = opts.payload.empty()
                               ? trial_payload(opts.seed0 + static_cast<std::uint64_t>(i), 64)
                               : opts.payload;
            SweepPoint point;
            point.axis_value = value;
            point.trial = i;
            point.report = run_trial(spec);
            points.push_back(std::move(point));
        }
    }
    return points;
}

void write_sweep_csv(std::ostream& out, const std::string& axis,
                     std::span<const SweepPoint> points) {
    out << axis
        << ",trial,quality,raw_quality,symbols_total,symbols_correct,symbols_adjacent,"
           "bit_errors,blocks_failed,flips_used,sync_found,payload_ok,seed\n";
    for (const SweepPoint& p : points) {
        const QualityReport& r = p.report;
        out << p.axis_value << ',' << p.trial << ',' << r.quality << ',' << r.raw_quality
            << ',' << r.symbols_total << ',' << r.symbols_correct << ',' << r.symbols_adjacent
            << ',' << r.bit_errors << ',' << r.blocks_failed << ',' << r.flips_used << ','
            << (r.sync_found ? 1 : 0) << ',' << (r.payload_ok ? 1 : 0) << ',' << r.seed
            << '\n';
    }
}

CalibrationResult calibrate(
    const std::function<QualityReport(double freq_hz, int trial)>& probe,
    std::span<const double> frequencies) {
    if (frequencies.empty())
        throw ConfigInvalid("calibrate: frequency list must not be empty");

    CalibrationResult result;
    result.mean_quality.reserve(frequencies.size());
    bool have_best = false;
    double best_mean = 0.0;
    for (const double freq : frequencies) {
        double sum = 0.0;
        for (int trial = 0; trial < kCalibrationTrials; ++trial) {
            const QualityReport report = probe(freq, trial);
            sum += report.quality;
            result.any_sync = result.any_sync || report.sync_found;
        }
        const double mean = sum / kCalibrationTrials;
        result.mean_quality.push_back(mean);
        if (!have_best || mean > best_mean ||
            (mean == best_mean && freq < result.best_freq_hz)) {
            have_best = true;
            best_mean = mean;
            result.best_freq_hz = freq;
        }
    }
    if (!result.any_sync) result.best_freq_hz = frequencies.front();
    return result;
}

std::vector<double> default_calibration_frequencies() {
    std::vector<double> freqs;
    for (double f = 20000.0; f <= 23500.0 + 1.0; f += 500.0) freqs.push_back(f);
    return freqs;
}

}  // namespace batnet
