// batnet -- command-line front end for the acoustic modem library.
//
//   encode     payload -> WAV
//   decode     WAV -> payload on stdout, diagnostics on stderr
//   simulate   WAV -> degraded WAV through a parametric channel
//   evaluate   parameter sweep -> CSV
//   calibrate  pick the best carrier frequency for a channel profile
//
// Exit codes: 0 success, 1 decode failure (no sync / bad header / oversize
// payload), 2 usage or input errors.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "batnet/channel.hpp"
#include "batnet/config.hpp"
#include "batnet/errors.hpp"
#include "batnet/evaluation.hpp"
#include "batnet/frame.hpp"
#include "batnet/pipeline.hpp"
#include "batnet/wav.hpp"

namespace {

using namespace batnet;

struct Options {
    // modem config overrides
    std::optional<double> freq;
    std::optional<int> symbol_len;
    std::optional<int> transition_len;
    std::optional<double> amp;
    // io
    std::string in_path;
    std::string out_path;
    std::optional<std::string> text;
    std::string file_path;
    std::string truth_path;
    std::string profile_path;
    // channel overrides
    std::optional<double> distance, angle_tx, angle_rx, snr, velocity, skew_ppm;
    std::optional<double> jam_freq, jam_amp;
    std::uint64_t seed = 0;
    // evaluation
    std::string axis = "distance";
    std::string values;
    int trials = 16;
    bool no_phase_track = false;
};

// Defaults, then BATNET_CONFIG (if set), then explicit flags on top.
ModemConfig build_config(const Options& o) {
    ModemConfig config;
    if (const char* env = std::getenv("BATNET_CONFIG"); env && *env)
        config = load_config_file(env);
    if (o.freq) config.carrier_freq_hz = *o.freq;
    if (o.symbol_len) config.symbol_period_samples = *o.symbol_len;
    if (o.transition_len) config.transition_samples = *o.transition_len;
    if (o.amp) config.amplitude = *o.amp;
    config.validate();
    return config;
}

ChannelProfile build_profile(const Options& o) {
    ChannelProfile profile;
    if (!o.profile_path.empty()) profile = load_profile_file(o.profile_path);
    if (o.distance) profile.distance_m = *o.distance;
    if (o.angle_tx) profile.tx_angle_deg = *o.angle_tx;
    if (o.angle_rx) profile.rx_angle_deg = *o.angle_rx;
    if (o.snr) profile.snr_db = *o.snr;
    if (o.velocity) profile.relative_velocity_mps = *o.velocity;
    if (o.skew_ppm) profile.clock_skew_ppm = *o.skew_ppm;
    if (o.jam_freq || o.jam_amp) {
        Jammer j;
        if (profile.jammer) j = *profile.jammer;
        if (o.jam_freq) j.freq_hz = *o.jam_freq;
        if (o.jam_amp) j.amplitude = *o.jam_amp;
        profile.jammer = j;
    }
    profile.rng_seed = o.seed;
    profile.validate();
    return profile;
}

std::vector<std::uint8_t> load_payload(const Options& o) {
    if (o.text && !o.file_path.empty())
        throw CLI::ValidationError("--text and --file are mutually exclusive");
    if (!o.file_path.empty()) {
        std::ifstream in(o.file_path, std::ios::binary);
        if (!in) throw CLI::ValidationError("cannot read " + o.file_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string s = buf.str();
        return {s.begin(), s.end()};
    }
    const std::string s = o.text.value_or("");
    return {s.begin(), s.end()};
}

// "--values a:b:c" (inclusive range) or "--values v1,v2,..."
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        double start = 0.0, stop = 0.0, step = 0.0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(text);
        if (!(ss >> start >> c1 >> stop >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0.0)
            throw CLI::ValidationError("--values range must be start:stop:step");
        for (double v = start; v <= stop + step * 1e-9; v += step) values.push_back(v);
    } else {
        std::istringstream ss(text);
        std::string token;
        while (std::getline(ss, token, ','))
            if (!token.empty()) values.push_back(std::stod(token));
    }
    if (values.empty()) throw CLI::ValidationError("--values produced no values");
    return values;
}

std::string canonical_axis(const std::string& axis) {
    if (axis == "distance" || axis == "distance_m") return "distance_m";
    if (axis == "angle" || axis == "tx_angle" || axis == "tx_angle_deg") return "tx_angle_deg";
    if (axis == "symbol-len" || axis == "symbol_period" || axis == "symbol_period_samples")
        return "symbol_period_samples";
    if (axis == "snr" || axis == "snr_db") return "snr_db";
    if (axis == "freq" || axis == "carrier" || axis == "carrier_freq_hz")
        return "carrier_freq_hz";
    throw UnknownAxis("unknown axis '" + axis + "'");
}

int cmd_encode(const Options& o) {
    const ModemConfig config = build_config(o);
    const std::vector<std::uint8_t> payload = load_payload(o);
    if (o.out_path.empty()) throw CLI::ValidationError("encode needs --out");
    if (payload.size() > kMaxPayloadBytes) {
        std::fprintf(stderr, "payload too long: %zu bytes (max %zu)\n", payload.size(),
                     static_cast<std::size_t>(kMaxPayloadBytes));
        return 1;
    }
    const PcmBuffer pcm = transmit(payload, config);
    write_wav(o.out_path, pcm);
    std::fprintf(stderr, "symbols: %d\n", config.frame_symbols_for(payload.size()));
    std::fprintf(stderr, "samples: %zu\n", pcm.samples.size());
    std::fprintf(stderr, "duration: %.3f s\n", pcm.duration_s());
    std::fprintf(stderr, "raw rate: %.1f bit/s\n", config.raw_bit_rate());
    std::fprintf(stderr, "effective rate: %.2f bit/s\n", config.effective_bit_rate());
    return 0;
}

int cmd_decode(const Options& o) {
    const ModemConfig config = build_config(o);
    if (o.in_path.empty()) throw CLI::ValidationError("decode needs --in");
    const PcmBuffer pcm = read_wav(o.in_path);

    ReceiveOptions ropts;
    ropts.phase_tracking = !o.no_phase_track;
    const ReceiveResult rr = receive(pcm, config, ropts);
    if (!rr.sync) {
        std::fprintf(stderr, "no sync\n");
        return 1;
    }
    std::fprintf(stderr, "sync offset: %lld samples\n",
                 static_cast<long long>(rr.sync->frame_start_sample));
    std::fprintf(stderr, "reference phase: %.4f rad\n", rr.sync->reference_phase_rad);
    if (!rr.frame) {
        std::fprintf(stderr, "header decode failed\n");
        return 1;
    }
    const FrameDecodeResult& frame = *rr.frame;
    std::fprintf(stderr, "blocks: %d total, %d failed, %d flips\n", frame.blocks_total,
                 frame.blocks_failed, frame.flips_used);
    std::fprintf(stderr, "phase track:");
    for (const double p : frame.cumulative_phase_track) std::fprintf(stderr, " %.4f", p);
    std::fprintf(stderr, "\n");

    if (!o.truth_path.empty()) {
        std::ifstream in(o.truth_path, std::ios::binary);
        if (!in) throw CLI::ValidationError("cannot read " + o.truth_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string s = buf.str();
        const std::vector<std::uint8_t> truth(s.begin(), s.end());

        const Frame expected = build_frame(truth, config);
        std::vector<int> sent(expected.symbols.begin() + config.framing_symbols(),
                              expected.symbols.end());
        std::vector<SoftSymbol> softs(rr.block_softs.begin(), rr.block_softs.end());
        softs.resize(sent.size());
        std::vector<double> phases(sent.size(), 0.0);
        for (std::size_t k = 0; k < phases.size(); ++k) {
            const std::size_t block = k / static_cast<std::size_t>(config.block_symbols());
            if (block < frame.cumulative_phase_track.size())
                phases[k] = frame.cumulative_phase_track[block];
        }
        const QualityReport report = transmission_quality(sent, softs, phases);
        std::fprintf(stderr, "quality: %.4f\n", report.quality);
        std::fprintf(stderr, "payload match: %s\n", frame.payload == truth ? "yes" : "no");
    }

    std::fwrite(frame.payload.data(), 1, frame.payload.size(), stdout);
    std::fflush(stdout);
    return 0;
}

int cmd_simulate(const Options& o) {
    const ModemConfig config = build_config(o);
    const ChannelProfile profile = build_profile(o);
    if (o.in_path.empty() || o.out_path.empty())
        throw CLI::ValidationError("simulate needs --in and --out");
    const PcmBuffer pcm = read_wav(o.in_path);
    const PcmBuffer degraded = apply_channel(pcm, profile, config.carrier_freq_hz);
    write_wav(o.out_path, degraded);
    std::fprintf(stderr, "wrote %zu samples\n", degraded.samples.size());
    return 0;
}

int cmd_evaluate(const Options& o) {
    const ModemConfig config = build_config(o);
    const ChannelProfile profile = build_profile(o);
    if (o.values.empty()) throw CLI::ValidationError("evaluate needs --values");
    const std::string axis = canonical_axis(o.axis);
    const std::vector<double> values = parse_values(o.values);

    SweepOptions sopts;
    sopts.phase_tracking = !o.no_phase_track;
    sopts.seed0 = o.seed;
    const std::vector<SweepPoint> points =
        run_sweep(config, profile, axis, values, o.trials, sopts);

    if (o.out_path.empty()) {
        write_sweep_csv(std::cout, axis, points);
    } else {
        std::ofstream out(o.out_path);
        if (!out) throw CLI::ValidationError("cannot write " + o.out_path);
        write_sweep_csv(out, axis, points);
    }

    // Per-value means on stderr for a quick look without a CSV reader.
    for (std::size_t i = 0; i < values.size(); ++i) {
        double sum = 0.0;
        for (int t = 0; t < o.trials; ++t)
            sum += points[i * static_cast<std::size_t>(o.trials) + t].report.quality;
        std::fprintf(stderr, "%s %g mean quality %.4f\n", axis.c_str(), values[i],
                     sum / o.trials);
    }
    return 0;
}

int cmd_calibrate(const Options& o) {
    const ModemConfig base = build_config(o);
    const ChannelProfile profile = build_profile(o);
    const std::vector<double> freqs =
        o.values.empty() ? default_calibration_frequencies() : parse_values(o.values);

    // One fixed probe payload so every frequency carries identical bits.
    std::vector<std::uint8_t> payload(64);
    std::mt19937_64 rng(o.seed);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng() & 0xff);

    const auto probe = [&](double freq_hz, int trial) {
        TrialSpec spec;
        spec.config = base;
        spec.config.carrier_freq_hz = freq_hz;
        spec.profile = profile;
        spec.profile.rng_seed = o.seed + static_cast<std::uint64_t>(trial);
        spec.payload = payload;
        spec.phase_tracking = !o.no_phase_track;
        return run_trial(spec);
    };
    const CalibrationResult result = calibrate(probe, freqs);

    for (std::size_t i = 0; i < freqs.size(); ++i)
        std::fprintf(stderr, "freq %.0f mean quality %.4f\n", freqs[i],
                     result.mean_quality[i]);
    if (!result.any_sync) std::fprintf(stderr, "warning: no frequency achieved sync\n");
    std::printf("best %.0f\n", result.best_freq_hz);
    return 0;
}

void add_config_flags(CLI::App* sub, Options& o) {
    sub->add_option("--freq", o.freq, "carrier frequency, Hz");
    sub->add_option("--symbol-len", o.symbol_len, "symbol period, samples");
    sub->add_option("--transition-len", o.transition_len, "phase transition length, samples");
    sub->add_option("--amp", o.amp, "output amplitude, 0..1");
}

void add_channel_flags(CLI::App* sub, Options& o) {
    sub->add_option("--profile", o.profile_path, "channel profile file");
    sub->add_option("--distance", o.distance, "distance, m");
    sub->add_option("--angle-tx", o.angle_tx, "speaker off-axis angle, deg");
    sub->add_option("--angle-rx", o.angle_rx, "microphone off-axis angle, deg");
    sub->add_option("--snr", o.snr, "in-band SNR at 1 m on-axis, dB");
    sub->add_option("--velocity", o.velocity, "relative velocity, m/s");
    sub->add_option("--skew-ppm", o.skew_ppm, "clock skew, ppm");
    sub->add_option("--jam-freq", o.jam_freq, "jammer tone frequency, Hz");
    sub->add_option("--jam-amp", o.jam_amp, "jammer tone amplitude, 0..1");
    sub->add_option("--seed", o.seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"batnet: near-ultrasound acoustic modem"};
    app.require_subcommand(1);
    Options o;

    CLI::App* encode = app.add_subcommand("encode", "modulate a payload into a WAV file");
    add_config_flags(encode, o);
    encode->add_option("--text", o.text, "payload as UTF-8 text");
    encode->add_option("--file", o.file_path, "payload file (binary)");
    encode->add_option("--out", o.out_path, "output WAV path");

    CLI::App* decode = app.add_subcommand("decode", "demodulate a WAV file");
    add_config_flags(decode, o);
    decode->add_option("--in", o.in_path, "input WAV path");
    decode->add_option("--truth", o.truth_path, "expected payload file, enables quality report");
    decode->add_flag("--no-phase-track", o.no_phase_track, "disable phase feed-forward");

    CLI::App* simulate = app.add_subcommand("simulate", "run a WAV through the channel model");
    add_config_flags(simulate, o);
    add_channel_flags(simulate, o);
    simulate->add_option("--in", o.in_path, "input WAV path");
    simulate->add_option("--out", o.out_path, "output WAV path");

    CLI::App* evaluate = app.add_subcommand("evaluate", "sweep a parameter, write CSV");
    add_config_flags(evaluate, o);
    add_channel_flags(evaluate, o);
    evaluate->add_option("--axis", o.axis, "distance | angle | symbol-len | snr | freq");
    evaluate->add_option("--values", o.values, "start:stop:step or v1,v2,...");
    evaluate->add_option("--trials", o.trials, "trials per value")->check(CLI::PositiveNumber);
    evaluate->add_option("--out", o.out_path, "CSV path (default: stdout)");
    evaluate->add_flag("--no-phase-track", o.no_phase_track, "disable phase feed-forward");

    CLI::App* calibrate = app.add_subcommand("calibrate", "find the best carrier frequency");
    add_config_flags(calibrate, o);
    add_channel_flags(calibrate, o);
    calibrate->add_option("--values", o.values, "frequencies to probe (default 20k..23.5k)");
    calibrate->add_flag("--no-phase-track", o.no_phase_track, "disable phase feed-forward");

    try {
        app.parse(argc, argv);
        if (encode->parsed()) return cmd_encode(o);
        if (decode->parsed()) return cmd_decode(o);
        if (simulate->parsed()) return cmd_simulate(o);
        if (evaluate->parsed()) return cmd_evaluate(o);
        if (calibrate->parsed()) return cmd_calibrate(o);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const PayloadTooLong& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const UnknownAxis& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ModemError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
