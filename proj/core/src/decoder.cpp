#include "batnet/decoder.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "batnet/constellation.hpp"
#include "batnet/crc5.hpp"
#include "batnet/errors.hpp"

namespace batnet {

namespace {

using Complex = std::complex<double>;

struct SymbolDecision {
    int index = 0;
    double error = 0.0;  // residual angle to the decided point
};

// Decides every symbol at the given rotation.  Returns false when a soft
// value has zero magnitude (nothing to decide on).
bool decide_all(std::span<const SoftSymbol> softs, double rotation,
                std::vector<SymbolDecision>& out) {
    out.resize(softs.size());
    for (std::size_t j = 0; j < softs.size(); ++j) {
        if (std::abs(softs[j].value) == 0.0) return false;
        const double angle = wrap_phase(std::arg(softs[j].value) - rotation);
        const int idx = nearest_constellation_index(angle);
        out[j] = {idx, wrap_phase(angle - constellation_phase(idx))};
    }
    return true;
}

std::uint32_t pack_block(const std::vector<SymbolDecision>& decisions) {
    std::uint32_t block = 0;
    for (const SymbolDecision& d : decisions)
        block = (block << kBitsPerSymbol) | static_cast<std::uint32_t>(gray_decode(d.index));
    return block;
}

double mean_confidence(const std::vector<SymbolDecision>& decisions) {
    double sum = 0.0;
    for (const SymbolDecision& d : decisions) sum += std::cos(d.error);
    return sum / static_cast<double>(decisions.size());
}

// Circular mean of the residual errors; refines the grid rotation into a
// continuous phase estimate.
double mean_residual(const std::vector<SymbolDecision>& decisions) {
    Complex sum{0.0, 0.0};
    for (const SymbolDecision& d : decisions) sum += std::polar(1.0, d.error);
    if (std::abs(sum) == 0.0) return 0.0;
    return std::arg(sum);
}

struct Candidate {
    std::uint32_t data = 0;
    double delta = 0.0;
    double confidence = 0.0;
    double residual = 0.0;
    int flips = 0;
};

bool better_candidate(const Candidate& a, const Candidate& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (std::abs(a.delta) != std::abs(b.delta)) return std::abs(a.delta) < std::abs(b.delta);
    return a.flips < b.flips;
}

}  // namespace

HardDecision hard_decide(const SoftSymbol& soft, double phase_correction_rad) {
    if (std::abs(soft.value) == 0.0)
        throw ZeroMagnitude("soft symbol has zero magnitude");
    const double angle = wrap_phase(std::arg(soft.value) - phase_correction_rad);
    const int idx = nearest_constellation_index(angle);
    const double err = wrap_phase(angle - constellation_phase(idx));
    return {idx, std::cos(err)};
}

std::optional<BlockDecodeResult> decode_block(std::span<const SoftSymbol> softs,
                                              double accumulated_phase,
                                              const ModemConfig& config) {
    const int n = config.block_symbols();
    if (static_cast<int>(softs.size()) != n)
        throw LengthMismatch("decode_block expects exactly one coded block of symbols");

    const double half = config.phase_search_halfwidth_rad;
    const int steps = config.phase_search_steps;
    const double step = 2.0 * half / (steps - 1);

    std::optional<Candidate> best;
    std::vector<SymbolDecision> decisions;
    std::vector<SymbolDecision> flipped;
    std::vector<int> order(static_cast<std::size_t>(n));

    const auto try_candidate = [&](const std::vector<SymbolDecision>& d, double delta,
                                   int flips) {
        const std::uint32_t block = pack_block(d);
        if (!crc5_verify(block, config.block_data_bits, config.crc_poly,
                         config.block_crc_bits, config.crc_init))
            return;
        Candidate c;
        c.data = block >> config.block_crc_bits;
        c.delta = delta;
        c.confidence = mean_confidence(d);
        c.residual = mean_residual(d);
        c.flips = flips;
        if (!best || better_candidate(c, *best)) best = c;
    };

    // First pass: rotation grid, no flips.
    for (int i = 0; i < steps; ++i) {
        const double delta = -half + i * step;
        if (!decide_all(softs, accumulated_phase + delta, decisions)) continue;
        try_candidate(decisions, delta, 0);
    }

    // Second pass only when nothing verified: flip the least-confident
    // symbols towards the side their residual leans to.
    if (!best && config.max_symbol_flips > 0) {
        for (int i = 0; i < steps; ++i) {
            const double delta = -half + i * step;
            if (!decide_all(softs, accumulated_phase + delta, decisions)) continue;

            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return std::abs(decisions[a].error) > std::abs(decisions[b].error);
            });
            const int pool = std::min(config.max_symbol_flips, n);

            for (int mask = 1; mask < (1 << pool); ++mask) {
                flipped = decisions;
                for (int bit = 0; bit < pool; ++bit) {
                    if (!(mask & (1 << bit))) continue;
                    SymbolDecision& d = flipped[order[bit]];
                    const int dir = d.error >= 0.0 ? 1 : -1;
                    d.index = (d.index + dir + kConstellationSize) % kConstellationSize;
                    d.error = wrap_phase(d.error - dir * 2.0 * std::numbers::pi /
                                                       kConstellationSize);
                }
                try_candidate(flipped, delta, std::popcount(static_cast<unsigned>(mask)));
            }
        }
    }

    if (!best) return std::nullopt;

    BlockDecodeResult result;
    result.data = best->data;
    result.confidence = best->confidence;
    result.flips_used = best->flips;
    // Grid rotation plus the residual mean; keep it inside the window with
    // a little slack so one bad block cannot throw the tracker.
    const double bound = half + std::numbers::pi / 16.0;
    result.phase_correction = std::clamp(best->delta + best->residual, -bound, bound);
    return result;
}

std::optional<FrameDecodeResult> decode_frame(std::span<const SoftSymbol> softs,
                                              const ModemConfig& config,
                                              bool phase_tracking) {
    const int n = config.block_symbols();
    if (static_cast<int>(softs.size()) < n)
        throw LengthMismatch("decode_frame needs at least the header block");

    FrameDecodeResult result;
    double accumulated = 0.0;

    // Header block: carries the payload length; without it the frame is lost.
    const auto header = decode_block(softs.subspan(0, n), accumulated, config);
    if (!header) return std::nullopt;
    const std::size_t payload_bytes = header->data;
    if (payload_bytes > kMaxPayloadBytes) return std::nullopt;  // implausible header

    if (phase_tracking) accumulated += header->phase_correction;
    result.cumulative_phase_track.push_back(accumulated);
    result.block_ok.push_back(1);
    result.flips_used += header->flips_used;

    const int data_blocks = config.data_blocks_for(payload_bytes);
    result.blocks_total = 1 + data_blocks;

    std::vector<std::uint8_t> bytes;
    bytes.reserve(static_cast<std::size_t>(data_blocks) * config.block_data_bits / 8);
    std::uint32_t word = 0;
    int word_bits = 0;

    std::vector<SymbolDecision> fallback;
    for (int b = 1; b <= data_blocks; ++b) {
        std::uint32_t data = 0;
        bool ok = false;
        const std::size_t offset = static_cast<std::size_t>(b) * n;
        if (offset + n <= softs.size()) {
            if (const auto block = decode_block(softs.subspan(offset, n), accumulated, config)) {
                data = block->data;
                ok = true;
                result.flips_used += block->flips_used;
                if (phase_tracking) accumulated += block->phase_correction;
            } else if (decide_all(softs.subspan(offset, n), accumulated, fallback)) {
                // CRC failed: keep the raw hard decisions as best effort.
                data = pack_block(fallback) >> config.block_crc_bits;
            }
        }
        if (!ok) ++result.blocks_failed;
        result.block_ok.push_back(ok ? 1 : 0);
        result.cumulative_phase_track.push_back(accumulated);

        word = (word << config.block_data_bits) | data;
        word_bits += config.block_data_bits;
        while (word_bits >= 8) {
            bytes.push_back(static_cast<std::uint8_t>((word >> (word_bits - 8)) & 0xff));
            word_bits -= 8;
        }
    }

    bytes.resize(payload_bytes);  // drop the final block's zero padding
    result.payload = std::move(bytes);
    return result;
}

}  // namespace batnet
