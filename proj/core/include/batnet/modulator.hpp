#pragma once

#include <span>
#include <vector>

#include "batnet/config.hpp"
#include "batnet/frame.hpp"
#include "batnet/wav.hpp"

namespace batnet {

// Continuous-phase 8-PSK modulator.  Each symbol slot holds the carrier at
// the symbol's constellation phase for steady_samples(), then ramps
// linearly to the next symbol's phase across transition_samples (a constant
// intermediate frequency).  The receiver only looks at steady segments, so
// the ramp shape is free to trade spectral splatter against slot time.

// Total instantaneous phase (radians) for every sample of the frame.
// Within each slot the per-sample phase increment takes at most two
// values: the carrier step and the transition step.
std::vector<double> phase_schedule(std::span<const int> symbols, const ModemConfig& config);

// Renders a symbol sequence to PCM: amplitude * cos(phase_schedule).
// Throws ConfigInvalid on an unusable config.
PcmBuffer modulate(std::span<const int> symbols, const ModemConfig& config);

}  // namespace batnet
