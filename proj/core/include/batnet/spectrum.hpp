#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace batnet {

// Thin FFT layer used by the channel simulator.  All transforms are double
// precision and deterministic.

// Real-input FFT; returns n/2 + 1 bins (DC .. Nyquist).
std::vector<std::complex<double>> real_fft(std::span<const double> x);

// Mean-square power of the signal restricted to [f_lo_hz, f_hi_hz],
// estimated from the periodogram.
double band_power(std::span<const double> x, double sample_rate_hz,
                  double f_lo_hz, double f_hi_hz);

// Filters the buffer in the frequency domain: every bin is scaled by
// gain(bin_frequency_hz).  Zero-phase, in place.
void apply_frequency_response(std::vector<double>& x, double sample_rate_hz,
                              const std::function<double(double)>& gain);

}  // namespace batnet
