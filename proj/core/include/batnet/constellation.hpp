#pragma once

#include <complex>

#include "batnet/config.hpp"

namespace batnet {

// 8-PSK constellation: point k sits at phase 2*pi*k/8.  Bit groups map onto
// indices through a binary-reflected Gray code, so adjacent points always
// differ in exactly one bit.

// Phase of constellation point `index` (index taken mod 8).
double constellation_phase(int index);

// Binary-reflected Gray code of an index: g(k) = k ^ (k >> 1).
int gray_code(int index);

// 3-bit group -> constellation index (inverse of gray_code).
int gray_encode(int bits);

// Constellation index -> 3-bit group (gray_code itself).
int gray_decode(int index);

// Index of the constellation point whose phase is nearest to `phase_rad`
// (any real value; wrapping handled here).  An exact boundary between two
// points resolves to the lower index.
int nearest_constellation_index(double phase_rad);

// True when the two indices are neighbours on the PSK circle.
bool constellation_adjacent(int a, int b);

// Wraps an angle into (-pi, pi], ties (exactly -pi) mapping to +pi.
double wrap_phase(double rad);

}  // namespace batnet
