#include "batnet/constellation.hpp"

#include <cmath>
#include <numbers>

namespace batnet {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kStep = kTwoPi / kConstellationSize;  // pi/4
// Slack for deciding that a phase sits exactly on a decision boundary.
constexpr double kBoundaryEps = 1e-12;
}  // namespace

double constellation_phase(int index) {
    int k = index % kConstellationSize;
    if (k < 0) k += kConstellationSize;
    return kStep * k;
}

int gray_code(int index) { return index ^ (index >> 1); }

int gray_encode(int bits) {
    // Invert g(k) = k ^ (k >> 1) by prefix-XOR.
    int k = bits & 0x7;
    k ^= k >> 1;
    k ^= k >> 2;
    return k;
}

int gray_decode(int index) { return gray_code(index & 0x7); }

int nearest_constellation_index(double phase_rad) {
    double steps = phase_rad / kStep;
    double base = std::floor(steps);
    double frac = steps - base;
    // Round to the nearest point; exact midpoints resolve to the lower index.
    int k = static_cast<int>(base);
    if (frac > 0.5 + kBoundaryEps) ++k;
    k %= kConstellationSize;
    if (k < 0) k += kConstellationSize;
    return k;
}

bool constellation_adjacent(int a, int b) {
    const int d = (a - b) % kConstellationSize;
    const int m = d < 0 ? d + kConstellationSize : d;
    return m == 1 || m == kConstellationSize - 1;
}

double wrap_phase(double rad) {
    double w = std::remainder(rad, kTwoPi);  // (-pi, pi], -pi possible
    if (w <= -std::numbers::pi) w += kTwoPi;
    return w;
}

}  // namespace batnet
