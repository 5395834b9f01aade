#include "batnet/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace batnet {

namespace {

// FFTW's planner is not thread-safe; execution of a built plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct RealFftBuffers {
    double* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t n = 0;

    explicit RealFftBuffers(std::size_t size) : n(size) {
        in = fftw_alloc_real(n);
        out = fftw_alloc_complex(n / 2 + 1);
    }
    ~RealFftBuffers() {
        fftw_free(in);
        fftw_free(out);
    }
    RealFftBuffers(const RealFftBuffers&) = delete;
    RealFftBuffers& operator=(const RealFftBuffers&) = delete;
};

}  // namespace

std::vector<std::complex<double>> real_fft(std::span<const double> x) {
    if (x.empty()) return {};
    RealFftBuffers buf(x.size());
    std::copy(x.begin(), x.end(), buf.in);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(buf.n), buf.in, buf.out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    std::vector<std::complex<double>> bins(buf.n / 2 + 1);
    for (std::size_t k = 0; k < bins.size(); ++k)
        bins[k] = {buf.out[k][0], buf.out[k][1]};
    return bins;
}

double band_power(std::span<const double> x, double sample_rate_hz,
                  double f_lo_hz, double f_hi_hz) {
    if (x.empty()) return 0.0;
    const auto bins = real_fft(x);
    const std::size_t n = x.size();
    const double bin_hz = sample_rate_hz / n;

    // Parseval: mean square = sum over one-sided bins of |X_k|^2 scaled by
    // 1/n^2, doubling interior bins to cover negative frequencies.
    double power = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double f = k * bin_hz;
        if (f < f_lo_hz || f > f_hi_hz) continue;
        const double mag2 = std::norm(bins[k]);
        const bool interior = k != 0 && !(n % 2 == 0 && k == n / 2);
        power += (interior ? 2.0 : 1.0) * mag2;
    }
    return power / (static_cast<double>(n) * static_cast<double>(n));
}

void apply_frequency_response(std::vector<double>& x, double sample_rate_hz,
                              const std::function<double(double)>& gain) {
    if (x.empty()) return;
    const std::size_t n = x.size();
    RealFftBuffers buf(n);
    std::copy(x.begin(), x.end(), buf.in);

    fftw_plan fwd;
    fftw_plan inv;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.in, buf.out, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), buf.out, buf.in, FFTW_ESTIMATE);
    }
    fftw_execute(fwd);

    const double bin_hz = sample_rate_hz / n;
    for (std::size_t k = 0; k < n / 2 + 1; ++k) {
        const double g = gain(k * bin_hz);
        buf.out[k][0] *= g;
        buf.out[k][1] *= g;
    }

    fftw_execute(inv);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] = buf.in[i] / n;
}

}  // namespace batnet
