#include "shorteq/spectral_factor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shorteq/errors.hpp"

namespace shorteq {

FactorResult min_phase_factor(const Spectrum& q, const FactorOptions& opts) {
    if (!q.nonnegative_real()) throw std::invalid_argument("min_phase_factor needs a nonnegative spectrum");
    const std::size_t n = q.size();
    const std::size_t max_len = opts.max_len == 0 ? n / 8 : std::min(opts.max_len, n);
    const double peak = q.max_real();
    if (!(peak > 0.0)) throw SpectralNull("spectrum is identically zero");
    const double floor = opts.floor_relative * peak;

    FactorResult out;
    std::vector<cplx> half_log(n);
    double log_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double v = q[k].real();
        if (v < floor) {
            if (!opts.allow_floor)
                throw SpectralNull("spectrum dips to " + std::to_string(v / peak) +
                                   " of its peak, below the factorization floor");
            v = floor;
            out.floored = true;
        }
        const double l = std::log(v);
        log_sum += l;
        half_log[k] = 0.5 * l;
    }
    out.log_mean = log_sum / static_cast<double>(n);

    // Cepstrum c_m, m in [-N/2, N/2); conjugate-symmetric because half_log is real.
    const auto ceps = from_spectrum_window(Spectrum(std::move(half_log)), -static_cast<long>(n / 2), n);
    std::vector<cplx> lifted(n / 2 + 1);
    lifted[0] = ceps.seq.at(0).real();
    for (std::size_t m = 1; m < n / 2; ++m) lifted[m] = 2.0 * ceps.seq.at(static_cast<long>(m));
    lifted[n / 2] = ceps.seq.at(-static_cast<long>(n / 2)).real();

    const Spectrum log_g = sample_dtft(Sequence(0, std::move(lifted)), n);
    const Spectrum g_spec = log_g.map([](cplx v) { return std::exp(v); });
    const auto win = from_spectrum_window(g_spec, 0, max_len);
    out.truncation_energy = win.outside_energy;
    if (win.outside_energy > opts.truncation_tolerance)
        throw TruncationError("minimum-phase factor keeps " + std::to_string(win.outside_energy) +
                              " of its energy past " + std::to_string(max_len) + " taps");

    // Even spectra have real factors; drop the round-off imaginary parts.
    std::vector<cplx> taps = win.seq.window(0, max_len);
    bool even = true;
    for (std::size_t k = 1; k < n && even; ++k) even = std::abs(q[k].real() - q[n - k].real()) <= 1e-12 * peak;
    if (even)
        for (auto& t : taps) t = {t.real(), 0.0};
    out.g = Sequence(0, std::move(taps));
    out.g0 = out.g.at(0).real();

    const Spectrum check = sample_dtft(out.g, n);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(std::norm(check[k]) - q[k].real()));
    out.residual = worst / peak;
    return out;
}

}  // namespace shorteq
