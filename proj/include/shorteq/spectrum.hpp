#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "shorteq/sequence.hpp"

namespace shorteq {

inline constexpr std::size_t kDefaultGrid = 4096;
inline constexpr double kSpecTolerance = 1e-9;

/// Frequency-domain function sampled at w_k = -pi + 2*pi*k/N, k = 0..N-1.
///
/// N is a power of two. A spectrum may carry the `nonnegative_real` tag,
/// which is only granted when every sample is real and nonnegative within
/// kSpecTolerance (relative to the largest magnitude).
class Spectrum {
public:
    Spectrum() = default;
    explicit Spectrum(std::vector<cplx> values);
    Spectrum(std::size_t n, cplx fill);

    /// Builds a real spectrum and tags it nonnegative; throws
    /// std::invalid_argument when any sample is negative beyond tolerance.
    static Spectrum nonnegative(std::vector<double> values);
    static Spectrum from_function(std::size_t n, const std::function<cplx(double)>& fn);

    std::size_t size() const { return values_.size(); }
    const std::vector<cplx>& values() const { return values_; }
    cplx operator[](std::size_t k) const { return values_[k]; }
    bool nonnegative_real() const { return nonneg_; }

    static double omega(std::size_t k, std::size_t n);
    double omega(std::size_t k) const { return omega(k, size()); }

    /// Uniform-grid approximation of (1/2pi) * integral over [-pi, pi).
    cplx mean() const;
    double min_real() const;
    double max_real() const;
    double max_abs() const;

    Spectrum conj() const;
    Spectrum abs2() const;
    Spectrum map(const std::function<cplx(cplx)>& fn) const;
    /// Every m-th sample; valid because the grids nest for power-of-two N.
    Spectrum decimate(std::size_t m) const;

    friend Spectrum operator*(const Spectrum& a, const Spectrum& b);
    friend Spectrum operator/(const Spectrum& a, const Spectrum& b);
    friend Spectrum operator+(const Spectrum& a, const Spectrum& b);
    friend Spectrum operator-(const Spectrum& a, const Spectrum& b);
    friend Spectrum operator*(cplx c, const Spectrum& a);
    friend Spectrum operator+(const Spectrum& a, cplx c);

private:
    std::vector<cplx> values_;
    bool nonneg_ = false;
};

bool is_power_of_two(std::size_t n);

/// In-place DFT, X_k = sum_n x_n exp(-+ j 2 pi n k / N). No 1/N scaling.
void fft(std::vector<cplx>& data, bool inverse);

/// Exact DTFT samples of `a` on the N-point grid (any support length).
Spectrum sample_dtft(const Sequence& a, std::size_t n);

/// DTFT samples with the anti-aliasing contract N >= 8 * a.size().
Spectrum to_spectrum(const Sequence& a, std::size_t n = kDefaultGrid);

struct WindowedSequence {
    Sequence seq;
    /// Fraction of total inverse-transform energy left outside the window.
    double outside_energy = 0.0;
};

/// Inverse transform restricted to taps [first, first + length).
WindowedSequence from_spectrum_window(const Spectrum& s, long first, std::size_t length);

/// Inverse transform that picks the length-`max_len` circular window with the
/// most energy; throws AliasError when more than 1e-6 of the energy falls
/// outside it.
Sequence from_spectrum(const Spectrum& s, std::size_t max_len);

}  // namespace shorteq
