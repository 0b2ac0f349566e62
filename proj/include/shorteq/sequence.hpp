#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace shorteq {

using cplx = std::complex<double>;

/// Relative threshold below which end taps are dropped from a Sequence.
inline constexpr double kTrimRelative = 1e-12;

/// Finite-support discrete-time sequence {a_n}.
///
/// Stored as an integer start index plus a dense tap vector. The
/// representation is always trimmed: the first and last taps are nonzero
/// (relative to the largest tap), and the zero sequence has no taps at all.
/// Real-valued sequences use the same complex layout with zero imaginary
/// parts. Values are immutable once constructed.
class Sequence {
public:
    Sequence() = default;
    Sequence(long start, std::vector<cplx> taps);
    Sequence(long start, std::span<const double> taps);
    Sequence(long start, std::initializer_list<double> taps);

    static Sequence delta(long at = 0);
    static Sequence from_real(long start, const std::vector<double>& taps);

    long start() const { return start_; }
    /// One past the last index with a stored tap.
    long end() const { return start_ + static_cast<long>(taps_.size()); }
    long last() const { return end() - 1; }
    std::size_t size() const { return taps_.size(); }
    bool empty() const { return taps_.empty(); }
    const std::vector<cplx>& taps() const { return taps_; }

    /// Value a_n; zero outside the stored support.
    cplx at(long n) const {
        if (n < start_ || n >= end()) return {0.0, 0.0};
        return taps_[static_cast<std::size_t>(n - start_)];
    }
    cplx operator[](long n) const { return at(n); }

    bool is_real(double tol = 0.0) const;
    double energy() const;
    double max_abs() const;

    /// Dense copy of the values on [first, first + count).
    std::vector<cplx> window(long first, std::size_t count) const;
    std::vector<double> real_window(long first, std::size_t count) const;

    Sequence shifted(long k) const;
    Sequence scaled(cplx c) const;
    Sequence operator-() const { return scaled(-1.0); }

    friend Sequence operator+(const Sequence& a, const Sequence& b);
    friend Sequence operator-(const Sequence& a, const Sequence& b);
    friend Sequence operator*(cplx c, const Sequence& a) { return a.scaled(c); }
    friend Sequence operator*(const Sequence& a, cplx c) { return a.scaled(c); }

private:
    void trim();

    long start_ = 0;
    std::vector<cplx> taps_;
};

/// c_n = sum_m a_m b_{n-m}.
Sequence convolve(const Sequence& a, const Sequence& b);

/// Time reversal with conjugation: result_n = conj(a_{-n}).
Sequence adjoint(const Sequence& a);

/// <a, b> = sum_n conj(a_n) b_n.
cplx inner(const Sequence& a, const Sequence& b);

inline double norm2(const Sequence& a) { return a.energy(); }

/// r_n = sum_m conj(a_m) a_{m+n}, Hermitian symmetric about 0.
Sequence autocorrelation(const Sequence& a);

/// Largest |a_n - b_n| over the union of supports.
double max_abs_diff(const Sequence& a, const Sequence& b);

}  // namespace shorteq
