#include "shorteq/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "shorteq/errors.hpp"

namespace shorteq {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (size, direction) and kept.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, bool inverse) {
        std::lock_guard<std::mutex> lock(mu_);
        const auto key = std::make_pair(n, inverse);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                       inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::map<std::pair<std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

std::size_t wrap(long n, std::size_t size) {
    const long m = static_cast<long>(size);
    long r = n % m;
    if (r < 0) r += m;
    return static_cast<std::size_t>(r);
}

double parity(long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

// b_k (k = 0..N-1) such that a_n = (-1)^n b_{n mod N}.
std::vector<cplx> circular_inverse(const Spectrum& s) {
    std::vector<cplx> b = s.values();
    fft(b, true);
    const double inv = 1.0 / static_cast<double>(b.size());
    for (auto& v : b) v *= inv;
    return b;
}

}  // namespace

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

void fft(std::vector<cplx>& data, bool inverse) {
    if (data.empty()) return;
    fftw_plan p = plan_cache().get(data.size(), inverse);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(p, buf, buf);
}

Spectrum::Spectrum(std::vector<cplx> values) : values_(std::move(values)) {
    if (!is_power_of_two(values_.size()))
        throw std::invalid_argument("spectrum grid size must be a power of two");
}

Spectrum::Spectrum(std::size_t n, cplx fill) : Spectrum(std::vector<cplx>(n, fill)) {}

Spectrum Spectrum::nonnegative(std::vector<double> values) {
    std::vector<cplx> v(values.begin(), values.end());
    Spectrum s(std::move(v));
    const double scale = std::max(s.max_abs(), 1e-300);
    for (double x : values) {
        if (x < -kSpecTolerance * scale)
            throw std::invalid_argument("spectrum tagged nonnegative has a negative sample");
    }
    s.nonneg_ = true;
    return s;
}

Spectrum Spectrum::from_function(std::size_t n, const std::function<cplx(double)>& fn) {
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = fn(omega(k, n));
    return Spectrum(std::move(v));
}

double Spectrum::omega(std::size_t k, std::size_t n) {
    return -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
}

cplx Spectrum::mean() const {
    cplx acc{};
    for (const auto& v : values_) acc += v;
    return acc / static_cast<double>(values_.size());
}

double Spectrum::min_real() const {
    double m = INFINITY;
    for (const auto& v : values_) m = std::min(m, v.real());
    return m;
}

double Spectrum::max_real() const {
    double m = -INFINITY;
    for (const auto& v : values_) m = std::max(m, v.real());
    return m;
}

double Spectrum::max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

Spectrum Spectrum::conj() const {
    return map([](cplx v) { return std::conj(v); });
}

Spectrum Spectrum::abs2() const {
    std::vector<double> v(values_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::norm(values_[k]);
    return nonnegative(std::move(v));
}

Spectrum Spectrum::map(const std::function<cplx(cplx)>& fn) const {
    std::vector<cplx> v(values_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(values_[k]);
    return Spectrum(std::move(v));
}

Spectrum Spectrum::decimate(std::size_t m) const {
    if (m == 0 || values_.size() % m != 0) throw std::invalid_argument("bad decimation factor");
    std::vector<cplx> v(values_.size() / m);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = values_[k * m];
    Spectrum s(std::move(v));
    s.nonneg_ = nonneg_;
    return s;
}

namespace {

template <typename Op>
Spectrum zip(const Spectrum& a, const Spectrum& b, Op op) {
    if (a.size() != b.size()) throw std::invalid_argument("spectrum grid sizes differ");
    std::vector<cplx> v(a.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(a[k], b[k]);
    return Spectrum(std::move(v));
}

}  // namespace

Spectrum operator*(const Spectrum& a, const Spectrum& b) { return zip(a, b, std::multiplies<>{}); }
Spectrum operator/(const Spectrum& a, const Spectrum& b) { return zip(a, b, std::divides<>{}); }
Spectrum operator+(const Spectrum& a, const Spectrum& b) { return zip(a, b, std::plus<>{}); }
Spectrum operator-(const Spectrum& a, const Spectrum& b) { return zip(a, b, std::minus<>{}); }
Spectrum operator*(cplx c, const Spectrum& a) {
    return a.map([c](cplx v) { return c * v; });
}
Spectrum operator+(const Spectrum& a, cplx c) {
    return a.map([c](cplx v) { return v + c; });
}

Spectrum sample_dtft(const Sequence& a, std::size_t n) {
    if (!is_power_of_two(n)) throw std::invalid_argument("grid size must be a power of two");
    // exp(-j m w_k) = (-1)^m exp(-j 2 pi m k / N), so fold a_m (-1)^m mod N.
    std::vector<cplx> buf(n);
    for (long m = a.start(); m < a.end(); ++m) buf[wrap(m, n)] += parity(m) * a.at(m);
    fft(buf, false);
    return Spectrum(std::move(buf));
}

Spectrum to_spectrum(const Sequence& a, std::size_t n) {
    if (n < 8 * a.size())
        throw std::invalid_argument("grid of " + std::to_string(n) + " points is too small for a " +
                                    std::to_string(a.size()) + "-tap sequence");
    return sample_dtft(a, n);
}

WindowedSequence from_spectrum_window(const Spectrum& s, long first, std::size_t length) {
    const std::size_t n = s.size();
    if (length == 0 || length > n) throw std::invalid_argument("window length must be in [1, N]");
    const auto b = circular_inverse(s);
    double total = 0.0;
    for (const auto& v : b) total += std::norm(v);
    std::vector<cplx> taps(length);
    double kept = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        const long m = first + static_cast<long>(i);
        const cplx v = b[wrap(m, n)];
        taps[i] = parity(m) * v;
        kept += std::norm(v);
    }
    WindowedSequence out;
    out.outside_energy = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
    out.seq = Sequence(first, std::move(taps));
    return out;
}

Sequence from_spectrum(const Spectrum& s, std::size_t max_len) {
    const std::size_t n = s.size();
    const std::size_t w = std::min(max_len, n);
    if (w == 0) throw std::invalid_argument("max_len must be positive");
    const auto b = circular_inverse(s);
    std::vector<double> e(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        e[k] = std::norm(b[k]);
        total += e[k];
    }
    if (total == 0.0) return {};

    // Sliding circular window; prefer the window centred closest to n = 0.
    double run = 0.0;
    for (std::size_t i = 0; i < w; ++i) run += e[i];
    auto lift = [&](std::size_t k0) {
        long start = static_cast<long>(k0);
        const long half = static_cast<long>(n / 2);
        const long centre = start + static_cast<long>(w / 2);
        if (centre >= half) start -= static_cast<long>(n);
        return start;
    };
    std::size_t best = 0;
    double best_energy = run;
    long best_dist = std::labs(lift(0) + static_cast<long>(w / 2));
    for (std::size_t k0 = 1; k0 < n; ++k0) {
        run += e[(k0 + w - 1) % n] - e[k0 - 1];
        const long dist = std::labs(lift(k0) + static_cast<long>(w / 2));
        const double tol = 1e-13 * total;
        if (run > best_energy + tol || (run >= best_energy - tol && dist < best_dist)) {
            best = k0;
            best_energy = std::max(run, best_energy);
            best_dist = dist;
        }
    }
    const auto res = from_spectrum_window(s, lift(best), w);
    if (res.outside_energy > 1e-6)
        throw AliasError("inverse transform leaves " + std::to_string(res.outside_energy) +
                         " of its energy outside " + std::to_string(w) + " taps");
    return res.seq;
}

}  // namespace shorteq
