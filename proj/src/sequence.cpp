#include "shorteq/sequence.hpp"

#include <algorithm>
#include <cmath>

namespace shorteq {

Sequence::Sequence(long start, std::vector<cplx> taps) : start_(start), taps_(std::move(taps)) {
    trim();
}

Sequence::Sequence(long start, std::span<const double> taps) : start_(start) {
    taps_.assign(taps.begin(), taps.end());
    trim();
}

Sequence::Sequence(long start, std::initializer_list<double> taps) : start_(start) {
    taps_.assign(taps.begin(), taps.end());
    trim();
}

Sequence Sequence::delta(long at) { return Sequence(at, std::vector<cplx>{1.0}); }

Sequence Sequence::from_real(long start, const std::vector<double>& taps) {
    return Sequence(start, std::span<const double>(taps));
}

void Sequence::trim() {
    const double peak = max_abs();
    if (peak == 0.0 || !std::isfinite(peak)) {
        if (peak == 0.0) {
            taps_.clear();
            start_ = 0;
        }
        return;
    }
    const double thr = kTrimRelative * peak;
    std::size_t lo = 0;
    std::size_t hi = taps_.size();
    while (lo < hi && std::abs(taps_[lo]) <= thr) ++lo;
    while (hi > lo && std::abs(taps_[hi - 1]) <= thr) --hi;
    if (lo > 0 || hi < taps_.size()) {
        taps_ = std::vector<cplx>(taps_.begin() + static_cast<long>(lo),
                                  taps_.begin() + static_cast<long>(hi));
        start_ += static_cast<long>(lo);
    }
}

bool Sequence::is_real(double tol) const {
    return std::all_of(taps_.begin(), taps_.end(),
                       [tol](const cplx& t) { return std::abs(t.imag()) <= tol; });
}

double Sequence::energy() const {
    double acc = 0.0;
    for (const auto& t : taps_) acc += std::norm(t);
    return acc;
}

double Sequence::max_abs() const {
    double m = 0.0;
    for (const auto& t : taps_) m = std::max(m, std::abs(t));
    return m;
}

std::vector<cplx> Sequence::window(long first, std::size_t count) const {
    std::vector<cplx> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = at(first + static_cast<long>(i));
    return out;
}

std::vector<double> Sequence::real_window(long first, std::size_t count) const {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = at(first + static_cast<long>(i)).real();
    return out;
}

Sequence Sequence::shifted(long k) const {
    Sequence s = *this;
    if (!s.taps_.empty()) s.start_ += k;
    return s;
}

Sequence Sequence::scaled(cplx c) const {
    std::vector<cplx> t = taps_;
    for (auto& v : t) v *= c;
    return Sequence(start_, std::move(t));
}

namespace {

Sequence combine(const Sequence& a, const Sequence& b, double sign) {
    if (a.empty()) return b.scaled(sign);
    if (b.empty()) return a;
    const long lo = std::min(a.start(), b.start());
    const long hi = std::max(a.end(), b.end());
    std::vector<cplx> t(static_cast<std::size_t>(hi - lo));
    for (long n = lo; n < hi; ++n) t[static_cast<std::size_t>(n - lo)] = a.at(n) + sign * b.at(n);
    return Sequence(lo, std::move(t));
}

}  // namespace

Sequence operator+(const Sequence& a, const Sequence& b) { return combine(a, b, 1.0); }
Sequence operator-(const Sequence& a, const Sequence& b) { return combine(a, b, -1.0); }

Sequence convolve(const Sequence& a, const Sequence& b) {
    if (a.empty() || b.empty()) return {};
    const auto& ta = a.taps();
    const auto& tb = b.taps();
    std::vector<cplx> c(ta.size() + tb.size() - 1);
    for (std::size_t i = 0; i < ta.size(); ++i) {
        const cplx ai = ta[i];
        if (ai == cplx{}) continue;
        for (std::size_t j = 0; j < tb.size(); ++j) c[i + j] += ai * tb[j];
    }
    return Sequence(a.start() + b.start(), std::move(c));
}

Sequence adjoint(const Sequence& a) {
    if (a.empty()) return {};
    const auto& t = a.taps();
    std::vector<cplx> r(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = std::conj(t[t.size() - 1 - i]);
    return Sequence(-a.last(), std::move(r));
}

cplx inner(const Sequence& a, const Sequence& b) {
    if (a.empty() || b.empty()) return {};
    const long lo = std::max(a.start(), b.start());
    const long hi = std::min(a.end(), b.end());
    cplx acc{};
    for (long n = lo; n < hi; ++n) acc += std::conj(a.at(n)) * b.at(n);
    return acc;
}

Sequence autocorrelation(const Sequence& a) { return convolve(adjoint(a), a); }

double max_abs_diff(const Sequence& a, const Sequence& b) {
    if (a.empty() && b.empty()) return 0.0;
    const long lo = a.empty() ? b.start() : (b.empty() ? a.start() : std::min(a.start(), b.start()));
    const long hi = a.empty() ? b.end() : (b.empty() ? a.end() : std::max(a.end(), b.end()));
    double m = 0.0;
    for (long n = lo; n < hi; ++n) m = std::max(m, std::abs(a.at(n) - b.at(n)));
    return m;
}

}  // namespace shorteq
