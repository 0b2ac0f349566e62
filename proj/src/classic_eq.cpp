#include "shorteq/classic_eq.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "shorteq/errors.hpp"
#include "shorteq/spectral_factor.hpp"

namespace shorteq {

std::string to_string(DesignMethod m) {
    switch (m) {
        case DesignMethod::Zfe: return "ZFE";
        case DesignMethod::MmseFixedTarget: return "MMSE_FIXED_TARGET";
        case DesignMethod::Monic: return "MONIC";
        case DesignMethod::ApeFamily: return "APE_FAMILY";
        case DesignMethod::MatchedFilter: return "MATCHED_FILTER";
        case DesignMethod::FirOptimal: return "FIR_OPTIMAL";
    }
    return "UNKNOWN";
}

double DesignResult::correction_coefficient() const {
    switch (method) {
        case DesignMethod::Monic: return lambda.value_or(0.0);
        case DesignMethod::ApeFamily: return alpha.value_or(0.0) * beta.value_or(0.0);
        default: return 0.0;
    }
}

namespace {

void truncate_equalizer(DesignResult& d, const ChannelInstance& ch, const DesignOptions& opts) {
    const auto w = from_spectrum_window(d.F, opts.equalizer.first, opts.equalizer.length);
    d.f = w.seq;
    if (ch.zeta == 1) {
        std::vector<cplx> t = d.f.taps();
        for (auto& v : t) v = v.real();
        d.f = Sequence(d.f.start(), std::move(t));
    }
    d.equalizer_truncation = w.outside_energy;
}

FactorOptions factor_options(const DesignOptions& opts) {
    FactorOptions fo;
    fo.max_len = opts.target_max_len;
    return fo;
}

// S_e = |G|^2 S_x s2 / (|H|^2 S_x + s2), valid for the MMSE equalizer of G.
Spectrum mmse_error_psd(const ChannelInstance& ch, const Spectrum& H, const Spectrum& G) {
    std::vector<double> v(H.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double sx = ch.input_psd[k].real();
        v[k] = std::norm(G[k]) * sx * ch.sigma_w2 / (std::norm(H[k]) * sx + ch.sigma_w2);
    }
    return Spectrum::nonnegative(std::move(v));
}

Spectrum mmse_equalizer(const ChannelInstance& ch, const Spectrum& H, const Spectrum& G) {
    std::vector<cplx> v(H.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double sx = ch.input_psd[k].real();
        v[k] = sx * std::conj(H[k]) * G[k] / (std::norm(H[k]) * sx + ch.sigma_w2);
    }
    return Spectrum(std::move(v));
}

}  // namespace

DesignResult zfe(const ChannelInstance& ch, const Sequence& g, const DesignOptions& opts) {
    const std::size_t n = ch.grid();
    const Spectrum H = to_spectrum(ch.h, n);
    const double limit = opts.zfe_null * H.max_abs();
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(H[k]) <= limit)
            throw SpectralNull("channel response has a spectral null; zero forcing is unbounded");
    DesignResult d;
    d.method = DesignMethod::Zfe;
    d.g = g;
    d.F = sample_dtft(g, n) / H;
    d.noise_psd = ch.sigma_w2 * d.F.abs2();
    d.sigma_v2 = d.noise_psd.mean().real();
    truncate_equalizer(d, ch, opts);
    return d;
}

DesignResult mmse_fixed_target(const ChannelInstance& ch, const Sequence& g, const DesignOptions& opts) {
    const std::size_t n = ch.grid();
    const Spectrum H = to_spectrum(ch.h, n);
    const Spectrum G = sample_dtft(g, n);
    DesignResult d;
    d.method = DesignMethod::MmseFixedTarget;
    d.g = g;
    d.F = mmse_equalizer(ch, H, G);
    d.noise_psd = mmse_error_psd(ch, H, G);
    d.sigma_v2 = d.noise_psd.mean().real();
    truncate_equalizer(d, ch, opts);
    return d;
}

double monic_lambda(const ChannelInstance& ch) {
    const Spectrum H = to_spectrum(ch.h, ch.grid());
    double acc = 0.0;
    for (std::size_t k = 0; k < H.size(); ++k) {
        const double sx = ch.input_psd[k].real();
        const double ratio = (std::norm(H[k]) * sx + ch.sigma_w2) / (sx * ch.sigma_w2);
        acc += std::log(std::max(ratio, 1e-300));
    }
    return std::exp(-acc / static_cast<double>(H.size()));
}

DesignResult monic_design(const ChannelInstance& ch, const DesignOptions& opts,
                          std::optional<std::size_t> target_length) {
    const std::size_t n = ch.grid();
    const Spectrum H = to_spectrum(ch.h, n);
    DesignResult d;
    d.method = DesignMethod::Monic;

    if (!target_length) {
        const double lambda = monic_lambda(ch);
        std::vector<double> q(n);
        for (std::size_t k = 0; k < n; ++k)
            q[k] = lambda / ch.sigma_w2 * std::norm(H[k]) + lambda / ch.input_psd[k].real();
        const auto fac = min_phase_factor(Spectrum::nonnegative(std::move(q)), factor_options(opts));
        d.g = fac.g;
        d.target_truncation = fac.truncation_energy;
        d.factor_floored = fac.floored;
        const Spectrum G = sample_dtft(d.g, n);
        std::vector<cplx> F(n);
        for (std::size_t k = 0; k < n; ++k) F[k] = lambda / ch.sigma_w2 * std::conj(H[k]) / std::conj(G[k]);
        d.F = Spectrum(std::move(F));
        d.noise_psd = mmse_error_psd(ch, H, G);
        d.lambda = lambda;
        d.sigma_v2 = lambda;
        if (ch.white_input()) {
            d.alpha = lambda / ch.sigma_w2;
            d.beta = ch.sigma_w2;
        }
        truncate_equalizer(d, ch, opts);
        return d;
    }

    // Finite length: minimise g^H K g subject to g_0 = 1, K Toeplitz built
    // from the error kernel W = S_x s2 / (|H|^2 S_x + s2).
    const std::size_t len = *target_length;
    if (len == 0) throw ConfigError("monic target length must be at least 1");
    std::vector<cplx> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double sx = ch.input_psd[k].real();
        w[k] = sx * ch.sigma_w2 / (std::norm(H[k]) * sx + ch.sigma_w2);
    }
    const Sequence kernel = from_spectrum_window(Spectrum(std::move(w)), -static_cast<long>(len) + 1, 2 * len - 1).seq;
    Eigen::MatrixXcd K(len, len);
    for (std::size_t i = 0; i < len; ++i)
        for (std::size_t j = 0; j < len; ++j)
            K(static_cast<long>(i), static_cast<long>(j)) =
                std::conj(kernel.at(static_cast<long>(i) - static_cast<long>(j)));
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<long>(len));
    rhs(0) = 1.0;
    const Eigen::VectorXcd u = K.ldlt().solve(rhs);
    const double lambda = 1.0 / u(0).real();
    std::vector<cplx> taps(len);
    for (std::size_t i = 0; i < len; ++i) taps[i] = u(static_cast<long>(i)) * lambda;
    if (ch.mode() == SignalMode::Real)
        for (auto& t : taps) t = {t.real(), 0.0};
    d.g = Sequence(0, std::move(taps));
    d.target_length = len;
    const Spectrum G = sample_dtft(d.g, n);
    d.F = mmse_equalizer(ch, H, G);
    d.noise_psd = mmse_error_psd(ch, H, G);
    d.lambda = lambda;
    d.sigma_v2 = lambda;
    truncate_equalizer(d, ch, opts);
    return d;
}

DesignResult ape_family(const ChannelInstance& ch, double alpha, double beta, const DesignOptions& opts) {
    if (!(alpha > 0.0)) throw InvalidBeta("alpha must be positive");
    const std::size_t n = ch.grid();
    const Spectrum H = to_spectrum(ch.h, n);
    double min_h2 = INFINITY;
    for (std::size_t k = 0; k < n; ++k) min_h2 = std::min(min_h2, std::norm(H[k]));
    if (!(beta > -min_h2))
        throw InvalidBeta("beta = " + std::to_string(beta) + " makes |H|^2 + beta vanish or go negative");
    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) q[k] = alpha * (std::norm(H[k]) + beta);
    const auto fac = min_phase_factor(Spectrum::nonnegative(std::move(q)), factor_options(opts));

    DesignResult d;
    d.method = DesignMethod::ApeFamily;
    d.g = fac.g;
    d.target_truncation = fac.truncation_energy;
    d.factor_floored = fac.floored;
    const Spectrum G = sample_dtft(d.g, n);
    std::vector<cplx> F(n);
    for (std::size_t k = 0; k < n; ++k) F[k] = alpha * std::conj(H[k]) / std::conj(G[k]);
    d.F = Spectrum(std::move(F));
    d.noise_psd = equalization_error_psd(ch, d.F, G);
    d.alpha = alpha;
    d.beta = beta;
    d.sigma_v2 = alpha * ch.sigma_w2;
    truncate_equalizer(d, ch, opts);
    return d;
}

DesignResult matched_filter_design(const ChannelInstance& ch) {
    DesignResult d;
    d.method = DesignMethod::MatchedFilter;
    d.f = adjoint(ch.h);
    d.g = Sequence::delta();
    d.F = sample_dtft(d.f, ch.grid());
    d.alpha = 1.0;
    d.sigma_v2 = ch.sigma_w2;
    const Sequence r = autocorrelation(ch.h);
    std::vector<cplx> a(static_cast<std::size_t>(std::max(r.last(), 0L)) + 1);
    a[0] = 0.5 * r.at(0);
    for (long k = 1; k <= r.last(); ++k) a[static_cast<std::size_t>(k)] = r.at(k);
    d.feedback = Sequence(0, std::move(a));
    return d;
}

double matched_filter_metric(const Sequence& z, const Sequence& x, const Sequence& feedback) {
    return inner(x, z - convolve(feedback, x)).real();
}

Spectrum equalization_error_psd(const ChannelInstance& ch, const Spectrum& F, const Spectrum& G) {
    const Spectrum H = to_spectrum(ch.h, F.size());
    std::vector<double> v(F.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = std::norm(G[k] - F[k] * H[k]) * ch.input_psd[k].real() + std::norm(F[k]) * ch.sigma_w2;
    return Spectrum::nonnegative(std::move(v));
}

Sequence prior_kernel(const Sequence& g, const Sequence& h, double alpha) {
    return autocorrelation(g) - alpha * autocorrelation(h);
}

}  // namespace shorteq
