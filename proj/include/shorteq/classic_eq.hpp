#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "shorteq/channel.hpp"
#include "shorteq/sequence.hpp"
#include "shorteq/spectrum.hpp"

namespace shorteq {

enum class DesignMethod { Zfe, MmseFixedTarget, Monic, ApeFamily, MatchedFilter, FirOptimal };

std::string to_string(DesignMethod m);

/// Tap window an IIR equalizer is truncated to.
struct EqualizerWindow {
    long first = -10;
    std::size_t length = 21;

    static EqualizerWindow centered(std::size_t length) {
        return {-static_cast<long>(length / 2), length};
    }
};

struct DesignOptions {
    EqualizerWindow equalizer{};
    /// Target tap budget for IIR targets (0 = N / 8).
    std::size_t target_max_len = 0;
    /// Relative |H| floor for zero forcing.
    double zfe_null = 1e-6;
};

/// An equalizer/target pair together with the target-channel parameters a
/// detector needs.
struct DesignResult {
    DesignMethod method = DesignMethod::Monic;
    Sequence f;     ///< equalizer, truncated to the design window
    Sequence g;     ///< target
    Spectrum F;     ///< untruncated equalizer response on the design grid
    Spectrum noise_psd;  ///< S_u (zero forcing) or S_e (MMSE family)
    double sigma_v2 = 0.0;
    std::optional<double> lambda;
    std::optional<double> alpha;
    std::optional<double> beta;
    /// Fraction of equalizer energy outside the truncation window.
    double equalizer_truncation = 0.0;
    double target_truncation = 0.0;
    /// Finite target length for monic designs computed at finite length.
    std::optional<std::size_t> target_length;
    /// Post-cursor feedback sequence (matched-filter limit only).
    std::optional<Sequence> feedback;
    bool factor_floored = false;

    /// Coefficient of the -|x_n|^2 trellis correction that realizes the
    /// tilted target-channel prior. Zero when the design implies none.
    double correction_coefficient() const;
};

/// F = G / H.
DesignResult zfe(const ChannelInstance& ch, const Sequence& g, const DesignOptions& opts = {});

/// F = S_x H* G / (|H|^2 S_x + sigma_w^2).
DesignResult mmse_fixed_target(const ChannelInstance& ch, const Sequence& g, const DesignOptions& opts = {});

/// Monic target (g_0 = 1) jointly designed with its MMSE equalizer. With
/// `target_length` unset the target is the IIR minimum-phase factor;
/// otherwise the best length-L monic FIR target is solved directly.
DesignResult monic_design(const ChannelInstance& ch, const DesignOptions& opts = {},
                          std::optional<std::size_t> target_length = std::nullopt);

/// |G|^2 = alpha (|H|^2 + beta), G minimum phase, F = alpha H* / G*.
DesignResult ape_family(const ChannelInstance& ch, double alpha, double beta, const DesignOptions& opts = {});

/// f = adjoint(h), g = delta, with the post-cursor feedback sequence a.
DesignResult matched_filter_design(const ChannelInstance& ch);

/// Re<x, z - a * x>, the detection statistic of the matched-filter limit.
double matched_filter_metric(const Sequence& z, const Sequence& x, const Sequence& feedback);

/// lambda = exp(-(1/2pi) int log((|H|^2 S_x + s2) / (S_x s2))).
double monic_lambda(const ChannelInstance& ch);

/// Equalization-error PSD |G - F H|^2 S_x + |F|^2 sigma_w^2 for any pair.
Spectrum equalization_error_psd(const ChannelInstance& ch, const Spectrum& F, const Spectrum& G);

/// Prior-tilt kernel s = adjoint(g) * g - alpha * adjoint(h) * h.
Sequence prior_kernel(const Sequence& g, const Sequence& h, double alpha);

}  // namespace shorteq
