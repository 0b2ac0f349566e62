#pragma once

#include <cstddef>

#include "shorteq/sequence.hpp"
#include "shorteq/spectrum.hpp"

namespace shorteq {

struct FactorOptions {
    /// Tap budget for the causal factor; 0 means N / 8.
    std::size_t max_len = 0;
    /// Samples below floor_relative * max Q are raised to that level.
    double floor_relative = 1e-10;
    bool allow_floor = true;
    /// Fraction of factor energy allowed past max_len.
    double truncation_tolerance = 1e-6;
};

struct FactorResult {
    Sequence g;            ///< causal, g.start() == 0, g0 > 0
    double g0 = 0.0;
    /// max_k | |G(w_k)|^2 - Q(w_k) | / max Q, using the truncated taps.
    double residual = 0.0;
    /// (1/2pi) * integral of log Q on the grid, after flooring.
    double log_mean = 0.0;
    double truncation_energy = 0.0;
    bool floored = false;
};

/// Minimum-phase spectral factor of a nonnegative spectrum, via the real
/// cepstrum of (1/2) log Q with a causal lifter.
FactorResult min_phase_factor(const Spectrum& q, const FactorOptions& opts = {});

}  // namespace shorteq
