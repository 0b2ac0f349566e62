#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "shorteq/channel.hpp"
#include "shorteq/classic_eq.hpp"
#include "shorteq/fir_design.hpp"

namespace shorteq {

struct ScoredDesign {
    ErrorModel model;
    EffectiveSnr detail;
    Sequence p;  ///< adjoint(g) * f
    Sequence q;  ///< adjoint(g) * g
};

/// Predicted error rates of an arbitrary (f, g) pair under the
/// effective-SNR model; p uses the truncated f.
ScoredDesign score_design(const DesignResult& d, const ChannelInstance& ch, const Sequence& e, std::size_t M,
                          std::size_t multiplicity = 1);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval; z = 1.96 gives 95 % coverage.
Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);

struct SimulatedPoint {
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    double rate = 0.0;
    Interval ci;
    bool censored = false;
};

struct RateCurve {
    std::vector<double> snr_db;
    std::vector<ErrorModel> predicted;
    std::optional<std::vector<SimulatedPoint>> simulated;
};

SimulatedPoint make_point(std::uint64_t errors, std::uint64_t trials, std::uint64_t min_errors);

}  // namespace shorteq
