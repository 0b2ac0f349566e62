#include "shorteq/error_model.hpp"

#include <algorithm>
#include <cmath>

namespace shorteq {

ScoredDesign score_design(const DesignResult& d, const ChannelInstance& ch, const Sequence& e, std::size_t M,
                          std::size_t multiplicity) {
    ScoredDesign s;
    const Sequence ga = adjoint(d.g);
    s.p = convolve(ga, d.f);
    s.q = convolve(ga, d.g);
    s.detail = effective_snr(s.p, s.q, ch, e);
    s.model = error_model_from_snr(e, s.detail.snr, M, multiplicity);
    return s;
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

SimulatedPoint make_point(std::uint64_t errors, std::uint64_t trials, std::uint64_t min_errors) {
    SimulatedPoint pt;
    pt.errors = errors;
    pt.trials = trials;
    pt.rate = trials == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(trials);
    pt.ci = wilson_interval(errors, trials);
    pt.censored = errors < min_errors;
    return pt;
}

}  // namespace shorteq
