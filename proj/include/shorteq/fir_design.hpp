#pragma once

#include <cstddef>
#include <vector>

#include "shorteq/channel.hpp"
#include "shorteq/classic_eq.hpp"
#include "shorteq/sequence.hpp"

namespace shorteq {

struct DominantError {
    Sequence e;               ///< canonical: e.start() == 0, e_0 == +1
    double distance2 = 0.0;   ///< ||h * e||^2
    std::size_t multiplicity = 1;
};

/// Exhaustive search over canonical error sequences with entries in
/// {-1, 0, +1} and length <= max_len (at most 12).
DominantError dominant_error_search(const ChannelInstance& ch, std::size_t max_len = 8);

/// Hamming weight: number of nonzero entries.
std::size_t hamming_weight(const Sequence& e);

struct EffectiveSnr {
    double phi = 0.0;        ///< Re<e, p * h * e>
    double var_delta = 0.0;  ///< sum of |a_n|^2 off the support of e
    double noise_var = 0.0;  ///< sigma_w^2 ||p * e||^2
    double snr = 0.0;
    Sequence a;              ///< (q - adjoint(p) * adjoint(h)) * e
    Sequence v;              ///< maximizing v, equal to a on supp(e)
};

/// Effective SNR with the inner maximization over v done in closed form.
EffectiveSnr effective_snr(const Sequence& p, const Sequence& q, const ChannelInstance& ch, const Sequence& e);

/// phi^2 / (||a - v||^2 + sigma_w^2 ||p * e||^2) for a caller-supplied v.
double snr_for_v(const Sequence& p, const Sequence& q, const ChannelInstance& ch, const Sequence& e,
                 const Sequence& v);

/// ||h * e||^2 / sigma_w^2.
double snr_max(const ChannelInstance& ch, const Sequence& e);

/// How the zeroth lag of q is chosen before factoring.
enum class BetaShift {
    /// Smallest shift that makes Q nonnegative: -min Q + 1e-9 max |Q|.
    Minimal,
    /// max(Minimal, lambda (r^h_0 + sigma_w^2) / sigma_w^2), the zeroth lag
    /// q takes in the long-target limit with beta = sigma_w^2.
    NoiseMatched,
};

struct FirProblem {
    ChannelInstance ch;
    std::size_t L = 3;  ///< target taps g_0..g_{L-1}
    Sequence e;         ///< error sequence in canonical form
    BetaShift beta_policy = BetaShift::NoiseMatched;
    EqualizerWindow equalizer{};
    /// Recover g and f; when false only p, q and the SNR are produced.
    bool recover_filters = true;
};

struct FirSolution {
    std::size_t L = 0;
    Sequence q;  ///< Hermitian, lags -(L-1)..L-1, q_0 = beta_shift
    Sequence p;
    Sequence v;
    Sequence g;
    Sequence f;
    double lambda = 0.0;  ///< post-rescale multiplier, used as sigma_v^2
    double beta_shift = 0.0;
    double snr = 0.0;
    double snr_max = 0.0;
    double loss_db = 0.0;
    double constraint = 0.0;
    double condition = 0.0;
    double p_truncation = 0.0;
    double equalizer_truncation = 0.0;
    std::size_t interpolated_points = 0;
    std::size_t grid = 0;
    std::size_t factor_grid = 0;
    double factor_residual = 0.0;

    DesignResult as_design() const;
};

FirSolution solve_fir(const FirProblem& problem);

struct LossPoint {
    std::size_t L = 0;
    double loss_db = 0.0;
    double snr = 0.0;
};

std::vector<LossPoint> fir_loss_curve(const ChannelInstance& ch, const std::vector<std::size_t>& lengths,
                                      const Sequence& e);

/// Q_g(x) = P(N(0,1) > x).
double q_function(double x);

struct ErrorModel {
    Sequence e;
    double snr_eff = 0.0;
    double kappa = 0.0;
    double p_seq = 0.0;  ///< kappa Q_g(sqrt(snr_eff)); a union-bound term, may exceed 1
    double p_bit = 0.0;  ///< clipped to 1
};

/// Number of placements times admissible fraction for IID BPSK blocks of
/// length M: multiplicity * 2 (M - len(e) + 1) * 2^-w_H(e). Placements are
/// restricted to shifts that keep e inside the block.
double kappa_bpsk(const Sequence& e, std::size_t M, std::size_t multiplicity = 1);

ErrorModel error_model_from_snr(const Sequence& e, double snr_eff, std::size_t M, std::size_t multiplicity = 1);

ErrorModel predict_error_rates(const FirSolution& sol, const ChannelInstance& ch, const Sequence& e, std::size_t M,
                               std::size_t multiplicity = 1);

}  // namespace shorteq
