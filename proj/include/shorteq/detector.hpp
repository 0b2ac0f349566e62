#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "shorteq/channel.hpp"
#include "shorteq/sequence.hpp"

namespace shorteq {

/// Trellis over a causal target g. Symbols outside the message 0..M-1 are
/// known zeros, so the detector starts and ends in a known state.
class Trellis {
public:
    Trellis(Constellation c, Sequence g, double lambda_corr = 0.0);

    const Constellation& constellation() const { return c_; }
    const Sequence& target() const { return g_; }
    double lambda_corr() const { return lambda_; }
    std::size_t memory() const { return g_taps_.size() - 1; }
    std::size_t state_count() const { return states_; }

    /// Noiseless output for state s (most recent symbol least significant)
    /// and input u.
    cplx output(std::size_t s, std::size_t u) const { return out_[s * c_.size() + u]; }

private:
    Constellation c_;
    Sequence g_;
    double lambda_;
    std::vector<cplx> g_taps_;
    std::size_t states_ = 1;
    std::vector<cplx> out_;

    friend struct ViterbiRunner;
};

struct DetectionResult {
    Sequence x_hat;
    std::vector<std::size_t> symbol_index;
    double path_metric = 0.0;
    std::size_t ties_broken = 0;
};

/// sum_{n=0}^{M+L-2} |z_n - (g * x)_n|^2 - lambda_corr sum_n |x_n|^2.
double path_metric(std::span<const cplx> z, const Sequence& g, std::span<const cplx> x, double lambda_corr);

/// Minimizes path_metric over C^M. z must hold samples 0..M+L-2.
DetectionResult viterbi_detect(std::span<const cplx> z, const Trellis& t, std::size_t M);
DetectionResult viterbi_detect(const Sequence& z, const Trellis& t, std::size_t M);

/// Exhaustive minimization of ||z - filt * x||^2 - lambda_corr ||x||^2 over
/// x in C^M (x_0..x_{M-1}), summed over the union of supports. Ties go to
/// the lexicographically smallest x in constellation order.
DetectionResult brute_force_map(const Sequence& z, const Sequence& filt, std::size_t M, const Constellation& c,
                                double lambda_corr = 0.0);

}  // namespace shorteq
