#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shorteq/sequence.hpp"
#include "shorteq/spectrum.hpp"

namespace shorteq {

enum class SignalMode { Real, Complex };

/// Finite symbol alphabet. Symbol order is significant: trellis state digits
/// and lexicographic tie-breaking both follow it.
struct Constellation {
    std::string name;
    SignalMode mode = SignalMode::Real;
    std::vector<cplx> symbols;

    static Constellation bpsk();
    /// sqrt(2) * exp(j 2 pi q / Q), q = 0..Q-1.
    static Constellation psk(int order);
    /// {-sqrt(3/2), 0, +sqrt(3/2)}, unit average energy.
    static Constellation ternary();
    static Constellation by_name(const std::string& name);

    std::size_t size() const { return symbols.size(); }
    bool equal_energy(double tol = 1e-12) const;
    double average_energy() const;
    /// Index of the symbol closest to v.
    std::size_t nearest(cplx v) const;
};

/// y = h * x + w with white Gaussian w of variance sigma_w2 per real dimension.
struct ChannelInstance {
    Sequence h;
    double sigma_w2 = 1.0;
    int zeta = 1;  ///< real dimensions per sample
    Spectrum input_psd;

    static ChannelInstance make(Sequence h, double sigma_w2, SignalMode mode = SignalMode::Real,
                                std::size_t grid = kDefaultGrid);
    /// Colored input: S_x = |C(w)|^2 for an input-shaping filter c.
    static ChannelInstance make_shaped(Sequence h, double sigma_w2, const Sequence& shaping,
                                       SignalMode mode = SignalMode::Real, std::size_t grid = kDefaultGrid);

    std::size_t grid() const { return input_psd.size(); }
    SignalMode mode() const { return zeta == 1 ? SignalMode::Real : SignalMode::Complex; }
    bool white_input(double tol = 1e-12) const;
    /// Same channel at a different noise level.
    ChannelInstance with_noise(double sigma_w2) const;
    void validate() const;
};

/// h_n = exp(-n/2), 0 <= n <= 8.
Sequence exp8_channel();
/// sigma_w^2 = ||h||^2 / 10^(snr_db / 10).
double noise_for_snr_db(const Sequence& h, double snr_db);

/// Counter-based random stream: every draw is a pure function of
/// (seed, stream_id, index), so shards can be generated in any order.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t bits(std::uint64_t index) const;
    /// Uniform on (0, 1).
    double uniform(std::uint64_t index) const;
    /// Standard normal (Box-Muller over draws 2i and 2i+1).
    double normal(std::uint64_t index) const;
    /// Independent child stream.
    RngStream child(std::uint64_t sub) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Uniform IID symbol indices drawn from `rng`.
std::vector<std::size_t> draw_symbols(const Constellation& c, std::size_t count, const RngStream& rng);
Sequence symbols_to_sequence(const Constellation& c, const std::vector<std::size_t>& idx, long start = 0);

/// y = h * x + w over the full convolution support of h * x.
Sequence transmit(const Sequence& x, const ChannelInstance& ch, const RngStream& rng);
/// Same, with noise on the explicit output span [first, last]. Noise at
/// sample n depends only on (rng, n).
Sequence transmit(const Sequence& x, const ChannelInstance& ch, const RngStream& rng, long first, long last);

/// D(y, x) = sum_n |y_n - (h * x)_n|^2 over the union of supports.
double distance_cost(const Sequence& y, const Sequence& x, const Sequence& h);

/// z = f * y.
Sequence equalize(const Sequence& y, const Sequence& f);

}  // namespace shorteq
