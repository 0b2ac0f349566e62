#include "shorteq/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shorteq/errors.hpp"

namespace shorteq {

Constellation Constellation::bpsk() { return {"bpsk", SignalMode::Real, {-1.0, 1.0}}; }

Constellation Constellation::psk(int order) {
    if (order < 2) throw ConfigError("PSK order must be at least 2");
    Constellation c{std::to_string(order) + "psk", SignalMode::Complex, {}};
    for (int q = 0; q < order; ++q)
        c.symbols.push_back(std::sqrt(2.0) * std::polar(1.0, 2.0 * std::numbers::pi * q / order));
    return c;
}

Constellation Constellation::ternary() {
    const double a = std::sqrt(1.5);
    return {"ternary", SignalMode::Real, {-a, 0.0, a}};
}

Constellation Constellation::by_name(const std::string& name) {
    if (name == "bpsk") return bpsk();
    if (name == "ternary") return ternary();
    if (name == "qpsk") return psk(4);
    if (name.size() > 3 && name.substr(name.size() - 3) == "psk") {
        try {
            return psk(std::stoi(name.substr(0, name.size() - 3)));
        } catch (const std::logic_error&) {
        }
    }
    throw ConfigError("unknown constellation '" + name + "'");
}

bool Constellation::equal_energy(double tol) const {
    if (symbols.empty()) return true;
    const double e0 = std::norm(symbols.front());
    return std::all_of(symbols.begin(), symbols.end(),
                       [&](cplx s) { return std::abs(std::norm(s) - e0) <= tol * std::max(1.0, e0); });
}

double Constellation::average_energy() const {
    double acc = 0.0;
    for (auto s : symbols) acc += std::norm(s);
    return symbols.empty() ? 0.0 : acc / static_cast<double>(symbols.size());
}

std::size_t Constellation::nearest(cplx v) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < symbols.size(); ++i)
        if (std::norm(v - symbols[i]) < std::norm(v - symbols[best])) best = i;
    return best;
}

ChannelInstance ChannelInstance::make(Sequence h, double sigma_w2, SignalMode mode, std::size_t grid) {
    ChannelInstance ch;
    ch.h = std::move(h);
    ch.sigma_w2 = sigma_w2;
    ch.zeta = mode == SignalMode::Real ? 1 : 2;
    ch.input_psd = Spectrum::nonnegative(std::vector<double>(grid, 1.0));
    ch.validate();
    return ch;
}

ChannelInstance ChannelInstance::make_shaped(Sequence h, double sigma_w2, const Sequence& shaping, SignalMode mode,
                                             std::size_t grid) {
    ChannelInstance ch = make(std::move(h), sigma_w2, mode, grid);
    ch.input_psd = to_spectrum(shaping, grid).abs2();
    ch.validate();
    return ch;
}

bool ChannelInstance::white_input(double tol) const {
    const auto& v = input_psd.values();
    return std::all_of(v.begin(), v.end(), [tol](cplx s) { return std::abs(s - cplx{1.0}) <= tol; });
}

ChannelInstance ChannelInstance::with_noise(double s2) const {
    ChannelInstance ch = *this;
    ch.sigma_w2 = s2;
    ch.validate();
    return ch;
}

void ChannelInstance::validate() const {
    if (!(sigma_w2 > 0.0) || !std::isfinite(sigma_w2)) throw ConfigError("sigma_w2 must be positive");
    if (zeta != 1 && zeta != 2) throw ConfigError("zeta must be 1 or 2");
    if (h.empty()) throw ConfigError("channel impulse response is empty");
    if (zeta == 1 && !h.is_real(1e-14)) throw ConfigError("real-mode channel has complex taps");
    if (!input_psd.nonnegative_real() || !(input_psd.min_real() > 0.0))
        throw ConfigError("input PSD must be strictly positive on the grid");
}

Sequence exp8_channel() {
    std::vector<double> t(9);
    for (int n = 0; n <= 8; ++n) t[static_cast<std::size_t>(n)] = std::exp(-n / 2.0);
    return Sequence::from_real(0, t);
}

double noise_for_snr_db(const Sequence& h, double snr_db) { return h.energy() / std::pow(10.0, snr_db / 10.0); }

namespace {

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RngStream::bits(std::uint64_t index) const {
    const std::uint64_t key = splitmix(seed_ ^ splitmix(stream_ ^ 0x5851f42d4c957f2dULL));
    return splitmix(key ^ splitmix(index + 0x2545f4914f6cdd1dULL));
}

double RngStream::uniform(std::uint64_t index) const {
    // 53 random mantissa bits, shifted off zero.
    return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal(std::uint64_t index) const {
    const double u1 = uniform(2 * index);
    const double u2 = uniform(2 * index + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::child(std::uint64_t sub) const {
    return RngStream(splitmix(seed_ + 0x632be59bd9b4e019ULL * (sub + 1)), splitmix(stream_) ^ sub);
}

std::vector<std::size_t> draw_symbols(const Constellation& c, std::size_t count, const RngStream& rng) {
    std::vector<std::size_t> out(count);
    const std::uint64_t q = c.size();
    for (std::size_t i = 0; i < count; ++i) {
        // Lemire-style multiply-shift; the bias is below 2^-60 for small alphabets.
        const unsigned __int128 wide = static_cast<unsigned __int128>(rng.bits(i)) * q;
        out[i] = static_cast<std::size_t>(wide >> 64);
    }
    return out;
}

Sequence symbols_to_sequence(const Constellation& c, const std::vector<std::size_t>& idx, long start) {
    std::vector<cplx> t(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) t[i] = c.symbols.at(idx[i]);
    return Sequence(start, std::move(t));
}

Sequence transmit(const Sequence& x, const ChannelInstance& ch, const RngStream& rng, long first, long last) {
    const Sequence clean = convolve(ch.h, x);
    if (last < first) return clean;
    const double sd = std::sqrt(ch.sigma_w2);
    constexpr std::uint64_t kOrigin = 1ULL << 40;
    std::vector<cplx> y(static_cast<std::size_t>(last - first + 1));
    for (long n = first; n <= last; ++n) {
        const auto idx = static_cast<std::uint64_t>(static_cast<long long>(kOrigin) + n);
        cplx w = sd * rng.normal(ch.zeta * idx);
        if (ch.zeta == 2) w += cplx{0.0, sd * rng.normal(2 * idx + 1)};
        y[static_cast<std::size_t>(n - first)] = clean.at(n) + w;
    }
    return Sequence(first, std::move(y));
}

Sequence transmit(const Sequence& x, const ChannelInstance& ch, const RngStream& rng) {
    if (x.empty()) return transmit(x, ch, rng, 0, -1);
    return transmit(x, ch, rng, ch.h.start() + x.start(), ch.h.last() + x.last());
}

double distance_cost(const Sequence& y, const Sequence& x, const Sequence& h) {
    return (y - convolve(h, x)).energy();
}

Sequence equalize(const Sequence& y, const Sequence& f) { return convolve(f, y); }

}  // namespace shorteq
