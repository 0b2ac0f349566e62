#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "shorteq/errors.hpp"
#include "shorteq/fir_design.hpp"

using namespace shorteq;

namespace {

ChannelInstance example(double snr_db = 10.0) {
    const Sequence h = exp8_channel();
    return ChannelInstance::make(h, noise_for_snr_db(h, snr_db));
}

FirSolution solve(const ChannelInstance& ch, std::size_t L, const Sequence& e,
                  BetaShift policy = BetaShift::NoiseMatched) {
    FirProblem pr;
    pr.ch = ch;
    pr.L = L;
    pr.e = e;
    pr.beta_policy = policy;
    return solve_fir(pr);
}

const Sequence kE(0, {1.0, -1.0});

}  // namespace

TEST_CASE("dominant error search") {
    const auto id = dominant_error_search(ChannelInstance::make(Sequence::delta(), 1.0), 6);
    CHECK(max_abs_diff(id.e, Sequence::delta()) == 0.0);
    CHECK(id.distance2 == doctest::Approx(1.0));

    const auto ex = dominant_error_search(example(), 8);
    CHECK(max_abs_diff(ex.e, kE) == 0.0);
    CHECK(ex.multiplicity == 1);
}

TEST_CASE("dominant error search against exhaustive enumeration") {
    for (const Sequence& h : {Sequence(0, {1.0, -1.0}), Sequence(0, {1.0, 0.9, -0.4}), Sequence(0, {0.5, 1.0, 0.5})}) {
        const auto ch = ChannelInstance::make(h, 1.0);
        const std::size_t max_len = 7;
        const auto got = dominant_error_search(ch, max_len);
        // All of {-1,0,1}^max_len, reduced to canonical form.
        std::map<std::vector<int>, double> classes;
        oracle::enumerate(3, max_len, [&](const std::vector<std::size_t>& idx) {
            std::vector<int> v;
            for (auto i : idx) v.push_back(static_cast<int>(i) - 1);
            while (!v.empty() && v.front() == 0) v.erase(v.begin());
            while (!v.empty() && v.back() == 0) v.pop_back();
            if (v.empty()) return;
            if (v.front() < 0)
                for (auto& t : v) t = -t;
            double d2 = 0.0;
            for (long n = 0; n < static_cast<long>(v.size() + h.size()); ++n) {
                double acc = 0.0;
                for (long m = 0; m < static_cast<long>(v.size()); ++m) acc += v[m] * h.at(n - m).real();
                d2 += acc * acc;
            }
            classes[v] = d2;
        });
        double best = 1e300;
        for (const auto& [v, d2] : classes) best = std::min(best, d2);
        std::vector<std::vector<int>> winners;
        for (const auto& [v, d2] : classes)
            if (d2 <= best + 1e-9 * std::max(1.0, best)) winners.push_back(v);
        std::sort(winners.begin(), winners.end(), [](const auto& a, const auto& b) {
            return a.size() != b.size() ? a.size() < b.size() : a < b;
        });
        CHECK(got.distance2 == doctest::Approx(best).epsilon(1e-12));
        CHECK(got.multiplicity == winners.size());
        std::vector<double> w(winners.front().begin(), winners.front().end());
        CHECK(max_abs_diff(got.e, Sequence::from_real(0, w)) == 0.0);
    }
}

TEST_CASE("effective snr of the matched filter pair") {
    const auto ch = example();
    const Sequence p = adjoint(ch.h).scaled(1.0 / ch.sigma_w2);
    const Sequence q = autocorrelation(ch.h).scaled(1.0 / ch.sigma_w2);
    const auto r = effective_snr(p, q, ch, Sequence::delta());
    CHECK(r.var_delta < 1e-20);
    CHECK(r.snr == doctest::Approx(snr_max(ch, Sequence::delta())).epsilon(1e-12));
    CHECK(r.snr == doctest::Approx(ch.h.energy() / ch.sigma_w2).epsilon(1e-12));
    CHECK(effective_snr(p, q, ch, kE).snr == doctest::Approx(snr_max(ch, kE)).epsilon(1e-12));
}

TEST_CASE("effective snr against an independent evaluation and grid search") {
    std::mt19937_64 rng(51);
    const Sequence h = Sequence(0, exp8_channel().window(0, 4));
    const auto ch = ChannelInstance::make(h, noise_for_snr_db(h, 10.0));
    for (int trial = 0; trial < 2; ++trial) {
        const Sequence p = oracle::random_sequence(rng, 5, -3).scaled(0.3);
        const Sequence qh = oracle::random_sequence(rng, 3, 1).scaled(0.3);
        const Sequence q = qh + adjoint(qh) + Sequence::delta().scaled(0.5);
        const Sequence& e = kE;
        const auto got = effective_snr(p, q, ch, e);
        const auto ref = oracle::snr_pieces(p, q, h, ch.sigma_w2, e);
        double off = 0.0;
        for (const auto& [n, v] : ref.a)
            if (n != 0 && n != 1) off += v * v;
        CHECK(got.phi == doctest::Approx(ref.phi).epsilon(1e-12));
        CHECK(std::abs(got.var_delta - off) < 1e-12);
        CHECK(std::abs((got.a - got.v).energy() - got.var_delta) < 1e-12);
        CHECK(got.noise_var == doctest::Approx(ref.noise).epsilon(1e-12));

        // Two-level grid over v in [-3, 3]^2: step 1e-3, then 1e-6 around the best.
        REQUIRE(std::abs(ref.a.at(0)) < 3.0);
        REQUIRE(std::abs(ref.a.at(1)) < 3.0);
        auto value = [&](double v0, double v1) {
            double den = ref.noise;
            for (const auto& [n, a] : ref.a) {
                const double v = n == 0 ? v0 : (n == 1 ? v1 : 0.0);
                den += (a - v) * (a - v);
            }
            return ref.phi * ref.phi / den;
        };
        double best = -1.0, b0 = 0.0, b1 = 0.0;
        for (int i = 0; i <= 6000; ++i)
            for (int j = 0; j <= 6000; ++j) {
                const double v0 = -3.0 + 1e-3 * i, v1 = -3.0 + 1e-3 * j;
                const double s = value(v0, v1);
                if (s > best) best = s, b0 = v0, b1 = v1;
            }
        const double c0 = b0, c1 = b1;
        for (int i = -1000; i <= 1000; ++i)
            for (int j = -1000; j <= 1000; ++j) {
                const double s = value(c0 + 1e-6 * i, c1 + 1e-6 * j);
                if (s > best) best = s;
            }
        CHECK(std::abs(best - got.snr) <= 1e-6 * got.snr);
        CHECK(snr_for_v(p, q, ch, e, got.v) == doctest::Approx(got.snr).epsilon(1e-12));
    }
}

TEST_CASE("snr is invariant to shifting q by a multiple of delta") {
    std::mt19937_64 rng(53);
    const auto ch = example();
    std::uniform_real_distribution<double> ud(-5.0, 5.0);
    for (int t = 0; t < 20; ++t) {
        const Sequence p = oracle::random_sequence(rng, 7, -3);
        const Sequence qh = oracle::random_sequence(rng, 3, 1);
        const Sequence q = qh + adjoint(qh);
        const double base = effective_snr(p, q, ch, kE).snr;
        const double shifted = effective_snr(p, q + Sequence::delta().scaled(ud(rng)), ch, kE).snr;
        CHECK(std::abs(base - shifted) <= 1e-9 * base);
    }
}

TEST_CASE("fir solver at L = 3 on the example channel") {
    const auto ch = example();
    const auto s = solve(ch, 3, kE);
    CHECK(std::abs(s.constraint - 1.0) < 1e-8);
    CHECK(s.snr <= s.snr_max + 1e-9);
    CHECK(std::abs(s.loss_db - 0.075) <= 0.02);
    CHECK(s.g.size() == 3);
    CHECK(s.q.start() == -2);
    CHECK(s.q.size() == 5);
    CHECK(s.interpolated_points == 1);
    CHECK(s.equalizer_truncation < 1e-4);

    // Q + beta is nonnegative on the grid and g factors it.
    const Spectrum Q = sample_dtft(s.q, ch.grid());
    CHECK(Q.min_real() >= -kSpecTolerance * Q.max_abs());
    const Spectrum G = sample_dtft(s.g, ch.grid());
    double dev = 0.0;
    for (std::size_t k = 0; k < Q.size(); ++k) dev = std::max(dev, std::abs(std::norm(G[k]) - Q[k].real()));
    CHECK(dev < 1e-8 * Q.max_abs());

    // Removing the shift does not change the SNR.
    const double unshifted = effective_snr(s.p, s.q - Sequence::delta().scaled(s.beta_shift), ch, kE).snr;
    CHECK(std::abs(unshifted - s.snr) < 1e-9 * s.snr);
}

TEST_CASE("minimal beta shift") {
    const auto ch = example();
    const auto s = solve(ch, 3, kE, BetaShift::Minimal);
    const Spectrum Q = sample_dtft(s.q, ch.grid());
    CHECK(Q.min_real() >= 0.0);
    CHECK(Q.min_real() <= 1e-8 * Q.max_abs());
    CHECK(s.snr == doctest::Approx(solve(ch, 3, kE).snr).epsilon(1e-12));
}

TEST_CASE("fir solutions converge to the iir limits") {
    const auto ch = example();
    const double s2 = ch.sigma_w2;
    const auto s = solve(ch, 12, kE);
    const Sequence p_lim = adjoint(ch.h).scaled(s.lambda / s2);
    const Sequence q_lim = (autocorrelation(ch.h) + Sequence::delta().scaled(s2)).scaled(s.lambda / s2);
    for (long n = p_lim.start(); n < p_lim.end(); ++n)
        CHECK(std::abs(s.p.at(n) - p_lim.at(n)) < 1e-3 * std::abs(p_lim.at(n)));
    for (long n = q_lim.start(); n < q_lim.end(); ++n)
        CHECK(std::abs(s.q.at(n) - q_lim.at(n)) < 1e-3 * std::abs(q_lim.at(n)));
    for (std::size_t L = 9; L <= 12; ++L) {
        const auto sl = solve(ch, L, kE);
        CHECK(sl.snr_max - sl.snr < 1e-4);
    }
}

TEST_CASE("fir loss curve") {
    const auto ch = example();
    std::vector<std::size_t> Ls;
    for (std::size_t L = 2; L <= 14; ++L) Ls.push_back(L);
    const auto curve = fir_loss_curve(ch, Ls, kE);
    REQUIRE(curve.size() == Ls.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].loss_db >= -1e-9);
        if (i > 0) CHECK(curve[i].loss_db <= curve[i - 1].loss_db + 1e-6);
        if (curve[i].L >= 9) CHECK(curve[i].loss_db < 1e-3);
    }
    CHECK_THROWS_AS(fir_loss_curve(ch, {}, kE), ConfigError);
}

TEST_CASE("fir solver errors") {
    const auto small = ChannelInstance::make(Sequence(0, {1.0, 0.5}), 0.1, SignalMode::Real, 64);
    CHECK_THROWS_AS(solve(small, 40, kE), SingularSystem);
    CHECK_THROWS_AS(solve(example(), 1, kE), ConfigError);
    CHECK_THROWS_AS(solve(example(), 3, Sequence(1, {1.0})), ConfigError);
}

TEST_CASE("q function") {
    CHECK(q_function(0.0) == 0.5);
    // Simpson integration of the Gaussian density.
    for (double x = -8.0; x <= 8.0; x += 0.5) {
        const double hi = 40.0;
        const int n = 200000;
        const double step = (hi - x) / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double t = x + i * step;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * std::exp(-0.5 * t * t);
        }
        const double ref = acc * step / 3.0 / std::sqrt(2.0 * std::numbers::pi);
        CHECK(std::abs(q_function(x) - ref) < 1e-12);
    }
}

TEST_CASE("kappa by counting placements on tiny blocks") {
    for (const Sequence& e : {kE, Sequence(0, {1.0}), Sequence(0, {1.0, 0.0, -1.0}), Sequence(0, {1.0, -1.0, 1.0})}) {
        for (std::size_t M = e.size(); M <= 7; ++M) {
            double pairs = 0.0;
            oracle::enumerate(2, M, [&](const std::vector<std::size_t>& idx) {
                for (std::size_t shift = 0; shift + e.size() <= M; ++shift) {
                    for (double sign : {1.0, -1.0}) {
                        bool ok = true;
                        for (std::size_t i = 0; i < e.size(); ++i) {
                            const double ei = sign * e.at(static_cast<long>(i)).real();
                            const double xi = idx[shift + i] ? 1.0 : -1.0;
                            if (ei != 0.0 && xi != ei) ok = false;
                        }
                        pairs += ok;
                    }
                }
            });
            CHECK(kappa_bpsk(e, M) == doctest::Approx(pairs / std::ldexp(1.0, static_cast<int>(M))));
        }
    }
    CHECK(kappa_bpsk(kE, 100) == doctest::Approx(49.5));
    const auto m = error_model_from_snr(kE, 9.0, 100);
    CHECK(m.p_bit == doctest::Approx(0.02 * m.p_seq));
    CHECK(m.p_seq == doctest::Approx(49.5 * q_function(3.0)));
    CHECK(m.p_bit <= m.p_seq);
    CHECK(error_model_from_snr(kE, 9.0, 100, 3).kappa == doctest::Approx(3 * 49.5));
}
