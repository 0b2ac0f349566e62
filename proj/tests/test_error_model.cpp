#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "shorteq/error_model.hpp"

using namespace shorteq;

namespace {

const Sequence kE(0, {1.0, -1.0});

ChannelInstance example(double snr_db = 10.0) {
    const Sequence h = exp8_channel();
    return ChannelInstance::make(h, noise_for_snr_db(h, snr_db));
}

DesignOptions wide() {
    DesignOptions o;
    o.equalizer = EqualizerWindow::centered(161);
    return o;
}

}  // namespace

TEST_CASE("ape designs reach the matched-filter bound") {
    const auto ch = example();
    const double bound = snr_max(ch, kE);
    for (double beta : {0.5 * ch.sigma_w2, ch.sigma_w2, 2.0 * ch.sigma_w2}) {
        const auto d = ape_family(ch, 0.7, beta, wide());
        const auto s = score_design(d, ch, kE, 100);
        CAPTURE(beta);
        CHECK(s.detail.var_delta < 1e-8 * s.detail.phi * s.detail.phi);
        CHECK(s.detail.snr == doctest::Approx(bound).epsilon(1e-6));
    }
}

TEST_CASE("monic design and ape with beta = sigma^2 predict the same rates") {
    for (double snr_db : {8.0, 10.0, 12.0}) {
        const auto ch = example(snr_db);
        const auto mon = monic_design(ch, wide());
        REQUIRE(mon.lambda.has_value());
        const auto ape = ape_family(ch, *mon.lambda / ch.sigma_w2, ch.sigma_w2, wide());
        const auto a = score_design(mon, ch, kE, 100);
        const auto b = score_design(ape, ch, kE, 100);
        CHECK(a.model.p_seq == doctest::Approx(b.model.p_seq).epsilon(1e-6));
        CHECK(a.model.p_bit == doctest::Approx(b.model.p_bit).epsilon(1e-6));
        CHECK(a.model.snr_eff == doctest::Approx(b.model.snr_eff).epsilon(1e-6));
    }
}

TEST_CASE("mismatch variance vanishes when q matches p") {
    std::mt19937_64 rng(71);
    const auto ch = example();
    for (int t = 0; t < 10; ++t) {
        const Sequence p = oracle::random_sequence(rng, 6, -4);
        const Sequence q = convolve(adjoint(p), adjoint(ch.h));
        const auto r = effective_snr(p, q, ch, kE);
        CHECK(r.var_delta < 1e-24 * std::max(1.0, q.energy()));
        CHECK(r.noise_var > 0.0);
    }
    // Zero forcing to a minimum-phase channel: f * h = g up to truncation.
    const auto zf = zfe(ch, Sequence(0, {1.0, 0.6, 0.2}), wide());
    const auto s = score_design(zf, ch, kE, 100);
    CHECK(s.detail.var_delta < 1e-10);
}

TEST_CASE("scored designs have positive dominant-event variance") {
    for (double snr_db : {4.0, 10.0, 20.0}) {
        const auto ch = example(snr_db);
        for (const auto& d : {monic_design(ch), monic_design(ch, {}, 3), zfe(ch, Sequence::delta(), wide()),
                              mmse_fixed_target(ch, Sequence(0, {1.0, 0.5}))}) {
            const auto s = score_design(d, ch, kE, 100);
            CHECK(s.detail.noise_var + s.detail.var_delta > 0.0);
            CHECK(s.model.p_bit >= 0.0);
            CHECK(s.model.p_bit <= 1.0);
            CHECK(s.model.p_seq >= 0.0);
        }
    }
}

TEST_CASE("wilson interval") {
    const double z = 1.959963984540054;
    for (auto [k, n] : {std::pair<std::uint64_t, std::uint64_t>{1, 10}, {5, 100}, {100, 100000}, {50, 50}, {0, 40}}) {
        const auto ci = wilson_interval(k, n);
        const double ph = static_cast<double>(k) / static_cast<double>(n);
        CHECK(ci.lo <= ph);
        CHECK(ci.hi >= ph);
        // Endpoints solve |ph - p| = z sqrt(p (1 - p) / n).
        for (double p : {ci.lo, ci.hi}) {
            if (p <= 0.0 || p >= 1.0) continue;
            CHECK(std::abs(std::abs(ph - p) - z * std::sqrt(p * (1.0 - p) / static_cast<double>(n))) < 1e-12);
        }
    }
    CHECK(wilson_interval(0, 40).lo == 0.0);
    CHECK(wilson_interval(50, 50).hi == doctest::Approx(1.0));
    const auto wide_ci = wilson_interval(10, 100, 3.0);
    const auto narrow_ci = wilson_interval(10, 100, 1.0);
    CHECK(wide_ci.lo < narrow_ci.lo);
    CHECK(wide_ci.hi > narrow_ci.hi);
}

TEST_CASE("simulated points") {
    const auto pt = make_point(120, 100000, 100);
    CHECK(pt.rate == doctest::Approx(1.2e-3));
    CHECK_FALSE(pt.censored);
    CHECK(pt.ci.lo < pt.rate);
    CHECK(pt.ci.hi > pt.rate);
    CHECK(make_point(12, 100000, 100).censored);
    CHECK(make_point(0, 0, 100).rate == 0.0);
}
