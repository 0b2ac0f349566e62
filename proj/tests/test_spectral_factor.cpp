#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "shorteq/errors.hpp"
#include "shorteq/spectral_factor.hpp"

using namespace shorteq;

namespace {

Spectrum squared(const Sequence& g, std::size_t n) { return to_spectrum(g, n).abs2(); }

double log_mean(const Spectrum& q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) acc += std::log(q[k].real());
    return acc / static_cast<double>(q.size());
}

}  // namespace

TEST_CASE("flat spectrum factors to delta") {
    const auto r = min_phase_factor(Spectrum::nonnegative(std::vector<double>(256, 1.0)));
    CHECK(max_abs_diff(r.g, Sequence::delta()) < 1e-12);
    CHECK(r.g0 == doctest::Approx(1.0));
    CHECK_FALSE(r.floored);
}

TEST_CASE("first-order examples") {
    const auto a = min_phase_factor(squared(Sequence(0, {1.0, 0.5}), 1024));
    CHECK(max_abs_diff(a.g, Sequence(0, {1.0, 0.5})) < 1e-10);
    CHECK(a.residual < 1e-8);

    // Root at -2 is reflected to -1/2 and rescaled.
    const Spectrum q = squared(Sequence(0, {1.0, 2.0}), 1024);
    const auto b = min_phase_factor(q);
    CHECK(max_abs_diff(b.g, Sequence(0, {2.0, 1.0})) < 1e-10);
    const Spectrum back = squared(b.g, 1024);
    double dev = 0.0;
    for (std::size_t k = 0; k < 1024; ++k) dev = std::max(dev, std::abs(back[k] - q[k]));
    CHECK(dev < 1e-8);
}

TEST_CASE("factor invariants on random inputs") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto h = oracle::random_sequence(rng, 2 + trial % 7, 0);
        const std::size_t n = 2048;
        // |H|^2 + c keeps Q away from zero.
        std::vector<double> qv(n);
        const Spectrum H = to_spectrum(h, n);
        for (std::size_t k = 0; k < n; ++k) qv[k] = std::norm(H[k]) + 0.05;
        const Spectrum q = Spectrum::nonnegative(qv);
        const auto r = min_phase_factor(q);
        CHECK(r.g.start() == 0);
        CHECK(r.g0 > 0.0);
        CHECK(r.residual < 1e-8);
        CHECK(std::abs(2.0 * std::log(r.g0) - log_mean(q)) < 1e-8);
        for (const auto& z : oracle::tap_roots(r.g)) CHECK(std::abs(z) <= 1.0 + 1e-6);
    }
}

TEST_CASE("factoring a minimum-phase square is idempotent") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        // Build a min-phase polynomial from roots inside radius 0.9.
        std::uniform_real_distribution<double> ud(-0.9, 0.9);
        Sequence g = Sequence::delta();
        for (int k = 0; k < 1 + trial % 5; ++k) g = convolve(g, Sequence(0, {1.0, -ud(rng)}));
        g = g.scaled(1.0 + trial * 0.1);
        const auto r = min_phase_factor(squared(g, 4096));
        CHECK(max_abs_diff(r.g, g) < 1e-7);
    }
}

TEST_CASE("floor, null and truncation errors") {
    std::vector<double> q(512, 1.0);
    q[100] = 0.0;
    FactorOptions strict;
    strict.allow_floor = false;
    CHECK_THROWS_AS(min_phase_factor(Spectrum::nonnegative(q), strict), SpectralNull);
    FactorOptions full;
    full.max_len = 512;
    CHECK(min_phase_factor(Spectrum::nonnegative(q), full).floored);

    // 1 / |1 - 0.9 e^{-jw}|^2 has the IIR factor 0.9^n.
    std::vector<double> iir(2048);
    for (std::size_t k = 0; k < iir.size(); ++k)
        iir[k] = 1.0 / std::norm(1.0 - 0.9 * std::polar(1.0, -Spectrum::omega(k, iir.size())));
    const Spectrum s = Spectrum::nonnegative(iir);
    CHECK(std::abs(min_phase_factor(s).g.at(5) - std::pow(0.9, 5)) < 1e-10);
    FactorOptions shortf;
    shortf.max_len = 4;
    CHECK_THROWS_AS(min_phase_factor(s, shortf), TruncationError);

    CHECK_THROWS_AS(min_phase_factor(Spectrum(std::vector<cplx>(64, 1.0))), std::invalid_argument);
}
