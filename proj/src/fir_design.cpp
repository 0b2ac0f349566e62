#include "shorteq/fir_design.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "shorteq/errors.hpp"
#include "shorteq/spectral_factor.hpp"

namespace shorteq {

namespace {

Sequence real_part(const Sequence& s) {
    std::vector<cplx> t = s.taps();
    for (auto& v : t) v = {v.real(), 0.0};
    return Sequence(s.start(), std::move(t));
}

std::vector<long> support_of(const Sequence& e) {
    std::vector<long> s;
    for (long n = e.start(); n < e.end(); ++n)
        if (e.at(n) != cplx{}) s.push_back(n);
    return s;
}

void require_canonical(const Sequence& e) {
    if (e.empty() || e.start() != 0 || e.at(0) == cplx{})
        throw ConfigError("error sequence must start at index 0 with e_0 != 0");
}

}  // namespace

std::size_t hamming_weight(const Sequence& e) { return support_of(e).size(); }

DominantError dominant_error_search(const ChannelInstance& ch, std::size_t max_len) {
    if (ch.mode() != SignalMode::Real) throw ConfigError("dominant error search expects a real channel");
    if (max_len == 0 || max_len > 12) throw ConfigError("dominant error search length must be in 1..12");
    std::vector<double> h(ch.h.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = ch.h.taps()[i].real();

    struct Candidate {
        std::vector<int> e;
        double d2;
    };
    std::vector<Candidate> all;
    std::vector<double> conv(h.size() + max_len);
    for (std::size_t len = 1; len <= max_len; ++len) {
        // Positions 1..len-2 range over {-1, 0, 1}; the last over {-1, 1}.
        const std::size_t inner = len >= 2 ? len - 2 : 0;
        std::size_t count = 1;
        for (std::size_t i = 0; i < inner; ++i) count *= 3;
        const std::size_t last_choices = len >= 2 ? 2 : 1;
        for (std::size_t code = 0; code < count; ++code) {
            for (std::size_t lc = 0; lc < last_choices; ++lc) {
                std::vector<int> e(len, 0);
                e[0] = 1;
                std::size_t c = code;
                for (std::size_t i = inner; i-- > 0;) {
                    e[1 + i] = static_cast<int>(c % 3) - 1;
                    c /= 3;
                }
                if (len >= 2) e[len - 1] = lc == 0 ? -1 : 1;
                std::fill(conv.begin(), conv.end(), 0.0);
                for (std::size_t i = 0; i < len; ++i) {
                    if (e[i] == 0) continue;
                    for (std::size_t j = 0; j < h.size(); ++j) conv[i + j] += e[i] * h[j];
                }
                double d2 = 0.0;
                for (double v : conv) d2 += v * v;
                all.push_back({std::move(e), d2});
            }
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : all) best = std::min(best, c.d2);
    const double tol = 1e-9 * std::max(1.0, best);
    DominantError out;
    out.multiplicity = 0;
    for (const auto& c : all) {
        if (c.d2 > best + tol) continue;
        if (out.multiplicity == 0) {
            std::vector<double> taps(c.e.begin(), c.e.end());
            out.e = Sequence::from_real(0, taps);
            out.distance2 = c.d2;
        }
        ++out.multiplicity;
    }
    return out;
}

EffectiveSnr effective_snr(const Sequence& p, const Sequence& q, const ChannelInstance& ch, const Sequence& e) {
    EffectiveSnr r;
    r.phi = inner(e, convolve(convolve(p, ch.h), e)).real();
    r.a = convolve(q - convolve(adjoint(p), adjoint(ch.h)), e);
    const auto s = support_of(e);
    std::vector<cplx> vt;
    long vstart = 0;
    if (!s.empty()) {
        vstart = s.front();
        vt.assign(static_cast<std::size_t>(s.back() - s.front() + 1), cplx{});
        for (long n : s) vt[static_cast<std::size_t>(n - vstart)] = r.a.at(n);
    }
    r.v = Sequence(vstart, std::move(vt));
    double var = r.a.energy();
    for (long n : s) var -= std::norm(r.a.at(n));
    r.var_delta = std::max(var, 0.0);
    r.noise_var = ch.sigma_w2 * convolve(p, e).energy();
    const double den = r.var_delta + r.noise_var;
    r.snr = (r.phi == 0.0 || den <= 0.0) ? 0.0 : r.phi * r.phi / den;
    return r;
}

double snr_for_v(const Sequence& p, const Sequence& q, const ChannelInstance& ch, const Sequence& e,
                 const Sequence& v) {
    const double phi = inner(e, convolve(convolve(p, ch.h), e)).real();
    const Sequence a = convolve(q - convolve(adjoint(p), adjoint(ch.h)), e);
    const double den = (a - v).energy() + ch.sigma_w2 * convolve(p, e).energy();
    return (phi == 0.0 || den <= 0.0) ? 0.0 : phi * phi / den;
}

double snr_max(const ChannelInstance& ch, const Sequence& e) {
    return convolve(ch.h, e).energy() / ch.sigma_w2;
}

FirSolution solve_fir(const FirProblem& pr) {
    const ChannelInstance& ch = pr.ch;
    if (ch.mode() != SignalMode::Real) throw ConfigError("the FIR target solver is defined for real BPSK channels");
    if (pr.L < 2) throw ConfigError("FIR target length must be at least 2");
    require_canonical(pr.e);

    const std::size_t n = ch.grid();
    const Spectrum H = to_spectrum(ch.h, n);
    const Spectrum E = sample_dtft(pr.e, n);
    for (std::size_t k = 0; k < n; ++k)
        if (std::norm(H[k]) <= 0.0) throw SpectralNull("channel response vanishes on the grid");

    const auto supp = support_of(pr.e);
    const std::size_t nq = pr.L - 1;
    const std::size_t J = supp.size();
    const std::size_t K = nq + J;

    // Basis functions B_a(w): 2 E cos(l w) for the free lags of q, then
    // -exp(-j s w) for each v on supp(e).
    std::vector<std::vector<cplx>> B(K, std::vector<cplx>(n));
    std::vector<double> A(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = Spectrum::omega(k, n);
        A[k] = 1.0 + ch.sigma_w2 / std::norm(H[k]);
        for (std::size_t l = 1; l <= nq; ++l) B[l - 1][k] = 2.0 * E[k] * std::cos(static_cast<double>(l) * w);
        for (std::size_t j = 0; j < J; ++j) B[nq + j][k] = -std::polar(1.0, -static_cast<double>(supp[j]) * w);
    }
    Eigen::MatrixXd M(K, K);
    Eigen::VectorXd rhs(K);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t a = 0; a < K; ++a) {
        double b = 0.0;
        for (std::size_t k = 0; k < n; ++k) b += (std::conj(B[a][k]) * E[k]).real() / A[k];
        rhs(static_cast<long>(a)) = b * inv_n;
        for (std::size_t c = a; c < K; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                acc += (std::conj(B[a][k]) * B[c][k]).real() * (1.0 - 1.0 / A[k]);
            M(static_cast<long>(a), static_cast<long>(c)) = acc * inv_n;
            M(static_cast<long>(c), static_cast<long>(a)) = acc * inv_n;
        }
    }

    FirSolution sol;
    sol.L = pr.L;
    sol.grid = n;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    sol.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(sol.condition <= 1e12))
        throw SingularSystem("FIR normal equations are singular (condition " + std::to_string(sol.condition) + ")");
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
    const Eigen::VectorXd x = ldlt.solve(rhs);

    // R = (B x + E) / A, P = R / (H E), bridged linearly where E vanishes.
    std::vector<cplx> P(n);
    std::vector<bool> valid(n, true);
    for (std::size_t k = 0; k < n; ++k) {
        cplx bx{};
        for (std::size_t a = 0; a < K; ++a) bx += B[a][k] * x(static_cast<long>(a));
        const cplx R = (bx + E[k]) / A[k];
        if (std::abs(E[k]) < 1e-8) {
            valid[k] = false;
            continue;
        }
        P[k] = R / (H[k] * E[k]);
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (valid[k]) continue;
        ++sol.interpolated_points;
        std::size_t lo = 1;
        while (lo < n && !valid[(k + n - lo) % n]) ++lo;
        std::size_t hi = 1;
        while (hi < n && !valid[(k + hi) % n]) ++hi;
        if (lo >= n) throw SingularSystem("error-sequence spectrum vanishes everywhere");
        const double t = static_cast<double>(lo) / static_cast<double>(lo + hi);
        P[k] = (1.0 - t) * P[(k + n - lo) % n] + t * P[(k + hi) % n];
    }
    const Spectrum Ps(std::move(P));
    const auto pw = from_spectrum_window(Ps, -static_cast<long>(n / 4), n / 2);
    Sequence p = real_part(pw.seq);
    sol.p_truncation = pw.outside_energy;

    const double phi = inner(pr.e, convolve(convolve(p, ch.h), pr.e)).real();
    if (!(phi > 0.0)) throw SingularSystem("FIR solution has a nonpositive detection margin");
    const double scale = 1.0 / phi;
    sol.p = p.scaled(scale);
    sol.lambda = scale;

    std::vector<cplx> qt(2 * nq + 1);
    for (std::size_t l = 1; l <= nq; ++l) {
        const double v = x(static_cast<long>(l - 1)) * scale;
        qt[nq + l] = v;
        qt[nq - l] = v;
    }
    std::vector<cplx> vt(J == 0 ? 0 : static_cast<std::size_t>(supp.back() - supp.front() + 1));
    for (std::size_t j = 0; j < J; ++j)
        vt[static_cast<std::size_t>(supp[j] - supp.front())] = x(static_cast<long>(nq + j)) * scale;
    sol.v = Sequence(J == 0 ? 0 : supp.front(), std::move(vt));

    const Sequence q0(-static_cast<long>(nq), qt);
    const Spectrum Q0 = sample_dtft(q0, n);
    const double qmin = Q0.min_real();
    const double minimal = -qmin + 1e-9 * Q0.max_abs();
    double beta = minimal;
    if (pr.beta_policy == BetaShift::NoiseMatched) {
        const double r0 = ch.h.energy();
        beta = std::max(minimal, sol.lambda * (r0 + ch.sigma_w2) / ch.sigma_w2);
    }
    sol.beta_shift = beta;
    qt[nq] = beta;
    sol.q = Sequence(-static_cast<long>(nq), std::move(qt));

    sol.constraint = inner(pr.e, convolve(convolve(sol.p, ch.h), pr.e)).real();
    sol.snr = effective_snr(sol.p, sol.q, ch, pr.e).snr;
    sol.snr_max = snr_max(ch, pr.e);
    sol.loss_db = 10.0 * std::log10(sol.snr_max / sol.snr);
    if (!pr.recover_filters) return sol;

    // Near-zero shifted spectra need a finer grid for the cepstrum to
    // converge to an L-tap factor.
    FactorOptions fo;
    fo.max_len = pr.L;
    std::size_t nf = n;
    for (;;) {
        std::vector<double> qb(nf);
        const Spectrum Qf = sample_dtft(sol.q, nf);
        for (std::size_t k = 0; k < nf; ++k) qb[k] = std::max(Qf[k].real(), 0.0);
        try {
            const auto fac = min_phase_factor(Spectrum::nonnegative(std::move(qb)), fo);
            sol.g = real_part(fac.g);
            sol.factor_residual = fac.residual;
            break;
        } catch (const TruncationError&) {
            if (nf >= (std::size_t{1} << 20)) throw;
            nf *= 4;
        }
    }
    sol.factor_grid = nf;

    const Spectrum G = sample_dtft(sol.g, n);
    std::vector<cplx> F(n);
    for (std::size_t k = 0; k < n; ++k) F[k] = sol.lambda * Ps[k] / std::conj(G[k]);
    const auto fw = from_spectrum_window(Spectrum(std::move(F)), pr.equalizer.first, pr.equalizer.length);
    sol.f = real_part(fw.seq);
    sol.equalizer_truncation = fw.outside_energy;
    return sol;
}

DesignResult FirSolution::as_design() const {
    DesignResult d;
    d.method = DesignMethod::FirOptimal;
    d.f = f;
    d.g = g;
    d.F = sample_dtft(f, grid);
    d.sigma_v2 = lambda;
    d.lambda = lambda;
    d.beta = beta_shift;
    d.equalizer_truncation = equalizer_truncation;
    d.target_length = L;
    return d;
}

std::vector<LossPoint> fir_loss_curve(const ChannelInstance& ch, const std::vector<std::size_t>& lengths,
                                      const Sequence& e) {
    if (lengths.empty()) throw ConfigError("target length list is empty");
    std::vector<LossPoint> out;
    out.reserve(lengths.size());
    for (std::size_t L : lengths) {
        FirProblem pr;
        pr.ch = ch;
        pr.L = L;
        pr.e = e;
        pr.recover_filters = false;
        const auto sol = solve_fir(pr);
        out.push_back({L, sol.loss_db, sol.snr});
    }
    return out;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double kappa_bpsk(const Sequence& e, std::size_t M, std::size_t multiplicity) {
    const std::size_t len = e.size();
    if (len == 0 || M < len) return 0.0;
    const double placements = 2.0 * static_cast<double>(M - len + 1);
    return static_cast<double>(multiplicity) * placements * std::ldexp(1.0, -static_cast<int>(hamming_weight(e)));
}

ErrorModel error_model_from_snr(const Sequence& e, double snr_eff, std::size_t M, std::size_t multiplicity) {
    ErrorModel m;
    m.e = e;
    m.snr_eff = snr_eff;
    m.kappa = kappa_bpsk(e, M, multiplicity);
    m.p_seq = m.kappa * q_function(std::sqrt(std::max(snr_eff, 0.0)));
    m.p_bit = M == 0 ? 0.0 : std::min(1.0, static_cast<double>(hamming_weight(e)) / static_cast<double>(M) * m.p_seq);
    return m;
}

ErrorModel predict_error_rates(const FirSolution& sol, const ChannelInstance& ch, const Sequence& e, std::size_t M,
                               std::size_t multiplicity) {
    return error_model_from_snr(e, effective_snr(sol.p, sol.q, ch, e).snr, M, multiplicity);
}

}  // namespace shorteq
