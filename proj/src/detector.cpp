#include "shorteq/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "shorteq/errors.hpp"

namespace shorteq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool metric_tie(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

Trellis::Trellis(Constellation c, Sequence g, double lambda_corr)
    : c_(std::move(c)), g_(std::move(g)), lambda_(lambda_corr) {
    if (c_.size() == 0 || c_.size() > 255) throw ConfigError("constellation size must be in 1..255");
    if (g_.empty() || g_.start() < 0) throw ConfigError("trellis target must be causal and nonzero");
    g_taps_ = g_.window(0, static_cast<std::size_t>(g_.end()));
    const std::size_t q = c_.size();
    for (std::size_t k = 1; k < g_taps_.size(); ++k) {
        if (states_ > (std::size_t{1} << 24) / q) throw TooLarge("trellis state count exceeds 2^24");
        states_ *= q;
    }
    out_.resize(states_ * q);
    for (std::size_t s = 0; s < states_; ++s) {
        cplx past{};
        std::size_t r = s;
        for (std::size_t k = 1; k < g_taps_.size(); ++k) {
            past += g_taps_[k] * c_.symbols[r % q];
            r /= q;
        }
        for (std::size_t u = 0; u < q; ++u) out_[s * q + u] = past + g_taps_[0] * c_.symbols[u];
    }
}

double path_metric(std::span<const cplx> z, const Sequence& g, std::span<const cplx> x, double lambda_corr) {
    const std::size_t m = x.size();
    const std::size_t len = static_cast<std::size_t>(std::max(g.end(), 1L));
    double acc = 0.0;
    for (std::size_t n = 0; n + 1 < m + len; ++n) {
        cplx y{};
        for (std::size_t k = 0; k < len && k <= n; ++k)
            if (n - k < m) y += g.at(static_cast<long>(k)) * x[n - k];
        const cplx zn = n < z.size() ? z[n] : cplx{};
        acc += std::norm(zn - y);
    }
    for (const auto& v : x) acc -= lambda_corr * std::norm(v);
    return acc;
}

struct ViterbiRunner {
    ViterbiRunner(const Trellis& tr, std::span<const cplx> zs, std::size_t m)
        : t(tr), z(zs), M(m), q(tr.c_.size()), mem(tr.memory()), S(tr.states_), top(S / q) {}

    const Trellis& t;
    std::span<const cplx> z;
    std::size_t M;
    std::size_t q;
    std::size_t mem;
    std::size_t S;
    std::size_t top;  // weight of the oldest digit
    std::vector<std::uint8_t> surv;  // oldest digit of the chosen predecessor
    std::vector<double> cur, next;
    std::size_t ties = 0;

    // Output with symbols before time 0 masked to zero.
    cplx head_output(std::size_t s, std::size_t u, std::size_t time) const {
        cplx y = t.g_taps_[0] * t.c_.symbols[u];
        std::size_t r = s;
        for (std::size_t k = 1; k <= mem; ++k) {
            if (k <= time) y += t.g_taps_[k] * t.c_.symbols[r % q];
            r /= q;
        }
        return y;
    }

    // Cost of samples M..M+L-2 given the last mem symbols in s.
    double tail_cost(std::size_t s) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < mem; ++j) {
            const std::size_t n = M + j;
            cplx y{};
            std::size_t r = s;
            for (std::size_t d = 1; d <= mem; ++d) {
                // digit d holds x_{M-d}; it reaches sample n through g_{n-M+d}
                const std::size_t k = j + d;
                if (k <= mem && d <= M) y += t.g_taps_[k] * t.c_.symbols[r % q];
                r /= q;
            }
            acc += std::norm(z[n] - y);
        }
        return acc;
    }

    // Symbol sequence of the survivor ending in state s at time `time`
    // (inclusive), earliest first.
    void trace(std::size_t s, std::size_t time, std::vector<std::size_t>& out) const {
        out.assign(time + 1, 0);
        for (std::size_t k = time + 1; k-- > 0;) {
            out[k] = s % q;
            s = s / q + top * surv[k * S + s];
        }
    }

    // true when the path through predecessor a is lexicographically smaller
    // than the one through b, both entering the same state at `time`.
    bool lex_less(std::size_t a, std::size_t b, std::size_t time) const {
        int verdict = 0;
        for (std::size_t k = time; k-- > 0 && a != b;) {
            const std::size_t xa = a % q;
            const std::size_t xb = b % q;
            if (xa != xb) verdict = xa < xb ? -1 : 1;
            a = a / q + top * surv[k * S + a];
            b = b / q + top * surv[k * S + b];
        }
        return verdict < 0;
    }

    // Memoryless target: every sample is decided on its own.
    DetectionResult run_memoryless() {
        DetectionResult r;
        r.symbol_index.assign(M, 0);
        for (std::size_t time = 0; time < M; ++time) {
            double best = kInf;
            for (std::size_t u = 0; u < q; ++u) {
                const double m = std::norm(z[time] - t.output(0, u)) - t.lambda_ * std::norm(t.c_.symbols[u]);
                if (best == kInf || (m < best && !metric_tie(m, best))) {
                    best = m;
                    r.symbol_index[time] = u;
                } else if (metric_tie(m, best)) {
                    ++r.ties_broken;
                }
            }
        }
        std::vector<cplx> xs(M);
        for (std::size_t k = 0; k < M; ++k) xs[k] = t.c_.symbols[r.symbol_index[k]];
        r.path_metric = path_metric(z.first(M), t.g_, xs, t.lambda_);
        r.x_hat = Sequence(0, std::move(xs));
        return r;
    }

    DetectionResult run() {
        if (mem == 0) return run_memoryless();
        surv.assign(M * S, 0);
        cur.assign(S, kInf);
        next.assign(S, kInf);
        cur[0] = 0.0;
        for (std::size_t time = 0; time < M; ++time) {
            const cplx zn = z[time];
            const bool head = time < mem;
            std::fill(next.begin(), next.end(), kInf);
            for (std::size_t sn = 0; sn < S; ++sn) {
                const std::size_t u = sn % q;
                const double prior = t.lambda_ * std::norm(t.c_.symbols[u]);
                double best = kInf;
                std::size_t best_d = 0;
                for (std::size_t d = 0; d < q; ++d) {
                    const std::size_t sp = sn / q + top * d;
                    if (top == 0 && d > 0) break;
                    const std::size_t spp = top == 0 ? 0 : sp;
                    const double m0 = cur[spp];
                    if (m0 == kInf) continue;
                    const cplx y = head ? head_output(spp, u, time) : t.output(spp, u);
                    const double m = m0 + std::norm(zn - y) - prior;
                    if (best == kInf || (m < best && !metric_tie(m, best))) {
                        best = m;
                        best_d = d;
                    } else if (metric_tie(m, best)) {
                        ++ties;
                        const std::size_t sb = top == 0 ? 0 : sn / q + top * best_d;
                        if (time > 0 && lex_less(spp, sb, time)) {
                            best = std::min(best, m);
                            best_d = d;
                        }
                    }
                }
                next[sn] = best;
                surv[time * S + sn] = static_cast<std::uint8_t>(best_d);
            }
            std::swap(cur, next);
        }

        double best = kInf;
        std::size_t best_s = 0;
        std::vector<std::size_t> pa, pb;
        for (std::size_t s = 0; s < S; ++s) {
            if (cur[s] == kInf) continue;
            const double m = cur[s] + tail_cost(s);
            if (best == kInf || (m < best && !metric_tie(m, best))) {
                best = m;
                best_s = s;
            } else if (metric_tie(m, best)) {
                ++ties;
                trace(s, M - 1, pa);
                trace(best_s, M - 1, pb);
                if (pa < pb) {
                    best = std::min(best, m);
                    best_s = s;
                }
            }
        }
        DetectionResult r;
        trace(best_s, M - 1, r.symbol_index);
        std::vector<cplx> xs(M);
        for (std::size_t k = 0; k < M; ++k) xs[k] = t.c_.symbols[r.symbol_index[k]];
        r.path_metric = path_metric(z.first(M + mem), t.g_, xs, t.lambda_);
        r.x_hat = Sequence(0, std::move(xs));
        r.ties_broken = ties;
        return r;
    }
};

DetectionResult viterbi_detect(std::span<const cplx> z, const Trellis& t, std::size_t M) {
    if (M == 0) throw ConfigError("message length must be positive");
    if (z.size() < M + t.memory())
        throw LengthMismatch("detector needs " + std::to_string(M + t.memory()) + " samples, got " +
                             std::to_string(z.size()));
    ViterbiRunner runner(t, z, M);
    return runner.run();
}

DetectionResult viterbi_detect(const Sequence& z, const Trellis& t, std::size_t M) {
    const auto w = z.window(0, M + t.memory());
    return viterbi_detect(std::span<const cplx>(w), t, M);
}

DetectionResult brute_force_map(const Sequence& z, const Sequence& filt, std::size_t M, const Constellation& c,
                                double lambda_corr) {
    const std::size_t q = c.size();
    if (M == 0) throw ConfigError("message length must be positive");
    double total = 1.0;
    for (std::size_t i = 0; i < M; ++i) total *= static_cast<double>(q);
    if (total > static_cast<double>(1 << 20)) throw TooLarge("brute-force search exceeds 2^20 candidates");

    // Residual z - filt * x is tracked on [lo, hi).
    const long lo = std::min(z.empty() ? 0L : z.start(), filt.start());
    const long hi = std::max(z.empty() ? 0L : z.end(), filt.end() + static_cast<long>(M) - 1);
    const std::size_t span = static_cast<std::size_t>(hi - lo);
    const auto zw = z.window(lo, span);
    const auto fw = filt.taps();

    std::vector<std::size_t> idx(M, 0);
    DetectionResult r;
    r.path_metric = kInf;
    std::vector<cplx> resid(span);
    std::vector<cplx> x(M);
    for (;;) {
        for (std::size_t i = 0; i < M; ++i) x[i] = c.symbols[idx[i]];
        resid = zw;
        double energy = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            energy += std::norm(x[i]);
            const std::size_t off = static_cast<std::size_t>(filt.start() + static_cast<long>(i) - lo);
            for (std::size_t k = 0; k < fw.size(); ++k) resid[off + k] -= fw[k] * x[i];
        }
        double m = -lambda_corr * energy;
        for (const auto& v : resid) m += std::norm(v);
        if (r.path_metric == kInf || (m < r.path_metric && !metric_tie(m, r.path_metric))) {
            r.path_metric = m;
            r.symbol_index = idx;
        } else if (metric_tie(m, r.path_metric)) {
            ++r.ties_broken;
        }
        std::size_t k = M;
        while (k > 0 && ++idx[k - 1] == q) idx[--k] = 0;
        if (k == 0) break;
    }
    std::vector<cplx> xs(M);
    for (std::size_t i = 0; i < M; ++i) xs[i] = c.symbols[r.symbol_index[i]];
    r.x_hat = Sequence(0, std::move(xs));
    return r;
}

}  // namespace shorteq
