#include "shorteq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <sstream>
#include <thread>

#include "shorteq/errors.hpp"

namespace shorteq {

namespace fs = std::filesystem;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
            throw ConfigError("unknown " + where + " key \"" + key + "\"");
    }
}

}  // namespace

ChannelInstance ChannelSpec::at_noise(double s2, std::size_t grid) const {
    if (shaping) return ChannelInstance::make_shaped(h, s2, *shaping, mode, grid);
    return ChannelInstance::make(h, s2, mode, grid);
}

ChannelInstance ChannelSpec::at_snr(double snr_db, std::size_t grid) const {
    return at_noise(noise_for_snr_db(h, snr_db), grid);
}

ChannelSpec ChannelSpec::from_json(const json& j) {
    ChannelSpec c;
    if (j.is_string()) {
        if (j.get<std::string>() != "exp8") throw ConfigError("unknown built-in channel " + j.get<std::string>());
        return c;
    }
    if (!j.is_object() || !j.contains("h")) throw ConfigError("channel spec needs an \"h\" entry");
    reject_unknown(j, {"name", "h", "mode", "sigma_w2", "Sx"}, "channel");
    c.name = j.value("name", std::string("custom"));
    c.h = sequence_from_json(j.at("h"));
    const std::string mode = j.value("mode", std::string("real"));
    if (mode == "real") {
        c.mode = SignalMode::Real;
    } else if (mode == "complex") {
        c.mode = SignalMode::Complex;
    } else {
        throw ConfigError("channel mode must be \"real\" or \"complex\"");
    }
    if (j.contains("sigma_w2")) c.sigma_w2 = j.at("sigma_w2").get<double>();
    if (j.contains("Sx") && !(j.at("Sx").is_string() && j.at("Sx").get<std::string>() == "white")) {
        if (j.at("Sx").is_string()) throw ConfigError("Sx must be \"white\" or a shaping filter");
        c.shaping = sequence_from_json(j.at("Sx"));
    }
    if (c.h.empty()) throw ConfigError("channel response is zero");
    if (c.mode == SignalMode::Real && !c.h.is_real()) throw ConfigError("real channel has complex taps");
    return c;
}

json ChannelSpec::to_json() const {
    json j = {{"name", name}, {"h", shorteq::to_json(h)}, {"mode", mode == SignalMode::Real ? "real" : "complex"}};
    j["Sx"] = shaping ? shorteq::to_json(*shaping) : json("white");
    if (sigma_w2) j["sigma_w2"] = *sigma_w2;
    return j;
}

DesignOptions DesignSpec::options() const {
    DesignOptions o;
    o.equalizer = EqualizerWindow::centered(equalizer_length);
    return o;
}

void ExperimentConfig::validate() const {
    static const std::vector<std::string> kinds{"ber", "ser_ternary", "fir_loss", "design", "predict"};
    if (std::find(kinds.begin(), kinds.end(), experiment) == kinds.end())
        throw ConfigError("unknown experiment \"" + experiment + "\"");
    if (snr_db.empty()) throw ConfigError("snr_db list is empty");
    if (block_length == 0) throw ConfigError("block_length must be positive");
    if (min_errors < 50) throw ConfigError("min_errors must be at least 50");
    if (max_trials < block_length) throw ConfigError("max_trials must cover at least one block");
    if (batch_blocks == 0) throw ConfigError("batch_blocks must be positive");
    if (design.equalizer_length == 0) throw ConfigError("equalizer_length must be positive");
    if (design.L == 0) throw ConfigError("target length must be positive");
    if (experiment == "fir_loss" && target_lengths.empty()) throw ConfigError("target_lengths is empty");
    if (error_search_len == 0 || error_search_len > 12) throw ConfigError("error_search_len must be in 1..12");
    (void)Constellation::by_name(constellation);
    if (experiment == "ser_ternary" && constellation != "ternary")
        throw ConfigError("ser_ternary requires the ternary constellation");
    if ((experiment == "ber" || experiment == "fir_loss" || experiment == "predict") && constellation != "bpsk")
        throw ConfigError(experiment + " is defined for BPSK input");
}

json ExperimentConfig::to_json() const {
    json d = {{"method", design.method},
              {"L", design.L},
              {"equalizer_length", design.equalizer_length},
              {"beta_policy", design.beta_policy == BetaShift::Minimal ? "minimal" : "noise_matched"}};
    if (design.alpha) d["alpha"] = *design.alpha;
    if (design.beta) d["beta"] = *design.beta;
    if (design.target) d["target"] = shorteq::to_json(*design.target);
    json j = {{"experiment", experiment},
              {"channel", channel.to_json()},
              {"constellation", constellation},
              {"design", d},
              {"snr_db", snr_db},
              {"block_length", block_length},
              {"min_errors", min_errors},
              {"max_trials", max_trials},
              {"seed", seed},
              {"batch_blocks", batch_blocks},
              {"target_lengths", target_lengths},
              {"fir_loss_snr_db", fir_loss_snr_db},
              {"error_search_len", error_search_len},
              {"output", output}};
    if (full_state_limit) j["full_state_limit"] = *full_state_limit;
    return j;
}

ExperimentConfig config_from_json(const json& j, const fs::path& base) {
    ExperimentConfig c;
    try {
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        reject_unknown(j,
                       {"experiment", "channel", "constellation", "design", "snr_db", "block_length", "min_errors",
                        "max_trials", "seed", "workers", "batch_blocks", "target_lengths", "fir_loss_snr_db",
                        "error_search_len", "full_state_limit", "output"},
                       "config");
        c.experiment = j.value("experiment", c.experiment);
        if (j.contains("channel")) {
            const auto& ch = j.at("channel");
            if (ch.is_string() && ch.get<std::string>() != "exp8") {
                fs::path p = ch.get<std::string>();
                if (p.is_relative()) p = base / p;
                std::ifstream in(p);
                if (!in) throw ConfigError("cannot open channel spec " + p.string());
                json cj;
                try {
                    in >> cj;
                } catch (const json::exception& ex) {
                    throw ConfigError("bad channel spec " + p.string() + ": " + ex.what());
                }
                c.channel = ChannelSpec::from_json(cj);
            } else {
                c.channel = ChannelSpec::from_json(ch);
            }
        }
        c.constellation = j.value("constellation", c.constellation);
        if (j.contains("design")) {
            const auto& d = j.at("design");
            if (!d.is_object()) throw ConfigError("design must be an object");
            reject_unknown(d, {"method", "L", "alpha", "beta", "target", "equalizer_length", "beta_policy"}, "design");
            c.design.method = d.value("method", c.design.method);
            c.design.L = d.value("L", c.design.L);
            c.design.equalizer_length = d.value("equalizer_length", c.design.equalizer_length);
            if (d.contains("alpha")) c.design.alpha = d.at("alpha").get<double>();
            if (d.contains("beta")) c.design.beta = d.at("beta").get<double>();
            if (d.contains("target")) c.design.target = sequence_from_json(d.at("target"));
            const std::string bp = d.value("beta_policy", std::string("noise_matched"));
            if (bp == "minimal") {
                c.design.beta_policy = BetaShift::Minimal;
            } else if (bp == "noise_matched") {
                c.design.beta_policy = BetaShift::NoiseMatched;
            } else {
                throw ConfigError("beta_policy must be \"minimal\" or \"noise_matched\"");
            }
        }
        if (j.contains("snr_db")) c.snr_db = j.at("snr_db").get<std::vector<double>>();
        c.block_length = j.value("block_length", c.block_length);
        c.min_errors = j.value("min_errors", c.min_errors);
        c.max_trials = j.value("max_trials", c.max_trials);
        c.seed = j.value("seed", c.seed);
        c.workers = j.value("workers", c.workers);
        c.batch_blocks = j.value("batch_blocks", c.batch_blocks);
        if (j.contains("target_lengths")) c.target_lengths = j.at("target_lengths").get<std::vector<std::size_t>>();
        c.fir_loss_snr_db = j.value("fir_loss_snr_db", c.fir_loss_snr_db);
        c.error_search_len = j.value("error_search_len", c.error_search_len);
        if (j.contains("full_state_limit")) c.full_state_limit = j.at("full_state_limit").get<std::size_t>();
        c.output = j.value("output", c.output);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("bad config: ") + ex.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + ex.what());
    }
    return config_from_json(j, path.parent_path());
}

DesignResult build_design(const DesignSpec& spec, const ChannelInstance& ch, const Sequence& e) {
    const auto opts = spec.options();
    const std::string& m = spec.method;
    if (m == "zfe" || m == "mmse") {
        if (!spec.target) throw ConfigError(m + " needs a fixed design.target");
        return m == "zfe" ? zfe(ch, *spec.target, opts) : mmse_fixed_target(ch, *spec.target, opts);
    }
    if (m == "monic") return monic_design(ch, opts, spec.L);
    if (m == "monic_iir") return monic_design(ch, opts);
    if (m == "ape") {
        const double alpha = spec.alpha.value_or(monic_lambda(ch) / ch.sigma_w2);
        const double beta = spec.beta.value_or(ch.sigma_w2);
        return ape_family(ch, alpha, beta, opts);
    }
    if (m == "matched") return matched_filter_design(ch);
    if (m == "fir") {
        FirProblem pr;
        pr.ch = ch;
        pr.L = spec.L;
        pr.e = e;
        pr.beta_policy = spec.beta_policy;
        pr.equalizer = opts.equalizer;
        return solve_fir(pr).as_design();
    }
    throw ConfigError("unknown design method \"" + m + "\"");
}

namespace {

std::uint64_t count_errors(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
    return n;
}

unsigned resolve_workers(unsigned w) {
    if (w != 0) return w;
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

SimTally simulate_point(const ChannelInstance& ch, const Constellation& c, const std::vector<DetectorSetup>& dets,
                        const SimParams& sp) {
    const std::size_t M = sp.block_length;
    const std::size_t nd = dets.size();
    long first = 0;
    long last = static_cast<long>(M + ch.h.size()) - 2;
    for (const auto& d : dets) {
        const long fs0 = d.f.empty() ? 0 : d.f.start();
        const long fl0 = d.f.empty() ? 0 : d.f.last();
        first = std::min(first, -fl0);
        last = std::max(last, static_cast<long>(M + d.trellis.memory()) - 1 - fs0);
    }

    SimTally tally;
    tally.trials.assign(nd, 0);
    tally.errors.assign(nd, 0);
    std::vector<bool> active(nd, true);
    const unsigned workers = std::max(1u, std::min<unsigned>(resolve_workers(sp.workers),
                                                             static_cast<unsigned>(sp.batch_blocks)));
    std::uint64_t symbols = 0;
    std::uint64_t next_block = 0;

    while (symbols < sp.max_trials && std::any_of(active.begin(), active.end(), [](bool a) { return a; })) {
        const std::size_t B = sp.batch_blocks;
        std::vector<std::vector<std::uint64_t>> block_errors(B, std::vector<std::uint64_t>(nd, 0));
        std::atomic<std::size_t> cursor{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto work = [&]() {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= B) return;
                try {
                    const RngStream rng(sp.seed, (sp.point_id << 32) | (next_block + i));
                    const auto idx = draw_symbols(c, M, rng.child(0));
                    const Sequence x = symbols_to_sequence(c, idx);
                    const Sequence y = transmit(x, ch, rng.child(1), first, last);
                    for (std::size_t k = 0; k < nd; ++k) {
                        if (!active[k]) continue;
                        const Sequence z = dets[k].f.empty() ? y : equalize(y, dets[k].f);
                        const auto r = viterbi_detect(z, dets[k].trellis, M);
                        block_errors[i][k] = count_errors(r.symbol_index, idx);
                    }
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        if (workers == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);
        for (std::size_t k = 0; k < nd; ++k) {
            if (!active[k]) continue;
            for (std::size_t i = 0; i < B; ++i) tally.errors[k] += block_errors[i][k];
            tally.trials[k] += static_cast<std::uint64_t>(B) * M;
        }
        next_block += B;
        symbols += static_cast<std::uint64_t>(B) * M;
        tally.blocks = next_block;
        for (std::size_t k = 0; k < nd; ++k)
            if (tally.errors[k] >= sp.min_errors) active[k] = false;
    }
    return tally;
}

namespace {

SimParams sim_params(const ExperimentConfig& cfg, std::size_t point) {
    SimParams sp;
    sp.block_length = cfg.block_length;
    sp.min_errors = cfg.min_errors;
    sp.max_trials = cfg.max_trials;
    sp.seed = cfg.seed;
    sp.point_id = point;
    sp.workers = cfg.workers;
    sp.batch_blocks = cfg.batch_blocks;
    return sp;
}

std::size_t full_states(const Sequence& h, std::size_t alphabet) {
    double s = 1.0;
    for (std::size_t k = 1; k < h.size(); ++k) s *= static_cast<double>(alphabet);
    return s > 1e18 ? SIZE_MAX : static_cast<std::size_t>(s);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentReport run_ber(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Constellation c = Constellation::by_name(cfg.constellation);
    ExperimentReport rep;
    rep.experiment = "ber";
    rep.seed = cfg.seed;
    rep.artifacts["points"] = json::array();

    const std::size_t limit = cfg.full_state_limit.value_or(256);
    const bool with_full = full_states(cfg.channel.h, c.size()) <= limit;

    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        const double snr = cfg.snr_db[i];
        const ChannelInstance ch = cfg.channel.at_snr(snr);
        const auto dom = dominant_error_search(ch, cfg.error_search_len);
        const auto opts = cfg.design.options();

        const DesignResult monic = monic_design(ch, opts, cfg.design.L);
        FirProblem pr;
        pr.ch = ch;
        pr.L = cfg.design.L;
        pr.e = dom.e;
        pr.beta_policy = cfg.design.beta_policy;
        pr.equalizer = opts.equalizer;
        const FirSolution fir = solve_fir(pr);

        std::vector<DetectorSetup> dets;
        std::vector<std::optional<double>> predicted;
        dets.push_back({"monic", monic.f, Trellis(c, monic.g, 0.0)});
        predicted.push_back(score_design(monic, ch, dom.e, cfg.block_length, dom.multiplicity).model.p_bit);
        dets.push_back({"fir", fir.f, Trellis(c, fir.g, 0.0)});
        predicted.push_back(predict_error_rates(fir, ch, dom.e, cfg.block_length, dom.multiplicity).p_bit);
        if (with_full) {
            dets.push_back({"full", Sequence{}, Trellis(c, ch.h, 0.0)});
            predicted.push_back(
                error_model_from_snr(dom.e, snr_max(ch, dom.e), cfg.block_length, dom.multiplicity).p_bit);
        }

        const auto tally = simulate_point(ch, c, dets, sim_params(cfg, i));
        for (std::size_t k = 0; k < dets.size(); ++k)
            rep.rows.push_back({dets[k].name, snr, make_point(tally.errors[k], tally.trials[k], cfg.min_errors),
                                predicted[k]});

        rep.artifacts["points"].push_back({{"snr_db", snr},
                                           {"sigma_w2", ch.sigma_w2},
                                           {"dominant_error", to_json(dom)},
                                           {"monic", to_json(monic)},
                                           {"fir", to_json(fir)},
                                           {"blocks", tally.blocks}});
    }
    rep.artifacts["full_detector"] = with_full;
    rep.runtime_s = seconds_since(t0);
    return rep;
}

ExperimentReport run_ser_ternary(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const Constellation c = Constellation::ternary();
    ExperimentReport rep;
    rep.experiment = "ser_ternary";
    rep.seed = cfg.seed;
    rep.artifacts["points"] = json::array();

    const std::size_t limit = cfg.full_state_limit.value_or(6561);
    const bool with_full = full_states(cfg.channel.h, c.size()) <= limit;

    for (std::size_t i = 0; i < cfg.snr_db.size(); ++i) {
        const double snr = cfg.snr_db[i];
        const ChannelInstance ch = cfg.channel.at_snr(snr);
        const DesignResult monic = monic_design(ch, cfg.design.options(), cfg.design.L);
        const double corr = monic.correction_coefficient();

        std::vector<DetectorSetup> dets;
        dets.push_back({"corrected", monic.f, Trellis(c, monic.g, corr)});
        dets.push_back({"uncorrected", monic.f, Trellis(c, monic.g, 0.0)});
        if (with_full) dets.push_back({"full", Sequence{}, Trellis(c, ch.h, 0.0)});

        const auto tally = simulate_point(ch, c, dets, sim_params(cfg, i));
        for (std::size_t k = 0; k < dets.size(); ++k)
            rep.rows.push_back(
                {dets[k].name, snr, make_point(tally.errors[k], tally.trials[k], cfg.min_errors), std::nullopt});

        rep.artifacts["points"].push_back({{"snr_db", snr},
                                           {"sigma_w2", ch.sigma_w2},
                                           {"monic", to_json(monic)},
                                           {"correction", corr},
                                           {"blocks", tally.blocks}});
    }
    rep.artifacts["full_detector"] = with_full;
    rep.runtime_s = seconds_since(t0);
    return rep;
}

ExperimentReport run_fir_loss(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.experiment = "fir_loss";
    rep.seed = cfg.seed;
    const ChannelInstance ch = cfg.channel.at_snr(cfg.fir_loss_snr_db);
    const auto dom = dominant_error_search(ch, cfg.error_search_len);
    rep.loss = fir_loss_curve(ch, cfg.target_lengths, dom.e);
    rep.artifacts["snr_db"] = cfg.fir_loss_snr_db;
    rep.artifacts["sigma_w2"] = ch.sigma_w2;
    rep.artifacts["dominant_error"] = to_json(dom);
    rep.artifacts["snr_max"] = snr_max(ch, dom.e);
    rep.runtime_s = seconds_since(t0);
    return rep;
}

ExperimentReport run_predict(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport rep;
    rep.experiment = "predict";
    rep.seed = cfg.seed;
    rep.artifacts["points"] = json::array();
    for (double snr : cfg.snr_db) {
        const ChannelInstance ch = cfg.channel.at_snr(snr);
        const auto dom = dominant_error_search(ch, cfg.error_search_len);
        const DesignResult d = build_design(cfg.design, ch, dom.e);
        const auto scored = score_design(d, ch, dom.e, cfg.block_length, dom.multiplicity);
        ReportRow row{cfg.design.method, snr, SimulatedPoint{}, scored.model.p_bit};
        row.sim.censored = true;
        rep.rows.push_back(row);
        rep.artifacts["points"].push_back({{"snr_db", snr}, {"model", to_json(scored.model)}});
    }
    rep.runtime_s = seconds_since(t0);
    return rep;
}

json run_design(const ExperimentConfig& cfg) {
    cfg.validate();
    json out = json::array();
    for (double snr : cfg.snr_db) {
        const ChannelInstance ch = cfg.channel.at_snr(snr);
        json entry = {{"snr_db", snr}, {"sigma_w2", ch.sigma_w2}};
        Sequence e = Sequence::delta();
        if (ch.mode() == SignalMode::Real) {
            const auto dom = dominant_error_search(ch, cfg.error_search_len);
            e = dom.e;
            entry["dominant_error"] = to_json(dom);
        }
        if (cfg.design.method == "fir") {
            FirProblem pr;
            pr.ch = ch;
            pr.L = cfg.design.L;
            pr.e = e;
            pr.beta_policy = cfg.design.beta_policy;
            pr.equalizer = cfg.design.options().equalizer;
            const auto sol = solve_fir(pr);
            entry["fir"] = to_json(sol);
            entry["design"] = to_json(sol.as_design());
        } else {
            entry["design"] = to_json(build_design(cfg.design, ch, e));
        }
        out.push_back(entry);
    }
    return out;
}

std::vector<std::string> ExperimentReport::detectors() const {
    std::vector<std::string> names;
    for (const auto& r : rows)
        if (std::find(names.begin(), names.end(), r.detector) == names.end()) names.push_back(r.detector);
    return names;
}

std::vector<ReportRow> ExperimentReport::rows_for(const std::string& detector) const {
    std::vector<ReportRow> out;
    for (const auto& r : rows)
        if (r.detector == detector) out.push_back(r);
    return out;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string rate_csv(const ExperimentReport& r, const std::string& detector) {
    std::ostringstream os;
    os << kRateCsvHeader << '\n';
    for (const auto& row : r.rows_for(detector)) {
        os << num(row.snr_db) << ',' << row.sim.trials << ',' << row.sim.errors << ',';
        if (row.sim.trials > 0) os << num(row.sim.rate) << ',' << num(row.sim.ci.lo) << ',' << num(row.sim.ci.hi);
        else os << ",,";
        os << ',';
        if (row.predicted) os << num(*row.predicted);
        os << '\n';
    }
    return os.str();
}

std::string loss_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os << "L,loss_db\n";
    for (const auto& p : r.loss) os << p.L << ',' << num(p.loss_db) << '\n';
    return os.str();
}

json sidecar(const ExperimentReport& r, const ExperimentConfig& cfg) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"detector", row.detector},
                        {"snr_db", row.snr_db},
                        {"trials", row.sim.trials},
                        {"errors", row.sim.errors},
                        {"rate", row.sim.rate},
                        {"ci_lo", row.sim.ci.lo},
                        {"ci_hi", row.sim.ci.hi},
                        {"censored", row.sim.censored},
                        {"predicted", row.predicted ? json(*row.predicted) : json(nullptr)}});
    }
    json loss = json::array();
    for (const auto& p : r.loss) loss.push_back({{"L", p.L}, {"loss_db", p.loss_db}, {"snr", p.snr}});
    return {{"experiment", r.experiment},
            {"seed", r.seed},
            {"config", cfg.to_json()},
            {"rows", rows},
            {"loss", loss},
            {"artifacts", r.artifacts},
            {"runtime_s", r.runtime_s}};
}

std::vector<fs::path> write_report(const ExperimentReport& r, const ExperimentConfig& cfg, const fs::path& stem) {
    std::vector<fs::path> written;
    if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
    auto emit = [&](const fs::path& p, const std::string& text) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw ConfigError("cannot write " + p.string());
        out << text;
        written.push_back(p);
    };
    if (r.experiment == "fir_loss") {
        emit(fs::path(stem.string() + ".csv"), loss_csv(r));
    } else {
        for (const auto& d : r.detectors()) emit(fs::path(stem.string() + "_" + d + ".csv"), rate_csv(r, d));
    }
    emit(fs::path(stem.string() + ".json"), sidecar(r, cfg).dump(2) + "\n");
    return written;
}

}  // namespace shorteq
