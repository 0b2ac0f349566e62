#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "shorteq/errors.hpp"
#include "shorteq/harness.hpp"

using namespace shorteq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("shorteq_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig small_ber() {
    return config_from_json(json::parse(R"({
        "experiment": "ber", "snr_db": [6, 8], "block_length": 400,
        "min_errors": 50, "max_trials": 40000, "seed": 11, "batch_blocks": 3
    })"));
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("config defaults and round trip") {
    const auto c = config_from_json(json::object());
    CHECK(c.experiment == "ber");
    CHECK(c.channel.name == "exp8");
    CHECK(c.channel.h.size() == 9);
    CHECK(c.design.L == 3);
    CHECK(c.block_length == 10000);
    CHECK(c.min_errors >= 50);

    auto j = c.to_json();
    j["seed"] = 99;
    j["design"]["beta_policy"] = "minimal";
    const auto back = config_from_json(j);
    CHECK(back.seed == 99);
    CHECK(back.design.beta_policy == BetaShift::Minimal);
    CHECK(max_abs_diff(back.channel.h, c.channel.h) == 0.0);
    CHECK(back.snr_db == c.snr_db);
}

TEST_CASE("channel spec from a file relative to the config") {
    const auto dir = scratch_dir("channel");
    std::ofstream(dir / "short.json") << R"({"name": "two", "h": [1.0, 0.5], "mode": "real"})";
    std::ofstream(dir / "cfg.json") << R"({"experiment": "fir_loss", "channel": "short.json", "target_lengths": [2]})";
    const auto c = load_config(dir / "cfg.json");
    CHECK(c.channel.name == "two");
    CHECK(c.channel.h.size() == 2);
    const auto ch = c.channel.at_snr(10.0);
    CHECK(ch.sigma_w2 == doctest::Approx(1.25 / 10.0));
    CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
    std::ofstream(dir / "bad.json") << R"({"channel": "nowhere.json"})";
    CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
    std::ofstream(dir / "broken.json") << "{not json";
    CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);
}

TEST_CASE("invalid configs are rejected") {
    const char* bad[] = {
        R"({"snr_db": []})",
        R"({"min_errors": 20})",
        R"({"experiment": "plot"})",
        R"({"experiment": "ser_ternary", "constellation": "bpsk"})",
        R"({"constellation": "ternary"})",
        R"({"block_length": "long"})",
        R"({"design": {"beta_policy": "huge"}})",
        R"({"channel": {"taps": [1]}})",
        R"({"channel": {"h": [1, 0.5], "mode": "imaginary"}})",
        R"({"channel": "fancy"})",
        R"([1, 2, 3])",
        R"({"snr": [10]})",
        R"({"design": {"lenght": 3}})",
        R"({"channel": {"h": [1, 0.5], "sigma": 0.1}})",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(config_from_json(json::parse(text)), ConfigError);
    }
}

TEST_CASE("design construction for every method") {
    auto cfg = config_from_json(json::parse(R"({"experiment": "design", "design": {"target": [1, 0.5]}})"));
    const auto ch = cfg.channel.at_snr(10.0);
    const Sequence e(0, {1.0, -1.0});
    for (const char* m : {"zfe", "mmse", "monic", "monic_iir", "ape", "matched", "fir"}) {
        cfg.design.method = m;
        CAPTURE(m);
        const auto d = build_design(cfg.design, ch, e);
        CHECK_FALSE(d.g.empty());
        CHECK_FALSE(d.f.empty());
    }
    cfg.design.method = "wiener";
    CHECK_THROWS_AS(build_design(cfg.design, ch, e), ConfigError);
    cfg.design.method = "zfe";
    cfg.design.target.reset();
    CHECK_THROWS_AS(build_design(cfg.design, ch, e), ConfigError);
}

TEST_CASE("ber runs are deterministic across worker counts") {
    auto cfg = small_ber();
    cfg.workers = 1;
    const auto a = run_ber(cfg);
    cfg.workers = 3;
    const auto b = run_ber(cfg);
    REQUIRE(a.detectors() == b.detectors());
    CHECK(a.detectors() == std::vector<std::string>{"monic", "fir", "full"});
    for (const auto& d : a.detectors()) {
        const std::string ca = rate_csv(a, d);
        CHECK(ca == rate_csv(b, d));
        CHECK(first_line(ca) == kRateCsvHeader);
    }
    CHECK(sidecar(a, cfg)["rows"] == sidecar(b, cfg)["rows"]);

    cfg.seed = 12;
    const auto c = run_ber(cfg);
    CHECK(rate_csv(a, "monic") != rate_csv(c, "monic"));
}

TEST_CASE("ber report contents") {
    const auto cfg = small_ber();
    const auto r = run_ber(cfg);
    for (const auto& row : r.rows) {
        CAPTURE(row.detector);
        CHECK(row.sim.trials % cfg.block_length == 0);
        CHECK(row.sim.trials <= cfg.max_trials + cfg.batch_blocks * cfg.block_length);
        CHECK(row.sim.ci.lo <= row.sim.rate);
        CHECK(row.sim.ci.hi >= row.sim.rate);
        CHECK(row.sim.censored == (row.sim.errors < cfg.min_errors));
        REQUIRE(row.predicted.has_value());
        CHECK(*row.predicted > 0.0);
    }
    // Full-complexity detection is the optimum; its CI cannot sit above the shortened ones.
    for (double snr : cfg.snr_db) {
        for (const auto& full : r.rows_for("full")) {
            if (full.snr_db != snr) continue;
            for (const auto& other : r.rows)
                if (other.snr_db == snr && other.detector != "full") CHECK(full.sim.ci.lo <= other.sim.ci.hi);
        }
    }
    CHECK(r.artifacts["points"].size() == cfg.snr_db.size());

    auto no_full = cfg;
    no_full.full_state_limit = 128;
    CHECK(run_ber(no_full).detectors() == std::vector<std::string>{"monic", "fir"});
}

TEST_CASE("ternary run uses the monic lambda as correction") {
    const auto cfg = config_from_json(json::parse(R"({
        "experiment": "ser_ternary", "constellation": "ternary", "snr_db": [4],
        "block_length": 300, "min_errors": 50, "max_trials": 3000, "full_state_limit": 1
    })"));
    const auto r = run_ser_ternary(cfg);
    CHECK(r.detectors() == std::vector<std::string>{"corrected", "uncorrected"});
    const auto ch = cfg.channel.at_snr(4.0);
    const auto monic = monic_design(ch, cfg.design.options(), cfg.design.L);
    CHECK(r.artifacts["points"][0]["correction"].get<double>() == doctest::Approx(*monic.lambda).epsilon(1e-12));
}

TEST_CASE("fir loss sweep") {
    const auto cfg = config_from_json(json::parse(R"({"experiment": "fir_loss", "target_lengths": [2, 3, 4, 6, 9, 12]})"));
    const auto r = run_fir_loss(cfg);
    REQUIRE(r.loss.size() == 6);
    for (std::size_t i = 1; i < r.loss.size(); ++i) CHECK(r.loss[i].loss_db <= r.loss[i - 1].loss_db + 1e-6);
    CHECK(std::abs(r.loss[1].loss_db - 0.075) <= 0.02);
    CHECK(r.loss.back().loss_db < 1e-3);
    const std::string csv = loss_csv(r);
    CHECK(first_line(csv) == "L,loss_db");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("predict and design experiments") {
    auto cfg = config_from_json(json::parse(R"({"experiment": "predict", "snr_db": [8, 10, 12]})"));
    const auto p = run_predict(cfg);
    REQUIRE(p.rows.size() == 3);
    for (std::size_t i = 1; i < p.rows.size(); ++i) CHECK(*p.rows[i].predicted < *p.rows[i - 1].predicted);

    cfg.experiment = "design";
    const json d = run_design(cfg);
    REQUIRE(d.is_array());
    CHECK(d.size() == 3);
    CHECK(d[0].contains("fir"));
    CHECK(d[0]["design"].contains("g"));
}

TEST_CASE("reports are written as csv plus sidecar") {
    const auto dir = scratch_dir("report");
    auto cfg = small_ber();
    cfg.snr_db = {6};
    const auto r = run_ber(cfg);
    const auto files = write_report(r, cfg, dir / "run");
    CHECK(files.size() == 4);
    for (const auto& f : files) CHECK(fs::exists(f));
    CHECK(fs::exists(dir / "run_monic.csv"));
    std::ifstream in(dir / "run.json");
    const json side = json::parse(in);
    CHECK(side["seed"] == cfg.seed);
    CHECK(side.contains("config"));
    CHECK(side.contains("artifacts"));
    std::ifstream csv(dir / "run_fir.csv");
    std::stringstream ss;
    ss << csv.rdbuf();
    CHECK(ss.str() == rate_csv(r, "fir"));
}
