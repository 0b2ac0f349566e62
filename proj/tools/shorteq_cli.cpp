#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "shorteq/errors.hpp"
#include "shorteq/harness.hpp"

namespace fs = std::filesystem;
using namespace shorteq;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
};

ExperimentConfig resolve(const std::string& kind, const Common& c) {
    json j = json::object();
    fs::path base;
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        if (!in) throw ConfigError("cannot open config " + c.config);
        try {
            in >> j;
        } catch (const json::exception& ex) {
            throw ConfigError("config " + c.config + " is not valid JSON: " + ex.what());
        }
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        base = fs::path(c.config).parent_path();
    }
    j["experiment"] = kind;
    if (kind == "ser_ternary" && !j.contains("constellation")) j["constellation"] = "ternary";
    ExperimentConfig cfg = config_from_json(j, base);
    if (c.seed) cfg.seed = *c.seed;
    if (c.workers) cfg.workers = *c.workers;
    if (!c.out.empty()) cfg.output = c.out;
    cfg.validate();
    return cfg;
}

fs::path stem_of(const std::string& out) {
    fs::path p(out);
    if (p.extension() == ".csv" || p.extension() == ".json") p.replace_extension();
    return p;
}

void emit(const ExperimentReport& r, const ExperimentConfig& cfg) {
    if (!cfg.output.empty()) {
        for (const auto& f : write_report(r, cfg, stem_of(cfg.output))) std::cerr << "wrote " << f.string() << '\n';
        return;
    }
    if (r.experiment == "fir_loss") {
        std::cout << loss_csv(r);
        return;
    }
    for (const auto& d : r.detectors()) std::cout << "# " << d << '\n' << rate_csv(r, d);
}

int run(const std::string& kind, const Common& c) {
    const ExperimentConfig cfg = resolve(kind, c);
    if (kind == "design") {
        const std::string text = run_design(cfg).dump(2) + "\n";
        if (cfg.output.empty()) {
            std::cout << text;
        } else {
            fs::path p(cfg.output);
            if (p.extension() != ".json") p += ".json";
            if (p.has_parent_path()) fs::create_directories(p.parent_path());
            std::ofstream(p) << text;
            std::cerr << "wrote " << p.string() << '\n';
        }
        return 0;
    }
    ExperimentReport r;
    if (kind == "ber") r = run_ber(cfg);
    else if (kind == "ser_ternary") r = run_ser_ternary(cfg);
    else if (kind == "fir_loss") r = run_fir_loss(cfg);
    else r = run_predict(cfg);
    emit(r, cfg);
    std::cerr << "runtime " << r.runtime_s << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel shortening equalizer design and detection experiments"};
    app.require_subcommand(1);

    Common common;
    const std::pair<const char*, const char*> commands[] = {
        {"design", "emit the designed equalizer/target pairs as JSON"},
        {"fir-loss", "FIR approximation loss against target length"},
        {"ber", "binary BER of the monic, FIR and full-complexity detectors"},
        {"ser-ternary", "ternary SER with and without the prior correction term"},
        {"predict", "effective-SNR error rate predictions only"},
    };
    std::string chosen;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", common.config, "experiment config (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "override the config seed");
        sub->add_option("--workers", common.workers, "worker threads (0 = hardware concurrency)");
        sub->add_option("--out", common.out, "output stem; CSV and JSON sidecar are written next to it");
        sub->callback([&chosen, n = std::string(name)] { chosen = n; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    std::string kind = chosen;
    for (auto& ch : kind)
        if (ch == '-') ch = '_';
    try {
        return run(kind, common);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
