#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "shorteq/channel.hpp"
#include "shorteq/classic_eq.hpp"
#include "shorteq/detector.hpp"
#include "shorteq/error_model.hpp"
#include "shorteq/fir_design.hpp"
#include "shorteq/serialize.hpp"

namespace shorteq {

struct ChannelSpec {
    std::string name = "exp8";
    Sequence h = exp8_channel();
    SignalMode mode = SignalMode::Real;
    std::optional<Sequence> shaping;
    std::optional<double> sigma_w2;

    /// SNR convention ||h||^2 / sigma_w^2.
    ChannelInstance at_snr(double snr_db, std::size_t grid = kDefaultGrid) const;
    ChannelInstance at_noise(double sigma_w2, std::size_t grid = kDefaultGrid) const;

    /// {"h": Sequence, "sigma_w2": real, "mode": "real"|"complex", "Sx": "white"|taps}.
    static ChannelSpec from_json(const json& j);
    json to_json() const;
};

struct DesignSpec {
    std::string method = "fir";  ///< zfe, mmse, monic, monic_iir, ape, matched, fir
    std::size_t L = 3;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<Sequence> target;  ///< fixed target for zfe / mmse
    std::size_t equalizer_length = 21;
    BetaShift beta_policy = BetaShift::NoiseMatched;

    DesignOptions options() const;
};

struct ExperimentConfig {
    std::string experiment = "ber";
    ChannelSpec channel;
    std::string constellation = "bpsk";
    DesignSpec design;
    std::vector<double> snr_db{8.0, 10.0, 12.0};
    std::size_t block_length = 10000;
    std::uint64_t min_errors = 100;
    std::uint64_t max_trials = 20'000'000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::size_t batch_blocks = 4;
    std::vector<std::size_t> target_lengths{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    double fir_loss_snr_db = 10.0;
    std::size_t error_search_len = 8;
    std::optional<std::size_t> full_state_limit;
    std::string output;

    void validate() const;
    json to_json() const;
};

/// Parses a config; relative channel paths resolve against `base`.
ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Design named by `spec` on `ch`; `e` is used by the FIR solver.
DesignResult build_design(const DesignSpec& spec, const ChannelInstance& ch, const Sequence& e);

struct DetectorSetup {
    std::string name;
    Sequence f;  ///< empty: detect directly on y
    Trellis trellis;
};

struct SimParams {
    std::size_t block_length = 10000;
    std::uint64_t min_errors = 100;
    std::uint64_t max_trials = 20'000'000;
    std::uint64_t seed = 1;
    std::uint64_t point_id = 0;
    unsigned workers = 1;
    std::size_t batch_blocks = 4;
};

struct SimTally {
    std::vector<std::uint64_t> trials;
    std::vector<std::uint64_t> errors;
    std::uint64_t blocks = 0;
};

/// Block Monte Carlo: block b uses stream (point_id << 32) | b, so tallies
/// depend only on (seed, point_id) and not on the worker count. Each
/// detector stops once it has min_errors; the point stops when all have or
/// max_trials symbols were simulated.
SimTally simulate_point(const ChannelInstance& ch, const Constellation& c, const std::vector<DetectorSetup>& dets,
                        const SimParams& params);

struct ReportRow {
    std::string detector;
    double snr_db = 0.0;
    SimulatedPoint sim;
    std::optional<double> predicted;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    std::vector<LossPoint> loss;
    json artifacts = json::object();
    double runtime_s = 0.0;

    std::vector<std::string> detectors() const;
    std::vector<ReportRow> rows_for(const std::string& detector) const;
};

ExperimentReport run_ber(const ExperimentConfig& cfg);
ExperimentReport run_ser_ternary(const ExperimentConfig& cfg);
ExperimentReport run_fir_loss(const ExperimentConfig& cfg);
ExperimentReport run_predict(const ExperimentConfig& cfg);
json run_design(const ExperimentConfig& cfg);

inline constexpr const char* kRateCsvHeader = "snr_db,trials,errors,rate,ci_lo,ci_hi,predicted";

std::string rate_csv(const ExperimentReport& r, const std::string& detector);
std::string loss_csv(const ExperimentReport& r);
json sidecar(const ExperimentReport& r, const ExperimentConfig& cfg);

/// Writes <stem>_<detector>.csv per detector (or <stem>.csv for a loss
/// sweep) plus the <stem>.json sidecar. Returns the files written.
std::vector<std::filesystem::path> write_report(const ExperimentReport& r, const ExperimentConfig& cfg,
                                                const std::filesystem::path& stem);

}  // namespace shorteq
