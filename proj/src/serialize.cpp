#include "shorteq/serialize.hpp"

#include "shorteq/errors.hpp"

namespace shorteq {

json to_json(const Sequence& s) {
    json re = json::array();
    json im = json::array();
    for (const auto& t : s.taps()) {
        re.push_back(t.real());
        im.push_back(t.imag());
    }
    return {{"start", s.start()}, {"re", re}, {"im", im}};
}

Sequence sequence_from_json(const json& j) {
    try {
        if (j.is_array()) return Sequence::from_real(0, j.get<std::vector<double>>());
        if (!j.is_object() || !j.contains("re")) throw ConfigError("sequence must be an array or {start, re, im}");
        const long start = j.value("start", 0L);
        const auto re = j.at("re").get<std::vector<double>>();
        std::vector<double> im(re.size(), 0.0);
        if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
        if (im.size() != re.size()) throw ConfigError("sequence re/im lengths differ");
        std::vector<cplx> taps(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) taps[i] = {re[i], im[i]};
        return Sequence(start, std::move(taps));
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("bad sequence: ") + ex.what());
    }
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json to_json(const DesignResult& d) {
    json j = {{"method", to_string(d.method)},
              {"f", to_json(d.f)},
              {"g", to_json(d.g)},
              {"sigma_v2", d.sigma_v2},
              {"lambda", optional_number(d.lambda)},
              {"alpha", optional_number(d.alpha)},
              {"beta", optional_number(d.beta)},
              {"correction", d.correction_coefficient()},
              {"equalizer_truncation_energy", d.equalizer_truncation},
              {"target_truncation_energy", d.target_truncation},
              {"factor_floored", d.factor_floored}};
    if (d.target_length) j["target_length"] = *d.target_length;
    if (d.feedback) j["feedback"] = to_json(*d.feedback);
    return j;
}

json to_json(const FirSolution& s) {
    return {{"L", s.L},
            {"q", to_json(s.q)},
            {"p_taps", s.p.size()},
            {"v", to_json(s.v)},
            {"g", to_json(s.g)},
            {"f", to_json(s.f)},
            {"lambda", s.lambda},
            {"beta_shift", s.beta_shift},
            {"snr", s.snr},
            {"snr_max", s.snr_max},
            {"loss_dB", s.loss_db},
            {"diagnostics",
             {{"constraint", s.constraint},
              {"condition", s.condition},
              {"p_truncation_energy", s.p_truncation},
              {"equalizer_truncation_energy", s.equalizer_truncation},
              {"interpolated_points", s.interpolated_points},
              {"grid", s.grid},
              {"factor_grid", s.factor_grid},
              {"factor_residual", s.factor_residual}}}};
}

json to_json(const ErrorModel& m) {
    return {{"e", to_json(m.e)}, {"snr_eff", m.snr_eff}, {"kappa", m.kappa}, {"p_seq", m.p_seq}, {"p_bit", m.p_bit}};
}

json to_json(const DominantError& d) {
    return {{"e", to_json(d.e)}, {"distance2", d.distance2}, {"multiplicity", d.multiplicity}};
}

}  // namespace shorteq
