#include "fuelcast/json_io.hpp"

#include <cmath>

namespace fuelcast {

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (double v : m.row(r)) row.push_back(v);
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    const std::size_t rows = j.size();
    const std::size_t cols = rows ? j.at(0).size() : 0;
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j.at(r).size() != cols)
            throw Error(ErrorKind::Parse, "ragged matrix in JSON");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<double>();
    }
    return m;
}

}  // namespace

nlohmann::json panel_to_json(const GenerationPanel& panel) {
    nlohmann::json j;
    j["region"] = panel.region;
    j["start_date"] = format_date(panel.dates.front());
    j["days"] = panel.days();
    j["fuel_types"] = panel.fuel_types;
    j["levels_mwh"] = matrix_to_json(panel.levels);
    return j;
}

GenerationPanel panel_from_json(const nlohmann::json& j) {
    GenerationPanel panel;
    panel.region = j.at("region").get<std::string>();
    const Date start = parse_date(j.at("start_date").get<std::string>());
    const auto n = j.at("days").get<std::size_t>();
    panel.dates.resize(n);
    for (std::size_t t = 0; t < n; ++t)
        panel.dates[t] = start + std::chrono::days{static_cast<long>(t)};
    panel.fuel_types = j.at("fuel_types").get<std::vector<std::string>>();
    panel.levels = matrix_from_json(j.at("levels_mwh"));
    panel.validate_structure();
    return panel;
}

nlohmann::json diagnostics_to_json(const Diagnostics& diag) {
    return {
        {"clamped_negatives", diag.clamped_negatives},
        {"zero_filled_cells", diag.zero_filled_cells},
        {"zero_total_days_uniform", diag.zero_total_days_uniform},
        {"zero_total_days_skipped", diag.zero_total_days_skipped},
        {"rows_zero_replaced", diag.rows_zero_replaced},
        {"negative_totals_floored", diag.negative_totals_floored},
    };
}

namespace ets {

namespace {

std::string trend_name(Trend t) {
    switch (t) {
        case Trend::None: return "N";
        case Trend::Additive: return "A";
        case Trend::AdditiveDamped: return "Ad";
    }
    return "N";
}

Trend trend_from(const std::string& s) {
    if (s == "N") return Trend::None;
    if (s == "A") return Trend::Additive;
    if (s == "Ad") return Trend::AdditiveDamped;
    throw Error(ErrorKind::Parse, "unknown trend '" + s + "'");
}

nlohmann::json state_to_json(const EtsState& st) {
    return {{"level", st.level}, {"trend", st.trend}, {"seasonal", st.seasonal}};
}

EtsState state_from_json(const nlohmann::json& j) {
    EtsState st;
    st.level = j.at("level").get<double>();
    st.trend = j.at("trend").get<double>();
    st.seasonal = j.at("seasonal").get<std::vector<double>>();
    return st;
}

}  // namespace

nlohmann::json fitted_to_json(const FittedEts& model) {
    nlohmann::json j;
    j["spec"] = {{"trend", trend_name(model.spec.trend)},
                 {"seasonal", model.spec.has_seasonal() ? "A" : "N"},
                 {"period", model.spec.period}};
    j["params"] = {{"alpha", model.params.alpha},
                   {"beta", model.params.beta},
                   {"phi", model.params.phi},
                   {"gamma", model.params.gamma}};
    j["initial"] = state_to_json(model.initial);
    j["final"] = state_to_json(model.final_state);
    j["sse"] = model.sse;
    j["loglik"] = model.loglik;
    j["aicc"] = model.aicc;
    j["n"] = model.n;
    j["k"] = model.k;
    return j;
}

FittedEts fitted_from_json(const nlohmann::json& j) {
    FittedEts model;
    const auto& spec = j.at("spec");
    model.spec.trend = trend_from(spec.at("trend").get<std::string>());
    model.spec.seasonal = spec.at("seasonal").get<std::string>() == "A" ? Seasonal::Additive
                                                                        : Seasonal::None;
    model.spec.period = spec.at("period").get<int>();
    const auto& p = j.at("params");
    model.params.alpha = p.at("alpha").get<double>();
    model.params.beta = p.at("beta").get<double>();
    model.params.phi = p.at("phi").get<double>();
    model.params.gamma = p.at("gamma").get<double>();
    model.initial = state_from_json(j.at("initial"));
    model.final_state = state_from_json(j.at("final"));
    model.sse = j.at("sse").get<double>();
    model.loglik = j.at("loglik").get<double>();
    model.aicc = j.at("aicc").get<double>();
    model.n = j.at("n").get<std::size_t>();
    model.k = j.at("k").get<std::size_t>();
    return model;
}

}  // namespace ets

namespace coda {

nlohmann::json decomposition_to_json(const PcaDecomposition& dec, std::size_t retained) {
    nlohmann::json j;
    j["eigenvalues"] = dec.eigenvalues;
    j["retained"] = retained;
    nlohmann::json comps = nlohmann::json::array();
    for (std::size_t k = 0; k < retained && k < dec.components.rows(); ++k) {
        nlohmann::json row = nlohmann::json::array();
        for (double v : dec.components.row(k)) row.push_back(v);
        comps.push_back(std::move(row));
    }
    j["components"] = std::move(comps);
    return j;
}

}  // namespace coda

namespace eval {

nlohmann::json report_to_json(const BacktestReport& report) {
    nlohmann::json j;
    j["region"] = report.region;
    nlohmann::json methods = nlohmann::json::array();
    for (MethodId m : report.methods) methods.push_back(to_string(m));
    j["methods"] = std::move(methods);
    nlohmann::json mase;
    nlohmann::json counts;
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        const std::string name = to_string(report.methods[m]);
        const double v = report.mean_mase[m];
        if (std::isfinite(v))
            mase[name] = v;
        else
            mase[name] = nullptr;
        counts[name] = report.winner_counts[m];
    }
    j["mean_mase"] = std::move(mase);
    j["winner_counts"] = std::move(counts);
    j["n_train"] = report.n_train;
    j["n_test"] = report.n_test;
    j["n_scored"] = report.n_scored;
    j["undefined_days"] = report.undefined_days;
    j["all_failed_days"] = report.all_failed_days;
    j["failed_cells"] = report.failed_cells;
    j["diagnostics"] = diagnostics_to_json(report.diagnostics);
    return j;
}

}  // namespace eval

}  // namespace fuelcast
