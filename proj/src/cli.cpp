#include "fuelcast/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fuelcast/coda.hpp"
#include "fuelcast/core.hpp"
#include "fuelcast/evaluate.hpp"
#include "fuelcast/ingest.hpp"
#include "fuelcast/json_io.hpp"
#include "fuelcast/parallel.hpp"
#include "fuelcast/reconcile.hpp"
#include "fuelcast/synthetic.hpp"

namespace fuelcast::cli {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
    std::vector<std::string> inputs;
    std::string region;
    std::string methods = "BU,TDGSA,TDGSF,TDFP,CLR,CDF";
    int horizon = 1;
    double train_fraction = 0.75;
    int refit_every = 1;
    double eps = 1e-5;
    double delta = 0.001;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    std::string negative_policy = "clamp_zero";
    std::string zero_total_policy = "error";
    // synth extras
    std::uint64_t synth_days = 200;
    std::uint64_t synth_fuels = 3;
    std::string synth_region = "SYN";
    std::string synth_start = "2019-01-01";
    double seasonal_amplitude = 0.10;
    double trend_amplitude = 0.20;
    double noise_amplitude = 0.02;
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<MethodId> parse_methods(const std::string& csv) {
    std::vector<MethodId> out;
    std::stringstream ss(csv);
    std::string token;
    while (std::getline(ss, token, ','))
        if (!token.empty()) out.push_back(parse_method(token));
    if (out.empty()) throw Error(ErrorKind::Usage, "no methods given");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void ensure_out_dir(const RunConfig& cfg) { fs::create_directories(cfg.out_dir); }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    out << content;
}

void echo_config(const CLI::App& app, const RunConfig& cfg) {
    write_file(fs::path(cfg.out_dir) / "run_config.txt",
               app.config_to_str(/*default_also=*/true, /*write_description=*/false));
}

/// Loads panels from the configured inputs: *.panel.json files directly,
/// anything else as long-format CSV (one panel per region found, or just
/// the region filter if set).
std::vector<GenerationPanel> load_panels(const RunConfig& cfg, Diagnostics* diag) {
    if (cfg.inputs.empty()) throw Error(ErrorKind::Usage, "--input is required");
    std::vector<GenerationPanel> panels;
    std::vector<ingest::RawRecord> records;
    for (const auto& input : cfg.inputs) {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot read " + input);
        if (input.size() > 5 && input.substr(input.size() - 5) == ".json") {
            nlohmann::json j;
            in >> j;
            panels.push_back(panel_from_json(j));
            continue;
        }
        auto parsed = ingest::parse_csv(in);
        records.insert(records.end(), parsed.begin(), parsed.end());
    }
    if (!records.empty()) {
        const NegativePolicy policy = parse_negative_policy(cfg.negative_policy);
        std::vector<std::string> regions =
            cfg.region.empty() ? ingest::regions_in(records)
                               : std::vector<std::string>{cfg.region};
        for (const auto& region : regions)
            panels.push_back(ingest::build_panel(records, region, policy, diag));
    }
    if (!cfg.region.empty()) {
        std::erase_if(panels,
                      [&](const GenerationPanel& p) { return p.region != cfg.region; });
        if (panels.empty())
            throw Error(ErrorKind::EmptyInput, "no panel for region '" + cfg.region + "'");
    }
    return panels;
}

int cmd_ingest(const CLI::App& app, const RunConfig& cfg) {
    if (cfg.inputs.empty()) throw Error(ErrorKind::Usage, "--input is required");
    std::vector<ingest::RawRecord> records;
    for (const auto& input : cfg.inputs) {
        std::ifstream in(input, std::ios::binary);
        if (!in) throw Error(ErrorKind::Io, "cannot read " + input);
        auto parsed = ingest::parse_csv(in);
        records.insert(records.end(), parsed.begin(), parsed.end());
    }
    std::vector<std::string> regions = cfg.region.empty()
                                           ? ingest::regions_in(records)
                                           : std::vector<std::string>{cfg.region};
    const NegativePolicy policy = parse_negative_policy(cfg.negative_policy);

    ensure_out_dir(cfg);
    std::vector<Diagnostics> diags(regions.size());
    std::vector<std::exception_ptr> errors(regions.size());
    parallel_for(regions.size(), thread_cap(), [&](std::size_t i) {
        try {
            GenerationPanel panel = ingest::build_panel(records, regions[i], policy, &diags[i]);
            write_file(fs::path(cfg.out_dir) / (lower(regions[i]) + ".panel.json"),
                       panel_to_json(panel).dump(2) + "\n");
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    nlohmann::json diag_json;
    for (std::size_t i = 0; i < regions.size(); ++i)
        diag_json[regions[i]] = diagnostics_to_json(diags[i]);
    write_file(fs::path(cfg.out_dir) / "ingest_diagnostics.json", diag_json.dump(2) + "\n");
    echo_config(app, cfg);
    return 0;
}

void append_forecast_rows(std::ostream& out, const GenerationPanel& panel,
                          const std::vector<MethodId>& methods, int horizon, double eps,
                          double delta, ZeroTotalPolicy zero_total, Diagnostics* diag) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        return std::string(buf);
    };
    const Date origin = panel.dates.back();
    const bool wants_coda =
        std::any_of(methods.begin(), methods.end(), [](MethodId m) {
            return m == MethodId::CLR || m == MethodId::CDF;
        });
    CompositionSeries shares;
    if (wants_coda) shares = to_shares(panel, zero_total, diag);
    ets::Engine engine;
    for (int h = 1; h <= horizon; ++h) {
        for (MethodId method : methods) {
            const std::string prefix =
                format_date(origin) + "," + std::to_string(h) + "," + to_string(method) + ",";
            switch (method) {
                case MethodId::BU:
                case MethodId::TDGSA:
                case MethodId::TDGSF:
                case MethodId::TDFP: {
                    reconcile::ReconciledForecast rf;
                    if (method == MethodId::BU) {
                        rf = reconcile::forecast_bottom_up(panel, h, engine);
                    } else {
                        reconcile::DisaggregationProportions props;
                        if (method == MethodId::TDGSA)
                            props = reconcile::td_proportions_gsa(panel, diag);
                        else if (method == MethodId::TDGSF)
                            props = reconcile::td_proportions_gsf(panel);
                        else
                            props = reconcile::td_proportions_fp(panel, h, engine);
                        rf = reconcile::forecast_top_down(panel, h, props, engine, diag);
                    }
                    const double sum =
                        std::accumulate(rf.bottom.begin(), rf.bottom.end(), 0.0);
                    for (std::size_t j = 0; j < rf.bottom.size(); ++j)
                        out << prefix << panel.fuel_types[j] << "," << num(rf.bottom[j])
                            << "," << (sum > 0.0 ? num(rf.bottom[j] / sum) : "") << "\n";
                    out << prefix << "TOTAL," << num(rf.total) << ",\n";
                    break;
                }
                case MethodId::CLR:
                case MethodId::CDF: {
                    const ForecastVector fv =
                        method == MethodId::CLR
                            ? coda::forecast_composition_clr(shares, h, engine,
                                                             {eps, delta}, diag)
                            : coda::forecast_composition_cdf(shares, h, engine,
                                                             {eps, delta}, diag);
                    for (std::size_t j = 0; j < fv.values.size(); ++j)
                        out << prefix << panel.fuel_types[j] << ",," << num(fv.values[j])
                            << "\n";
                    break;
                }
            }
        }
    }
}

int cmd_forecast(const CLI::App& app, const RunConfig& cfg) {
    if (cfg.horizon < 1) throw Error(ErrorKind::Usage, "--horizon must be >= 1");
    const std::vector<MethodId> methods = parse_methods(cfg.methods);
    const ZeroTotalPolicy zero_total = parse_zero_total_policy(cfg.zero_total_policy);
    Diagnostics diag;
    std::vector<GenerationPanel> panels = load_panels(cfg, &diag);
    ensure_out_dir(cfg);
    for (const auto& panel : panels) {
        panel.validate();
        std::ostringstream csv;
        csv << "origin_date,horizon,method,fuel_type,value_mwh,share\n";
        append_forecast_rows(csv, panel, methods, cfg.horizon, cfg.eps, cfg.delta,
                             zero_total, &diag);
        write_file(fs::path(cfg.out_dir) / (lower(panel.region) + ".forecast.csv"),
                   csv.str());

        // decomposition dumps for the CoDa pipelines requested
        ets::Engine engine;
        CompositionSeries shares;
        const bool wants_coda =
            std::any_of(methods.begin(), methods.end(), [](MethodId m) {
                return m == MethodId::CLR || m == MethodId::CDF;
            });
        if (wants_coda) shares = to_shares(panel, zero_total);
        for (MethodId m : methods) {
            if (m != MethodId::CLR && m != MethodId::CDF) continue;
            coda::PipelineDetail detail;
            if (m == MethodId::CLR)
                coda::forecast_composition_clr(shares, 1, engine, {cfg.eps, cfg.delta},
                                               nullptr, &detail);
            else
                coda::forecast_composition_cdf(shares, 1, engine, {cfg.eps, cfg.delta},
                                               nullptr, &detail);
            write_file(fs::path(cfg.out_dir) /
                           (lower(panel.region) + "." + lower(to_string(m)) +
                            "_decomposition.json"),
                       coda::decomposition_to_json(detail.pca, detail.retained).dump(2) +
                           "\n");
        }
    }
    echo_config(app, cfg);
    return 0;
}

int cmd_backtest(const CLI::App& app, const RunConfig& cfg) {
    const std::vector<MethodId> methods = parse_methods(cfg.methods);
    Diagnostics diag;
    std::vector<GenerationPanel> panels = load_panels(cfg, &diag);
    ensure_out_dir(cfg);

    eval::BacktestOptions opts;
    opts.refit_every = cfg.refit_every;
    opts.eps = cfg.eps;
    opts.delta = cfg.delta;
    opts.zero_total = parse_zero_total_policy(cfg.zero_total_policy);

    std::vector<eval::BacktestReport> reports;
    for (const auto& panel : panels) {
        reports.push_back(
            eval::rolling_backtest(panel, {cfg.train_fraction}, methods, opts));
        std::ostringstream per_day;
        eval::write_per_day_csv(per_day, reports.back());
        write_file(fs::path(cfg.out_dir) / (lower(panel.region) + ".per_day_mase.csv"),
                   per_day.str());
    }

    nlohmann::json j;
    j["regions"] = nlohmann::json::array();
    for (const auto& r : reports) j["regions"].push_back(eval::report_to_json(r));
    write_file(fs::path(cfg.out_dir) / "backtest_report.json", j.dump(2) + "\n");
    write_file(fs::path(cfg.out_dir) / "backtest_table.txt",
               eval::format_table_text(reports));
    write_file(fs::path(cfg.out_dir) / "backtest_table.csv",
               eval::format_table_csv(reports));
    echo_config(app, cfg);
    std::cout << eval::format_table_text(reports);
    return 0;
}

int cmd_synth(const CLI::App& app, const RunConfig& cfg) {
    synth::SynthConfig scfg;
    scfg.seed = cfg.seed;
    scfg.region = cfg.synth_region;
    scfg.days = cfg.synth_days;
    scfg.fuels = cfg.synth_fuels;
    scfg.start = parse_date(cfg.synth_start);
    scfg.seasonal_amplitude = cfg.seasonal_amplitude;
    scfg.trend_amplitude = cfg.trend_amplitude;
    scfg.noise_amplitude = cfg.noise_amplitude;

    GenerationPanel panel = synth::make_synthetic_panel(scfg);
    ensure_out_dir(cfg);
    std::ostringstream csv;
    ingest::write_long_csv(csv, panel);
    write_file(fs::path(cfg.out_dir) / "synthetic.csv", csv.str());
    echo_config(app, cfg);
    return 0;
}

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Usage:
        case ErrorKind::Schema:
            return 2;
        default:
            return 1;
    }
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"fuelcast: daily electricity fuel-mix forecasting and backtesting"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags take precedence");

    RunConfig cfg;
    auto add_common = [&](CLI::App* sub, bool with_input) {
        if (with_input)
            sub->add_option("--input", cfg.inputs, "input CSV or .panel.json files");
        sub->add_option("--region", cfg.region, "region filter");
        sub->add_option("--out", cfg.out_dir, "output directory");
    };

    CLI::App* ingest_cmd = app.add_subcommand("ingest", "parse CSVs into panel caches");
    add_common(ingest_cmd, true);
    ingest_cmd->add_option("--negative-policy", cfg.negative_policy,
                           "clamp_zero (default) or error");

    CLI::App* forecast_cmd = app.add_subcommand("forecast", "produce point forecasts");
    add_common(forecast_cmd, true);
    forecast_cmd->add_option("--methods", cfg.methods, "comma-separated method list");
    forecast_cmd->add_option("--horizon", cfg.horizon, "forecast horizon")->check(CLI::PositiveNumber);
    forecast_cmd->add_option("--eps", cfg.eps, "CLR zero-replacement epsilon");
    forecast_cmd->add_option("--delta", cfg.delta, "EVR threshold");
    forecast_cmd->add_option("--negative-policy", cfg.negative_policy,
                             "clamp_zero (default) or error");
    forecast_cmd->add_option("--zero-total-policy", cfg.zero_total_policy,
                             "error (default) or uniform");

    CLI::App* backtest_cmd =
        app.add_subcommand("backtest", "rolling one-step-ahead MASE backtest");
    add_common(backtest_cmd, true);
    backtest_cmd->add_option("--methods", cfg.methods, "comma-separated method list");
    backtest_cmd->add_option("--train-fraction", cfg.train_fraction,
                             "initial training share of the sample")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    backtest_cmd->add_option("--refit-every", cfg.refit_every,
                             "refit parameters every k origins")
        ->check(CLI::PositiveNumber);
    backtest_cmd->add_option("--eps", cfg.eps, "CLR zero-replacement epsilon");
    backtest_cmd->add_option("--delta", cfg.delta, "EVR threshold");
    backtest_cmd->add_option("--negative-policy", cfg.negative_policy,
                             "clamp_zero (default) or error");
    backtest_cmd->add_option("--zero-total-policy", cfg.zero_total_policy,
                             "error (default) or uniform");

    CLI::App* synth_cmd = app.add_subcommand("synth", "write a synthetic long CSV");
    add_common(synth_cmd, false);
    synth_cmd->add_option("--seed", cfg.seed, "generator seed");
    synth_cmd->add_option("--days", cfg.synth_days, "number of days")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--fuels", cfg.synth_fuels, "number of fuel types")
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--synth-region", cfg.synth_region, "region label");
    synth_cmd->add_option("--start", cfg.synth_start, "first date (YYYY-MM-DD)");
    synth_cmd->add_option("--seas-amp", cfg.seasonal_amplitude, "weekly share amplitude");
    synth_cmd->add_option("--trend-amp", cfg.trend_amplitude, "share drift amplitude");
    synth_cmd->add_option("--noise-amp", cfg.noise_amplitude, "share noise amplitude");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (ingest_cmd->parsed()) return cmd_ingest(app, cfg);
        if (forecast_cmd->parsed()) return cmd_forecast(app, cfg);
        if (backtest_cmd->parsed()) return cmd_backtest(app, cfg);
        if (synth_cmd->parsed()) return cmd_synth(app, cfg);
        throw Error(ErrorKind::Usage, "no subcommand given");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fuelcast::cli
