#include "fuelcast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fuelcast/coda.hpp"
#include "fuelcast/parallel.hpp"
#include "fuelcast/reconcile.hpp"

namespace fuelcast::eval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> normalize_bottom(const reconcile::ReconciledForecast& rf) {
    double sum = std::accumulate(rf.bottom.begin(), rf.bottom.end(), 0.0);
    if (!(sum > 0.0))
        throw Error(ErrorKind::ZeroTotal,
                    to_string(rf.method) + ": non-positive forecast total");
    std::vector<double> shares(rf.bottom.size());
    for (std::size_t j = 0; j < shares.size(); ++j) shares[j] = rf.bottom[j] / sum;
    return shares;
}

}  // namespace

std::optional<double> mase_day(std::span<const double> actual,
                               std::span<const double> forecast,
                               std::span<const double> prev_actual) {
    if (actual.size() != forecast.size() || actual.size() != prev_actual.size() ||
        actual.empty())
        throw Error(ErrorKind::Dimension, "mase_day vectors must have equal nonzero length");
    double num = 0.0, den = 0.0;
    for (std::size_t x = 0; x < actual.size(); ++x) {
        num += std::abs(actual[x] - forecast[x]);
        den += std::abs(actual[x] - prev_actual[x]);
    }
    if (den == 0.0) return std::nullopt;
    return num / den;  // the 1/D factors cancel
}

std::vector<std::int64_t> winner_counts(const Matrix& per_day_mase) {
    std::vector<std::int64_t> counts(per_day_mase.cols(), 0);
    for (std::size_t t = 0; t < per_day_mase.rows(); ++t) {
        std::size_t arg = 0;
        double best = kInf;
        for (std::size_t m = 0; m < per_day_mase.cols(); ++m) {
            const double v = per_day_mase(t, m);
            if (std::isnan(v))
                throw Error(ErrorKind::InvalidValue,
                            "winner_counts entries must be finite or +inf");
            if (v < best) {
                best = v;
                arg = m;
            }
        }
        if (best < kInf) counts[arg]++;
    }
    return counts;
}

std::vector<double> one_step_shares(MethodId method, const GenerationPanel& history,
                                    const CompositionSeries& history_shares,
                                    ets::Engine& engine, const BacktestOptions& opts,
                                    Diagnostics* diag) {
    switch (method) {
        case MethodId::BU:
            return normalize_bottom(reconcile::forecast_bottom_up(history, 1, engine));
        case MethodId::TDGSA: {
            auto props = reconcile::td_proportions_gsa(history, diag);
            return normalize_bottom(
                reconcile::forecast_top_down(history, 1, props, engine, diag));
        }
        case MethodId::TDGSF: {
            auto props = reconcile::td_proportions_gsf(history);
            return normalize_bottom(
                reconcile::forecast_top_down(history, 1, props, engine, diag));
        }
        case MethodId::TDFP: {
            auto props = reconcile::td_proportions_fp(history, 1, engine);
            return normalize_bottom(
                reconcile::forecast_top_down(history, 1, props, engine, diag));
        }
        case MethodId::CLR:
            return coda::forecast_composition_clr(history_shares, 1, engine,
                                                  {opts.eps, opts.delta}, diag)
                .values;
        case MethodId::CDF:
            return coda::forecast_composition_cdf(history_shares, 1, engine,
                                                  {opts.eps, opts.delta}, diag)
                .values;
    }
    throw Error(ErrorKind::Usage, "unknown method id");
}

BacktestReport rolling_backtest(const GenerationPanel& panel, const ingest::SplitSpec& split,
                                std::vector<MethodId> methods, const BacktestOptions& opts) {
    panel.validate();
    if (methods.empty())
        throw Error(ErrorKind::Usage, "backtest needs at least one method");
    if (opts.refit_every < 1)
        throw Error(ErrorKind::Usage, "refit_every must be >= 1");
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

    const auto [n_train, n_test] = ingest::split_sizes(panel.days(), split);
    const std::size_t n_methods = methods.size();
    CompositionSeries shares = to_shares(panel, opts.zero_total, nullptr);

    BacktestReport report;
    report.region = panel.region;
    report.methods = methods;
    report.n_train = n_train;
    report.n_test = n_test;
    report.test_dates.assign(panel.dates.begin() + static_cast<std::ptrdiff_t>(n_train),
                             panel.dates.end());
    report.per_day_mase = Matrix(n_test, n_methods, std::numeric_limits<double>::quiet_NaN());

    ets::Engine engine;
    engine.enable_cache(true);
    std::vector<Diagnostics> method_diag(n_methods);

    for (std::size_t origin = 0; origin < n_test; ++origin) {
        const std::size_t history_days = n_train + origin;
        const GenerationPanel history = panel.head(history_days);
        const CompositionSeries history_shares = shares.head(history_days);
        engine.begin_origin(origin, origin % static_cast<std::size_t>(opts.refit_every) == 0);

        std::vector<std::vector<double>> forecasts(n_methods);
        std::vector<char> failed(n_methods, 0);
        parallel_for(n_methods, opts.threads, [&](std::size_t m) {
            try {
                forecasts[m] = one_step_shares(methods[m], history, history_shares, engine,
                                               opts, &method_diag[m]);
            } catch (const Error&) {
                failed[m] = 1;
            }
        });

        const auto actual = shares.shares.row(history_days);
        const auto prev = shares.shares.row(history_days - 1);
        bool day_defined = true;
        for (std::size_t m = 0; m < n_methods; ++m) {
            if (failed[m]) {
                report.per_day_mase(origin, m) = kInf;
                report.failed_cells++;
                continue;
            }
            auto mase = mase_day(actual, forecasts[m], prev);
            if (!mase) {
                day_defined = false;
                break;
            }
            report.per_day_mase(origin, m) = *mase;
        }
        if (!day_defined) {
            // zero naive denominator: the whole day is excluded from scoring
            for (std::size_t m = 0; m < n_methods; ++m)
                report.per_day_mase(origin, m) = std::numeric_limits<double>::quiet_NaN();
            report.undefined_days++;
        }
    }

    for (const auto& d : method_diag) report.diagnostics.merge(d);
    report.n_scored = n_test - report.undefined_days;

    // Means over defined days with finite cells; winners over defined days.
    report.mean_mase.assign(n_methods, std::numeric_limits<double>::quiet_NaN());
    Matrix scored(report.n_scored, n_methods);
    std::size_t row = 0;
    for (std::size_t t = 0; t < n_test; ++t) {
        if (std::isnan(report.per_day_mase(t, 0))) continue;
        for (std::size_t m = 0; m < n_methods; ++m)
            scored(row, m) = report.per_day_mase(t, m);
        ++row;
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < report.n_scored; ++t)
            if (std::isfinite(scored(t, m))) {
                sum += scored(t, m);
                ++count;
            }
        if (count > 0) report.mean_mase[m] = sum / double(count);
    }
    report.winner_counts = winner_counts(scored);
    for (std::size_t t = 0; t < report.n_scored; ++t) {
        bool all_failed = true;
        for (std::size_t m = 0; m < n_methods && all_failed; ++m)
            if (std::isfinite(scored(t, m))) all_failed = false;
        if (all_failed) report.all_failed_days++;
    }
    return report;
}

std::string format_table_text(std::span<const BacktestReport> reports) {
    std::ostringstream out;
    if (reports.empty()) return "";
    const auto& methods = reports.front().methods;
    out << "Region      ";
    for (MethodId m : methods) {
        char cell[16];
        std::snprintf(cell, sizeof(cell), "%8s", to_string(m).c_str());
        out << cell;
    }
    out << "  |";
    for (MethodId m : methods) {
        char cell[16];
        std::snprintf(cell, sizeof(cell), "%7s", to_string(m).c_str());
        out << cell;
    }
    out << "\n";
    for (const auto& r : reports) {
        char cell[32];
        std::snprintf(cell, sizeof(cell), "%-12s", r.region.c_str());
        out << cell;
        for (double v : r.mean_mase) {
            std::snprintf(cell, sizeof(cell), "%8.4f", v);
            out << cell;
        }
        out << "  |";
        for (std::int64_t c : r.winner_counts) {
            std::snprintf(cell, sizeof(cell), "%7lld", static_cast<long long>(c));
            out << cell;
        }
        out << "\n";
    }
    return out.str();
}

std::string format_table_csv(std::span<const BacktestReport> reports) {
    std::ostringstream out;
    if (reports.empty()) return "";
    const auto& methods = reports.front().methods;
    out << "region";
    for (MethodId m : methods) out << ",mase_" << to_string(m);
    for (MethodId m : methods) out << ",days_" << to_string(m);
    out << "\n";
    char cell[32];
    for (const auto& r : reports) {
        out << r.region;
        for (double v : r.mean_mase) {
            std::snprintf(cell, sizeof(cell), "%.6f", v);
            out << "," << cell;
        }
        for (std::int64_t c : r.winner_counts) out << "," << c;
        out << "\n";
    }
    return out.str();
}

void write_per_day_csv(std::ostream& out, const BacktestReport& report) {
    out << "date";
    for (MethodId m : report.methods) out << "," << to_string(m);
    out << "\n";
    char cell[32];
    for (std::size_t t = 0; t < report.n_test; ++t) {
        out << format_date(report.test_dates[t]);
        for (std::size_t m = 0; m < report.methods.size(); ++m) {
            const double v = report.per_day_mase(t, m);
            out << ",";
            if (std::isnan(v)) continue;
            if (std::isinf(v)) {
                out << "inf";
                continue;
            }
            std::snprintf(cell, sizeof(cell), "%.10g", v);
            out << cell;
        }
        out << "\n";
    }
}

}  // namespace fuelcast::eval
