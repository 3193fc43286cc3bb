#include "fuelcast/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fuelcast::reconcile {

namespace {

/// Forecasts bottom series j at horizon h, naming the fuel type on failure.
double bottom_forecast(const GenerationPanel& panel, std::size_t j, int h,
                       ets::Engine& engine) {
    try {
        auto fc = engine.forecast_series("B" + std::to_string(j), panel.fuel_series(j), h);
        return fc[static_cast<std::size_t>(h - 1)];
    } catch (const Error& e) {
        throw Error(e.kind(), "fuel '" + panel.fuel_types[j] + "': " + e.what());
    }
}

void renormalize(std::vector<double>& p) {
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= sum;
}

}  // namespace

ReconciledForecast forecast_bottom_up(const GenerationPanel& panel, int h,
                                      ets::Engine& engine) {
    const std::size_t d = panel.fuel_count();
    ReconciledForecast out{MethodId::BU, 0.0, std::vector<double>(d)};
    for (std::size_t j = 0; j < d; ++j) out.bottom[j] = bottom_forecast(panel, j, h, engine);
    out.total = std::accumulate(out.bottom.begin(), out.bottom.end(), 0.0);
    return out;
}

DisaggregationProportions td_proportions_gsa(const GenerationPanel& panel,
                                             Diagnostics* diag) {
    const std::size_t d = panel.fuel_count();
    const std::vector<double> total = aggregate_total(panel);
    std::vector<double> p(d, 0.0);
    std::size_t used = 0;
    for (std::size_t t = 0; t < panel.days(); ++t) {
        if (total[t] == 0.0) {
            if (diag) diag->zero_total_days_skipped++;
            continue;
        }
        for (std::size_t j = 0; j < d; ++j) p[j] += panel.levels(t, j) / total[t];
        ++used;
    }
    if (used == 0)
        throw Error(ErrorKind::ZeroTotal, "every day has zero total generation");
    for (double& v : p) v /= double(used);
    renormalize(p);
    return {MethodId::TDGSA, std::move(p)};
}

DisaggregationProportions td_proportions_gsf(const GenerationPanel& panel) {
    const std::size_t d = panel.fuel_count();
    std::vector<double> sums(d, 0.0);
    double grand = 0.0;
    for (std::size_t t = 0; t < panel.days(); ++t)
        for (std::size_t j = 0; j < d; ++j) {
            sums[j] += panel.levels(t, j);
            grand += panel.levels(t, j);
        }
    if (grand == 0.0)
        throw Error(ErrorKind::ZeroTotal, "zero total generation over the whole panel");
    for (double& v : sums) v /= grand;
    renormalize(sums);
    return {MethodId::TDGSF, std::move(sums)};
}

DisaggregationProportions td_proportions_fp(const GenerationPanel& panel, int h,
                                            ets::Engine& engine) {
    const std::size_t d = panel.fuel_count();
    std::vector<double> p(d);
    for (std::size_t j = 0; j < d; ++j)
        p[j] = std::max(bottom_forecast(panel, j, h, engine), 0.0);
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    if (sum <= 0.0)
        throw Error(ErrorKind::DegenerateProportions,
                    "all bottom-level forecasts are non-positive");
    for (double& v : p) v /= sum;
    return {MethodId::TDFP, std::move(p)};
}

ReconciledForecast forecast_top_down(const GenerationPanel& panel, int h,
                                     const DisaggregationProportions& props,
                                     ets::Engine& engine, Diagnostics* diag) {
    if (props.p.size() != panel.fuel_count())
        throw Error(ErrorKind::Dimension, "proportion length does not match fuel count");
    auto fc = engine.forecast_series("T", aggregate_total(panel), h);
    double total = fc[static_cast<std::size_t>(h - 1)];
    if (total < 0.0) {
        total = 0.0;
        if (diag) diag->negative_totals_floored++;
    }
    ReconciledForecast out{props.method, total, std::vector<double>(props.p.size())};
    for (std::size_t j = 0; j < props.p.size(); ++j) out.bottom[j] = props.p[j] * total;
    return out;
}

}  // namespace fuelcast::reconcile
