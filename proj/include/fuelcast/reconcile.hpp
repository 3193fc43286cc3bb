#pragma once

#include <vector>

#include "fuelcast/core.hpp"
#include "fuelcast/ets.hpp"

namespace fuelcast::reconcile {

/// A length-D point on the simplex used to split a total forecast.
struct DisaggregationProportions {
    MethodId method = MethodId::TDGSA;
    std::vector<double> p;
};

/// Coherent forecast of one horizon: total == sum(bottom) up to float drift.
struct ReconciledForecast {
    MethodId method = MethodId::BU;
    double total = 0.0;
    std::vector<double> bottom;
};

/// Fits each bottom series, forecasts h steps ahead and sums upward.
ReconciledForecast forecast_bottom_up(const GenerationPanel& panel, int h,
                                      ets::Engine& engine);

/// Average of historical ratios: p_j = mean_t B_{j,t} / T_t. Zero-total days
/// are skipped (counted in diag); all days zero is an error.
DisaggregationProportions td_proportions_gsa(const GenerationPanel& panel,
                                             Diagnostics* diag = nullptr);

/// Ratio of historical averages: p_j = sum_t B_{j,t} / sum_t T_t.
DisaggregationProportions td_proportions_gsf(const GenerationPanel& panel);

/// Forecast proportions: p_j = Bhat_j / sum_i Bhat_i at horizon h, negative
/// bottom forecasts floored at zero first.
DisaggregationProportions td_proportions_fp(const GenerationPanel& panel, int h,
                                            ets::Engine& engine);

/// Forecasts the total series and splits it by the given proportions. A
/// negative total forecast is floored at zero (counted in diag).
ReconciledForecast forecast_top_down(const GenerationPanel& panel, int h,
                                     const DisaggregationProportions& props,
                                     ets::Engine& engine, Diagnostics* diag = nullptr);

}  // namespace fuelcast::reconcile
