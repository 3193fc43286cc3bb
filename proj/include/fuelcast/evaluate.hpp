#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fuelcast/core.hpp"
#include "fuelcast/ets.hpp"
#include "fuelcast/ingest.hpp"

namespace fuelcast::eval {

/// Per-day MASE in fuel-mix shares:
///   mean_x |d_x - dhat_x| / mean_x |d_x - d_prev_x|.
/// Returns nullopt when the naive denominator is zero (undefined day).
std::optional<double> mase_day(std::span<const double> actual,
                               std::span<const double> forecast,
                               std::span<const double> prev_actual);

/// Winner tally per column: each finite row increments its minimum entry,
/// ties going to the earliest column; all-infinite rows count for nobody.
/// Entries must be finite or +inf.
std::vector<std::int64_t> winner_counts(const Matrix& per_day_mase);

struct BacktestOptions {
    int refit_every = 1;     // parameter refits every k origins; states update daily
    double eps = 1e-5;       // CLR zero replacement
    double delta = 0.001;    // EVR threshold
    ZeroTotalPolicy zero_total = ZeroTotalPolicy::Error;
    std::size_t threads = 0;  // 0 = FUELCAST_THREADS / hardware
};

/// Rolling one-step-ahead backtest result. per_day_mase holds NaN on
/// undefined days (zero naive denominator) and +inf where a method failed;
/// means are taken over the remaining cells, winners over scored days.
struct BacktestReport {
    std::string region;
    std::vector<MethodId> methods;  // canonical order
    std::vector<Date> test_dates;
    Matrix per_day_mase;            // n_test x methods
    std::vector<double> mean_mase;
    std::vector<std::int64_t> winner_counts;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t n_scored = 0;       // n_test minus undefined days
    std::size_t undefined_days = 0;
    std::size_t all_failed_days = 0;
    std::int64_t failed_cells = 0;
    Diagnostics diagnostics;
};

/// One-step-ahead share forecast for a single method given the history so
/// far. Hierarchical level forecasts are normalized by their own total.
std::vector<double> one_step_shares(MethodId method, const GenerationPanel& history,
                                    const CompositionSeries& history_shares,
                                    ets::Engine& engine, const BacktestOptions& opts,
                                    Diagnostics* diag = nullptr);

/// Expanding-origin backtest over the test partition. Parameters are refit
/// every `refit_every` origins, states update daily; methods run
/// concurrently per origin and the report is deterministic regardless of
/// scheduling.
BacktestReport rolling_backtest(const GenerationPanel& panel, const ingest::SplitSpec& split,
                                std::vector<MethodId> methods,
                                const BacktestOptions& opts = {});

/// One fixed-width text row per report: region, the mean-MASE block, then
/// the winner-count block.
std::string format_table_text(std::span<const BacktestReport> reports);

/// Same table as CSV: region,mase_<M>...,days_<M>...
std::string format_table_csv(std::span<const BacktestReport> reports);

/// date,<method>... rows; undefined days leave cells empty, failures print inf.
void write_per_day_csv(std::ostream& out, const BacktestReport& report);

}  // namespace fuelcast::eval
