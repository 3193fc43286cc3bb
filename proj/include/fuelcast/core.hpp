#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fuelcast/dates.hpp"
#include "fuelcast/errors.hpp"
#include "fuelcast/matrix.hpp"

namespace fuelcast {

struct FuelType {
    std::string name;
    std::size_t index = 0;
};

/// Daily generation levels (MWh) for one region: the bottom-level series of
/// the two-level hierarchy. Row t holds day t, column j holds fuel type j.
struct GenerationPanel {
    std::string region;
    std::vector<Date> dates;
    std::vector<std::string> fuel_types;
    Matrix levels;  // n x D

    std::size_t days() const { return dates.size(); }
    std::size_t fuel_count() const { return fuel_types.size(); }
    FuelType fuel(std::size_t j) const { return {fuel_types[j], j}; }
    std::vector<double> fuel_series(std::size_t j) const { return levels.col(j); }

    /// First n_days days.
    GenerationPanel head(std::size_t n_days) const;
    /// Days [first, n).
    GenerationPanel tail(std::size_t first) const;

    /// Shape, date, fuel-name and value checks that hold for any panel,
    /// however small.
    void validate_structure() const;
    /// Structural checks plus the fitting-window minima (D >= 2, n >= 15).
    void validate() const;

    bool operator==(const GenerationPanel&) const = default;
};

/// Daily fuel-mix shares: each row lies on the simplex.
struct CompositionSeries {
    std::vector<Date> dates;
    Matrix shares;  // n x D

    std::size_t days() const { return dates.size(); }
    std::size_t components() const { return shares.cols(); }
    CompositionSeries head(std::size_t n_days) const;

    void validate() const;
};

/// The (D+1) x D aggregation matrix: an all-ones first row on top of the
/// D x D identity.
struct SummingMatrix {
    Matrix entries;

    std::size_t fuel_count() const { return entries.cols(); }
    /// Maps a bottom-level vector to (total, bottom...): length D+1.
    std::vector<double> apply(std::span<const double> bottom) const;
};

enum class ValueUnit { Mwh, Shares };

struct ForecastVector {
    Date origin;       // last observed day
    int horizon = 1;   // h >= 1
    ValueUnit unit = ValueUnit::Mwh;
    std::vector<double> values;

    void validate() const;
};

/// Forecasting methods in canonical order; the order breaks winner-count
/// ties in the backtest.
enum class MethodId { BU, TDGSA, TDGSF, TDFP, CLR, CDF };

inline constexpr std::array<MethodId, 6> kAllMethods{
    MethodId::BU,  MethodId::TDGSA, MethodId::TDGSF,
    MethodId::TDFP, MethodId::CLR,  MethodId::CDF};

std::string to_string(MethodId m);
MethodId parse_method(const std::string& name);  // throws Error{Usage}

enum class NegativePolicy { ClampZero, Error };
enum class ZeroTotalPolicy { Error, Uniform };

NegativePolicy parse_negative_policy(const std::string& name);
ZeroTotalPolicy parse_zero_total_policy(const std::string& name);

/// Counters for data conditions that are handled rather than fatal.
struct Diagnostics {
    std::int64_t clamped_negatives = 0;
    std::int64_t zero_filled_cells = 0;
    std::int64_t zero_total_days_uniform = 0;   // to_shares uniform rows
    std::int64_t zero_total_days_skipped = 0;   // excluded from TDGSA averages
    std::int64_t rows_zero_replaced = 0;        // CLR zero replacement
    std::int64_t negative_totals_floored = 0;   // top-down total forecasts

    void merge(const Diagnostics& other);
};

SummingMatrix build_summing_matrix(std::size_t fuel_count);

/// Row sums of the panel: T_t = sum_j B_{j,t}.
std::vector<double> aggregate_total(const GenerationPanel& panel);

/// Levels to shares, row by row. Days with zero total follow the policy:
/// Error throws, Uniform emits 1/D per fuel and counts the day.
CompositionSeries to_shares(const GenerationPanel& panel,
                            ZeroTotalPolicy policy = ZeroTotalPolicy::Error,
                            Diagnostics* diag = nullptr);

}  // namespace fuelcast
