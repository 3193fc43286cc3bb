#include "fuelcast/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace fuelcast {

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
    std::size_t r = 0;
    for (const auto& row : rows) {
        std::size_t c = 0;
        for (double v : row) m(r, c++) = v;
        ++r;
    }
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::col(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
    Matrix out(count, cols_);
    for (std::size_t r = 0; r < count; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(r, c) = (*this)(first + r, c);
    return out;
}

Date parse_date(const std::string& iso) {
    auto bad = [&] {
        throw Error(ErrorKind::Parse, "bad date '" + iso + "': expected YYYY-MM-DD");
    };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') bad();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (iso[i] < '0' || iso[i] > '9') bad();
    int y = std::stoi(iso.substr(0, 4));
    unsigned mo = static_cast<unsigned>(std::stoi(iso.substr(5, 2)));
    unsigned da = static_cast<unsigned>(std::stoi(iso.substr(8, 2)));
    std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                    std::chrono::day{da}};
    if (!ymd.ok()) bad();
    return Date{ymd};
}

std::string format_date(Date d) {
    std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
    return buf;
}

GenerationPanel GenerationPanel::head(std::size_t n_days) const {
    if (n_days == 0 || n_days > days())
        throw Error(ErrorKind::Dimension, "head: day count out of range");
    return {region,
            {dates.begin(), dates.begin() + static_cast<std::ptrdiff_t>(n_days)},
            fuel_types, levels.slice_rows(0, n_days)};
}

GenerationPanel GenerationPanel::tail(std::size_t first) const {
    if (first >= days()) throw Error(ErrorKind::Dimension, "tail: day index out of range");
    return {region,
            {dates.begin() + static_cast<std::ptrdiff_t>(first), dates.end()},
            fuel_types, levels.slice_rows(first, days() - first)};
}

void GenerationPanel::validate_structure() const {
    const std::size_t n = days();
    const std::size_t d = fuel_count();
    if (n == 0 || d == 0)
        throw Error(ErrorKind::Dimension, "panel must have at least one day and one fuel type");
    if (levels.rows() != n || levels.cols() != d)
        throw Error(ErrorKind::Dimension, "panel level matrix shape does not match dates/fuels");
    for (std::size_t t = 1; t < n; ++t) {
        if (dates[t] != dates[t - 1] + std::chrono::days{1})
            throw Error(ErrorKind::DateGap,
                        "dates must be strictly increasing and consecutive; break after " +
                            format_date(dates[t - 1]));
    }
    std::set<std::string> names;
    for (const auto& f : fuel_types) {
        if (f.empty()) throw Error(ErrorKind::InvalidValue, "empty fuel-type name");
        if (!names.insert(f).second)
            throw Error(ErrorKind::DuplicateRow, "duplicate fuel-type name '" + f + "'");
    }
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < d; ++j) {
            double v = levels(t, j);
            if (!std::isfinite(v) || v < 0.0)
                throw Error(ErrorKind::InvalidValue,
                            "level for " + fuel_types[j] + " on " + format_date(dates[t]) +
                                " is negative or non-finite");
        }
}

void GenerationPanel::validate() const {
    validate_structure();
    if (fuel_count() < 2)
        throw Error(ErrorKind::Dimension, "panel needs at least 2 fuel types, got " +
                                              std::to_string(fuel_count()));
    if (days() < 15)
        throw Error(ErrorKind::InsufficientData,
                    "panel needs at least 15 days for model fitting, got " +
                        std::to_string(days()));
}

CompositionSeries CompositionSeries::head(std::size_t n_days) const {
    if (n_days == 0 || n_days > days())
        throw Error(ErrorKind::Dimension, "head: day count out of range");
    return {{dates.begin(), dates.begin() + static_cast<std::ptrdiff_t>(n_days)},
            shares.slice_rows(0, n_days)};
}

void CompositionSeries::validate() const {
    const std::size_t n = days();
    if (n == 0 || shares.rows() != n)
        throw Error(ErrorKind::Dimension, "composition shape does not match dates");
    for (std::size_t t = 0; t < n; ++t) {
        double sum = 0.0;
        for (double v : shares.row(t)) {
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw Error(ErrorKind::InvalidValue,
                            "share outside [0,1] on " + format_date(dates[t]));
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw Error(ErrorKind::InvalidValue,
                        "share row does not sum to 1 on " + format_date(dates[t]));
    }
}

std::vector<double> SummingMatrix::apply(std::span<const double> bottom) const {
    if (bottom.size() != fuel_count())
        throw Error(ErrorKind::Dimension, "bottom vector length does not match summing matrix");
    std::vector<double> out(entries.rows(), 0.0);
    for (std::size_t r = 0; r < entries.rows(); ++r)
        for (std::size_t c = 0; c < entries.cols(); ++c)
            out[r] += entries(r, c) * bottom[c];
    return out;
}

void ForecastVector::validate() const {
    if (horizon < 1) throw Error(ErrorKind::Dimension, "forecast horizon must be >= 1");
    double sum = 0.0;
    for (double v : values) {
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvalidValue, "forecast contains non-finite values");
        if (unit == ValueUnit::Shares && v < 0.0)
            throw Error(ErrorKind::InvalidValue, "share forecast contains negative values");
        sum += v;
    }
    if (unit == ValueUnit::Shares && std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorKind::InvalidValue, "share forecast does not sum to 1");
}

std::string to_string(MethodId m) {
    switch (m) {
        case MethodId::BU: return "BU";
        case MethodId::TDGSA: return "TDGSA";
        case MethodId::TDGSF: return "TDGSF";
        case MethodId::TDFP: return "TDFP";
        case MethodId::CLR: return "CLR";
        case MethodId::CDF: return "CDF";
    }
    return "?";
}

MethodId parse_method(const std::string& name) {
    for (MethodId m : kAllMethods)
        if (to_string(m) == name) return m;
    std::ostringstream msg;
    msg << "unknown method '" << name << "'; valid methods:";
    for (MethodId m : kAllMethods) msg << " " << to_string(m);
    throw Error(ErrorKind::Usage, msg.str());
}

NegativePolicy parse_negative_policy(const std::string& name) {
    if (name == "clamp_zero") return NegativePolicy::ClampZero;
    if (name == "error") return NegativePolicy::Error;
    throw Error(ErrorKind::Usage,
                "unknown negative policy '" + name + "'; valid: clamp_zero, error");
}

ZeroTotalPolicy parse_zero_total_policy(const std::string& name) {
    if (name == "error") return ZeroTotalPolicy::Error;
    if (name == "uniform") return ZeroTotalPolicy::Uniform;
    throw Error(ErrorKind::Usage,
                "unknown zero-total policy '" + name + "'; valid: error, uniform");
}

void Diagnostics::merge(const Diagnostics& other) {
    clamped_negatives += other.clamped_negatives;
    zero_filled_cells += other.zero_filled_cells;
    zero_total_days_uniform += other.zero_total_days_uniform;
    zero_total_days_skipped += other.zero_total_days_skipped;
    rows_zero_replaced += other.rows_zero_replaced;
    negative_totals_floored += other.negative_totals_floored;
}

SummingMatrix build_summing_matrix(std::size_t fuel_count) {
    if (fuel_count == 0)
        throw Error(ErrorKind::Dimension, "summing matrix needs at least one fuel type");
    Matrix m(fuel_count + 1, fuel_count, 0.0);
    for (std::size_t c = 0; c < fuel_count; ++c) {
        m(0, c) = 1.0;
        m(c + 1, c) = 1.0;
    }
    return {m};
}

std::vector<double> aggregate_total(const GenerationPanel& panel) {
    std::vector<double> total(panel.days(), 0.0);
    for (std::size_t t = 0; t < panel.days(); ++t)
        for (double v : panel.levels.row(t)) total[t] += v;
    return total;
}

CompositionSeries to_shares(const GenerationPanel& panel, ZeroTotalPolicy policy,
                            Diagnostics* diag) {
    const std::size_t n = panel.days();
    const std::size_t d = panel.fuel_count();
    Matrix shares(n, d);
    const std::vector<double> total = aggregate_total(panel);
    for (std::size_t t = 0; t < n; ++t) {
        if (total[t] == 0.0) {
            if (policy == ZeroTotalPolicy::Error)
                throw Error(ErrorKind::ZeroTotal,
                            "zero total generation on " + format_date(panel.dates[t]));
            for (std::size_t j = 0; j < d; ++j) shares(t, j) = 1.0 / double(d);
            if (diag) diag->zero_total_days_uniform++;
            continue;
        }
        for (std::size_t j = 0; j < d; ++j) shares(t, j) = panel.levels(t, j) / total[t];
    }
    return {panel.dates, shares};
}

}  // namespace fuelcast
