#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fuelcast/evaluate.hpp"
#include "fuelcast/json_io.hpp"
#include "fuelcast/synthetic.hpp"
#include "oracles.hpp"

using namespace fuelcast;
using namespace fuelcast::eval;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GenerationPanel constant_share_panel(std::size_t n_days) {
    Matrix levels(n_days, 3);
    for (std::size_t t = 0; t < n_days; ++t) {
        levels(t, 0) = 50.0;
        levels(t, 1) = 30.0;
        levels(t, 2) = 20.0;
    }
    std::vector<Date> dates(n_days);
    for (std::size_t t = 0; t < n_days; ++t)
        dates[t] = Date{std::chrono::year{2021} / 1 / 1} + std::chrono::days{long(t)};
    return {"T", dates, {"A", "B", "C"}, levels};
}

}  // namespace

TEST_CASE("MASE identities") {
    std::vector<double> actual{0.5, 0.5}, prev{0.6, 0.4};
    auto naive = mase_day(actual, prev, prev);
    REQUIRE(naive.has_value());
    CHECK(*naive == doctest::Approx(1.0).epsilon(1e-15));

    auto perfect = mase_day(actual, actual, prev);
    REQUIRE(perfect.has_value());
    CHECK(*perfect == 0.0);

    std::vector<double> forecast{0.55, 0.45};
    auto half = mase_day(actual, forecast, prev);
    REQUIRE(half.has_value());
    CHECK(*half == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("MASE with a zero naive denominator is undefined") {
    std::vector<double> actual{0.5, 0.5};
    CHECK(!mase_day(actual, actual, actual).has_value());
    CHECK_THROWS_AS(mase_day(actual, actual, std::vector<double>{0.5}), Error);
}

TEST_CASE("share MASE is invariant to level scaling") {
    // shares of (c*levels) equal shares of levels up to float rounding
    Matrix day0 = Matrix::from_rows({{60.0, 40.0}});
    Matrix day1 = Matrix::from_rows({{50.0, 50.0}});
    auto shares_of = [](const Matrix& m, double c) {
        const double total = c * (m(0, 0) + m(0, 1));
        return std::vector<double>{c * m(0, 0) / total, c * m(0, 1) / total};
    };
    std::vector<double> forecast{0.55, 0.45};
    auto base = mase_day(shares_of(day1, 1.0), forecast, shares_of(day0, 1.0));
    auto scaled = mase_day(shares_of(day1, 3.7), forecast, shares_of(day0, 3.7));
    REQUIRE(base.has_value());
    REQUIRE(scaled.has_value());
    CHECK(*scaled == doctest::Approx(*base).epsilon(1e-12));
}

TEST_CASE("winner counting follows earliest-wins ties") {
    Matrix m = Matrix::from_rows({{0.1, 0.2}, {0.2, 0.1}, {0.1, 0.1}});
    CHECK(winner_counts(m) == std::vector<std::int64_t>{2, 1});

    Matrix single = Matrix::from_rows({{0.7}});
    CHECK(winner_counts(single) == std::vector<std::int64_t>{1});

    Matrix with_failures(2, 2, kInf);
    with_failures(1, 1) = 0.4;
    auto counts = winner_counts(with_failures);
    CHECK(counts == std::vector<std::int64_t>{0, 1});  // all-inf row counts nobody
}

TEST_CASE("published winner counts partition the 457 test days") {
    const std::vector<std::int64_t> nsw{174, 31, 25, 168, 1, 58};
    std::int64_t sum = 0;
    for (auto c : nsw) sum += c;
    CHECK(sum == 457);
}

TEST_CASE("backtest with a single method assigns it every scored day") {
    auto panel = synth::make_synthetic_panel({.seed = 5, .days = 80, .fuels = 3});
    auto report = rolling_backtest(panel, {0.75}, {MethodId::BU});
    CHECK(report.n_test == 20);
    CHECK(report.undefined_days == 0);
    CHECK(report.winner_counts == std::vector<std::int64_t>{20});
}

TEST_CASE("exactly constant shares make every day undefined but nothing breaks") {
    auto panel = constant_share_panel(60);
    auto report = rolling_backtest(panel, {0.75}, {MethodId::BU, MethodId::CLR});
    CHECK(report.n_test == 15);
    CHECK(report.undefined_days == 15);
    CHECK(report.n_scored == 0);
    for (auto c : report.winner_counts) CHECK(c == 0);
}

TEST_CASE("near-constant dynamics give near-zero MASE for trackers") {
    // smooth weekly share movement that the seasonal candidates can follow
    const std::size_t n = 120;
    Matrix levels(n, 2);
    for (std::size_t t = 0; t < n; ++t) {
        const double s = 0.5 + 0.1 * std::sin(2.0 * std::numbers::pi * double(t) / 7.0);
        levels(t, 0) = 1000.0 * s;
        levels(t, 1) = 1000.0 * (1.0 - s);
    }
    std::vector<Date> dates(n);
    for (std::size_t t = 0; t < n; ++t)
        dates[t] = Date{std::chrono::year{2021} / 1 / 1} + std::chrono::days{long(t)};
    GenerationPanel panel{"T", dates, {"A", "B"}, levels};

    auto report = rolling_backtest(panel, {0.75}, {MethodId::BU});
    CHECK(report.undefined_days == 0);
    std::int64_t total = 0;
    for (auto c : report.winner_counts) total += c;
    CHECK(std::size_t(total) == report.n_test);
    CHECK(report.mean_mase[0] < 0.05);
}

TEST_CASE("per-day MASE equals a literal loop over the public operations") {
    auto panel = synth::make_synthetic_panel({.seed = 12, .days = 200, .fuels = 3});
    const std::vector<MethodId> methods(kAllMethods.begin(), kAllMethods.end());
    BacktestOptions opts;  // refit_every = 1
    auto report = rolling_backtest(panel, {0.75}, methods, opts);

    const auto [n_train, n_test] = ingest::split_sizes(panel.days(), {0.75});
    auto shares = to_shares(panel);
    for (std::size_t origin = 0; origin < n_test; ++origin) {
        const auto history = panel.head(n_train + origin);
        const auto history_shares = shares.head(n_train + origin);
        const auto actual = shares.shares.row(n_train + origin);
        const auto prev = shares.shares.row(n_train + origin - 1);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            ets::Engine fresh;
            auto fc = one_step_shares(methods[m], history, history_shares, fresh, opts);
            auto mase = mase_day(actual, fc, prev);
            REQUIRE(mase.has_value());
            CHECK(report.per_day_mase(origin, m) == *mase);
        }
    }
}

TEST_CASE("backtests are deterministic") {
    auto panel = synth::make_synthetic_panel({.seed = 21, .days = 120, .fuels = 4});
    const std::vector<MethodId> methods(kAllMethods.begin(), kAllMethods.end());
    BacktestOptions opts;
    opts.refit_every = 3;
    auto a = rolling_backtest(panel, {0.8}, methods, opts);
    auto b = rolling_backtest(panel, {0.8}, methods, opts);
    CHECK(a.per_day_mase == b.per_day_mase);
    CHECK(a.winner_counts == b.winner_counts);
    CHECK(a.mean_mase == b.mean_mase);
}

TEST_CASE("mean MASE is the column mean over scored days") {
    auto panel = synth::make_synthetic_panel({.seed = 33, .days = 100, .fuels = 3});
    auto report =
        rolling_backtest(panel, {0.75}, {MethodId::BU, MethodId::TDGSA, MethodId::CDF});
    REQUIRE(report.undefined_days == 0);
    for (std::size_t m = 0; m < report.methods.size(); ++m) {
        double sum = 0.0;
        for (std::size_t t = 0; t < report.n_test; ++t) sum += report.per_day_mase(t, m);
        CHECK(report.mean_mase[m] == doctest::Approx(sum / double(report.n_test))
                                          .epsilon(1e-12));
    }
    // methods arrive in canonical order regardless of request order
    auto shuffled =
        rolling_backtest(panel, {0.75}, {MethodId::CDF, MethodId::BU, MethodId::TDGSA});
    CHECK(shuffled.methods ==
          std::vector<MethodId>{MethodId::BU, MethodId::TDGSA, MethodId::CDF});
    CHECK(shuffled.per_day_mase == report.per_day_mase);
}

TEST_CASE("winner counts partition the scored days across methods") {
    auto panel = synth::make_synthetic_panel({.seed = 44, .days = 150, .fuels = 5});
    const std::vector<MethodId> methods(kAllMethods.begin(), kAllMethods.end());
    BacktestOptions opts;
    opts.refit_every = 5;
    auto report = rolling_backtest(panel, {0.75}, methods, opts);
    std::int64_t sum = 0;
    for (auto c : report.winner_counts) sum += c;
    CHECK(std::size_t(sum) == report.n_scored - report.all_failed_days);
    CHECK(report.n_scored == report.n_test);  // real dynamics: nothing undefined
}

TEST_CASE("report JSON carries the headline numbers") {
    auto panel = synth::make_synthetic_panel({.seed = 3, .days = 80, .fuels = 3});
    auto report = rolling_backtest(panel, {0.75}, {MethodId::BU, MethodId::CDF});
    auto j = report_to_json(report);
    CHECK(j.at("n_test").get<std::size_t>() == report.n_test);
    CHECK(j.at("n_train").get<std::size_t>() == report.n_train);
    CHECK(j.at("mean_mase").at("BU").get<double>() ==
          doctest::Approx(report.mean_mase[0]));
    CHECK(j.at("winner_counts").at("CDF").get<std::int64_t>() ==
          report.winner_counts[1]);
}

TEST_CASE("table formats expose one row per region with both blocks") {
    auto panel = synth::make_synthetic_panel({.seed = 3, .days = 80, .fuels = 3});
    const std::vector<MethodId> methods(kAllMethods.begin(), kAllMethods.end());
    auto report = rolling_backtest(panel, {0.75}, methods);
    std::vector<BacktestReport> reports{report};

    auto text = format_table_text(reports);
    CHECK(text.find("Region") != std::string::npos);
    CHECK(text.find("SYN") != std::string::npos);
    CHECK(text.find('|') != std::string::npos);

    auto csv = format_table_csv(reports);
    std::istringstream lines(csv);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header ==
          "region,mase_BU,mase_TDGSA,mase_TDGSF,mase_TDFP,mase_CLR,mase_CDF,"
          "days_BU,days_TDGSA,days_TDGSF,days_TDFP,days_CLR,days_CDF");
    CHECK(std::count(row.begin(), row.end(), ',') == 12);

    std::ostringstream per_day;
    write_per_day_csv(per_day, report);
    std::istringstream pd(per_day.str());
    std::string pd_header;
    std::getline(pd, pd_header);
    CHECK(pd_header == "date,BU,TDGSA,TDGSF,TDFP,CLR,CDF");
    std::size_t data_lines = 0;
    std::string line;
    while (std::getline(pd, line))
        if (!line.empty()) ++data_lines;
    CHECK(data_lines == report.n_test);
}

TEST_CASE("ETS recursion oracle agrees with recorded backtest cells") {
    // spot-check one BU cell end to end through the public pieces
    auto panel = synth::make_synthetic_panel({.seed = 99, .days = 60, .fuels = 2});
    auto report = rolling_backtest(panel, {0.75}, {MethodId::BU});
    const auto [n_train, n_test] = ingest::split_sizes(panel.days(), {0.75});
    auto shares = to_shares(panel);

    const std::size_t origin = n_test / 2;
    const auto history = panel.head(n_train + origin);
    std::vector<double> bottom(2);
    for (std::size_t j = 0; j < 2; ++j) {
        auto fit = ets::select_ets(history.fuel_series(j));
        oracles::EtsOracleParams p;
        p.alpha = fit.params.alpha;
        p.beta = fit.params.beta;
        p.phi = fit.params.phi;
        p.gamma = fit.params.gamma;
        p.trend = fit.spec.has_trend();
        p.damped = fit.spec.damped();
        p.seasonal = fit.spec.has_seasonal();
        p.period = fit.spec.period;
        auto run = oracles::ets_oracle_filter(
            history.fuel_series(j), p,
            {fit.initial.level, fit.initial.trend, fit.initial.seasonal});
        bottom[j] = oracles::ets_oracle_forecast(p, run.state, history.days(), 1)[0];
    }
    const double total = bottom[0] + bottom[1];
    std::vector<double> fc{bottom[0] / total, bottom[1] / total};
    auto mase = mase_day(shares.shares.row(n_train + origin), fc,
                         shares.shares.row(n_train + origin - 1));
    REQUIRE(mase.has_value());
    CHECK(report.per_day_mase(origin, 0) == doctest::Approx(*mase).epsilon(1e-12));
}
