#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "fuelcast/ingest.hpp"
#include "fuelcast/json_io.hpp"
#include "oracles.hpp"

using namespace fuelcast;
using namespace fuelcast::ingest;

namespace {

std::string csv_for_days(std::size_t n_days, const std::vector<std::string>& fuels,
                         const std::string& region = "NSW") {
    oracles::TestRng rng(91);
    std::ostringstream out;
    out << "date,region,fuel_type,generation_mwh\n";
    const Date start = parse_date("2019-01-01");
    for (std::size_t t = 0; t < n_days; ++t)
        for (const auto& f : fuels)
            out << format_date(start + std::chrono::days{long(t)}) << "," << region << ","
                << f << "," << rng.uniform(10.0, 5000.0) << "\n";
    return out.str();
}

std::vector<RawRecord> parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

}  // namespace

TEST_CASE("parse_csv reads one record per data row") {
    auto records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Black Coal,152000.5\n");
    REQUIRE(records.size() == 1);
    CHECK(records[0].date == parse_date("2019-01-01"));
    CHECK(records[0].region == "NSW");
    CHECK(records[0].fuel_type == "Black Coal");
    CHECK(records[0].generation_mwh == doctest::Approx(152000.5));
}

TEST_CASE("parse_csv header-only file gives an empty list") {
    CHECK(parse_string("date,region,fuel_type,generation_mwh\n").empty());
}

TEST_CASE("parse_csv rejects a malformed header naming both forms") {
    try {
        parse_string("date,region,fuel,generation_mwh\nx\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Schema);
        const std::string msg = e.what();
        CHECK(msg.find("date,region,fuel_type,generation_mwh") != std::string::npos);
        CHECK(msg.find("date,region,fuel,generation_mwh") != std::string::npos);
    }
}

TEST_CASE("parse_csv rejects an empty file") {
    try {
        parse_string("");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyInput);
    }
}

TEST_CASE("parse_csv names the offending line") {
    try {
        parse_string(
            "date,region,fuel_type,generation_mwh\n"
            "2019-01-01,NSW,Wind,abc\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        parse_string(
            "date,region,fuel_type,generation_mwh\n"
            "2019-01-01,NSW,Wind,1.0\n"
            "2019-13-01,NSW,Wind,1.0\n");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("build_panel pivots complete data") {
    auto records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Coal,10\n"
        "2019-01-01,NSW,Wind,2\n"
        "2019-01-02,NSW,Coal,11\n"
        "2019-01-02,NSW,Wind,3\n"
        "2019-01-03,NSW,Coal,12\n"
        "2019-01-03,NSW,Wind,4\n");
    auto panel = build_panel(records, "NSW");
    CHECK(panel.days() == 3);
    CHECK(panel.fuel_count() == 2);
    CHECK(panel.levels(2, 0) == 12.0);
    CHECK(panel.levels(2, 1) == 4.0);
}

TEST_CASE("build_panel negative policies") {
    auto records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Battery,-5.0\n"
        "2019-01-01,NSW,Coal,10\n");
    Diagnostics diag;
    auto panel = build_panel(records, "NSW", NegativePolicy::ClampZero, &diag);
    CHECK(panel.levels(0, 0) == 0.0);
    CHECK(diag.clamped_negatives == 1);

    CHECK_THROWS_AS(build_panel(records, "NSW", NegativePolicy::Error), Error);
}

TEST_CASE("build_panel reports gaps, duplicates and missing cells") {
    auto gap_records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Coal,1\n"
        "2019-01-04,NSW,Coal,2\n");
    try {
        build_panel(gap_records, "NSW");
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DateGap);
        const std::string msg = e.what();
        CHECK(msg.find("2019-01-02") != std::string::npos);
        CHECK(msg.find("2019-01-03") != std::string::npos);
    }

    auto dup_records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Coal,1\n"
        "2019-01-01,NSW,Coal,2\n");
    CHECK_THROWS_AS(build_panel(dup_records, "NSW"), Error);

    auto sparse = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Coal,1\n"
        "2019-01-01,NSW,Wind,2\n"
        "2019-01-02,NSW,Coal,3\n");
    Diagnostics diag;
    auto panel = build_panel(sparse, "NSW", NegativePolicy::ClampZero, &diag);
    CHECK(diag.zero_filled_cells == 1);
    CHECK(panel.levels(1, 1) == 0.0);

    CHECK_THROWS_AS(build_panel(sparse, "QLD"), Error);
}

TEST_CASE("build_panel fuel order follows earliest appearance then name") {
    auto records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,NSW,Coal,1\n"
        "2019-01-01,NSW,Wind,2\n"
        "2019-01-02,NSW,Coal,3\n"
        "2019-01-02,NSW,Wind,4\n"
        "2019-01-02,NSW,Battery,5\n");
    auto panel = build_panel(records, "NSW");
    // Battery only enters on day 2, so it sorts after the day-1 fuels.
    CHECK(panel.fuel_types == std::vector<std::string>{"Coal", "Wind", "Battery"});
}

TEST_CASE("build_panel is invariant to record order") {
    auto records = parse_string(csv_for_days(15, {"Coal", "Gas", "Wind"}));
    auto reference = build_panel(records, "NSW");

    oracles::TestRng rng(5);
    for (int rep = 0; rep < 5; ++rep) {
        auto shuffled = records;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.next() % i]);
        CHECK(build_panel(shuffled, "NSW") == reference);
    }
}

TEST_CASE("long CSV round trip is lossless") {
    auto records = parse_string(csv_for_days(16, {"Coal", "Wind"}));
    auto panel = build_panel(records, "NSW");
    std::ostringstream out;
    write_long_csv(out, panel);
    auto reparsed = build_panel(parse_string(out.str()), "NSW");
    CHECK(reparsed.days() == panel.days());
    CHECK(reparsed.fuel_types == panel.fuel_types);
    for (std::size_t t = 0; t < panel.days(); ++t)
        for (std::size_t j = 0; j < panel.fuel_count(); ++j)
            CHECK(reparsed.levels(t, j) ==
                  doctest::Approx(panel.levels(t, j)).epsilon(1e-9));

    // a second round trip is byte-stable
    std::ostringstream out2;
    write_long_csv(out2, reparsed);
    CHECK(out.str() == out2.str());
}

TEST_CASE("split sizes reproduce the 1826-day case") {
    SplitSpec spec;  // 0.75
    auto [train, test] = split_sizes(1826, spec);
    CHECK(train == 1369);
    CHECK(test == 457);
}

TEST_CASE("split ceiling rule on small panels") {
    CHECK(split_sizes(4, {0.75}) == std::pair<std::size_t, std::size_t>{3, 1});
    // a 99% fraction still leaves one test day
    CHECK(split_sizes(10, {0.99}) == std::pair<std::size_t, std::size_t>{9, 1});
    // degenerate fractions leave an empty partition
    CHECK_THROWS_AS(split_sizes(10, {0.01}), Error);
    CHECK_THROWS_AS(split_sizes(10, {1.5}), Error);
    CHECK_THROWS_AS(split_sizes(10, {0.0}), Error);
}

TEST_CASE("split_train_test partitions without overlap and concatenates back") {
    auto records = parse_string(csv_for_days(20, {"Coal", "Wind"}));
    auto panel = build_panel(records, "NSW");
    auto [train, test] = split_train_test(panel, {0.75});
    CHECK(train.days() + test.days() == panel.days());
    CHECK(train.dates.back() + std::chrono::days{1} == test.dates.front());
    for (std::size_t t = 0; t < train.days(); ++t)
        for (std::size_t j = 0; j < panel.fuel_count(); ++j)
            CHECK(train.levels(t, j) == panel.levels(t, j));
    for (std::size_t t = 0; t < test.days(); ++t)
        for (std::size_t j = 0; j < panel.fuel_count(); ++j)
            CHECK(test.levels(t, j) == panel.levels(train.days() + t, j));
}

TEST_CASE("panel JSON round trip") {
    auto records = parse_string(csv_for_days(15, {"Coal", "Wind"}));
    auto panel = build_panel(records, "NSW");
    auto j = panel_to_json(panel);
    auto back = panel_from_json(j);
    CHECK(back == panel);
}

TEST_CASE("regions_in lists distinct regions sorted") {
    auto records = parse_string(
        "date,region,fuel_type,generation_mwh\n"
        "2019-01-01,VIC,Coal,1\n"
        "2019-01-01,NSW,Coal,1\n"
        "2019-01-01,QLD,Coal,1\n"
        "2019-01-02,NSW,Coal,1\n");
    CHECK(regions_in(records) == std::vector<std::string>{"NSW", "QLD", "VIC"});
}
