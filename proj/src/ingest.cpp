#include "fuelcast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fuelcast::ingest {

namespace {

constexpr const char* kHeader = "date,region,fuel_type,generation_mwh";

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_mwh(const std::string& field, std::size_t line_no) {
    const char* begin = field.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (field.empty() || end != begin + field.size() || !std::isfinite(v))
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) +
                                          ": invalid generation_mwh '" + field + "'");
    return v;
}

}  // namespace

std::vector<RawRecord> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::EmptyInput,
                    std::string("empty input: expected header '") + kHeader + "'");
    strip_cr(line);
    if (line != kHeader)
        throw Error(ErrorKind::Schema, std::string("malformed header: expected '") + kHeader +
                                           "', got '" + line + "'");

    std::vector<RawRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_fields(line);
        if (fields.size() != 4)
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": expected 4 comma-separated "
                        "fields, got " + std::to_string(fields.size()));
        RawRecord rec;
        try {
            rec.date = parse_date(fields[0]);
        } catch (const Error& e) {
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": " + e.what());
        }
        rec.region = fields[1];
        rec.fuel_type = fields[2];
        if (rec.region.empty())
            throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": empty region");
        if (rec.fuel_type.empty())
            throw Error(ErrorKind::Parse,
                        "line " + std::to_string(line_no) + ": empty fuel_type");
        rec.generation_mwh = parse_mwh(fields[3], line_no);
        records.push_back(std::move(rec));
    }
    return records;
}

GenerationPanel build_panel(std::span<const RawRecord> records, const std::string& region,
                            NegativePolicy policy, Diagnostics* diag) {
    std::set<Date> date_set;
    std::map<std::string, Date> first_seen;
    for (const auto& rec : records) {
        if (rec.region != region) continue;
        date_set.insert(rec.date);
        auto [it, inserted] = first_seen.try_emplace(rec.fuel_type, rec.date);
        if (!inserted && rec.date < it->second) it->second = rec.date;
    }
    if (date_set.empty())
        throw Error(ErrorKind::EmptyInput, "no records for region '" + region + "'");

    std::vector<Date> dates(date_set.begin(), date_set.end());
    std::vector<Date> missing;
    for (std::size_t t = 1; t < dates.size(); ++t)
        for (Date d = dates[t - 1] + std::chrono::days{1}; d < dates[t];
             d += std::chrono::days{1})
            missing.push_back(d);
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "region '" << region << "' has " << missing.size() << " missing date(s):";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i)
            msg << " " << format_date(missing[i]);
        if (missing.size() > 10) msg << " ...";
        throw Error(ErrorKind::DateGap, msg.str());
    }

    // Fuel order: earliest appearance first, names breaking ties. This keeps
    // panel construction independent of input row order.
    std::vector<std::string> fuels;
    fuels.reserve(first_seen.size());
    for (const auto& [name, _] : first_seen) fuels.push_back(name);
    std::sort(fuels.begin(), fuels.end(), [&](const std::string& a, const std::string& b) {
        if (first_seen.at(a) != first_seen.at(b)) return first_seen.at(a) < first_seen.at(b);
        return a < b;
    });
    std::map<std::string, std::size_t> fuel_index;
    for (std::size_t j = 0; j < fuels.size(); ++j) fuel_index[fuels[j]] = j;

    const std::size_t n = dates.size();
    const std::size_t d = fuels.size();
    Matrix levels(n, d, 0.0);
    std::vector<char> filled(n * d, 0);
    const Date first_date = dates.front();
    std::size_t cells = 0;
    for (const auto& rec : records) {
        if (rec.region != region) continue;
        auto t = static_cast<std::size_t>((rec.date - first_date).count());
        std::size_t j = fuel_index.at(rec.fuel_type);
        if (filled[t * d + j])
            throw Error(ErrorKind::DuplicateRow, "duplicate row for " + format_date(rec.date) +
                                                     " / " + rec.fuel_type);
        filled[t * d + j] = 1;
        ++cells;
        double v = rec.generation_mwh;
        if (v < 0.0) {
            if (policy == NegativePolicy::Error)
                throw Error(ErrorKind::NegativeValue,
                            "negative generation for " + format_date(rec.date) + " / " +
                                rec.fuel_type);
            v = 0.0;
            if (diag) diag->clamped_negatives++;
        }
        levels(t, j) = v;
    }
    if (diag) diag->zero_filled_cells += static_cast<std::int64_t>(n * d - cells);

    GenerationPanel panel{region, std::move(dates), std::move(fuels), std::move(levels)};
    panel.validate_structure();
    return panel;
}

std::pair<std::size_t, std::size_t> split_sizes(std::size_t n_days, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw Error(ErrorKind::Split, "train_fraction must lie in (0,1)");
    auto n_test =
        static_cast<std::size_t>(std::ceil((1.0 - spec.train_fraction) * double(n_days)));
    if (n_test > n_days) n_test = n_days;
    std::size_t n_train = n_days - n_test;
    if (n_test == 0 || n_train == 0)
        throw Error(ErrorKind::Split, "split leaves an empty partition (n=" +
                                          std::to_string(n_days) + ", train_fraction=" +
                                          std::to_string(spec.train_fraction) + ")");
    return {n_train, n_test};
}

std::pair<GenerationPanel, GenerationPanel> split_train_test(const GenerationPanel& panel,
                                                             const SplitSpec& spec) {
    auto [n_train, n_test] = split_sizes(panel.days(), spec);
    (void)n_test;
    return {panel.head(n_train), panel.tail(n_train)};
}

std::vector<std::string> regions_in(std::span<const RawRecord> records) {
    std::set<std::string> set;
    for (const auto& rec : records) set.insert(rec.region);
    return {set.begin(), set.end()};
}

void write_long_csv(std::ostream& out, const GenerationPanel& panel) {
    out << kHeader << "\n";
    char buf[64];
    for (std::size_t t = 0; t < panel.days(); ++t)
        for (std::size_t j = 0; j < panel.fuel_count(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.6f", panel.levels(t, j));
            out << format_date(panel.dates[t]) << "," << panel.region << ","
                << panel.fuel_types[j] << "," << buf << "\n";
        }
}

}  // namespace fuelcast::ingest
