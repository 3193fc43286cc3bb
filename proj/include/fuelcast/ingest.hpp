#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fuelcast/core.hpp"

namespace fuelcast::ingest {

/// One long-format CSV row: date,region,fuel_type,generation_mwh.
struct RawRecord {
    Date date;
    std::string region;
    std::string fuel_type;
    double generation_mwh = 0.0;

    bool operator==(const RawRecord&) const = default;
};

struct SplitSpec {
    double train_fraction = 0.75;
};

/// Parses the long CSV format. The header must be exactly
/// `date,region,fuel_type,generation_mwh`; row errors carry 1-based line
/// numbers (the header is line 1).
std::vector<RawRecord> parse_csv(std::istream& in);

/// Pivots records for one region into a panel. Fuel types are ordered by
/// (earliest date present, name) so the result does not depend on row
/// order. Missing (date, fuel) cells become 0 and are counted; negatives
/// follow the policy.
GenerationPanel build_panel(std::span<const RawRecord> records, const std::string& region,
                            NegativePolicy policy = NegativePolicy::ClampZero,
                            Diagnostics* diag = nullptr);

/// (train days, test days) with the test side rounded up:
/// n_test = ceil((1 - f) * n). Throws Error{Split} if either side is empty.
std::pair<std::size_t, std::size_t> split_sizes(std::size_t n_days, const SplitSpec& spec);

std::pair<GenerationPanel, GenerationPanel> split_train_test(const GenerationPanel& panel,
                                                             const SplitSpec& spec);

/// Distinct regions present, sorted by name.
std::vector<std::string> regions_in(std::span<const RawRecord> records);

/// Serializes a panel back to the long CSV format (levels with 6 decimals).
void write_long_csv(std::ostream& out, const GenerationPanel& panel);

}  // namespace fuelcast::ingest
