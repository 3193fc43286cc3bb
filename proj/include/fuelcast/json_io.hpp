#pragma once

#include <json.hpp>

#include "fuelcast/coda.hpp"
#include "fuelcast/core.hpp"
#include "fuelcast/ets.hpp"
#include "fuelcast/evaluate.hpp"

namespace fuelcast {

nlohmann::json panel_to_json(const GenerationPanel& panel);
GenerationPanel panel_from_json(const nlohmann::json& j);

nlohmann::json diagnostics_to_json(const Diagnostics& diag);

namespace ets {
nlohmann::json fitted_to_json(const FittedEts& model);
FittedEts fitted_from_json(const nlohmann::json& j);
}  // namespace ets

namespace coda {
/// Eigenvalues, retained component count and the retained component vectors.
nlohmann::json decomposition_to_json(const PcaDecomposition& dec, std::size_t retained);
}  // namespace coda

namespace eval {
nlohmann::json report_to_json(const BacktestReport& report);
}  // namespace eval

}  // namespace fuelcast
