#pragma once

#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "fuelcast/errors.hpp"

namespace fuelcast::ets {

enum class Trend { None, Additive, AdditiveDamped };
enum class Seasonal { None, Additive };

/// Model form. The error term is always additive: fuel-mix shares, CLR
/// values and PCA scores can be negative, which rules out multiplicative
/// components.
struct EtsSpec {
    Trend trend = Trend::None;
    Seasonal seasonal = Seasonal::None;
    int period = 0;  // 7 for weekly seasonality, unused otherwise

    bool has_trend() const { return trend != Trend::None; }
    bool damped() const { return trend == Trend::AdditiveDamped; }
    bool has_seasonal() const { return seasonal == Seasonal::Additive; }

    /// Shortest series the form can be fitted to: 2*period + 3 with a
    /// seasonal component, 5 otherwise.
    std::size_t min_observations() const;

    std::string name() const;  // "ANN", "AAN", "AAdN", "ANA", "AAA"

    bool operator==(const EtsSpec&) const = default;
};

/// The five candidate forms: (A,N,N), (A,A,N), (A,Ad,N), (A,N,A,7), (A,A,A,7).
std::vector<EtsSpec> default_candidates();

/// Smoothing parameters in innovations form: 0 < alpha < 1, 0 < beta < alpha,
/// 0.8 <= phi <= 0.98, 0 < gamma < 1 - alpha. Unused entries keep their
/// neutral defaults.
struct EtsParams {
    double alpha = 0.1;
    double beta = 0.0;
    double phi = 1.0;
    double gamma = 0.0;
};

struct EtsState {
    double level = 0.0;
    double trend = 0.0;
    std::vector<double> seasonal;  // slot j applies to observations with t % period == j

    bool operator==(const EtsState&) const = default;
};

struct FittedEts {
    EtsSpec spec;
    EtsParams params;
    EtsState initial;      // first-cycle heuristic states, fixed during the search
    EtsState final_state;  // states after filtering the whole series
    double sse = 0.0;
    double loglik = 0.0;
    double aicc = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;  // free parameters, initial states included
};

/// Free-parameter count entering AICc: level + trend state + (period - 1)
/// seasonal states + one per active smoothing parameter.
std::size_t free_param_count(const EtsSpec& spec);

/// AICc = -2*loglik + 2k + 2k(k+1)/(n-k-1); +inf when n <= k + 1.
double aicc_value(double loglik, std::size_t k, std::size_t n);

/// Fits by minimizing the one-step in-sample SSE with a bounded Nelder-Mead
/// search from a fixed start (alpha=0.1, beta=0.01, phi=0.97, gamma=0.01);
/// initial states come from a first-cycle decomposition and stay fixed.
/// Deterministic: refits reproduce identical parameters.
FittedEts fit_ets(std::span<const double> series, const EtsSpec& spec);

/// Fits every feasible candidate and returns the lowest AICc; ties keep the
/// earlier candidate. Throws Error{Selection} when every candidate fails.
FittedEts select_ets(std::span<const double> series, std::span<const EtsSpec> candidates);
FittedEts select_ets(std::span<const double> series);

/// Point forecasts; a damped trend contributes (phi + ... + phi^h) * b.
std::vector<double> forecast_ets(const FittedEts& model, int h);

/// Re-applies fixed parameters to a (typically longer) series: initial
/// states are re-derived by the first-cycle heuristic, then the recursion
/// refreshes final states and fit statistics.
FittedEts update_states(const FittedEts& model, std::span<const double> series);

/// Candidate-set holder with an optional parameter cache so a rolling
/// backtest can refit every few origins while updating states daily.
/// Without the cache every call runs a full selection, so the engine is
/// stateless. Cached entries are keyed by caller-chosen series ids; keys
/// touched concurrently produce identical models, so results do not depend
/// on scheduling.
class Engine {
public:
    Engine();
    explicit Engine(std::vector<EtsSpec> candidates);

    void enable_cache(bool on);
    /// Marks a new forecast origin; refit=false allows parameter reuse.
    void begin_origin(std::size_t origin_id, bool refit);

    FittedEts model_for(const std::string& key, std::span<const double> series);
    std::vector<double> forecast_series(const std::string& key,
                                        std::span<const double> series, int h);

    const std::vector<EtsSpec>& candidates() const { return candidates_; }

private:
    struct Entry {
        FittedEts model;
        std::size_t origin = 0;
    };

    std::vector<EtsSpec> candidates_;
    bool cache_on_ = false;
    bool refit_ = true;
    std::size_t origin_ = 0;
    std::unordered_map<std::string, Entry> cache_;
    std::mutex mu_;
};

}  // namespace fuelcast::ets
