#include "fuelcast/ets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace fuelcast::ets {

namespace {

constexpr double kAlphaLo = 1e-4;
constexpr double kAlphaHi = 1.0 - 1e-4;
constexpr double kBetaLo = 1e-8;
constexpr double kGammaLo = 1e-8;
constexpr double kPhiLo = 0.80;
constexpr double kPhiHi = 0.98;
constexpr double kRelMargin = 1e-8;  // keeps beta < alpha and gamma < 1 - alpha strict
constexpr int kMaxEvals = 2000;
constexpr double kSseTol = 1e-8;

double clamp(double v, double lo, double hi) { return std::max(lo, std::min(v, hi)); }

/// Mapping between the Nelder-Mead vector and EtsParams. Relative bounds
/// (beta < alpha, gamma < 1 - alpha) are applied at unpack time, so the
/// search itself is unconstrained.
struct ParamLayout {
    bool has_beta = false;
    bool has_phi = false;
    bool has_gamma = false;

    std::size_t size() const {
        return 1 + (has_beta ? 1 : 0) + (has_phi ? 1 : 0) + (has_gamma ? 1 : 0);
    }

    EtsParams unpack(std::span<const double> x) const {
        EtsParams p;
        std::size_t i = 0;
        p.alpha = clamp(x[i++], kAlphaLo, kAlphaHi);
        if (has_beta) p.beta = clamp(x[i++], kBetaLo, p.alpha - kRelMargin);
        if (has_phi) p.phi = clamp(x[i++], kPhiLo, kPhiHi);
        if (has_gamma) p.gamma = clamp(x[i++], kGammaLo, (1.0 - p.alpha) - kRelMargin);
        return p;
    }

    std::vector<double> start() const {
        std::vector<double> x{0.1};
        if (has_beta) x.push_back(0.01);
        if (has_phi) x.push_back(0.97);
        if (has_gamma) x.push_back(0.01);
        return x;
    }

    std::vector<double> steps() const {
        std::vector<double> s{0.15};
        if (has_beta) s.push_back(0.05);
        if (has_phi) s.push_back(-0.05);
        if (has_gamma) s.push_back(0.05);
        return s;
    }
};

ParamLayout layout_for(const EtsSpec& spec) {
    return {spec.has_trend(), spec.damped(), spec.has_seasonal()};
}

struct FilterOutcome {
    EtsState state;
    double sse = 0.0;
};

/// One pass of the additive innovations recursion:
///   pred = l + phi*b + s[t % m],  e = y - pred,
///   l' = l + phi*b + alpha*e,  b' = phi*b + beta*e,  s[t % m] += gamma*e.
FilterOutcome filter_series(std::span<const double> y, const EtsSpec& spec,
                            const EtsParams& p, const EtsState& initial) {
    FilterOutcome out{initial, 0.0};
    EtsState& st = out.state;
    const bool trend = spec.has_trend();
    const bool seasonal = spec.has_seasonal();
    const double phi = spec.damped() ? p.phi : 1.0;
    const std::size_t m = seasonal ? static_cast<std::size_t>(spec.period) : 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const double phi_b = trend ? phi * st.trend : 0.0;
        const double seas = seasonal ? st.seasonal[t % m] : 0.0;
        const double e = y[t] - (st.level + phi_b + seas);
        out.sse += e * e;
        st.level = st.level + phi_b + p.alpha * e;
        if (trend) st.trend = phi_b + p.beta * e;
        if (seasonal) st.seasonal[t % m] += p.gamma * e;
    }
    return out;
}

/// First-cycle decomposition: b0 = average slope over the cycle, l0 = cycle
/// mean anchored back to t=0, seasonal = deviations from the fitted line
/// (centered). Cycle length is the seasonal period, else min(7, n).
EtsState initial_states(std::span<const double> y, const EtsSpec& spec) {
    EtsState st;
    const std::size_t w =
        spec.has_seasonal() ? static_cast<std::size_t>(spec.period) : std::min<std::size_t>(7, y.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < w; ++i) mean += y[i];
    mean /= double(w);
    if (spec.has_trend() && w >= 2) st.trend = (y[w - 1] - y[0]) / double(w - 1);
    st.level = mean - st.trend * double(w + 1) / 2.0;
    if (spec.has_seasonal()) {
        st.seasonal.resize(w);
        double s_mean = 0.0;
        for (std::size_t j = 0; j < w; ++j) {
            st.seasonal[j] = y[j] - (st.level + st.trend * double(j + 1));
            s_mean += st.seasonal[j];
        }
        s_mean /= double(w);
        for (double& s : st.seasonal) s -= s_mean;
    }
    return st;
}

struct NmResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
};

/// Deterministic Nelder-Mead with fixed initial simplex steps. Returns the
/// best point ever evaluated (which includes the start point).
template <typename F>
NmResult nelder_mead(const F& objective, std::vector<double> x0, std::vector<double> steps,
                     int max_evals, double ftol) {
    const std::size_t dim = x0.size();
    NmResult best;
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        double f = objective(x);
        ++evals;
        if (f < best.f) best = {x, f};
        return f;
    };

    std::vector<std::vector<double>> pts(dim + 1, x0);
    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = eval(pts[i]);

    std::vector<std::size_t> order(dim + 1);
    while (evals < max_evals) {
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t lo = order.front(), hi = order.back(), second_hi = order[dim ? dim - 1 : 0];
        if (fv[hi] - fv[lo] <= ftol) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == hi) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[i][d];
        }
        for (double& c : centroid) c /= double(dim);

        auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d)
                x[d] = centroid[d] + coef * (pts[hi][d] - centroid[d]);
            return x;
        };

        std::vector<double> xr = blend(-1.0);
        double fr = eval(xr);
        if (fr < fv[lo]) {
            std::vector<double> xe = blend(-2.0);
            double fe = eval(xe);
            if (fe < fr) {
                pts[hi] = std::move(xe);
                fv[hi] = fe;
            } else {
                pts[hi] = std::move(xr);
                fv[hi] = fr;
            }
        } else if (fr < fv[second_hi]) {
            pts[hi] = std::move(xr);
            fv[hi] = fr;
        } else {
            const bool outside = fr < fv[hi];
            std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            double fc = eval(xc);
            if (fc < std::min(fr, fv[hi])) {
                pts[hi] = std::move(xc);
                fv[hi] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == lo) continue;
                    for (std::size_t d = 0; d < dim; ++d)
                        pts[i][d] = pts[lo][d] + 0.5 * (pts[i][d] - pts[lo][d]);
                    fv[i] = eval(pts[i]);
                    if (evals >= max_evals) break;
                }
            }
        }
    }
    return best;
}

double gaussian_loglik(double sse, std::size_t n) {
    if (sse <= 0.0) return std::numeric_limits<double>::infinity();
    return -0.5 * double(n) * (std::log(2.0 * std::numbers::pi * sse / double(n)) + 1.0);
}

void check_series(std::span<const double> y, const EtsSpec& spec) {
    for (double v : y)
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvalidValue, "series contains non-finite values");
    if (y.size() < spec.min_observations())
        throw Error(ErrorKind::InsufficientData,
                    "spec " + spec.name() + " needs >= " +
                        std::to_string(spec.min_observations()) + " observations, got " +
                        std::to_string(y.size()));
}

}  // namespace

std::size_t EtsSpec::min_observations() const {
    return has_seasonal() ? 2 * static_cast<std::size_t>(period) + 3 : 5;
}

std::string EtsSpec::name() const {
    std::string t = trend == Trend::None ? "N" : (trend == Trend::Additive ? "A" : "Ad");
    std::string s = has_seasonal() ? "A" : "N";
    return "A" + t + s;
}

std::vector<EtsSpec> default_candidates() {
    return {
        {Trend::None, Seasonal::None, 0},
        {Trend::Additive, Seasonal::None, 0},
        {Trend::AdditiveDamped, Seasonal::None, 0},
        {Trend::None, Seasonal::Additive, 7},
        {Trend::Additive, Seasonal::Additive, 7},
    };
}

std::size_t free_param_count(const EtsSpec& spec) {
    std::size_t k = 2;  // level state + alpha
    if (spec.has_trend()) k += 2;
    if (spec.damped()) k += 1;
    if (spec.has_seasonal()) k += static_cast<std::size_t>(spec.period - 1) + 1;
    return k;
}

double aicc_value(double loglik, std::size_t k, std::size_t n) {
    if (n <= k + 1) return std::numeric_limits<double>::infinity();
    const double kd = double(k);
    return -2.0 * loglik + 2.0 * kd + 2.0 * kd * (kd + 1.0) / (double(n) - kd - 1.0);
}

FittedEts fit_ets(std::span<const double> series, const EtsSpec& spec) {
    if (spec.has_seasonal() && spec.period < 2)
        throw Error(ErrorKind::Dimension, "seasonal period must be >= 2");
    check_series(series, spec);

    const EtsState initial = initial_states(series, spec);
    const ParamLayout layout = layout_for(spec);
    auto objective = [&](const std::vector<double>& x) {
        return filter_series(series, spec, layout.unpack(x), initial).sse;
    };
    NmResult best = nelder_mead(objective, layout.start(), layout.steps(), kMaxEvals, kSseTol);

    FittedEts fit;
    fit.spec = spec;
    fit.params = layout.unpack(best.x);
    fit.initial = initial;
    FilterOutcome run = filter_series(series, spec, fit.params, initial);
    fit.final_state = std::move(run.state);
    fit.sse = run.sse;
    fit.n = series.size();
    fit.k = free_param_count(spec);
    fit.loglik = gaussian_loglik(fit.sse, fit.n);
    fit.aicc = aicc_value(fit.loglik, fit.k, fit.n);
    return fit;
}

FittedEts select_ets(std::span<const double> series, std::span<const EtsSpec> candidates) {
    if (candidates.empty())
        throw Error(ErrorKind::Selection, "no candidate specifications given");
    bool have_best = false;
    FittedEts best;
    std::vector<std::string> causes;
    for (const EtsSpec& spec : candidates) {
        try {
            FittedEts fit = fit_ets(series, spec);
            if (!have_best || fit.aicc < best.aicc) {
                best = std::move(fit);
                have_best = true;
            }
        } catch (const Error& e) {
            causes.push_back(spec.name() + ": " + e.what());
        }
    }
    if (!have_best) {
        std::ostringstream msg;
        msg << "every candidate failed:";
        for (const auto& c : causes) msg << " [" << c << "]";
        throw Error(ErrorKind::Selection, msg.str());
    }
    return best;
}

FittedEts select_ets(std::span<const double> series) {
    const auto cands = default_candidates();
    return select_ets(series, cands);
}

std::vector<double> forecast_ets(const FittedEts& model, int h) {
    if (h < 1) throw Error(ErrorKind::Dimension, "forecast horizon must be >= 1");
    const EtsSpec& spec = model.spec;
    const EtsState& st = model.final_state;
    std::vector<double> out(static_cast<std::size_t>(h));
    double damp_sum = 0.0;
    for (int i = 1; i <= h; ++i) {
        double trend_term = 0.0;
        if (spec.trend == Trend::Additive) trend_term = double(i) * st.trend;
        if (spec.trend == Trend::AdditiveDamped) {
            damp_sum += std::pow(model.params.phi, i);
            trend_term = damp_sum * st.trend;
        }
        double seas = 0.0;
        if (spec.has_seasonal()) {
            const auto m = static_cast<std::size_t>(spec.period);
            seas = st.seasonal[(model.n + static_cast<std::size_t>(i) - 1) % m];
        }
        out[static_cast<std::size_t>(i - 1)] = st.level + trend_term + seas;
    }
    return out;
}

FittedEts update_states(const FittedEts& model, std::span<const double> series) {
    check_series(series, model.spec);
    FittedEts fit = model;
    fit.initial = initial_states(series, model.spec);
    FilterOutcome run = filter_series(series, model.spec, model.params, fit.initial);
    fit.final_state = std::move(run.state);
    fit.sse = run.sse;
    fit.n = series.size();
    fit.loglik = gaussian_loglik(fit.sse, fit.n);
    fit.aicc = aicc_value(fit.loglik, fit.k, fit.n);
    return fit;
}

Engine::Engine() : candidates_(default_candidates()) {}

Engine::Engine(std::vector<EtsSpec> candidates) : candidates_(std::move(candidates)) {}

void Engine::enable_cache(bool on) {
    std::lock_guard<std::mutex> lock(mu_);
    cache_on_ = on;
    if (!on) cache_.clear();
}

void Engine::begin_origin(std::size_t origin_id, bool refit) {
    std::lock_guard<std::mutex> lock(mu_);
    origin_ = origin_id;
    refit_ = refit;
}

FittedEts Engine::model_for(const std::string& key, std::span<const double> series) {
    if (cache_on_) {
        std::unique_lock<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            // Reuse outright if this key was already refit at this origin;
            // otherwise keep the parameters and refresh the states.
            if (it->second.origin == origin_) return it->second.model;
            if (!refit_) {
                FittedEts cached = it->second.model;
                lock.unlock();
                return update_states(cached, series);
            }
        }
    }
    FittedEts model = select_ets(series, candidates_);
    if (cache_on_) {
        std::lock_guard<std::mutex> lock(mu_);
        cache_[key] = {model, origin_};
    }
    return model;
}

std::vector<double> Engine::forecast_series(const std::string& key,
                                            std::span<const double> series, int h) {
    return forecast_ets(model_for(key, series), h);
}

}  // namespace fuelcast::ets
