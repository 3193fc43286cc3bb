#include "fuelcast/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace fuelcast::synth {

GenerationPanel make_synthetic_panel(const SynthConfig& config) {
    if (config.days == 0 || config.fuels == 0)
        throw Error(ErrorKind::Dimension, "synthetic panel needs days >= 1 and fuels >= 1");

    SplitMix64 rng(config.seed);
    const std::size_t n = config.days;
    const std::size_t d = config.fuels;

    auto draw_mix = [&] {
        std::vector<double> w(d);
        double sum = 0.0;
        for (double& v : w) {
            v = 0.25 + rng.uniform();
            sum += v;
        }
        for (double& v : w) v /= sum;
        return w;
    };
    const std::vector<double> base = draw_mix();
    const std::vector<double> target = draw_mix();
    std::vector<double> seas_coef(d), phase(d);
    for (std::size_t j = 0; j < d; ++j) seas_coef[j] = rng.uniform() - 0.5;
    for (std::size_t j = 0; j < d; ++j) phase[j] = rng.uniform(0.0, 7.0);

    constexpr double two_pi = 2.0 * std::numbers::pi;
    Matrix levels(n, d);
    std::vector<Date> dates(n);
    std::vector<double> row(d);
    for (std::size_t t = 0; t < n; ++t) {
        dates[t] = config.start + std::chrono::days{static_cast<long>(t)};
        const double tau = n > 1 ? double(t) / double(n - 1) : 0.0;
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            double v = base[j] + config.trend_amplitude * tau * (target[j] - base[j]) +
                       config.seasonal_amplitude * seas_coef[j] *
                           std::sin(two_pi * (double(t) + phase[j]) / 7.0) +
                       config.noise_amplitude * (rng.uniform() - 0.5);
            v = std::max(v, 1e-4);
            row[j] = v;
            sum += v;
        }
        const double total =
            config.base_total_mwh *
            std::max(0.01, 1.0 + 0.3 * config.trend_amplitude * tau +
                               0.1 * config.seasonal_amplitude * std::sin(two_pi * double(t) / 7.0) +
                               0.2 * config.noise_amplitude * (rng.uniform() - 0.5));
        for (std::size_t j = 0; j < d; ++j) levels(t, j) = total * row[j] / sum;
    }

    std::vector<std::string> fuels(d);
    for (std::size_t j = 0; j < d; ++j) fuels[j] = "Fuel" + std::to_string(j + 1);
    GenerationPanel panel{config.region, std::move(dates), std::move(fuels),
                          std::move(levels)};
    panel.validate_structure();
    return panel;
}

}  // namespace fuelcast::synth
