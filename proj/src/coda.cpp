#include "fuelcast/coda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fuelcast::coda {

namespace {

constexpr double kCdfClip = 1e-12;
constexpr double kJacobiTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

/// Shared tail of both pipelines: ETS-forecast the first `retained` score
/// columns at horizon h and reconstruct mean + sum_k score_k * component_k.
std::vector<double> reconstruct_forecast(const PcaDecomposition& dec, std::size_t retained,
                                         int h, ets::Engine& engine,
                                         const std::string& key_prefix) {
    std::vector<double> row(dec.mean);
    for (std::size_t kk = 0; kk < retained; ++kk) {
        auto fc = engine.forecast_series(key_prefix + std::to_string(kk),
                                         dec.scores.col(kk), h);
        const double score = fc[static_cast<std::size_t>(h - 1)];
        for (std::size_t x = 0; x < row.size(); ++x)
            row[x] += score * dec.components(kk, x);
    }
    return row;
}

std::size_t choose_components(const PcaDecomposition& dec, double delta) {
    if (dec.eigenvalues.empty() || dec.eigenvalues.front() <= 0.0) return 1;
    return select_k_evr(dec.eigenvalues, delta);
}

}  // namespace

ClrPanel clr_transform(const CompositionSeries& comp) {
    const std::size_t n = comp.days();
    const std::size_t d = comp.components();
    ClrPanel out{Matrix(n, d), std::vector<double>(n)};
    for (std::size_t t = 0; t < n; ++t) {
        double log_sum = 0.0;
        for (std::size_t x = 0; x < d; ++x) {
            const double v = comp.shares(t, x);
            if (!(v > 0.0))
                throw Error(ErrorKind::ZeroShare,
                            "share <= 0 on " + format_date(comp.dates[t]) +
                                "; apply zero_replace first");
            log_sum += std::log(v);
        }
        const double lg = log_sum / double(d);
        out.log_geomean[t] = lg;
        for (std::size_t x = 0; x < d; ++x)
            out.values(t, x) = std::log(comp.shares(t, x)) - lg;
    }
    return out;
}

std::vector<double> inv_clr(std::span<const double> clr_row) {
    const double mx = *std::max_element(clr_row.begin(), clr_row.end());
    std::vector<double> out(clr_row.size());
    double sum = 0.0;
    for (std::size_t x = 0; x < out.size(); ++x) {
        out[x] = std::exp(clr_row[x] - mx);
        sum += out[x];
    }
    for (double& v : out) v /= sum;
    return out;
}

CompositionSeries zero_replace(const CompositionSeries& comp, double eps) {
    const std::size_t d = comp.components();
    if (!(eps > 0.0) || !(eps < 1.0 / double(d)))
        throw Error(ErrorKind::Usage, "zero_replace eps must lie in (0, 1/D)");
    CompositionSeries out = comp;
    for (std::size_t t = 0; t < comp.days(); ++t) {
        std::size_t zeros = 0;
        for (std::size_t x = 0; x < d; ++x)
            if (comp.shares(t, x) == 0.0) ++zeros;
        if (zeros == 0) continue;
        if (zeros == d)
            throw Error(ErrorKind::ZeroShare,
                        "all shares are zero on " + format_date(comp.dates[t]));
        const double scale = 1.0 - double(zeros) * eps;
        for (std::size_t x = 0; x < d; ++x)
            out.shares(t, x) =
                comp.shares(t, x) == 0.0 ? eps : comp.shares(t, x) * scale;
    }
    return out;
}

LogitCdfPanel cdf_logit_transform(const CompositionSeries& comp) {
    const std::size_t n = comp.days();
    const std::size_t d = comp.components();
    if (d < 2)
        throw Error(ErrorKind::Dimension, "CDF transform needs at least 2 components");
    LogitCdfPanel out{Matrix(n, d - 1)};
    for (std::size_t t = 0; t < n; ++t) {
        double cum = 0.0;
        for (std::size_t x = 0; x + 1 < d; ++x) {
            cum += comp.shares(t, x);
            const double s = std::clamp(cum, kCdfClip, 1.0 - kCdfClip);
            out.values(t, x) = std::log(s / (1.0 - s));
        }
    }
    return out;
}

std::vector<double> isotonic_increasing(std::span<const double> values) {
    // Pool-adjacent-violators, merging blocks while the means decrease.
    std::vector<double> mean;
    std::vector<std::size_t> weight;
    for (double v : values) {
        mean.push_back(v);
        weight.push_back(1);
        while (mean.size() >= 2 && mean[mean.size() - 1] < mean[mean.size() - 2]) {
            const double merged = (mean[mean.size() - 2] * double(weight[weight.size() - 2]) +
                                   mean[mean.size() - 1] * double(weight[weight.size() - 1])) /
                                  double(weight[weight.size() - 2] + weight[weight.size() - 1]);
            weight[weight.size() - 2] += weight[weight.size() - 1];
            mean[mean.size() - 2] = merged;
            mean.pop_back();
            weight.pop_back();
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t b = 0; b < mean.size(); ++b)
        out.insert(out.end(), weight[b], mean[b]);
    return out;
}

std::vector<double> inv_cdf_logit(std::span<const double> z_row) {
    std::vector<double> cdf(z_row.size() + 1);
    for (std::size_t x = 0; x < z_row.size(); ++x) cdf[x] = sigmoid(z_row[x]);
    cdf.back() = 1.0;
    cdf = isotonic_increasing(cdf);
    std::vector<double> out(cdf.size());
    double prev = 0.0;
    for (std::size_t x = 0; x < cdf.size(); ++x) {
        out[x] = cdf[x] - prev;
        prev = cdf[x];
    }
    return out;
}

void symmetric_eigen(const Matrix& sym, std::vector<double>& eigenvalues,
                     Matrix& components) {
    const std::size_t m = sym.rows();
    if (m == 0 || sym.cols() != m)
        throw Error(ErrorKind::Dimension, "symmetric_eigen needs a square matrix");
    Matrix a = sym;
    Matrix v = Matrix::identity(m);  // columns accumulate the eigenvectors

    double frob = 0.0;
    for (double x : a.data()) frob += x * x;
    const double threshold = kJacobiTol * std::max(1.0, std::sqrt(frob));

    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= threshold) break;

        for (std::size_t p = 0; p + 1 < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < m; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = a(p, i) = c * aip - s * aiq;
                    a(i, q) = a(q, i) = s * aip + c * aiq;
                }
                const double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;

                for (std::size_t i = 0; i < m; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    eigenvalues.assign(m, 0.0);
    components = Matrix(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        eigenvalues[k] = a(order[k], order[k]);
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < m; ++i)
            if (std::abs(v(i, order[k])) > best) {
                best = std::abs(v(i, order[k]));
                arg = i;
            }
        const double flip = v(arg, order[k]) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < m; ++i) components(k, i) = flip * v(i, order[k]);
    }
}

PcaDecomposition pca(const Matrix& data) {
    const std::size_t n = data.rows();
    const std::size_t m = data.cols();
    if (n < 2)
        throw Error(ErrorKind::InsufficientData, "PCA needs at least 2 rows");

    PcaDecomposition dec;
    dec.mean.assign(m, 0.0);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t x = 0; x < m; ++x) dec.mean[x] += data(t, x);
    for (double& v : dec.mean) v /= double(n);

    Matrix centered(n, m);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t x = 0; x < m; ++x) centered(t, x) = data(t, x) - dec.mean[x];

    Matrix cov(m, m);
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = x; y < m; ++y) {
            double sum = 0.0;
            for (std::size_t t = 0; t < n; ++t) sum += centered(t, x) * centered(t, y);
            cov(x, y) = cov(y, x) = sum / double(n - 1);
        }

    symmetric_eigen(cov, dec.eigenvalues, dec.components);
    for (double& lambda : dec.eigenvalues) lambda = std::max(lambda, 0.0);

    dec.scores = Matrix(n, m);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t k = 0; k < m; ++k) {
            double sum = 0.0;
            for (std::size_t x = 0; x < m; ++x) sum += centered(t, x) * dec.components(k, x);
            dec.scores(t, k) = sum;
        }

    dec.residuals = Matrix(n, m);
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t x = 0; x < m; ++x) {
            double recon = dec.mean[x];
            for (std::size_t k = 0; k < m; ++k)
                recon += dec.scores(t, k) * dec.components(k, x);
            dec.residuals(t, x) = data(t, x) - recon;
        }
    return dec;
}

std::size_t select_k_evr(std::span<const double> eigenvalues, double delta) {
    if (eigenvalues.size() < 2) return 1;
    if (!(eigenvalues.front() > 0.0))
        throw Error(ErrorKind::Dimension, "EVR needs a positive leading eigenvalue");
    std::size_t best_k = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 <= eigenvalues.size(); ++k) {
        const double lead_ratio = eigenvalues[k - 1] / eigenvalues.front();
        const double crit =
            lead_ratio >= delta ? eigenvalues[k] / eigenvalues[k - 1] : 1.0;
        if (crit < best) {
            best = crit;
            best_k = k;
        }
    }
    return best_k;
}

ForecastVector forecast_composition_clr(const CompositionSeries& comp, int h,
                                        ets::Engine& engine, const CodaOptions& opts,
                                        Diagnostics* diag, PipelineDetail* detail) {
    bool has_zero = false;
    for (std::size_t t = 0; t < comp.days() && !has_zero; ++t)
        for (double v : comp.shares.row(t))
            if (v == 0.0) {
                has_zero = true;
                break;
            }
    CompositionSeries interior = comp;
    if (has_zero) {
        interior = zero_replace(comp, opts.eps);
        if (diag) diag->rows_zero_replaced++;
    }

    const ClrPanel clr = clr_transform(interior);
    PcaDecomposition dec = pca(clr.values);
    const std::size_t retained = choose_components(dec, opts.delta);
    std::vector<double> s_hat = reconstruct_forecast(dec, retained, h, engine, "clr:s");
    if (detail) *detail = {std::move(dec), retained};

    return {comp.dates.back(), h, ValueUnit::Shares, inv_clr(s_hat)};
}

ForecastVector forecast_composition_cdf(const CompositionSeries& comp, int h,
                                        ets::Engine& engine, const CodaOptions& opts,
                                        Diagnostics* diag, PipelineDetail* detail) {
    (void)diag;
    const LogitCdfPanel logit = cdf_logit_transform(comp);
    PcaDecomposition dec = pca(logit.values);
    const std::size_t retained = choose_components(dec, opts.delta);
    std::vector<double> z_hat = reconstruct_forecast(dec, retained, h, engine, "cdf:s");
    if (detail) *detail = {std::move(dec), retained};

    return {comp.dates.back(), h, ValueUnit::Shares, inv_cdf_logit(z_hat)};
}

}  // namespace fuelcast::coda
