#pragma once

#include <span>
#include <vector>

#include "fuelcast/core.hpp"
#include "fuelcast/ets.hpp"

namespace fuelcast::coda {

/// Centered log-ratio values: s_{t,x} = ln(d_{t,x} / geomean_t). Every row
/// sums to zero; the per-row log geometric means are kept alongside.
struct ClrPanel {
    Matrix values;                     // n x D
    std::vector<double> log_geomean;   // length n
};

/// Logit of the within-row cumulative share sums, with the redundant last
/// component (cumulative sum 1) dropped.
struct LogitCdfPanel {
    Matrix values;  // n x (D-1)
};

/// Full covariance PCA of an n x m panel: mean + scores * components +
/// residuals reproduces the input exactly.
struct PcaDecomposition {
    std::vector<double> mean;         // length m
    Matrix components;                // m x m, rows orthonormal
    Matrix scores;                    // n x m
    std::vector<double> eigenvalues;  // length m, descending, >= 0
    Matrix residuals;                 // n x m
};

struct CodaOptions {
    double eps = 1e-5;     // multiplicative zero replacement
    double delta = 0.001;  // EVR threshold
};

/// Optional sidecar filled by the pipelines for diagnostics dumps.
struct PipelineDetail {
    PcaDecomposition pca;
    std::size_t retained = 0;
};

ClrPanel clr_transform(const CompositionSeries& comp);

/// Softmax with max subtraction: length-D simplex point from any finite row.
std::vector<double> inv_clr(std::span<const double> clr_row);

/// Multiplicative zero replacement: zeros become eps, the rest is scaled by
/// (1 - zeros_in_row * eps). Rows stay on the simplex.
CompositionSeries zero_replace(const CompositionSeries& comp, double eps = 1e-5);

/// Cumulative share sums clipped to [1e-12, 1 - 1e-12], then logit.
LogitCdfPanel cdf_logit_transform(const CompositionSeries& comp);

/// Inverse logit, append the implicit final 1, repair any monotonicity
/// violations (pool-adjacent-violators), then first-difference.
std::vector<double> inv_cdf_logit(std::span<const double> z_row);

/// L2 isotonic (non-decreasing) regression.
std::vector<double> isotonic_increasing(std::span<const double> values);

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations
/// (off-diagonal tolerance 1e-12, relative). Eigenvalues descending;
/// component rows sign-fixed so the largest-magnitude entry is positive.
void symmetric_eigen(const Matrix& sym, std::vector<double>& eigenvalues,
                     Matrix& components);

/// Covariance PCA (column means removed, divisor n-1).
PcaDecomposition pca(const Matrix& data);

/// Eigenvalue-ratio criterion: K = argmin_k lambda_{k+1}/lambda_k restricted
/// to components with lambda_k/lambda_1 >= delta; ties take the smallest k.
std::size_t select_k_evr(std::span<const double> eigenvalues, double delta = 0.001);

/// CLR pipeline: zero-replace if needed, CLR, PCA, EVR, per-score ETS
/// forecasts, reconstruct, inverse CLR.
ForecastVector forecast_composition_clr(const CompositionSeries& comp, int h,
                                        ets::Engine& engine, const CodaOptions& opts = {},
                                        Diagnostics* diag = nullptr,
                                        PipelineDetail* detail = nullptr);

/// CDF pipeline: cumulative-sum/logit, PCA, EVR, per-score ETS forecasts,
/// reconstruct, inverse logit with isotonic repair. Handles exact zeros.
ForecastVector forecast_composition_cdf(const CompositionSeries& comp, int h,
                                        ets::Engine& engine, const CodaOptions& opts = {},
                                        Diagnostics* diag = nullptr,
                                        PipelineDetail* detail = nullptr);

}  // namespace fuelcast::coda
