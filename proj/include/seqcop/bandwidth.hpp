#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqcop/copula_process.hpp"
#include "seqcop/datagen.hpp"
#include "seqcop/kernels.hpp"

namespace seqcop {

/// Cross-covariance at lag k of the centered indicator sequences
/// 1(Uhat_i <= u) and 1(Uhat_i <= v), centered by the full-window empirical
/// copula; divisor is the window length for every lag. |k| must be < n.
double cross_covariance(const PseudoObsWindow& pobs, long k, std::span<const double> u,
                        std::span<const double> v);

struct LagWindowEstimates {
    double sigma_hat = 0.0;  // flat-top weighted sum of cross-covariances
    double K_hat = 0.0;      // same with k^2 weights
};

/// Flat-top (c = 0.5) lag-window estimators over lags -L..L. L = 0 falls
/// back to the lag-0 covariance with K_hat = 0.
LagWindowEstimates lag_window_estimates(const PseudoObsWindow& pobs, int L,
                                        std::span<const double> u, std::span<const double> v);

enum class AggregateRule { Median, Mean, Min, Max };

AggregateRule parse_aggregate(std::string_view token);

/// Automatic cutoff lag of one series: the first lag from which the next
/// K_N = max(5, ceil(sqrt(log10 n))) sample autocorrelations all stay
/// inside the +-2 sqrt(log10(n)/n) band, scanning starts up to
/// ceil(sqrt(n)) + K_N; falls back to the largest significant lag, or 1
/// when nothing is significant.
int politis_white_lag(std::span<const double> series);

/// L = 2 * psi(L_1, ..., L_d) over the margins' automatic cutoff lags,
/// rounded to the nearest integer, at least 1 and at most n-1. Requires
/// n >= 8.
int select_lag_length(const DataMatrix& data, AggregateRule psi);

/// The closed-form bandwidth that balances squared bias against variance:
/// (4 gamma_sq / delta)^{1/5} n^{1/5}.
double bandwidth_rule(double gamma_bar_sq, double delta_bar, std::size_t n);

struct BandwidthEstimate {
    double ell_opt_raw = 0.0;  // before rounding
    int ell_opt = 1;           // nearest integer, floored at 1
    int L_used = 0;
    double gamma_bar_sq = 0.0;
    double delta_bar = 0.0;
    PhiConstants constants;
    int grid_size = 0;
};

/// Rounds a bandwidth up to the next odd integer as required by the
/// moving-average construction.
int moving_average_bandwidth(int ell);

/// Full data-adaptive bandwidth estimate: grid plug-ins of the lag-window
/// estimators aggregated into the bias and variance constants, then the
/// closed-form rule. `g` must be a perfect d-th power (lattice grid).
/// Throws BandwidthKernelNotSmooth for inadmissible phi and
/// DegenerateVariance when the variance plug-in is non-positive.
BandwidthEstimate estimate_bandwidth(const DataMatrix& data, const KernelSpec& phi, int g,
                                     AggregateRule psi);

/// Exact multiplier-conditional covariance of the replicate process at
/// s = 1, computable only when the marginally uniform sample and the true
/// copula are known:
///   n^{-1} sum_{i,j} phi((i-j)/ell) {1(U_i <= u)-C(u)} {1(U_j <= v)-C(v)}.
/// Test oracle.
double exact_multiplier_covariance(const DataMatrix& uniforms, const KernelSpec& phi, int ell,
                                   std::span<const double> u, std::span<const double> v,
                                   const CopulaFn& c_true);

struct ImseRow {
    int ell = 0;
    double imse = 0.0;
};

/// Monte Carlo approximation of the integrated mean squared error of the
/// replicate covariance estimator versus the bandwidth: a high-accuracy
/// covariance target from `oracle_reps` simulations with known margins
/// (IID and AR1 models only), then `mc_reps` datasets x M replicates per
/// bandwidth. Grid of g points as in estimate_bandwidth.
std::vector<ImseRow> imse_experiment(const DataModel& model, const KernelSpec& phi,
                                     std::span<const int> ells, std::size_t M,
                                     std::size_t mc_reps, int g, std::size_t oracle_reps,
                                     std::uint64_t seed);

}  // namespace seqcop
