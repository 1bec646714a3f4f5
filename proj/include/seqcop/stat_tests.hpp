#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seqcop/bandwidth.hpp"
#include "seqcop/bootstrap.hpp"
#include "seqcop/copula_process.hpp"
#include "seqcop/datagen.hpp"
#include "seqcop/multipliers.hpp"

namespace seqcop {

/// Outcome of a multiplier bootstrap test: observed statistic, replicate
/// statistics, the resampling p-value, selected quantile estimates, and
/// enough provenance to reproduce the run.
struct BootstrapResult {
    double statistic = 0.0;
    std::vector<double> replicates;
    double p_value = 1.0;
    std::vector<std::pair<double, double>> quantiles;  // (order p, estimate)

    int ell = 0;
    double ell_raw = 0.0;  // 0 when the bandwidth was fixed by hand
    int L_used = -1;
    std::string kernel;
    std::string method;
    std::string pd_variant;
    std::uint64_t seed = 0;
    std::size_t M = 0;
};

/// Fraction of replicates at least as large as the observed statistic.
double p_value_from(std::span<const double> replicates, double statistic);

/// The floor(p*M)-th order statistic of the replicates (no interpolation);
/// the index is clamped to [1, M].
double order_statistic_quantile(std::span<const double> replicates, double p);

/// Cramer-von Mises statistic of the standard empirical copula process:
/// grid average of the squared process, centered at c_ref.
double cvm_statistic(const DataMatrix& data, const EvalGrid& grid, const CopulaFn& c_ref);

/// Kolmogorov-Smirnov statistic: grid maximum of the absolute process.
double ks_statistic(const DataMatrix& data, const EvalGrid& grid, const CopulaFn& c_ref);

enum class StatKind { CvM, KS, ChangePointKS, ChangePointCvM };

/// Default change-point split grid: every floor(ns) in [2, n-2].
std::vector<std::size_t> default_splits(std::size_t n);

/// Replicate statistics: the same functional applied to the replicate
/// copula process over (0,1] (CvM/KS) or to the replicate change-point
/// process over splits x grid (ChangePoint kinds; `splits` may be empty to
/// use the default grid).
std::vector<double> replicate_statistics(const DataMatrix& data, const MultiplierBatch& batch,
                                         const PartialDerivSpec& pd, StatKind kind,
                                         const EvalGrid& grid,
                                         std::span<const std::size_t> splits = {});

struct ChangePointConfig {
    int ell = 0;  // 0 = automatic bandwidth estimation
    MultiplierMethod method = MultiplierMethod::MovingAverage;
    KernelSpec mult_kernel = KernelSpec::weight(KernelFamily::Bartlett);
    KernelSpec bw_phi = KernelSpec::covariance(KernelFamily::Parzen);
    int bw_grid_size = 25;
    AggregateRule psi = AggregateRule::Median;
    std::size_t M = 1000;
    std::uint64_t seed = 1;
    PartialDerivSpec pd;
    StatKind kind = StatKind::ChangePointKS;
    std::size_t grid_per_axis = 20;
    std::vector<double> quantile_orders = {0.25, 0.5, 0.75, 0.9, 0.95, 0.99};
};

/// Full change-point pipeline: bandwidth selection (automatic unless fixed),
/// multiplier generation, observed statistic over the split x grid lattice,
/// replicate statistics, p-value. Rejects n < 20 (windows too short for
/// stable ranks).
BootstrapResult changepoint_test(const DataMatrix& data, const ChangePointConfig& config);

/// Quantiles of the limit statistic estimated from `realizations`
/// simulations of the observed statistic at sample size n_ref, centered at
/// the true copula of the model's innovations.
std::vector<double> reference_statistic_quantiles(const DataModel& model, StatKind kind,
                                                  std::size_t n_ref, std::size_t realizations,
                                                  std::span<const double> p_set,
                                                  const EvalGrid& grid, std::uint64_t seed);

struct QuantileMseRow {
    double p = 0.0;
    double bias = 0.0;
    double mse = 0.0;
};

/// Bias and MSE of the bootstrap quantile estimators against reference
/// quantiles: N datasets from the model, M replicates each, quantile
/// estimates per order in p_set. ell = 0 selects the bandwidth per dataset.
std::vector<QuantileMseRow> quantile_mse_experiment(
    const DataModel& model, StatKind kind, std::size_t M, std::size_t N,
    std::span<const double> p_set, std::span<const double> reference_quantiles, int ell,
    MultiplierMethod method, const KernelSpec& mult_kernel, const KernelSpec& bw_phi,
    const EvalGrid& grid, std::uint64_t seed);

}  // namespace seqcop
