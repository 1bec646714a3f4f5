#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqcop/kernels.hpp"

namespace seqcop {

enum class MultiplierMethod { MovingAverage, CovarianceMatrix };

enum class BaseLaw { StandardNormal, Rademacher };

/// Configuration of a dependent multiplier batch: serially dependent,
/// mean-zero, unit-variance weights whose autocovariance at lag h is (a
/// finite-n version of) phi(h/ell).
struct MultiplierConfig {
    MultiplierMethod method = MultiplierMethod::MovingAverage;
    KernelSpec kernel;  // WeightKappa for MovingAverage, CovariancePhi for CovarianceMatrix
    int ell = 1;        // dependence bandwidth; odd for the moving-average construction
    std::size_t n = 0;
    std::size_t replicates = 1;
    std::uint64_t seed = 0;
    BaseLaw base_law = BaseLaw::StandardNormal;
};

/// replicates x n multiplier draws; rows come from independent substreams
/// keyed by (seed, row) and are bit-for-bit reproducible.
struct MultiplierBatch {
    MultiplierConfig config;
    std::vector<double> xi;  // replicates x n, row-major

    std::span<const double> row(std::size_t m) const { return {xi.data() + m * config.n, config.n}; }
    std::span<double> row(std::size_t m) { return {xi.data() + m * config.n, config.n}; }
};

/// Moving-average construction: per replicate, n+ell-1 i.i.d. base draws
/// convolved with normalized kernel weights w_j = kappa((j-b)/b), ell=2b-1.
/// ell must be odd; ell >= 2n is rejected as degenerate.
MultiplierBatch generate_moving_average(const MultiplierConfig& config);

/// Covariance-matrix construction: xi = Sigma^{1/2} Z where Sigma has
/// entries phi((i-j)/ell). The symmetric square root comes from an
/// eigendecomposition with eigenvalues clipped at -1e-10 (relative); an
/// eigenvalue below -1e-6 signals an inadmissible phi and throws
/// NotPositiveSemiDefinite. For n beyond the dense-factorization budget the
/// equivalent banded Cholesky factor is used instead (identical Gaussian
/// law, O(n ell^2) cost). Requires the standard normal base law.
MultiplierBatch generate_covariance_matrix(const MultiplierConfig& config);

/// Dispatch on config.method.
MultiplierBatch generate_multipliers(const MultiplierConfig& config);

/// Sample autocovariance at lag h of one multiplier row (mean not removed;
/// the population mean is 0 by construction). Test/diagnostic helper.
double lag_covariance(std::span<const double> xs, std::size_t h);

}  // namespace seqcop
