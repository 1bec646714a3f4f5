#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "seqcop/copula_process.hpp"
#include "seqcop/multipliers.hpp"

namespace seqcop {

enum class PartialDerivVariant { RemillardScaillet, BoundaryCorrected, BucherRuppert };

/// Finite-difference estimator of the copula partial derivatives from the
/// empirical copula. All variants clip the estimate to [0,1].
struct PartialDerivSpec {
    PartialDerivVariant variant = PartialDerivVariant::RemillardScaillet;
    /// Step h; 0 selects the default m^{-1/2} for a window of length m.
    double bandwidth = 0.0;
};

/// dC/du_j estimated from the window's empirical copula.
///  - RemillardScaillet: {C(u_j+h) - C(u_j-h)} / (2h), arguments clamped to [0,1];
///  - BoundaryCorrected: same numerator over the actual clamped increment;
///  - BucherRuppert:     the center u_j is first moved into [h, 1-h].
double partial_derivative(const PseudoObsWindow& pobs, std::size_t j, std::span<const double> u,
                          const PartialDerivSpec& spec);

/// Multiplier replicate of the sequential empirical process, computed from
/// full-sample pseudo-observations:
///   n^{-1/2} sum_{i<=floor(ns)} xi_i^{(m)} { 1(Uhat_i <= u) - C_{1:n}(u) }.
/// `pobs` must be the full window 1..n matching the batch length.
double multiplier_process(const PseudoObsWindow& pobs, const MultiplierBatch& batch, std::size_t m,
                          double s, std::span<const double> u);

/// Multiplier replicate of the two-sided sequential empirical copula
/// process: the difference of multiplier_process at t and s, corrected by
/// the estimated partial derivatives at the margins points u^{(j)}.
double multiplier_copula_process(const PseudoObsWindow& pobs, const MultiplierBatch& batch,
                                 const PartialDerivSpec& pd, std::size_t m, double s, double t,
                                 std::span<const double> u);

/// Multiplier replicate of the sequential empirical process of the raw
/// data, centered by the empirical c.d.f.:
///   n^{-1/2} sum_{i<=floor(ns)} xi_i^{(m)} { 1(X_i <= x) - F_n(x) }.
double multiplier_cdf_process(const DataMatrix& data, const MultiplierBatch& batch, std::size_t m,
                              double s, std::span<const double> x);

/// Observed change-point process on a split grid:
///   D(k, u) = sqrt(n) (k/n) ((n-k)/n) { C_{1:k}(u) - C_{k+1:n}(u) },
/// computable without knowing the copula. Rows follow `splits` (values of
/// floor(ns)); splits outside (0, n) give zero rows.
std::vector<double> changepoint_observed(const DataMatrix& data,
                                         std::span<const std::size_t> splits,
                                         const EvalGrid& grid);

/// Precomputed state for evaluating many multiplier replicates on a fixed
/// grid: centered indicator columns for the grid and for the margin points
/// u^{(j)}, plus the partial-derivative estimates, all from the full-sample
/// pseudo-observations.
class ReplicateEngine {
  public:
    ReplicateEngine(const DataMatrix& data, const EvalGrid& grid, const PartialDerivSpec& pd);
    ~ReplicateEngine();

    ReplicateEngine(const ReplicateEngine&) = delete;
    ReplicateEngine& operator=(const ReplicateEngine&) = delete;

    std::size_t sample_size() const;
    std::size_t grid_size() const;
    double cdot(std::size_t p, std::size_t j) const;

    /// Derivative-corrected prefix process for one multiplier row:
    /// out[(k-1)*P + p], k = 1..n, is the replicate copula process over the
    /// window (0, k/n] at grid point p (the building block of both the
    /// two-sided process and the change-point replicates).
    void corrected_prefix(std::span<const double> xi, std::vector<double>& out) const;

    /// Corrected process at s=1 for every replicate of a batch (M x P,
    /// row-major); this is the replicate version of the standard empirical
    /// copula process on the grid.
    std::vector<double> corrected_endpoint(const MultiplierBatch& batch) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Observed surface and dense replicate surfaces of the change-point
/// process. Memory: (M+1) * |splits| * |grid| doubles; callers running
/// large Monte Carlo loops should prefer the streaming statistic path in
/// stat_tests.hpp.
struct ChangePointSurfaces {
    std::vector<std::size_t> splits;
    EvalGrid grid;
    std::vector<double> observed;    // |splits| x |grid|
    std::vector<double> replicates;  // M x |splits| x |grid|
    int ell = 0;
    std::string kernel;
    std::uint64_t seed = 0;
};

ChangePointSurfaces changepoint_processes(const DataMatrix& data, const MultiplierBatch& batch,
                                          const PartialDerivSpec& pd,
                                          std::span<const std::size_t> splits,
                                          const EvalGrid& grid);

}  // namespace seqcop
