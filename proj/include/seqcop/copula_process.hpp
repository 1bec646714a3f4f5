#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace seqcop {

/// n x d sample, rows indexed by time. All entries must be finite.
struct DataMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;  // row-major

    DataMatrix() = default;
    DataMatrix(std::size_t n, std::size_t d);
    DataMatrix(std::size_t n, std::size_t d, std::vector<double> vals);

    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }

    /// Throws std::invalid_argument naming the offending entry if any value
    /// is non-finite, or if the matrix is empty.
    void validate() const;
};

/// Column-wise mid-ranks of a window k..l (1-based, inclusive) of a sample.
/// Pseudo-observations are rank/m with m the window length; ranks are kept
/// in rank units so indicator comparisons stay exact.
struct PseudoObsWindow {
    std::size_t first = 1;  // 1-based
    std::size_t last = 0;
    std::size_t dim = 0;
    std::vector<double> rank_values;  // m x d mid-ranks in [1, m]

    std::size_t length() const { return last + 1 - first; }
    double rank(std::size_t i, std::size_t j) const { return rank_values[i * dim + j]; }
    double uhat(std::size_t i, std::size_t j) const {
        return rank(i, j) / static_cast<double>(length());
    }

    /// 1 if the i-th pseudo-observation is <= u componentwise. Thresholds
    /// are compared in rank units (rank <= u*m + tol) so that grid values
    /// like k/m classify exactly.
    bool leq(std::size_t i, std::span<const double> u) const;
};

/// Rank threshold used by indicator comparisons: u*m plus a slack that is
/// far below the 1/2 gap between mid-ranks but absorbs the rounding of u*m.
inline double rank_threshold(double u, std::size_t m) {
    return u * static_cast<double>(m) + 1e-9;
}

/// Mid-ranks of rows k..l (1-based, inclusive). Throws on an empty window.
PseudoObsWindow ranks(const DataMatrix& data, std::size_t k, std::size_t l);

/// Empirical c.d.f. of the window's pseudo-observations at u; 0 for an
/// empty window.
double empirical_copula(const PseudoObsWindow& pobs, std::span<const double> u);

/// Reference copula evaluator (true copula in simulations, or any other
/// centering function).
using CopulaFn = std::function<double(std::span<const double>)>;

/// Partial-derivative evaluator: (axis j, point u) -> dC/du_j.
using PartialFn = std::function<double(std::size_t, std::span<const double>)>;

/// Two-sided sequential empirical copula process
///   sqrt(n) * lambda_n(s,t) * { C_{floor(ns)+1 : floor(nt)}(u) - c_ref(u) },
/// lambda_n(s,t) = (floor(nt)-floor(ns))/n. Zero when the window is empty.
double seq_copula_process(const DataMatrix& data, double s, double t, std::span<const double> u,
                          const CopulaFn& c_ref);

/// One-sided sequential process built from full-sample pseudo-observations:
///   n^{-1/2} sum_{i<=floor(ns)} { 1(Uhat_i^{1:n} <= u) - c_ref(u) }.
double ruschendorf_process(const DataMatrix& data, double s, std::span<const double> u,
                           const CopulaFn& c_ref);

/// Sequential empirical process of a marginally uniform sample (the
/// probability-integral-transformed data, available in simulations only):
///   n^{-1/2} sum_{i<=floor(ns)} { 1(U_i <= u) - c_true(u) }.
double sequential_empirical_process(const DataMatrix& uniforms, double s,
                                    std::span<const double> u, const CopulaFn& c_true);

/// Derivative-corrected linearization of the sequential empirical copula
/// process: the difference of sequential empirical processes at t and s,
/// minus sum_j dC_j(u) times the same difference at u^{(j)}, where u^{(j)}
/// has all coordinates 1 except the j-th.
double seq_copula_linearization(const DataMatrix& uniforms, double s, double t,
                                std::span<const double> u, const CopulaFn& c_true,
                                const PartialFn& partials);

/// Evaluation grid on [0,1]^d.
struct EvalGrid {
    std::size_t dim = 0;
    std::vector<double> coords;  // size() x dim, row-major

    static EvalGrid lattice(std::size_t per_axis, std::size_t dim);
    static EvalGrid from_points(std::size_t dim, std::vector<double> coords);

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, dim}; }
};

}  // namespace seqcop
