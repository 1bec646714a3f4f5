#include "seqcop/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqcop {

double p_value_from(std::span<const double> replicates, double statistic) {
    if (replicates.empty()) throw std::invalid_argument("need at least one replicate");
    std::size_t count = 0;
    for (double r : replicates) count += r >= statistic ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(replicates.size());
}

double order_statistic_quantile(std::span<const double> replicates, double p) {
    if (replicates.empty()) throw std::invalid_argument("need at least one replicate");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile order must be in (0,1)");
    std::vector<double> sorted(replicates.begin(), replicates.end());
    std::sort(sorted.begin(), sorted.end());
    auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(sorted.size())));
    idx = std::max<std::size_t>(idx, 1);
    idx = std::min(idx, sorted.size());
    return sorted[idx - 1];
}

double cvm_statistic(const DataMatrix& data, const EvalGrid& grid, const CopulaFn& c_ref) {
    std::size_t n = data.rows;
    PseudoObsWindow pobs = ranks(data, 1, n);
    double sqn = std::sqrt(static_cast<double>(n));
    double acc = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        double v = sqn * (empirical_copula(pobs, grid.point(p)) - c_ref(grid.point(p)));
        acc += v * v;
    }
    return acc / static_cast<double>(grid.size());
}

double ks_statistic(const DataMatrix& data, const EvalGrid& grid, const CopulaFn& c_ref) {
    std::size_t n = data.rows;
    PseudoObsWindow pobs = ranks(data, 1, n);
    double sqn = std::sqrt(static_cast<double>(n));
    double best = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        double v = std::abs(sqn * (empirical_copula(pobs, grid.point(p)) - c_ref(grid.point(p))));
        best = std::max(best, v);
    }
    return best;
}

std::vector<std::size_t> default_splits(std::size_t n) {
    std::vector<std::size_t> out;
    if (n < 4) return out;
    out.reserve(n - 3);
    for (std::size_t k = 2; k + 2 <= n; ++k) out.push_back(k);
    return out;
}

namespace {

// Change-point replicate statistic from a corrected prefix buffer.
double changepoint_stat_from_prefix(const std::vector<double>& prefix, std::size_t n,
                                    std::size_t P, std::span<const std::size_t> splits,
                                    bool cvm) {
    const double* end_row = prefix.data() + (n - 1) * P;
    double sup = 0.0, acc = 0.0;
    for (std::size_t k : splits) {
        if (k == 0 || k > n) continue;
        double lam1 = static_cast<double>(k) / static_cast<double>(n);
        double lam2 = static_cast<double>(n - k) / static_cast<double>(n);
        const double* at_k = prefix.data() + (k - 1) * P;
        for (std::size_t p = 0; p < P; ++p) {
            double v = lam2 * at_k[p] - lam1 * (end_row[p] - at_k[p]);
            if (cvm) {
                acc += v * v;
            } else {
                sup = std::max(sup, std::abs(v));
            }
        }
    }
    if (cvm) return acc / (static_cast<double>(splits.size()) * static_cast<double>(P));
    return sup;
}

}  // namespace

std::vector<double> replicate_statistics(const DataMatrix& data, const MultiplierBatch& batch,
                                         const PartialDerivSpec& pd, StatKind kind,
                                         const EvalGrid& grid,
                                         std::span<const std::size_t> splits) {
    std::size_t M = batch.config.replicates;
    std::vector<double> out(M, 0.0);
    ReplicateEngine engine(data, grid, pd);
    std::size_t P = grid.size();
    if (kind == StatKind::CvM || kind == StatKind::KS) {
        std::vector<double> endpoint = engine.corrected_endpoint(batch);
        for (std::size_t m = 0; m < M; ++m) {
            const double* row = endpoint.data() + m * P;
            if (kind == StatKind::CvM) {
                double acc = 0.0;
                for (std::size_t p = 0; p < P; ++p) acc += row[p] * row[p];
                out[m] = acc / static_cast<double>(P);
            } else {
                double best = 0.0;
                for (std::size_t p = 0; p < P; ++p) best = std::max(best, std::abs(row[p]));
                out[m] = best;
            }
        }
        return out;
    }
    std::vector<std::size_t> default_grid;
    if (splits.empty()) {
        default_grid = default_splits(data.rows);
        splits = default_grid;
    }
    bool cvm = kind == StatKind::ChangePointCvM;
    std::vector<double> prefix;
    for (std::size_t m = 0; m < M; ++m) {
        engine.corrected_prefix(batch.row(m), prefix);
        out[m] = changepoint_stat_from_prefix(prefix, data.rows, P, splits, cvm);
    }
    return out;
}

BootstrapResult changepoint_test(const DataMatrix& data, const ChangePointConfig& config) {
    std::size_t n = data.rows;
    if (n < 20) throw std::invalid_argument("change-point test needs n >= 20");
    if (config.M == 0) throw std::invalid_argument("need at least one replicate");

    BootstrapResult result;
    result.M = config.M;
    result.seed = config.seed;
    result.method =
        config.method == MultiplierMethod::MovingAverage ? "moving-average" : "covariance-matrix";
    result.kernel = config.mult_kernel.name();
    switch (config.pd.variant) {
        case PartialDerivVariant::RemillardScaillet: result.pd_variant = "rs"; break;
        case PartialDerivVariant::BoundaryCorrected: result.pd_variant = "bc"; break;
        case PartialDerivVariant::BucherRuppert: result.pd_variant = "br"; break;
    }

    int ell = config.ell;
    if (ell <= 0) {
        BandwidthEstimate est =
            estimate_bandwidth(data, config.bw_phi, config.bw_grid_size, config.psi);
        ell = est.ell_opt;
        result.ell_raw = est.ell_opt_raw;
        result.L_used = est.L_used;
    }
    if (config.method == MultiplierMethod::MovingAverage) ell = moving_average_bandwidth(ell);
    result.ell = ell;

    MultiplierConfig mcfg;
    mcfg.method = config.method;
    mcfg.kernel = config.mult_kernel;
    mcfg.ell = ell;
    mcfg.n = n;
    mcfg.replicates = config.M;
    mcfg.seed = config.seed;
    MultiplierBatch batch = generate_multipliers(mcfg);

    EvalGrid grid = EvalGrid::lattice(config.grid_per_axis, data.cols);
    std::vector<std::size_t> splits = default_splits(n);
    std::vector<double> observed = changepoint_observed(data, splits, grid);
    bool cvm = config.kind == StatKind::ChangePointCvM;
    if (config.kind != StatKind::ChangePointKS && config.kind != StatKind::ChangePointCvM) {
        throw std::invalid_argument("changepoint_test needs a change-point statistic kind");
    }
    if (cvm) {
        double acc = 0.0;
        for (double v : observed) acc += v * v;
        result.statistic = acc / static_cast<double>(observed.size());
    } else {
        double best = 0.0;
        for (double v : observed) best = std::max(best, std::abs(v));
        result.statistic = best;
    }

    result.replicates = replicate_statistics(data, batch, config.pd, config.kind, grid, splits);
    result.p_value = p_value_from(result.replicates, result.statistic);
    for (double p : config.quantile_orders) {
        result.quantiles.emplace_back(p, order_statistic_quantile(result.replicates, p));
    }
    return result;
}

std::vector<double> reference_statistic_quantiles(const DataModel& model, StatKind kind,
                                                  std::size_t n_ref, std::size_t realizations,
                                                  std::span<const double> p_set,
                                                  const EvalGrid& grid, std::uint64_t seed) {
    if (kind != StatKind::CvM && kind != StatKind::KS) {
        throw std::invalid_argument("reference quantiles support the CvM and KS statistics");
    }
    DataModel ref = model;
    ref.n = n_ref;
    CopulaFn c_true = make_copula_fn(model.copula);
    std::vector<double> stats(realizations);
    for (std::size_t r = 0; r < realizations; ++r) {
        DataMatrix x = simulate(ref, seed + r);
        stats[r] = kind == StatKind::CvM ? cvm_statistic(x, grid, c_true)
                                         : ks_statistic(x, grid, c_true);
    }
    std::sort(stats.begin(), stats.end());
    std::vector<double> out;
    out.reserve(p_set.size());
    for (double p : p_set) {
        auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(realizations)));
        idx = std::min(std::max<std::size_t>(idx, 1), realizations);
        out.push_back(stats[idx - 1]);
    }
    return out;
}

std::vector<QuantileMseRow> quantile_mse_experiment(
    const DataModel& model, StatKind kind, std::size_t M, std::size_t N,
    std::span<const double> p_set, std::span<const double> reference_quantiles, int ell,
    MultiplierMethod method, const KernelSpec& mult_kernel, const KernelSpec& bw_phi,
    const EvalGrid& grid, std::uint64_t seed) {
    if (p_set.size() != reference_quantiles.size()) {
        throw std::invalid_argument("one reference quantile per order is required");
    }
    if (kind != StatKind::CvM && kind != StatKind::KS) {
        throw std::invalid_argument("the quantile experiment targets the CvM and KS statistics");
    }
    std::vector<double> bias(p_set.size(), 0.0), mse(p_set.size(), 0.0);
    PartialDerivSpec pd;
    for (std::size_t r = 0; r < N; ++r) {
        DataMatrix x = simulate(model, seed + r);
        int ell_r = ell;
        if (ell_r <= 0) {
            ell_r = estimate_bandwidth(x, bw_phi, 25, AggregateRule::Median).ell_opt;
        }
        if (method == MultiplierMethod::MovingAverage) ell_r = moving_average_bandwidth(ell_r);
        MultiplierConfig mcfg;
        mcfg.method = method;
        mcfg.kernel = mult_kernel;
        mcfg.ell = ell_r;
        mcfg.n = model.n;
        mcfg.replicates = M;
        mcfg.seed = seed + 7919 * (r + 1);
        MultiplierBatch batch = generate_multipliers(mcfg);
        std::vector<double> reps = replicate_statistics(x, batch, pd, kind, grid);
        std::sort(reps.begin(), reps.end());
        for (std::size_t pi = 0; pi < p_set.size(); ++pi) {
            auto idx = static_cast<std::size_t>(std::floor(p_set[pi] * static_cast<double>(M)));
            idx = std::min(std::max<std::size_t>(idx, 1), M);
            double err = reps[idx - 1] - reference_quantiles[pi];
            bias[pi] += err;
            mse[pi] += err * err;
        }
    }
    std::vector<QuantileMseRow> rows(p_set.size());
    for (std::size_t pi = 0; pi < p_set.size(); ++pi) {
        rows[pi] = {p_set[pi], bias[pi] / static_cast<double>(N), mse[pi] / static_cast<double>(N)};
    }
    return rows;
}

}  // namespace seqcop
