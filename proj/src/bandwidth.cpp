#include "seqcop/bandwidth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "seqcop/multipliers.hpp"

namespace seqcop {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Centered indicator columns 1(Uhat_i <= u_p) - C_{1:n}(u_p) for a grid.
RowMajorMatrix centered_indicators(const PseudoObsWindow& pobs, const EvalGrid& grid) {
    std::size_t n = pobs.length();
    std::size_t g = grid.size();
    RowMajorMatrix ic(n, g);
    for (std::size_t p = 0; p < g; ++p) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = pobs.leq(i, grid.point(p)) ? 1.0 : 0.0;
            ic(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = v;
            mean += v;
        }
        mean /= static_cast<double>(n);
        ic.col(static_cast<Eigen::Index>(p)).array() -= mean;
    }
    return ic;
}

double flattop_half(double x) {
    double v = (1.0 - std::abs(x)) * 2.0;  // c = 0.5
    return std::min(std::max(v, 0.0), 1.0);
}

double aggregate(std::vector<int> values, AggregateRule rule) {
    switch (rule) {
        case AggregateRule::Median: {
            std::sort(values.begin(), values.end());
            std::size_t h = values.size() / 2;
            if (values.size() % 2 == 1) return values[h];
            return 0.5 * (values[h - 1] + values[h]);
        }
        case AggregateRule::Mean: {
            double acc = 0.0;
            for (int v : values) acc += v;
            return acc / static_cast<double>(values.size());
        }
        case AggregateRule::Min: return *std::min_element(values.begin(), values.end());
        case AggregateRule::Max: return *std::max_element(values.begin(), values.end());
    }
    return 1.0;
}

}  // namespace

double cross_covariance(const PseudoObsWindow& pobs, long k, std::span<const double> u,
                        std::span<const double> v) {
    std::size_t n = pobs.length();
    if (static_cast<std::size_t>(std::abs(k)) >= n) {
        throw std::invalid_argument("lag magnitude must be smaller than the window length");
    }
    double cu = empirical_copula(pobs, u);
    double cv = empirical_copula(pobs, v);
    double acc = 0.0;
    if (k >= 0) {
        std::size_t kk = static_cast<std::size_t>(k);
        for (std::size_t i = 0; i + kk < n; ++i) {
            acc += ((pobs.leq(i, u) ? 1.0 : 0.0) - cu) * ((pobs.leq(i + kk, v) ? 1.0 : 0.0) - cv);
        }
    } else {
        std::size_t kk = static_cast<std::size_t>(-k);
        for (std::size_t i = kk; i < n; ++i) {
            acc += ((pobs.leq(i, u) ? 1.0 : 0.0) - cu) * ((pobs.leq(i - kk, v) ? 1.0 : 0.0) - cv);
        }
    }
    return acc / static_cast<double>(n);
}

LagWindowEstimates lag_window_estimates(const PseudoObsWindow& pobs, int L,
                                        std::span<const double> u, std::span<const double> v) {
    if (L < 0 || static_cast<std::size_t>(L) >= pobs.length()) {
        throw std::invalid_argument("lag window must satisfy 0 <= L < n");
    }
    if (L == 0) return {cross_covariance(pobs, 0, u, v), 0.0};
    LagWindowEstimates est;
    for (int k = -L; k <= L; ++k) {
        double w = flattop_half(static_cast<double>(k) / static_cast<double>(L));
        if (w == 0.0) continue;
        double gam = cross_covariance(pobs, k, u, v);
        est.sigma_hat += w * gam;
        est.K_hat += w * static_cast<double>(k) * static_cast<double>(k) * gam;
    }
    return est;
}

AggregateRule parse_aggregate(std::string_view token) {
    if (token == "median") return AggregateRule::Median;
    if (token == "mean") return AggregateRule::Mean;
    if (token == "min") return AggregateRule::Min;
    if (token == "max") return AggregateRule::Max;
    throw std::invalid_argument("unknown aggregation rule '" + std::string(token) + "'");
}

int politis_white_lag(std::span<const double> series) {
    std::size_t n = series.size();
    if (n < 8) throw std::invalid_argument("need at least 8 observations for lag selection");
    double log10n = std::log10(static_cast<double>(n));
    int KN = std::max(5, static_cast<int>(std::ceil(std::sqrt(log10n))));
    int mmax = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + KN;
    int maxlag = std::min<int>(mmax + KN, static_cast<int>(n) - 1);

    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= static_cast<double>(n);
    double denom = 0.0;
    for (double x : series) denom += (x - mean) * (x - mean);
    if (denom <= 0.0) return 1;  // constant series

    std::vector<double> rho(static_cast<std::size_t>(maxlag) + 1, 0.0);
    for (int k = 1; k <= maxlag; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(k) < n; ++i) {
            acc += (series[i] - mean) * (series[i + static_cast<std::size_t>(k)] - mean);
        }
        rho[static_cast<std::size_t>(k)] = acc / denom;
    }
    double band = 2.0 * std::sqrt(log10n / static_cast<double>(n));
    auto insignificant = [&](int k) {
        return k > maxlag || std::abs(rho[static_cast<std::size_t>(k)]) < band;
    };
    for (int m = 1; m <= mmax; ++m) {
        bool all_insig = true;
        for (int j = 0; j < KN; ++j) {
            if (!insignificant(m + j)) {
                all_insig = false;
                break;
            }
        }
        if (all_insig) return m;
    }
    int last_sig = 0;
    for (int k = 1; k <= std::min(mmax, maxlag); ++k) {
        if (!insignificant(k)) last_sig = k;
    }
    return last_sig > 0 ? last_sig : 1;
}

int select_lag_length(const DataMatrix& data, AggregateRule psi) {
    if (data.rows < 8) throw std::invalid_argument("need at least 8 observations");
    std::vector<int> lags(data.cols);
    std::vector<double> column(data.rows);
    for (std::size_t j = 0; j < data.cols; ++j) {
        for (std::size_t i = 0; i < data.rows; ++i) column[i] = data(i, j);
        lags[j] = politis_white_lag(column);
    }
    double L = 2.0 * aggregate(std::move(lags), psi);
    long rounded = std::lround(L);
    rounded = std::max<long>(rounded, 1);
    rounded = std::min<long>(rounded, static_cast<long>(data.rows) - 1);
    return static_cast<int>(rounded);
}

double bandwidth_rule(double gamma_bar_sq, double delta_bar, std::size_t n) {
    return std::pow(4.0 * gamma_bar_sq / delta_bar, 0.2) * std::pow(static_cast<double>(n), 0.2);
}

int moving_average_bandwidth(int ell) {
    if (ell < 1) return 1;
    return ell % 2 == 1 ? ell : ell + 1;
}

BandwidthEstimate estimate_bandwidth(const DataMatrix& data, const KernelSpec& phi, int g,
                                     AggregateRule psi) {
    PhiConstants constants = phi_constants(phi);  // throws for non-smooth phi
    std::size_t n = data.rows;
    std::size_t d = data.cols;
    auto per_axis = static_cast<int>(std::lround(std::pow(static_cast<double>(g), 1.0 / d)));
    std::size_t check = 1;
    for (std::size_t j = 0; j < d; ++j) check *= static_cast<std::size_t>(per_axis);
    if (per_axis < 1 || check != static_cast<std::size_t>(g)) {
        throw std::invalid_argument("grid size g must be a perfect d-th power");
    }
    EvalGrid grid = EvalGrid::lattice(static_cast<std::size_t>(per_axis), d);

    int L = select_lag_length(data, psi);
    PseudoObsWindow pobs = ranks(data, 1, n);
    RowMajorMatrix ic = centered_indicators(pobs, grid);
    std::size_t G = grid.size();

    // sigma_hat(p,q) and K_hat(p,q) accumulated lag by lag; the lag-k
    // cross-covariance matrix for every pair at once is Ic[0:n-k]^T Ic[k:n]/n.
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(G, G);
    Eigen::MatrixXd kmat = Eigen::MatrixXd::Zero(G, G);
    for (int k = 0; k <= L; ++k) {
        double w = L == 0 ? (k == 0 ? 1.0 : 0.0)
                          : flattop_half(static_cast<double>(k) / static_cast<double>(L));
        if (w == 0.0) continue;
        Eigen::Index nk = static_cast<Eigen::Index>(n) - k;
        Eigen::MatrixXd gam = (ic.topRows(nk).transpose() * ic.bottomRows(nk)) /
                              static_cast<double>(n);
        if (k == 0) {
            sigma += w * gam;
        } else {
            Eigen::MatrixXd sym = gam + gam.transpose();  // lags k and -k
            sigma += w * sym;
            kmat += w * static_cast<double>(k) * static_cast<double>(k) * sym;
        }
    }

    double gsz = static_cast<double>(G);
    double gamma_bar_sq = constants.second_derivative_at_zero *
                          constants.second_derivative_at_zero / 4.0 *
                          kmat.array().square().sum() / (gsz * gsz);
    double diag_mean = sigma.trace() / gsz;
    double delta_bar = constants.integral_of_square *
                       (diag_mean * diag_mean + sigma.array().square().sum() / (gsz * gsz));
    if (!(delta_bar > 0.0)) {
        throw DegenerateVariance("variance plug-in is non-positive; data too degenerate");
    }

    BandwidthEstimate est;
    est.ell_opt_raw = bandwidth_rule(gamma_bar_sq, delta_bar, n);
    est.ell_opt = std::max(1, static_cast<int>(std::lround(est.ell_opt_raw)));
    est.L_used = L;
    est.gamma_bar_sq = gamma_bar_sq;
    est.delta_bar = delta_bar;
    est.constants = constants;
    est.grid_size = g;
    return est;
}

double exact_multiplier_covariance(const DataMatrix& uniforms, const KernelSpec& phi, int ell,
                                   std::span<const double> u, std::span<const double> v,
                                   const CopulaFn& c_true) {
    std::size_t n = uniforms.rows;
    double cu = c_true(u), cv = c_true(v);
    auto indicator = [&](std::size_t i, std::span<const double> w) {
        for (std::size_t j = 0; j < uniforms.cols; ++j) {
            if (uniforms(i, j) > w[j]) return 0.0;
        }
        return 1.0;
    };
    std::vector<double> au(n), av(n);
    for (std::size_t i = 0; i < n; ++i) {
        au[i] = indicator(i, u) - cu;
        av[i] = indicator(i, v) - cv;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        long lo = std::max<long>(0, static_cast<long>(i) - ell);
        long hi = std::min<long>(static_cast<long>(n) - 1, static_cast<long>(i) + ell);
        for (long j = lo; j <= hi; ++j) {
            double w = evaluate(phi, (static_cast<double>(i) - static_cast<double>(j)) /
                                         static_cast<double>(ell));
            acc += w * au[i] * av[static_cast<std::size_t>(j)];
        }
    }
    return acc / static_cast<double>(n);
}

std::vector<ImseRow> imse_experiment(const DataModel& model, const KernelSpec& phi,
                                     std::span<const int> ells, std::size_t M,
                                     std::size_t mc_reps, int g, std::size_t oracle_reps,
                                     std::uint64_t seed) {
    if (model.kind != ModelKind::IID && model.kind != ModelKind::AR1) {
        throw std::invalid_argument(
            "the covariance oracle needs known margins; only iid and ar1 are supported");
    }
    std::size_t n = model.n;
    double sd = model.kind == ModelKind::AR1 ? std::sqrt(1.0 / (1.0 - 0.25)) : 1.0;
    auto per_axis = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(g))));
    if (per_axis * per_axis != static_cast<std::size_t>(g)) {
        throw std::invalid_argument("grid size g must be a perfect square");
    }
    EvalGrid grid = EvalGrid::lattice(per_axis, 2);
    std::size_t G = grid.size();
    double sqn = std::sqrt(static_cast<double>(n));

    // High-accuracy covariance target: sample covariance across simulations
    // of the uncentered partial sums (the unknown centering cancels).
    Eigen::MatrixXd sum1 = Eigen::MatrixXd::Zero(G, 1);
    Eigen::MatrixXd sum2 = Eigen::MatrixXd::Zero(G, G);
    for (std::size_t r = 0; r < oracle_reps; ++r) {
        DataMatrix x = simulate(model, seed + r);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(G);
        for (std::size_t p = 0; p < G; ++p) {
            std::span<const double> u = grid.point(p);
            double count = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                bool le = true;
                for (std::size_t j = 0; j < 2; ++j) {
                    double pit = 0.5 * std::erfc(-x(i, j) / (sd * std::numbers::sqrt2));
                    if (pit > u[j]) {
                        le = false;
                        break;
                    }
                }
                count += le ? 1.0 : 0.0;
            }
            y(static_cast<Eigen::Index>(p)) = count / sqn;
        }
        sum1 += y;
        sum2 += y * y.transpose();
    }
    double R = static_cast<double>(oracle_reps);
    Eigen::MatrixXd target = sum2 / R - (sum1 / R) * (sum1 / R).transpose();

    // Bootstrap covariances per dataset and bandwidth.
    std::vector<ImseRow> rows;
    rows.reserve(ells.size());
    std::vector<double> err(ells.size(), 0.0);
    for (std::size_t r = 0; r < mc_reps; ++r) {
        DataMatrix x = simulate(model, seed + 1000003 + r);
        PseudoObsWindow pobs = ranks(x, 1, n);
        RowMajorMatrix ic = centered_indicators(pobs, grid);
        for (std::size_t e = 0; e < ells.size(); ++e) {
            MultiplierConfig cfg;
            cfg.method = MultiplierMethod::CovarianceMatrix;
            cfg.kernel = phi;
            cfg.ell = ells[e];
            cfg.n = n;
            cfg.replicates = M;
            cfg.seed = seed + 2000003 * (r + 1) + static_cast<std::uint64_t>(e);
            MultiplierBatch batch = generate_multipliers(cfg);
            Eigen::Map<const RowMajorMatrix> Xi(batch.xi.data(), static_cast<Eigen::Index>(M),
                                                static_cast<Eigen::Index>(n));
            RowMajorMatrix B = (Xi * ic) / sqn;  // M x G replicate endpoint values
            Eigen::RowVectorXd mean = B.colwise().mean();
            Eigen::MatrixXd centered = B.rowwise() - mean;
            Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(M);
            err[e] += (cov - target).array().square().mean();
        }
    }
    for (std::size_t e = 0; e < ells.size(); ++e) {
        rows.push_back({ells[e], err[e] / static_cast<double>(mc_reps)});
    }
    return rows;
}

}  // namespace seqcop
