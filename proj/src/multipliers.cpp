#include "seqcop/multipliers.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <tuple>

#include "seqcop/rng.hpp"

namespace seqcop {

namespace {

constexpr std::size_t kDenseSqrtMaxN = 3000;

void draw_base(std::span<double> out, BaseLaw law, std::mt19937_64& rng) {
    if (law == BaseLaw::StandardNormal) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : out) v = normal(rng);
    } else {
        std::bernoulli_distribution coin(0.5);
        for (double& v : out) v = coin(rng) ? 1.0 : -1.0;
    }
}

using SqrtKey = std::tuple<std::size_t, int, std::string>;

std::mutex g_sqrt_mutex;
std::map<SqrtKey, std::shared_ptr<const Eigen::MatrixXd>> g_sqrt_cache;

// Symmetric square root of the Toeplitz covariance matrix, cached per
// (n, ell, kernel): the factorization dominates the per-replicate cost.
std::shared_ptr<const Eigen::MatrixXd> covariance_sqrt(const KernelSpec& phi, std::size_t n,
                                                       int ell) {
    SqrtKey key{n, ell, phi.name()};
    {
        std::lock_guard<std::mutex> lock(g_sqrt_mutex);
        auto it = g_sqrt_cache.find(key);
        if (it != g_sqrt_cache.end()) return it->second;
    }
    Eigen::MatrixXd sigma(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = evaluate(phi, static_cast<double>(i - j) / static_cast<double>(ell));
            sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            sigma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigendecomposition of the multiplier covariance failed");
    }
    Eigen::VectorXd lambda = solver.eigenvalues();
    double lmax = lambda.maxCoeff();
    double scale = std::max(1.0, lmax);
    if (lambda.minCoeff() < -1e-6 * scale) {
        throw NotPositiveSemiDefinite("covariance kernel '" + phi.name() +
                                      "' yields an indefinite matrix (min eigenvalue " +
                                      std::to_string(lambda.minCoeff()) + ")");
    }
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        lambda(i) = lambda(i) < 1e-10 * scale ? 0.0 : std::sqrt(lambda(i));
    }
    auto root = std::make_shared<Eigen::MatrixXd>(
        solver.eigenvectors() * lambda.asDiagonal() * solver.eigenvectors().transpose());
    std::lock_guard<std::mutex> lock(g_sqrt_mutex);
    g_sqrt_cache.emplace(key, root);
    return root;
}

// Lower-banded Cholesky factor of the same Toeplitz matrix, stored as
// band[i][b] = L(i, i-b), b = 0..bw. Pivot failure signals indefiniteness.
std::vector<double> banded_cholesky(const KernelSpec& phi, std::size_t n, int ell,
                                    std::size_t& bw_out) {
    std::size_t bw = 0;
    for (int k = 1; k <= ell; ++k) {
        if (evaluate(phi, static_cast<double>(k) / static_cast<double>(ell)) != 0.0) {
            bw = static_cast<std::size_t>(k);
        }
    }
    bw_out = bw;
    std::vector<double> phi_at(bw + 1);
    for (std::size_t k = 0; k <= bw; ++k) {
        phi_at[k] = evaluate(phi, static_cast<double>(k) / static_cast<double>(ell));
    }
    std::vector<double> band((bw + 1) * n, 0.0);
    auto L = [&](std::size_t i, std::size_t b) -> double& { return band[i * (bw + 1) + b]; };
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t jlo = i >= bw ? i - bw : 0;
        for (std::size_t j = jlo; j <= i; ++j) {
            double acc = phi_at[i - j];
            std::size_t klo = std::max(jlo, j >= bw ? j - bw : std::size_t{0});
            for (std::size_t k = klo; k < j; ++k) acc -= L(i, i - k) * L(j, j - k);
            if (i == j) {
                if (acc <= 0.0) {
                    throw NotPositiveSemiDefinite(
                        "covariance kernel '" + phi.name() +
                        "' yields an indefinite matrix (banded Cholesky pivot failure)");
                }
                L(i, 0) = std::sqrt(acc);
            } else {
                L(i, i - j) = acc / L(j, 0);
            }
        }
    }
    return band;
}

}  // namespace

MultiplierBatch generate_moving_average(const MultiplierConfig& config) {
    if (config.ell < 1 || config.ell % 2 == 0) {
        throw std::invalid_argument("moving-average bandwidth must be a positive odd integer");
    }
    if (config.n == 0 || config.replicates == 0) {
        throw std::invalid_argument("multiplier batch needs n >= 1 and replicates >= 1");
    }
    std::size_t ell = static_cast<std::size_t>(config.ell);
    std::size_t b = (ell + 1) / 2;
    std::vector<double> w(ell);
    double sumsq = 0.0;
    for (std::size_t j = 1; j <= ell; ++j) {
        double v = evaluate(config.kernel, (static_cast<double>(j) - static_cast<double>(b)) /
                                               static_cast<double>(b));
        w[j - 1] = v;
        sumsq += v * v;
    }
    if (sumsq <= 0.0) {
        throw std::invalid_argument("weight kernel vanishes on the whole window");
    }
    double inv = 1.0 / std::sqrt(sumsq);
    for (double& v : w) v *= inv;

    MultiplierBatch batch;
    batch.config = config;
    batch.xi.assign(config.replicates * config.n, 0.0);
    std::vector<double> z(config.n + ell - 1);
    for (std::size_t m = 0; m < config.replicates; ++m) {
        std::mt19937_64 rng = substream(config.seed, m);
        draw_base(z, config.base_law, rng);
        std::span<double> row = batch.row(m);
        for (std::size_t j = 0; j < ell; ++j) {
            double wj = w[j];
            const double* zp = z.data() + j;
            for (std::size_t i = 0; i < config.n; ++i) row[i] += wj * zp[i];
        }
    }
    return batch;
}

MultiplierBatch generate_covariance_matrix(const MultiplierConfig& config) {
    if (config.kernel.role != KernelRole::CovariancePhi) {
        throw std::invalid_argument("covariance-matrix method needs a covariance-role kernel");
    }
    if (config.base_law != BaseLaw::StandardNormal) {
        throw std::invalid_argument("covariance-matrix method requires standard normal base draws");
    }
    if (config.ell < 1) throw std::invalid_argument("bandwidth must be >= 1");
    if (config.n == 0 || config.replicates == 0) {
        throw std::invalid_argument("multiplier batch needs n >= 1 and replicates >= 1");
    }
    MultiplierBatch batch;
    batch.config = config;
    batch.xi.assign(config.replicates * config.n, 0.0);
    std::vector<double> z(config.n);
    if (config.n <= kDenseSqrtMaxN) {
        auto root = covariance_sqrt(config.kernel, config.n, config.ell);
        Eigen::Map<const Eigen::MatrixXd> R(root->data(), root->rows(), root->cols());
        for (std::size_t m = 0; m < config.replicates; ++m) {
            std::mt19937_64 rng = substream(config.seed, m);
            draw_base(z, config.base_law, rng);
            Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(z.size()));
            Eigen::Map<Eigen::VectorXd> out(batch.row(m).data(),
                                            static_cast<Eigen::Index>(config.n));
            out = R * zv;
        }
    } else {
        std::size_t bw = 0;
        std::vector<double> band = banded_cholesky(config.kernel, config.n, config.ell, bw);
        for (std::size_t m = 0; m < config.replicates; ++m) {
            std::mt19937_64 rng = substream(config.seed, m);
            draw_base(z, config.base_law, rng);
            std::span<double> row = batch.row(m);
            for (std::size_t i = 0; i < config.n; ++i) {
                double acc = 0.0;
                std::size_t blim = std::min(bw, i);
                for (std::size_t b = 0; b <= blim; ++b) {
                    acc += band[i * (bw + 1) + b] * z[i - b];
                }
                row[i] = acc;
            }
        }
    }
    return batch;
}

MultiplierBatch generate_multipliers(const MultiplierConfig& config) {
    return config.method == MultiplierMethod::MovingAverage ? generate_moving_average(config)
                                                            : generate_covariance_matrix(config);
}

double lag_covariance(std::span<const double> xs, std::size_t h) {
    if (h >= xs.size()) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + h < xs.size(); ++i) acc += xs[i] * xs[i + h];
    return acc / static_cast<double>(xs.size());
}

}  // namespace seqcop
