#include "seqcop/bootstrap.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace seqcop {

double partial_derivative(const PseudoObsWindow& pobs, std::size_t j, std::span<const double> u,
                          const PartialDerivSpec& spec) {
    if (j >= pobs.dim) throw std::invalid_argument("partial-derivative axis out of range");
    std::size_t m = pobs.length();
    double h = spec.bandwidth > 0.0 ? spec.bandwidth : 1.0 / std::sqrt(static_cast<double>(m));
    if (!(h > 0.0 && h < 0.5)) throw std::invalid_argument("bandwidth must lie in (0, 1/2)");
    std::vector<double> up(u.begin(), u.end()), dn(u.begin(), u.end());
    double denom = 2.0 * h;
    switch (spec.variant) {
        case PartialDerivVariant::RemillardScaillet:
            up[j] = std::min(u[j] + h, 1.0);
            dn[j] = std::max(u[j] - h, 0.0);
            break;
        case PartialDerivVariant::BoundaryCorrected:
            up[j] = std::min(u[j] + h, 1.0);
            dn[j] = std::max(u[j] - h, 0.0);
            denom = up[j] - dn[j];
            break;
        case PartialDerivVariant::BucherRuppert: {
            double center = std::min(std::max(u[j], h), 1.0 - h);
            up[j] = center + h;
            dn[j] = center - h;
            break;
        }
    }
    double est = (empirical_copula(pobs, up) - empirical_copula(pobs, dn)) / denom;
    return std::min(std::max(est, 0.0), 1.0);
}

double multiplier_process(const PseudoObsWindow& pobs, const MultiplierBatch& batch, std::size_t m,
                          double s, std::span<const double> u) {
    std::size_t n = pobs.length();
    if (batch.config.n != n) throw std::invalid_argument("batch length does not match the window");
    auto k = static_cast<std::size_t>(std::floor(s * static_cast<double>(n)));
    if (k == 0) return 0.0;
    double c = empirical_copula(pobs, u);
    std::span<const double> xi = batch.row(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += xi[i] * ((pobs.leq(i, u) ? 1.0 : 0.0) - c);
    return acc / std::sqrt(static_cast<double>(n));
}

double multiplier_copula_process(const PseudoObsWindow& pobs, const MultiplierBatch& batch,
                                 const PartialDerivSpec& pd, std::size_t m, double s, double t,
                                 std::span<const double> u) {
    if (s > t) throw std::invalid_argument("window endpoints must satisfy s <= t");
    std::size_t d = pobs.dim;
    auto diff = [&](std::span<const double> v) {
        return multiplier_process(pobs, batch, m, t, v) - multiplier_process(pobs, batch, m, s, v);
    };
    double out = diff(u);
    std::vector<double> uj(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(uj.begin(), uj.end(), 1.0);
        uj[j] = u[j];
        out -= partial_derivative(pobs, j, u, pd) * diff(uj);
    }
    return out;
}

double multiplier_cdf_process(const DataMatrix& data, const MultiplierBatch& batch, std::size_t m,
                              double s, std::span<const double> x) {
    std::size_t n = data.rows;
    if (batch.config.n != n) throw std::invalid_argument("batch length does not match the sample");
    auto k = static_cast<std::size_t>(std::floor(s * static_cast<double>(n)));
    if (k == 0) return 0.0;
    auto leq = [&](std::size_t i) {
        for (std::size_t j = 0; j < data.cols; ++j) {
            if (data(i, j) > x[j]) return false;
        }
        return true;
    };
    double fn = 0.0;
    for (std::size_t i = 0; i < n; ++i) fn += leq(i) ? 1.0 : 0.0;
    fn /= static_cast<double>(n);
    std::span<const double> xi = batch.row(m);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += xi[i] * ((leq(i) ? 1.0 : 0.0) - fn);
    return acc / std::sqrt(static_cast<double>(n));
}

std::vector<double> changepoint_observed(const DataMatrix& data,
                                         std::span<const std::size_t> splits,
                                         const EvalGrid& grid) {
    std::size_t n = data.rows;
    std::size_t P = grid.size();
    std::vector<double> out(splits.size() * P, 0.0);
    double sqn = std::sqrt(static_cast<double>(n));
    for (std::size_t si = 0; si < splits.size(); ++si) {
        std::size_t k = splits[si];
        if (k == 0 || k >= n) continue;  // a lambda factor vanishes
        PseudoObsWindow left = ranks(data, 1, k);
        PseudoObsWindow right = ranks(data, k + 1, n);
        double lam = static_cast<double>(k) / static_cast<double>(n) *
                     static_cast<double>(n - k) / static_cast<double>(n);
        for (std::size_t p = 0; p < P; ++p) {
            out[si * P + p] = sqn * lam *
                              (empirical_copula(left, grid.point(p)) -
                               empirical_copula(right, grid.point(p)));
        }
    }
    return out;
}

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ReplicateEngine::Impl {
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t P = 0;
    RowMajorMatrix ic;         // n x P centered main indicators
    RowMajorMatrix ic_aux;     // n x A centered margin indicators
    std::vector<int> aux_of;   // P*dim -> aux column
    std::vector<double> cdot;  // P*dim partial-derivative estimates
};

ReplicateEngine::ReplicateEngine(const DataMatrix& data, const EvalGrid& grid,
                                 const PartialDerivSpec& pd)
    : impl_(std::make_unique<Impl>()) {
    Impl& im = *impl_;
    im.n = data.rows;
    im.dim = data.cols;
    im.P = grid.size();
    if (grid.dim != data.cols) throw std::invalid_argument("grid dimension does not match data");
    PseudoObsWindow pobs = ranks(data, 1, im.n);

    // margin points u^{(j)} are determined by (axis, coordinate); deduplicate
    std::vector<std::vector<double>> aux_coords(im.dim);
    im.aux_of.resize(im.P * im.dim);
    for (std::size_t p = 0; p < im.P; ++p) {
        std::span<const double> u = grid.point(p);
        for (std::size_t j = 0; j < im.dim; ++j) {
            auto& coords = aux_coords[j];
            auto it = std::find(coords.begin(), coords.end(), u[j]);
            if (it == coords.end()) {
                coords.push_back(u[j]);
                it = std::prev(coords.end());
            }
            im.aux_of[p * im.dim + j] = static_cast<int>(std::distance(coords.begin(), it));
        }
    }
    std::size_t A = 0;
    std::vector<std::size_t> aux_base(im.dim);
    for (std::size_t j = 0; j < im.dim; ++j) {
        aux_base[j] = A;
        A += aux_coords[j].size();
    }
    for (std::size_t p = 0; p < im.P; ++p) {
        for (std::size_t j = 0; j < im.dim; ++j) {
            im.aux_of[p * im.dim + j] += static_cast<int>(aux_base[j]);
        }
    }

    im.ic.resize(static_cast<Eigen::Index>(im.n), static_cast<Eigen::Index>(im.P));
    im.ic_aux.resize(static_cast<Eigen::Index>(im.n), static_cast<Eigen::Index>(A));
    std::vector<double> uj(im.dim, 1.0);
    for (std::size_t p = 0; p < im.P; ++p) {
        std::span<const double> u = grid.point(p);
        double mean = 0.0;
        for (std::size_t i = 0; i < im.n; ++i) {
            double v = pobs.leq(i, u) ? 1.0 : 0.0;
            im.ic(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = v;
            mean += v;
        }
        mean /= static_cast<double>(im.n);
        im.ic.col(static_cast<Eigen::Index>(p)).array() -= mean;
    }
    for (std::size_t j = 0; j < im.dim; ++j) {
        for (std::size_t c = 0; c < aux_coords[j].size(); ++c) {
            std::fill(uj.begin(), uj.end(), 1.0);
            uj[j] = aux_coords[j][c];
            std::size_t col = aux_base[j] + c;
            double mean = 0.0;
            for (std::size_t i = 0; i < im.n; ++i) {
                double v = pobs.leq(i, uj) ? 1.0 : 0.0;
                im.ic_aux(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = v;
                mean += v;
            }
            mean /= static_cast<double>(im.n);
            im.ic_aux.col(static_cast<Eigen::Index>(col)).array() -= mean;
        }
    }

    im.cdot.resize(im.P * im.dim);
    for (std::size_t p = 0; p < im.P; ++p) {
        for (std::size_t j = 0; j < im.dim; ++j) {
            im.cdot[p * im.dim + j] = partial_derivative(pobs, j, grid.point(p), pd);
        }
    }
}

ReplicateEngine::~ReplicateEngine() = default;

std::size_t ReplicateEngine::sample_size() const { return impl_->n; }
std::size_t ReplicateEngine::grid_size() const { return impl_->P; }
double ReplicateEngine::cdot(std::size_t p, std::size_t j) const {
    return impl_->cdot[p * impl_->dim + j];
}

void ReplicateEngine::corrected_prefix(std::span<const double> xi, std::vector<double>& out) const {
    const Impl& im = *impl_;
    if (xi.size() != im.n) throw std::invalid_argument("multiplier row length mismatch");
    std::size_t A = static_cast<std::size_t>(im.ic_aux.cols());
    out.resize(im.n * im.P);
    std::vector<double> main_acc(im.P, 0.0), aux_acc(A, 0.0);
    double inv_sqn = 1.0 / std::sqrt(static_cast<double>(im.n));
    for (std::size_t i = 0; i < im.n; ++i) {
        double w = xi[i];
        const double* ic_row = im.ic.data() + i * im.P;
        const double* aux_row = im.ic_aux.data() + i * A;
        for (std::size_t p = 0; p < im.P; ++p) main_acc[p] += w * ic_row[p];
        for (std::size_t a = 0; a < A; ++a) aux_acc[a] += w * aux_row[a];
        double* row = out.data() + i * im.P;
        const double* cd = im.cdot.data();
        const int* ax = im.aux_of.data();
        for (std::size_t p = 0; p < im.P; ++p) {
            double v = main_acc[p];
            for (std::size_t j = 0; j < im.dim; ++j) {
                v -= cd[p * im.dim + j] * aux_acc[static_cast<std::size_t>(ax[p * im.dim + j])];
            }
            row[p] = v * inv_sqn;
        }
    }
}

std::vector<double> ReplicateEngine::corrected_endpoint(const MultiplierBatch& batch) const {
    const Impl& im = *impl_;
    if (batch.config.n != im.n) throw std::invalid_argument("batch length mismatch");
    std::size_t M = batch.config.replicates;
    Eigen::Map<const RowMajorMatrix> Xi(batch.xi.data(), static_cast<Eigen::Index>(M),
                                        static_cast<Eigen::Index>(im.n));
    RowMajorMatrix main_sums = Xi * im.ic;     // M x P
    RowMajorMatrix aux_sums = Xi * im.ic_aux;  // M x A
    std::size_t A = static_cast<std::size_t>(im.ic_aux.cols());
    std::vector<double> out(M * im.P);
    double inv_sqn = 1.0 / std::sqrt(static_cast<double>(im.n));
    for (std::size_t m = 0; m < M; ++m) {
        const double* ms = main_sums.data() + m * im.P;
        const double* as = aux_sums.data() + m * A;
        for (std::size_t p = 0; p < im.P; ++p) {
            double v = ms[p];
            for (std::size_t j = 0; j < im.dim; ++j) {
                v -= im.cdot[p * im.dim + j] *
                     as[static_cast<std::size_t>(im.aux_of[p * im.dim + j])];
            }
            out[m * im.P + p] = v * inv_sqn;
        }
    }
    return out;
}

ChangePointSurfaces changepoint_processes(const DataMatrix& data, const MultiplierBatch& batch,
                                          const PartialDerivSpec& pd,
                                          std::span<const std::size_t> splits,
                                          const EvalGrid& grid) {
    ChangePointSurfaces out;
    out.splits.assign(splits.begin(), splits.end());
    out.grid = grid;
    out.ell = batch.config.ell;
    out.kernel = batch.config.kernel.name();
    out.seed = batch.config.seed;
    out.observed = changepoint_observed(data, splits, grid);

    ReplicateEngine engine(data, grid, pd);
    std::size_t n = data.rows;
    std::size_t P = grid.size();
    std::size_t M = batch.config.replicates;
    out.replicates.assign(M * splits.size() * P, 0.0);
    std::vector<double> prefix;
    for (std::size_t m = 0; m < M; ++m) {
        engine.corrected_prefix(batch.row(m), prefix);
        const double* end_row = prefix.data() + (n - 1) * P;
        for (std::size_t si = 0; si < splits.size(); ++si) {
            std::size_t k = splits[si];
            double* dst = out.replicates.data() + (m * splits.size() + si) * P;
            if (k == 0 || k > n) continue;
            double lam1 = static_cast<double>(k) / static_cast<double>(n);
            double lam2 = static_cast<double>(n - k) / static_cast<double>(n);
            const double* at_k = prefix.data() + (k - 1) * P;
            for (std::size_t p = 0; p < P; ++p) {
                dst[p] = lam2 * at_k[p] - lam1 * (end_row[p] - at_k[p]);
            }
        }
    }
    return out;
}

}  // namespace seqcop
