#include "seqcop/copula_process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace seqcop {

DataMatrix::DataMatrix(std::size_t n, std::size_t d) : rows(n), cols(d), values(n * d, 0.0) {}

DataMatrix::DataMatrix(std::size_t n, std::size_t d, std::vector<double> vals)
    : rows(n), cols(d), values(std::move(vals)) {
    if (values.size() != n * d) throw std::invalid_argument("data size does not match n x d");
    validate();
}

void DataMatrix::validate() const {
    if (rows == 0 || cols == 0) throw std::invalid_argument("data matrix must be non-empty");
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!std::isfinite((*this)(i, j))) {
                throw std::invalid_argument("non-finite value at row " + std::to_string(i + 1) +
                                            ", column " + std::to_string(j + 1));
            }
        }
    }
}

bool PseudoObsWindow::leq(std::size_t i, std::span<const double> u) const {
    std::size_t m = length();
    for (std::size_t j = 0; j < dim; ++j) {
        if (rank(i, j) > rank_threshold(u[j], m)) return false;
    }
    return true;
}

PseudoObsWindow ranks(const DataMatrix& data, std::size_t k, std::size_t l) {
    if (k < 1 || k > l || l > data.rows) {
        throw std::invalid_argument("invalid rank window [" + std::to_string(k) + ", " +
                                    std::to_string(l) + "]");
    }
    std::size_t m = l - k + 1;
    PseudoObsWindow out;
    out.first = k;
    out.last = l;
    out.dim = data.cols;
    out.rank_values.resize(m * data.cols);

    std::vector<std::size_t> order(m);
    for (std::size_t j = 0; j < data.cols; ++j) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return data(k - 1 + a, j) < data(k - 1 + b, j);
        });
        // mid-ranks: ties get the average of the ranks they span
        std::size_t pos = 0;
        while (pos < m) {
            std::size_t end = pos + 1;
            double v = data(k - 1 + order[pos], j);
            while (end < m && data(k - 1 + order[end], j) == v) ++end;
            double mid = 0.5 * static_cast<double>(pos + 1 + end);  // average of pos+1 .. end
            for (std::size_t t = pos; t < end; ++t) out.rank_values[order[t] * data.cols + j] = mid;
            pos = end;
        }
    }
    return out;
}

double empirical_copula(const PseudoObsWindow& pobs, std::span<const double> u) {
    std::size_t m = pobs.length();
    if (m == 0) return 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < m; ++i) count += pobs.leq(i, u) ? 1 : 0;
    return static_cast<double>(count) / static_cast<double>(m);
}

double seq_copula_process(const DataMatrix& data, double s, double t, std::span<const double> u,
                          const CopulaFn& c_ref) {
    if (s > t) throw std::invalid_argument("window endpoints must satisfy s <= t");
    std::size_t n = data.rows;
    auto a = static_cast<std::size_t>(std::floor(s * static_cast<double>(n)));
    auto b = static_cast<std::size_t>(std::floor(t * static_cast<double>(n)));
    if (a == b) return 0.0;
    double lambda = static_cast<double>(b - a) / static_cast<double>(n);
    PseudoObsWindow w = ranks(data, a + 1, b);
    return std::sqrt(static_cast<double>(n)) * lambda * (empirical_copula(w, u) - c_ref(u));
}

double ruschendorf_process(const DataMatrix& data, double s, std::span<const double> u,
                           const CopulaFn& c_ref) {
    std::size_t n = data.rows;
    auto k = static_cast<std::size_t>(std::floor(s * static_cast<double>(n)));
    if (k == 0) return 0.0;
    PseudoObsWindow w = ranks(data, 1, n);
    double c = c_ref(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += (w.leq(i, u) ? 1.0 : 0.0) - c;
    return acc / std::sqrt(static_cast<double>(n));
}

double sequential_empirical_process(const DataMatrix& uniforms, double s,
                                    std::span<const double> u, const CopulaFn& c_true) {
    std::size_t n = uniforms.rows;
    auto k = static_cast<std::size_t>(std::floor(s * static_cast<double>(n)));
    if (k == 0) return 0.0;
    double c = c_true(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        bool le = true;
        for (std::size_t j = 0; j < uniforms.cols; ++j) {
            if (uniforms(i, j) > u[j]) {
                le = false;
                break;
            }
        }
        acc += (le ? 1.0 : 0.0) - c;
    }
    return acc / std::sqrt(static_cast<double>(n));
}

double seq_copula_linearization(const DataMatrix& uniforms, double s, double t,
                                std::span<const double> u, const CopulaFn& c_true,
                                const PartialFn& partials) {
    if (s > t) throw std::invalid_argument("window endpoints must satisfy s <= t");
    std::size_t d = uniforms.cols;
    auto diff = [&](std::span<const double> v) {
        return sequential_empirical_process(uniforms, t, v, c_true) -
               sequential_empirical_process(uniforms, s, v, c_true);
    };
    double out = diff(u);
    std::vector<double> uj(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(uj.begin(), uj.end(), 1.0);
        uj[j] = u[j];
        out -= partials(j, u) * diff(uj);
    }
    return out;
}

EvalGrid EvalGrid::lattice(std::size_t per_axis, std::size_t dim) {
    if (per_axis == 0 || dim == 0) throw std::invalid_argument("lattice needs per_axis, dim >= 1");
    EvalGrid g;
    g.dim = dim;
    std::size_t total = 1;
    for (std::size_t j = 0; j < dim; ++j) total *= per_axis;
    g.coords.resize(total * dim);
    // midpoint lattice i/(per_axis+1), i = 1..per_axis, per axis
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t p = 0; p < total; ++p) {
        for (std::size_t j = 0; j < dim; ++j) {
            g.coords[p * dim + j] =
                static_cast<double>(idx[j] + 1) / static_cast<double>(per_axis + 1);
        }
        for (std::size_t j = dim; j-- > 0;) {
            if (++idx[j] < per_axis) break;
            idx[j] = 0;
        }
    }
    return g;
}

EvalGrid EvalGrid::from_points(std::size_t dim, std::vector<double> coords) {
    if (dim == 0 || coords.size() % dim != 0) {
        throw std::invalid_argument("grid coordinates must be a multiple of dim");
    }
    for (double c : coords) {
        if (!(c >= 0.0 && c <= 1.0)) {
            throw std::invalid_argument("grid coordinates must lie in [0,1]");
        }
    }
    EvalGrid g;
    g.dim = dim;
    g.coords = std::move(coords);
    return g;
}

}  // namespace seqcop
