#include "seqcop/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace seqcop {

namespace {

// Density of the sum of p independent U(0,1) variables at y, computed from
// the divided-difference table of t -> (t-y)_+^{p-1} over the integer knots
// 0..p (knots already sorted; this is the numerically stable order).
double uniform_sum_density(double y, int p) {
    if (y <= 0.0 || y >= p) return 0.0;
    std::vector<double> col(p + 1);
    for (int t = 0; t <= p; ++t) {
        double diff = t - y;
        col[t] = diff > 0.0 ? std::pow(diff, p - 1) : 0.0;
    }
    for (int level = 1; level <= p; ++level) {
        for (int i = 0; i + level <= p; ++i) {
            col[i] = (col[i + 1] - col[i]) / level;  // knot spacing (i+level) - i
        }
    }
    return col[0] * p;
}

double flattop_value(double x, double c) {
    double v = (1.0 - std::abs(x)) / (1.0 - c);
    return std::min(std::max(v, 0.0), 1.0);
}

// Adaptive Simpson with absolute tolerance; integrands here are cheap
// piecewise polynomials.
template <typename F>
double simpson_rec(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

void validate(const KernelSpec& spec) {
    if (spec.family == KernelFamily::FlatTop) {
        if (!(spec.flattop_c >= 0.0 && spec.flattop_c < 1.0)) {
            throw std::invalid_argument("flat-top parameter c must lie in [0,1)");
        }
    }
    if (spec.family == KernelFamily::UniformSum && spec.usum_p < 1) {
        throw std::invalid_argument("uniform-sum order p must be a positive integer");
    }
    if (spec.role == KernelRole::CovariancePhi &&
        (spec.family == KernelFamily::Truncated || spec.family == KernelFamily::FlatTop)) {
        throw std::invalid_argument(
            "kernel '" + spec.name() +
            "' cannot serve as a covariance function: its Toeplitz matrix is not positive "
            "semi-definite");
    }
}

}  // namespace

KernelSpec KernelSpec::weight(KernelFamily family, double flattop_c, int usum_p) {
    KernelSpec spec{family, KernelRole::WeightKappa, flattop_c, usum_p};
    validate(spec);
    return spec;
}

KernelSpec KernelSpec::covariance(KernelFamily family, int usum_p) {
    KernelSpec spec{family, KernelRole::CovariancePhi, 0.5, usum_p};
    validate(spec);
    return spec;
}

std::string KernelSpec::name() const {
    switch (family) {
        case KernelFamily::Truncated: return "truncated";
        case KernelFamily::Bartlett: return "bartlett";
        case KernelFamily::Parzen: return "parzen";
        case KernelFamily::FlatTop: return "flattop:" + std::to_string(flattop_c);
        case KernelFamily::UniformSum: return "usum:" + std::to_string(usum_p);
    }
    return "?";
}

double evaluate(const KernelSpec& spec, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("kernel argument must be finite");
    double ax = std::abs(x);
    switch (spec.family) {
        case KernelFamily::Truncated:
            return ax <= 1.0 ? 1.0 : 0.0;
        case KernelFamily::Bartlett:
            return std::max(1.0 - ax, 0.0);
        case KernelFamily::Parzen:
            if (ax <= 0.5) return 1.0 - 6.0 * ax * ax + 6.0 * ax * ax * ax;
            if (ax <= 1.0) return 2.0 * (1.0 - ax) * (1.0 - ax) * (1.0 - ax);
            return 0.0;
        case KernelFamily::FlatTop:
            return flattop_value(x, spec.flattop_c);
        case KernelFamily::UniformSum: {
            if (ax >= 1.0) return 0.0;
            int p = spec.usum_p;
            double center = uniform_sum_density(p / 2.0, p);
            return uniform_sum_density((x + 1.0) * p / 2.0, p) / center;
        }
    }
    return 0.0;
}

double self_convolution_normalized(const KernelSpec& spec, double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("kernel argument must be finite");
    if (std::abs(x) >= 1.0) return 0.0;
    auto conv = [&](double y) {
        auto f = [&](double t) { return evaluate(spec, t) * evaluate(spec, y - t); };
        // integrand supported on [-1,1] intersected with [y-1, y+1]
        double lo = std::max(-1.0, y - 1.0), hi = std::min(1.0, y + 1.0);
        if (lo >= hi) return 0.0;
        return adaptive_simpson(f, lo, hi);
    };
    return conv(2.0 * x) / conv(0.0);
}

double integral_of_square(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::Bartlett: return 2.0 / 3.0;
        case KernelFamily::Parzen: return 151.0 / 280.0;
        default: break;
    }
    auto f = [&](double x) { return evaluate(spec, x); };
    return adaptive_simpson([&](double x) { return f(x) * f(x); }, -1.0, 1.0);
}

PhiConstants phi_constants(const KernelSpec& spec) {
    switch (spec.family) {
        case KernelFamily::Truncated:
        case KernelFamily::FlatTop:
            throw BandwidthKernelNotSmooth("kernel '" + spec.name() +
                                           "' is not an admissible covariance function");
        case KernelFamily::Bartlett:
            throw BandwidthKernelNotSmooth(
                "bartlett kernel is not twice differentiable at 0; its bias constant is undefined");
        case KernelFamily::Parzen:
            // phi(x) = 1 - 6x^2 + 6|x|^3 near 0.
            return {-12.0, 151.0 / 280.0};
        case KernelFamily::UniformSum: {
            int p = spec.usum_p;
            if (p < 4) {
                if (p == 2)
                    throw BandwidthKernelNotSmooth(
                        "usum:2 (bartlett) is not twice differentiable at 0");
                throw BandwidthKernelNotSmooth(
                    "usum:" + std::to_string(p) + " is not twice continuously differentiable");
            }
            auto f = [&](double x) { return evaluate(spec, x); };
            // Central second differences with Richardson extrapolation.
            double h = 1e-4;
            double d1 = (f(h) - 2.0 + f(-h)) / (h * h);
            double d2 = (f(h / 2.0) - 2.0 + f(-h / 2.0)) / (h * h / 4.0);
            double second = (4.0 * d2 - d1) / 3.0;
            return {second, integral_of_square(spec)};
        }
    }
    return {};
}

KernelSpec parse_kernel(std::string_view token, KernelRole role) {
    auto make = [&](KernelFamily fam, double c, int p) {
        return role == KernelRole::WeightKappa ? KernelSpec::weight(fam, c, p)
                                               : KernelSpec::covariance(fam, p);
    };
    if (token == "truncated") return make(KernelFamily::Truncated, 0.5, 2);
    if (token == "bartlett") return make(KernelFamily::Bartlett, 0.5, 2);
    if (token == "parzen") return make(KernelFamily::Parzen, 0.5, 2);
    if (token.rfind("flattop:", 0) == 0) {
        double c = std::stod(std::string(token.substr(8)));
        return make(KernelFamily::FlatTop, c, 2);
    }
    if (token.rfind("usum:", 0) == 0) {
        int p = std::stoi(std::string(token.substr(5)));
        return make(KernelFamily::UniformSum, 0.5, p);
    }
    throw std::invalid_argument("unknown kernel '" + std::string(token) +
                                "'; expected truncated|bartlett|parzen|flattop:<c>|usum:<p>");
}

KernelSpec matched_covariance_kernel(const KernelSpec& kappa) {
    switch (kappa.family) {
        case KernelFamily::Truncated:
            return KernelSpec::covariance(KernelFamily::Bartlett);
        case KernelFamily::Bartlett:
            return KernelSpec::covariance(KernelFamily::Parzen);
        case KernelFamily::Parzen:
            return KernelSpec::covariance(KernelFamily::UniformSum, 8);
        case KernelFamily::UniformSum:
            return KernelSpec::covariance(KernelFamily::UniformSum, 2 * kappa.usum_p);
        case KernelFamily::FlatTop:
            throw std::invalid_argument(
                "the flat-top kernel's self-convolution is not one of the admissible covariance "
                "families; choose the covariance kernel explicitly");
    }
    throw std::invalid_argument("unreachable");
}

}  // namespace seqcop
