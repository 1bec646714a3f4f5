#include "seqcop/datagen.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "seqcop/rng.hpp"

namespace seqcop {

CopulaSpec CopulaSpec::independence() { return {CopulaFamily::Independence, 1.0}; }

CopulaSpec CopulaSpec::clayton(double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("clayton parameter must be > 0");
    return {CopulaFamily::Clayton, theta};
}

CopulaSpec CopulaSpec::gumbel_hougaard(double theta) {
    if (!(theta >= 1.0)) throw std::invalid_argument("gumbel-hougaard parameter must be >= 1");
    return {CopulaFamily::GumbelHougaard, theta};
}

double CopulaSpec::kendall_tau() const {
    switch (family) {
        case CopulaFamily::Independence: return 0.0;
        case CopulaFamily::Clayton: return theta / (theta + 2.0);
        case CopulaFamily::GumbelHougaard: return 1.0 - 1.0 / theta;
    }
    return 0.0;
}

namespace {

void check_unit_cube(std::span<const double> u) {
    for (double v : u) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("copula argument outside [0,1]^d");
        }
    }
}

}  // namespace

double copula_cdf(const CopulaSpec& spec, std::span<const double> u) {
    check_unit_cube(u);
    switch (spec.family) {
        case CopulaFamily::Independence: {
            double prod = 1.0;
            for (double v : u) prod *= v;
            return prod;
        }
        case CopulaFamily::Clayton: {
            double acc = 1.0 - static_cast<double>(u.size());
            for (double v : u) {
                if (v == 0.0) return 0.0;
                acc += std::pow(v, -spec.theta);
            }
            return std::pow(acc, -1.0 / spec.theta);
        }
        case CopulaFamily::GumbelHougaard: {
            double acc = 0.0;
            for (double v : u) {
                if (v == 0.0) return 0.0;
                acc += std::pow(-std::log(v), spec.theta);
            }
            return std::exp(-std::pow(acc, 1.0 / spec.theta));
        }
    }
    return 0.0;
}

double copula_partial(const CopulaSpec& spec, std::size_t j, std::span<const double> u) {
    check_unit_cube(u);
    if (j >= u.size()) throw std::invalid_argument("partial-derivative axis out of range");
    if (u[j] == 0.0 || u[j] == 1.0) return 0.0;  // boundary convention
    switch (spec.family) {
        case CopulaFamily::Independence: {
            double prod = 1.0;
            for (std::size_t k = 0; k < u.size(); ++k) {
                if (k != j) prod *= u[k];
            }
            return prod;
        }
        case CopulaFamily::Clayton: {
            double c = copula_cdf(spec, u);
            if (c == 0.0) return 0.0;
            return std::pow(c, 1.0 + spec.theta) * std::pow(u[j], -(1.0 + spec.theta));
        }
        case CopulaFamily::GumbelHougaard: {
            double acc = 0.0;
            for (double v : u) {
                if (v == 0.0) return 0.0;
                acc += std::pow(-std::log(v), spec.theta);
            }
            double c = std::exp(-std::pow(acc, 1.0 / spec.theta));
            return c * std::pow(acc, 1.0 / spec.theta - 1.0) *
                   std::pow(-std::log(u[j]), spec.theta - 1.0) / u[j];
        }
    }
    return 0.0;
}

CopulaFn make_copula_fn(const CopulaSpec& spec) {
    return [spec](std::span<const double> u) { return copula_cdf(spec, u); };
}

PartialFn make_partial_fn(const CopulaSpec& spec) {
    return [spec](std::size_t j, std::span<const double> u) { return copula_partial(spec, j, u); };
}

namespace {

// One-sided positive stable draw with Laplace transform exp(-s^alpha),
// alpha in (0,1); Chambers-Mallows-Stuck.
double positive_stable(double alpha, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    double theta = std::numbers::pi * unif(rng);
    double w = expo(rng);
    return std::sin(alpha * theta) / std::pow(std::sin(theta), 1.0 / alpha) *
           std::pow(std::sin((1.0 - alpha) * theta) / w, (1.0 - alpha) / alpha);
}

}  // namespace

DataMatrix sample_copula(const CopulaSpec& spec, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw std::invalid_argument("sample size must be positive");
    DataMatrix out(count, 2);
    std::mt19937_64 rng = substream(seed, 0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    switch (spec.family) {
        case CopulaFamily::Independence: {
            for (std::size_t i = 0; i < count; ++i) {
                out(i, 0) = unif(rng);
                out(i, 1) = unif(rng);
            }
            break;
        }
        case CopulaFamily::Clayton: {
            std::gamma_distribution<double> gamma(1.0 / spec.theta, 1.0);
            for (std::size_t i = 0; i < count; ++i) {
                double v = gamma(rng);
                for (std::size_t j = 0; j < 2; ++j) {
                    out(i, j) = std::pow(1.0 + expo(rng) / v, -1.0 / spec.theta);
                }
            }
            break;
        }
        case CopulaFamily::GumbelHougaard: {
            if (spec.theta == 1.0) {
                for (std::size_t i = 0; i < count; ++i) {
                    out(i, 0) = unif(rng);
                    out(i, 1) = unif(rng);
                }
                break;
            }
            double alpha = 1.0 / spec.theta;
            for (std::size_t i = 0; i < count; ++i) {
                double v = positive_stable(alpha, rng);
                for (std::size_t j = 0; j < 2; ++j) {
                    out(i, j) = std::exp(-std::pow(expo(rng) / v, alpha));
                }
            }
            break;
        }
    }
    return out;
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile argument must be in (0,1)");
    // Acklam's rational approximation
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p > 1.0 - plow) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    // One Halley step against the exact c.d.f.
    double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
    double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

ModelKind parse_model(std::string_view token) {
    if (token == "iid") return ModelKind::IID;
    if (token == "ar1") return ModelKind::AR1;
    if (token == "nar") return ModelKind::NAR;
    if (token == "expar") return ModelKind::EXPAR;
    if (token == "garch") return ModelKind::GARCH;
    throw std::invalid_argument("unknown model '" + std::string(token) +
                                "'; expected iid|ar1|nar|expar|garch");
}

CopulaSpec parse_copula(std::string_view family, double theta) {
    if (family == "independence") return CopulaSpec::independence();
    if (family == "clayton") return CopulaSpec::clayton(theta);
    if (family == "gumbel") return CopulaSpec::gumbel_hougaard(theta);
    throw std::invalid_argument("unknown copula '" + std::string(family) +
                                "'; expected independence|clayton|gumbel");
}

DataMatrix simulate(const DataModel& model, std::uint64_t seed) {
    if (model.n == 0) throw std::invalid_argument("sample size must be positive");
    if (model.burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
    if (model.kind == ModelKind::GARCH) {
        for (const GarchParams& g : {model.garch1, model.garch2}) {
            if (!(g.alpha + g.beta < 1.0) || !(g.omega > 0.0)) {
                throw std::invalid_argument("garch parameters violate stationarity");
            }
        }
    }
    std::size_t burn = static_cast<std::size_t>(model.burn_in);
    std::size_t total = model.n + burn + 1;
    DataMatrix U = sample_copula(model.copula, total, seed);
    DataMatrix eps(total, 2);
    for (std::size_t i = 0; i < total; ++i) {
        eps(i, 0) = inverse_normal_cdf(U(i, 0));
        eps(i, 1) = inverse_normal_cdf(U(i, 1));
    }
    if (model.kind == ModelKind::IID) {
        DataMatrix out(model.n, 2);
        for (std::size_t i = 0; i < model.n; ++i) {
            out(i, 0) = eps(burn + 1 + i, 0);
            out(i, 1) = eps(burn + 1 + i, 1);
        }
        return out;
    }
    DataMatrix X(total, 2);
    if (model.kind == ModelKind::GARCH) {
        const GarchParams gp[2] = {model.garch1, model.garch2};
        double sig2[2];
        for (int j = 0; j < 2; ++j) {
            sig2[j] = gp[j].omega / (1.0 - gp[j].alpha - gp[j].beta);
            X(0, j) = std::sqrt(sig2[j]) * eps(0, j);
        }
        for (std::size_t i = 1; i < total; ++i) {
            for (int j = 0; j < 2; ++j) {
                double e_prev = eps(i - 1, j);
                sig2[j] = gp[j].omega + gp[j].beta * sig2[j] + gp[j].alpha * e_prev * e_prev;
                X(i, j) = std::sqrt(sig2[j]) * eps(i, j);
            }
        }
    } else {
        for (int j = 0; j < 2; ++j) X(0, j) = eps(0, j);
        for (std::size_t i = 1; i < total; ++i) {
            for (int j = 0; j < 2; ++j) {
                double prev = X(i - 1, j);
                switch (model.kind) {
                    case ModelKind::AR1:
                        X(i, j) = 0.5 * prev + eps(i, j);
                        break;
                    case ModelKind::NAR:
                        X(i, j) = 0.6 * std::sin(prev) + eps(i, j);
                        break;
                    case ModelKind::EXPAR:
                        X(i, j) = (0.8 - 1.1 * std::exp(-50.0 * prev * prev)) * prev +
                                  0.1 * eps(i, j);
                        break;
                    default:
                        break;
                }
            }
        }
    }
    DataMatrix out(model.n, 2);
    for (std::size_t i = 0; i < model.n; ++i) {
        out(i, 0) = X(burn + 1 + i, 0);
        out(i, 1) = X(burn + 1 + i, 1);
    }
    return out;
}

}  // namespace seqcop
