#pragma once

#include <cstdint>
#include <span>

#include "seqcop/copula_process.hpp"

namespace seqcop {

enum class CopulaFamily { Independence, Clayton, GumbelHougaard };

struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Independence;
    double theta = 1.0;

    static CopulaSpec independence();
    static CopulaSpec clayton(double theta);          // theta > 0
    static CopulaSpec gumbel_hougaard(double theta);  // theta >= 1

    /// Kendall's tau implied by the parameter.
    double kendall_tau() const;
};

/// C(u) in closed form. Rejects u outside [0,1]^d.
double copula_cdf(const CopulaSpec& spec, std::span<const double> u);

/// dC/du_j in closed form, with the boundary convention that the partial
/// derivative is 0 whenever u_j is 0 or 1.
double copula_partial(const CopulaSpec& spec, std::size_t j, std::span<const double> u);

CopulaFn make_copula_fn(const CopulaSpec& spec);
PartialFn make_partial_fn(const CopulaSpec& spec);

/// count x 2 sample from the copula. Clayton uses the gamma-frailty
/// construction, Gumbel-Hougaard the positive-stable frailty with the
/// Chambers-Mallows-Stuck draw.
DataMatrix sample_copula(const CopulaSpec& spec, std::size_t count, std::uint64_t seed);

enum class ModelKind { IID, AR1, NAR, EXPAR, GARCH };

struct GarchParams {
    double omega = 0.0;
    double beta = 0.0;
    double alpha = 0.0;
};

/// Bivariate serially dependent data models driven by copula-distributed
/// innovations eps_i = (Phi^{-1}(U_i1), Phi^{-1}(U_i2)):
///   AR1:   X_i = 0.5 X_{i-1} + eps_i
///   NAR:   X_i = 0.6 sin(X_{i-1}) + eps_i
///   EXPAR: X_i = {0.8 - 1.1 exp(-50 X_{i-1}^2)} X_{i-1} + 0.1 eps_i
///   GARCH: sigma_i^2 = omega + beta sigma_{i-1}^2 + alpha eps_{i-1}^2,
///          X_i = sigma_i eps_i
/// componentwise, with a burn-in starting from X = eps (GARCH: sigma at its
/// stationary value).
struct DataModel {
    ModelKind kind = ModelKind::IID;
    CopulaSpec copula;
    std::size_t n = 0;
    int burn_in = 100;
    GarchParams garch1{0.012, 0.919, 0.072};
    GarchParams garch2{0.037, 0.868, 0.115};
};

DataMatrix simulate(const DataModel& model, std::uint64_t seed);

ModelKind parse_model(std::string_view token);
CopulaSpec parse_copula(std::string_view family, double theta);

/// Inverse standard normal c.d.f. (rational approximation refined by one
/// Halley step against erfc; accurate to full double precision).
double inverse_normal_cdf(double p);

}  // namespace seqcop
