#pragma once

#include <string>
#include <string_view>

#include "seqcop/errors.hpp"

namespace seqcop {

enum class KernelFamily { Truncated, Bartlett, Parzen, FlatTop, UniformSum };

/// How a kernel is used: as a moving-average weight function, or as the
/// target autocovariance function of the multiplier sequence.
enum class KernelRole { WeightKappa, CovariancePhi };

/// One of the admissible weight/covariance functions. All families are
/// symmetric, equal 1 at 0, take values in [0,1] and vanish outside [-1,1].
///
/// The covariance role is rejected for Truncated and FlatTop: their implied
/// Toeplitz matrices are not positive semi-definite.
struct KernelSpec {
    KernelFamily family = KernelFamily::Bartlett;
    KernelRole role = KernelRole::WeightKappa;
    double flattop_c = 0.5;  // plateau half-width, FlatTop only
    int usum_p = 2;          // number of uniforms, UniformSum only

    static KernelSpec weight(KernelFamily family, double flattop_c = 0.5, int usum_p = 2);
    static KernelSpec covariance(KernelFamily family, int usum_p = 2);

    std::string name() const;
};

/// Kernel value at x. Parzen uses the two-branch cubic; FlatTop the
/// trapezoid [((1-|x|)/(1-c)) v 0] ^ 1; UniformSum(p) the density of the sum
/// of p independent centered uniforms, rescaled to support (-1,1) and
/// normalized to 1 at 0, evaluated by divided differences.
double evaluate(const KernelSpec& spec, double x);

/// Normalized self-convolution k*k(2x)/k*k(0): the autocovariance function
/// that the moving-average construction with weight kernel `spec` realizes
/// asymptotically. Adaptive Simpson quadrature, absolute tolerance 1e-10.
double self_convolution_normalized(const KernelSpec& spec, double x);

struct PhiConstants {
    double second_derivative_at_zero = 0.0;
    double integral_of_square = 0.0;
};

/// Integral of the squared kernel over [-1,1]. Defined for every family;
/// analytic for Bartlett (2/3) and Parzen (151/280), quadrature otherwise.
double integral_of_square(const KernelSpec& spec);

/// Analytic constants of a covariance kernel: (phi''(0), integral of phi^2
/// over [-1,1]). Analytic for Parzen and the Bartlett integral; numerical
/// (Richardson-extrapolated central differences with step <= 1e-4, adaptive
/// Simpson) otherwise. Throws BandwidthKernelNotSmooth when phi''(0) does
/// not exist (Bartlett, UniformSum p < 4).
///
/// Values computed here and recorded for reference:
///   UniformSum(6): phi''(0) = -15.4350649...,  integral = 0.4285049...
///   UniformSum(8): phi''(0) = -22.2516556... (= -3360/151), integral = 0.3723388...
PhiConstants phi_constants(const KernelSpec& spec);

/// Parses "truncated" | "bartlett" | "parzen" | "flattop:<c>" | "usum:<p>".
KernelSpec parse_kernel(std::string_view token, KernelRole role);

/// The covariance kernel asymptotically realized by a moving average with
/// weight kernel `kappa`, in closed form where one exists: Truncated ->
/// Bartlett, Bartlett -> Parzen, Parzen -> UniformSum(8), UniformSum(p) ->
/// UniformSum(2p). Throws std::invalid_argument for FlatTop (no closed
/// form in the admissible families).
KernelSpec matched_covariance_kernel(const KernelSpec& kappa);

}  // namespace seqcop
