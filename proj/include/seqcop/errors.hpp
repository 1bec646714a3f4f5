#pragma once

#include <stdexcept>
#include <string>

namespace seqcop {

/// A covariance kernel whose implied Toeplitz matrix fails to be positive
/// semi-definite (up to the documented clipping tolerance).
struct NotPositiveSemiDefinite : std::runtime_error {
    explicit NotPositiveSemiDefinite(const std::string& what) : std::runtime_error(what) {}
};

/// Requested a second-derivative constant from a kernel that is not twice
/// differentiable at the origin.
struct BandwidthKernelNotSmooth : std::runtime_error {
    explicit BandwidthKernelNotSmooth(const std::string& what) : std::runtime_error(what) {}
};

/// Variance plug-in came out non-positive; the data are too degenerate for
/// bandwidth estimation.
struct DegenerateVariance : std::runtime_error {
    explicit DegenerateVariance(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace seqcop
