#ifndef MMD_NORMAL_HPP
#define MMD_NORMAL_HPP

namespace mmd {

/// Standard normal distribution function Phi(x).
double normal_cdf(double x);

/// Inverse of normal_cdf on (0,1); throws std::domain_error outside the open
/// interval. Round-trips with normal_cdf to better than 1e-12.
double normal_quantile(double q);

}  // namespace mmd

#endif
