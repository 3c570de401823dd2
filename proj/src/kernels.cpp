#include "mmd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mmd {

bool kernel_has_bandwidth(KernelFamily family) {
  return family == KernelFamily::Gaussian || family == KernelFamily::Laplacian;
}

std::string kernel_family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::L2: return "l2";
    case KernelFamily::L1: return "l1";
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::Laplacian: return "laplacian";
  }
  return "?";
}

void KernelSpec::validate() const {
  if (kernel_has_bandwidth(family) && bandwidth == BandwidthPolicy::Fixed &&
      !(bandwidth_value > 0.0)) {
    throw std::invalid_argument("KernelSpec: fixed bandwidth must be positive");
  }
}

double ResolvedKernel::operator()(const VectorRef& x, const VectorRef& y) const {
  if (x.size() != y.size()) {
    throw std::invalid_argument("eval_kernel: dimension mismatch");
  }
  if (family == KernelFamily::L1) {
    return (x - y).lpNorm<1>();
  }
  return from_sqdist((x - y).squaredNorm());
}

double ResolvedKernel::from_sqdist(double d2) const {
  switch (family) {
    case KernelFamily::L2:
      return std::sqrt(d2);
    case KernelFamily::Gaussian:
      return -std::exp(-d2 / (2.0 * bandwidth * bandwidth));
    case KernelFamily::Laplacian:
      return -std::exp(-std::sqrt(d2) / bandwidth);
    case KernelFamily::L1:
      break;
  }
  throw std::logic_error("from_sqdist: L1 kernel is not a function of the squared distance");
}

double eval_kernel(const ResolvedKernel& kernel, const VectorRef& x, const VectorRef& y) {
  return kernel(x, y);
}

Matrix pooled_sqdist(const MatrixRef& x, const MatrixRef& y) {
  if (x.cols() != y.cols()) {
    throw std::invalid_argument("pooled_sqdist: column counts differ");
  }
  const Index n = x.rows();
  const Index total = n + y.rows();
  Matrix pooled(total, x.cols());
  pooled.topRows(n) = x;
  pooled.bottomRows(y.rows()) = y;

  Matrix d2(total, total);
  for (Index s = 0; s < total; ++s) {
    d2(s, s) = 0.0;
    for (Index t = s + 1; t < total; ++t) {
      const double v = (pooled.row(s) - pooled.row(t)).squaredNorm();
      d2(s, t) = v;
      d2(t, s) = v;
    }
  }
  return d2;
}

namespace detail {

double median_bandwidth_from_sqdist(KernelFamily family, const MatrixRef& sqdist) {
  const Index total = sqdist.rows();
  if (total < 2) {
    throw std::invalid_argument("median_heuristic_bandwidth: needs at least one pair");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(total) * (total - 1) / 2);
  const bool squared = family == KernelFamily::Gaussian;
  for (Index s = 0; s < total; ++s) {
    for (Index t = s + 1; t < total; ++t) {
      values.push_back(squared ? sqdist(s, t) : std::sqrt(sqdist(s, t)));
    }
  }
  std::sort(values.begin(), values.end());
  const std::size_t count = values.size();
  const double median = count % 2 == 1
                            ? values[count / 2]
                            : 0.5 * (values[count / 2 - 1] + values[count / 2]);
  if (!(median > 0.0)) {
    throw std::invalid_argument(
        "median_heuristic_bandwidth: degenerate bandwidth (median distance is zero)");
  }
  return squared ? std::sqrt(median) : median;
}

}  // namespace detail

double median_heuristic_bandwidth(KernelFamily family, const MatrixRef& x, const MatrixRef& y) {
  if (!kernel_has_bandwidth(family)) {
    throw std::invalid_argument("median_heuristic_bandwidth: family carries no bandwidth");
  }
  if (x.rows() < 1 || y.rows() < 1) {
    throw std::invalid_argument("median_heuristic_bandwidth: both samples must be non-empty");
  }
  return detail::median_bandwidth_from_sqdist(family, pooled_sqdist(x, y));
}

ResolvedKernel resolve_kernel(const KernelSpec& spec, const MatrixRef& x, const MatrixRef& y) {
  spec.validate();
  if (!kernel_has_bandwidth(spec.family)) {
    return {spec.family, 0.0};
  }
  if (spec.bandwidth == BandwidthPolicy::Fixed) {
    return {spec.family, spec.bandwidth_value};
  }
  return {spec.family, median_heuristic_bandwidth(spec.family, x, y)};
}

GramBundle gram_pooled(const ResolvedKernel& kernel, const MatrixRef& x, const MatrixRef& y) {
  if (x.cols() != y.cols()) {
    throw std::invalid_argument("gram_pooled: column counts differ");
  }
  if (x.rows() < 1 || y.rows() < 1) {
    throw std::invalid_argument("gram_pooled: both samples must be non-empty");
  }
  if (kernel.family == KernelFamily::L1) {
    const Index n = x.rows();
    const Index total = n + y.rows();
    Matrix pooled(total, x.cols());
    pooled.topRows(n) = x;
    pooled.bottomRows(y.rows()) = y;
    GramBundle gram{n, y.rows(), Matrix(total, total), 0.0};
    for (Index s = 0; s < total; ++s) {
      gram.K(s, s) = 0.0;
      for (Index t = s + 1; t < total; ++t) {
        const double v = (pooled.row(s) - pooled.row(t)).lpNorm<1>();
        gram.K(s, t) = v;
        gram.K(t, s) = v;
      }
    }
    return gram;
  }
  return gram_from_sqdist(kernel, pooled_sqdist(x, y), x.rows(), y.rows());
}

GramBundle gram_from_sqdist(const ResolvedKernel& kernel, const MatrixRef& sqdist,
                            Index n, Index m) {
  if (sqdist.rows() != sqdist.cols() || sqdist.rows() != n + m) {
    throw std::invalid_argument("gram_from_sqdist: distance matrix does not match n+m");
  }
  GramBundle gram{n, m, Matrix(n + m, n + m), kernel.self_value()};
  const Index total = n + m;
  for (Index s = 0; s < total; ++s) {
    gram.K(s, s) = gram.a0;
    for (Index t = s + 1; t < total; ++t) {
      const double v = kernel.from_sqdist(sqdist(s, t));
      gram.K(s, t) = v;
      gram.K(t, s) = v;
    }
  }
  return gram;
}

}  // namespace mmd
