#include "mmd/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mmd/estimators.hpp"

namespace mmd {
namespace {

Matrix atom_kernel_matrix(const ResolvedKernel& kernel, const MatrixRef& a, const MatrixRef& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("oracle: atom dimensions differ");
  }
  Matrix values(a.rows(), b.rows());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < b.rows(); ++j) {
      values(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose());
    }
  }
  return values;
}

double enumeration_count_guard(Index support, int power, double limit) {
  double count = 1.0;
  for (int i = 0; i < power; ++i) count *= static_cast<double>(support);
  if (count > limit) {
    throw std::invalid_argument("oracle: support too large to enumerate");
  }
  return count;
}

}  // namespace

void FiniteDistribution::validate() const {
  if (atoms.rows() != probs.size() || atoms.rows() == 0) {
    throw std::invalid_argument("FiniteDistribution: atoms and probs sizes differ");
  }
  if ((probs.array() < 0.0).any()) {
    throw std::invalid_argument("FiniteDistribution: negative probability");
  }
  if (std::abs(probs.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("FiniteDistribution: probabilities must sum to one");
  }
}

double population_mmd_sq(const ResolvedKernel& kernel, const FiniteDistribution& p,
                         const FiniteDistribution& q) {
  p.validate();
  q.validate();
  const Matrix cross = atom_kernel_matrix(kernel, p.atoms, q.atoms);
  const Matrix within_p = atom_kernel_matrix(kernel, p.atoms, p.atoms);
  const Matrix within_q = atom_kernel_matrix(kernel, q.atoms, q.atoms);
  const double e_cross = p.probs.dot(cross * q.probs);
  const double e_p = p.probs.dot(within_p * p.probs);
  const double e_q = q.probs.dot(within_q * q.probs);
  return 2.0 * e_cross - e_p - e_q;
}

FiniteDistribution mixture(const FiniteDistribution& p, const FiniteDistribution& q,
                           double rho) {
  p.validate();
  q.validate();
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("mixture: atom dimensions differ");
  }
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("mixture: weight must lie strictly in (0,1)");
  }
  FiniteDistribution z;
  z.atoms.resize(p.size() + q.size(), p.dim());
  z.atoms.topRows(p.size()) = p.atoms;
  z.atoms.bottomRows(q.size()) = q.atoms;
  z.probs.resize(p.size() + q.size());
  z.probs.head(p.size()) = rho * p.probs;
  z.probs.tail(q.size()) = (1.0 - rho) * q.probs;
  return z;
}

double population_hsic_self(const ResolvedKernel& kernel, const FiniteDistribution& z) {
  z.validate();
  const Matrix values = atom_kernel_matrix(kernel, z.atoms, z.atoms);
  const Vector conditional = values * z.probs;  // E[k(z_i, Z)]
  const double mean = z.probs.dot(conditional);
  const double mean_sq = z.probs.dot((values.array().square().matrix()) * z.probs);
  const double chained = (conditional.array().square() * z.probs.array()).sum();
  return mean_sq - 2.0 * chained + mean * mean;
}

FourthMomentPair population_g4(const ResolvedKernel& kernel, const FiniteDistribution& z) {
  z.validate();
  const Index s = z.size();
  enumeration_count_guard(s, 5, 1e6);

  const Matrix values = atom_kernel_matrix(kernel, z.atoms, z.atoms);
  const Vector w = z.probs;
  const Vector conditional = values * w;
  const double mean = w.dot(conditional);

  // Doubly centered kernel on the support.
  Matrix centered = values;
  centered.colwise() -= conditional;
  centered.rowwise() -= conditional.transpose();
  centered.array() += mean;

  FourthMomentPair out;

  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < s; ++j) {
      for (Index k = 0; k < s; ++k) {
        const double w3 = w(i) * w(j) * w(k);
        for (Index l = 0; l < s; ++l) {
          out.direct += w3 * w(l) * centered(i, j) * centered(i, k) *
                        centered(j, l) * centered(k, l);
        }
      }
    }
  }

  // Raw moments entering the closed-form combination, enumerated from the
  // kernel values alone so this route shares nothing with the centered one.
  double m_mean = 0.0;  // E[k12]
  double m_vee = 0.0;   // E[k12 k13]
  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < s; ++j) {
      m_mean += w(i) * w(j) * values(i, j);
      for (Index k = 0; k < s; ++k) {
        m_vee += w(i) * w(j) * w(k) * values(i, j) * values(i, k);
      }
    }
  }
  double m_ring = 0.0;    // E[k12 k13 k24 k34]
  double m_chain4 = 0.0;  // E[k12 k13 k24]
  double m_chain5 = 0.0;  // E[k12 k13 k24 k45]
  for (Index i = 0; i < s; ++i) {
    for (Index j = 0; j < s; ++j) {
      for (Index k = 0; k < s; ++k) {
        const double base = w(i) * w(j) * w(k) * values(i, j) * values(i, k);
        for (Index l = 0; l < s; ++l) {
          const double chained = base * w(l) * values(j, l);
          m_ring += chained * values(k, l);
          m_chain4 += chained;
          for (Index r = 0; r < s; ++r) {
            m_chain5 += chained * w(r) * values(l, r);
          }
        }
      }
    }
  }
  const double g1 = m_ring - 4.0 * m_chain5 + 2.0 * m_vee * m_vee;
  const double g2 = 4.0 * m_mean * m_chain4;
  const double g3 = -4.0 * m_mean * m_mean * m_vee;
  const double g4 = m_mean * m_mean * m_mean * m_mean;
  out.moment_formula = g1 + g2 + g3 + g4;
  return out;
}

ExactMoments exhaustive_moments(const ResolvedKernel& kernel, const FiniteDistribution& p,
                                const FiniteDistribution& q, Index n, Index m) {
  p.validate();
  q.validate();
  if (p.dim() != q.dim()) {
    throw std::invalid_argument("exhaustive_moments: atom dimensions differ");
  }
  if (n < 2 || m < 2) {
    throw std::invalid_argument("exhaustive_moments: needs n, m >= 2");
  }
  const double outcomes = enumeration_count_guard(p.size(), static_cast<int>(n), 1e6) *
                          enumeration_count_guard(q.size(), static_cast<int>(m), 1e6);
  if (outcomes > 1e6) {
    throw std::invalid_argument("oracle: support too large to enumerate");
  }

  const Matrix within_p = atom_kernel_matrix(kernel, p.atoms, p.atoms);
  const Matrix within_q = atom_kernel_matrix(kernel, q.atoms, q.atoms);
  const Matrix cross = atom_kernel_matrix(kernel, p.atoms, q.atoms);
  const double a0 = kernel.self_value();
  const Index total = n + m;

  std::vector<Index> pick_x(static_cast<std::size_t>(n), 0);
  std::vector<Index> pick_y(static_cast<std::size_t>(m), 0);

  double mean_mmd = 0.0;
  double second_mmd = 0.0;
  double mean_varest = 0.0;

  GramBundle gram{n, m, Matrix(total, total), a0};
  const auto evaluate = [&]() {
    double weight = 1.0;
    for (Index i = 0; i < n; ++i) weight *= p.probs(pick_x[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < m; ++j) weight *= q.probs(pick_y[static_cast<std::size_t>(j)]);

    for (Index i = 0; i < n; ++i) {
      const Index ai = pick_x[static_cast<std::size_t>(i)];
      gram.K(i, i) = a0;
      for (Index i2 = i + 1; i2 < n; ++i2) {
        const double v = within_p(ai, pick_x[static_cast<std::size_t>(i2)]);
        gram.K(i, i2) = v;
        gram.K(i2, i) = v;
      }
      for (Index j = 0; j < m; ++j) {
        const double v = cross(ai, pick_y[static_cast<std::size_t>(j)]);
        gram.K(i, n + j) = v;
        gram.K(n + j, i) = v;
      }
    }
    for (Index j = 0; j < m; ++j) {
      const Index aj = pick_y[static_cast<std::size_t>(j)];
      gram.K(n + j, n + j) = a0;
      for (Index j2 = j + 1; j2 < m; ++j2) {
        const double v = within_q(aj, pick_y[static_cast<std::size_t>(j2)]);
        gram.K(n + j, n + j2) = v;
        gram.K(n + j2, n + j) = v;
      }
    }

    const double mmd = mmd_u_statistic(gram).value;
    mean_mmd += weight * mmd;
    second_mmd += weight * mmd * mmd;
    mean_varest += weight * pooled_variance(gram).value;
  };

  // Odometer enumeration over all joint atom assignments.
  const auto advance = [](std::vector<Index>& digits, Index radix) {
    for (auto& digit : digits) {
      if (++digit < radix) return true;
      digit = 0;
    }
    return false;
  };
  do {
    do {
      evaluate();
    } while (advance(pick_y, q.size()));
  } while (advance(pick_x, p.size()));

  return {mean_mmd, second_mmd - mean_mmd * mean_mmd, mean_varest};
}

PopulationSummary population_summary(const ResolvedKernel& kernel,
                                     const FiniteDistribution& p,
                                     const FiniteDistribution& q, double rho) {
  const FiniteDistribution z = mixture(p, q, rho);
  PopulationSummary summary;
  summary.mmd_sq = population_mmd_sq(kernel, p, q);
  summary.hsic_self = population_hsic_self(kernel, z);
  summary.g4 = population_g4(kernel, z).direct;
  return summary;
}

}  // namespace mmd
