#include "mmd/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mmd/normal.hpp"

namespace mmd {
namespace {

constexpr std::uint64_t kSaltDiagonal = 0x7664696167ULL;
constexpr std::uint64_t kSaltData = 0x64726177ULL;
constexpr std::uint64_t kSaltPermutationSeed = 0x7065726dULL;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void parallel_for(long count, int threads, const std::function<void(long)>& body) {
  const int workers = std::max(1, threads);
  if (workers == 1 || count < 2) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const long chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long begin = static_cast<long>(w) * chunk;
    const long end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end]() {
      for (long i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& worker : pool) worker.join();
}

/// Gram bundle for one kernel spec over a drawn sample, reusing the pooled
/// squared-distance matrix for every family except L1.
GramBundle gram_for(const KernelSpec& spec, const Matrix& x, const Matrix& y,
                    const Matrix& sqdist) {
  if (spec.family == KernelFamily::L1) {
    return gram_pooled(ResolvedKernel{KernelFamily::L1, 0.0}, x, y);
  }
  ResolvedKernel kernel{spec.family, 0.0};
  if (kernel_has_bandwidth(spec.family)) {
    kernel.bandwidth = spec.bandwidth == BandwidthPolicy::Fixed
                           ? spec.bandwidth_value
                           : detail::median_bandwidth_from_sqdist(spec.family, sqdist);
  }
  return gram_from_sqdist(kernel, sqdist, x.rows(), y.rows());
}

// Per-replication outcome codes.
constexpr std::uint8_t kAccept = 0;
constexpr std::uint8_t kReject = 1;
constexpr std::uint8_t kDegenerate = 2;
constexpr std::uint8_t kUnset = 3;

RateCell reduce_rates(const std::uint8_t* outcomes, long replications) {
  RateCell cell;
  long rejected = 0;
  long degenerate = 0;
  long valid = 0;
  for (long r = 0; r < replications; ++r) {
    switch (outcomes[r]) {
      case kReject: ++rejected; ++valid; break;
      case kAccept: ++valid; break;
      case kDegenerate: ++degenerate; break;
      default: break;
    }
  }
  cell.rejection_rate = valid > 0 ? static_cast<double>(rejected) / valid : 0.0;
  cell.replications = replications;
  cell.degenerate = degenerate;
  return cell;
}

bool wants(const std::vector<TestMethod>& methods, TestMethod method) {
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

}  // namespace

Matrix ar_covariance(Index p, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("ar_covariance: rho must lie in [0,1)");
  }
  if (p < 1) {
    throw std::invalid_argument("ar_covariance: dimension must be positive");
  }
  Matrix sigma(p, p);
  for (Index i = 0; i < p; ++i) {
    sigma(i, i) = 1.0;
    for (Index j = i + 1; j < p; ++j) {
      const double v = std::pow(rho, static_cast<double>(j - i));
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  return sigma;
}

Matrix matrix_sqrt_psd(const MatrixRef& matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw std::invalid_argument("matrix_sqrt_psd: matrix is not square");
  }
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("matrix_sqrt_psd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("matrix_sqrt_psd: eigendecomposition failed");
  }
  Vector values = solver.eigenvalues();
  if ((values.array() < -1e-10).any()) {
    throw std::invalid_argument("matrix_sqrt_psd: matrix has a negative eigenvalue");
  }
  values = values.cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * values.asDiagonal() * solver.eigenvectors().transpose();
}

DgpSampler::DgpSampler(const DgpSpec& spec) : spec_(spec) {
  const Index p = spec.p;
  Vector sd_diag = Vector::Ones(p);
  if (spec.v_diag == DiagonalScale::UniformOneToFive) {
    RngStream rng(spec.v_seed, derive_stream({kSaltDiagonal}));
    for (Index i = 0; i < p; ++i) {
      sd_diag(i) = 1.0 + 4.0 * rng.next_double();
    }
  }
  const Matrix sigma = ar_covariance(p, spec.rho);
  color_x_ = matrix_sqrt_psd(sd_diag.asDiagonal() * sigma * sd_diag.asDiagonal());

  const Index shifted_var = static_cast<Index>(spec.var_shift.beta * static_cast<double>(p));
  if (shifted_var > 0 && spec.var_shift.sd_factor != 1.0) {
    Vector sd_y = sd_diag;
    sd_y.head(shifted_var) *= spec.var_shift.sd_factor;
    color_y_ = matrix_sqrt_psd(sd_y.asDiagonal() * sigma * sd_y.asDiagonal());
  } else {
    color_y_ = color_x_;
  }

  shift_y_ = Vector::Zero(p);
  const Index shifted_mean = static_cast<Index>(spec.mean_shift.beta * static_cast<double>(p));
  shift_y_.head(shifted_mean).setConstant(spec.mean_shift.delta);
}

Matrix DgpSampler::draw(Index rows, SampleRole role, RngStream& rng) const {
  if (rows < 1) {
    throw std::invalid_argument("DgpSampler::draw: needs at least one row");
  }
  Matrix innovations(rows, spec_.p);
  if (spec_.innovation == Innovation::Gaussian) {
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < spec_.p; ++j) {
        innovations(i, j) = rng.next_gaussian();
      }
    }
  } else {
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < spec_.p; ++j) {
        innovations(i, j) = rng.next_exponential() - 1.0;
      }
    }
  }
  // Coloring matrices are symmetric, so row-wise S*z is innovations * S.
  Matrix sample = innovations * (role == SampleRole::X ? color_x_ : color_y_);
  if (role == SampleRole::Y) {
    sample.rowwise() += shift_y_.transpose();
  }
  return sample;
}

Matrix draw_sample(const DgpSpec& spec, Index rows, SampleRole role, RngStream& rng) {
  return DgpSampler(spec).draw(rows, role, rng);
}

ExperimentReport run_size_experiment(const SizeExperimentConfig& config) {
  if (config.replications < 1 || config.sizes.empty() || config.kernels.empty() ||
      config.methods.empty()) {
    throw std::invalid_argument("run_size_experiment: empty grid or no replications");
  }
  const bool run_asymptotic = wants(config.methods, TestMethod::Asymptotic);
  const bool run_permutation = wants(config.methods, TestMethod::Permutation);
  const long asym_reps = config.replications;
  const long perm_reps = config.permutation_replications > 0
                             ? config.permutation_replications
                             : config.replications;
  const long max_reps = std::max(run_asymptotic ? asym_reps : 0,
                                 run_permutation ? perm_reps : 0);
  const std::size_t kernel_count = config.kernels.size();

  ExperimentReport report;
  report.seed = config.seed;

  for (std::size_t cell = 0; cell < config.sizes.size(); ++cell) {
    const auto start = Clock::now();
    const SampleSizes sizes = config.sizes[cell];
    DgpSpec dgp = config.dgp;
    dgp.v_seed = derive_stream({kSaltDiagonal, config.seed, cell});
    const DgpSampler sampler(dgp);

    std::vector<std::uint8_t> asym(kernel_count * static_cast<std::size_t>(max_reps), kUnset);
    std::vector<std::uint8_t> perm(kernel_count * static_cast<std::size_t>(max_reps), kUnset);

    parallel_for(max_reps, config.threads, [&](long r) {
      RngStream rng(config.seed,
                    derive_stream({kSaltData, cell, static_cast<std::uint64_t>(r)}));
      const Matrix x = sampler.draw(sizes.n, SampleRole::X, rng);
      const Matrix y = sampler.draw(sizes.m, SampleRole::Y, rng);
      const Matrix sqdist = pooled_sqdist(x, y);
      for (std::size_t k = 0; k < kernel_count; ++k) {
        const GramBundle gram = gram_for(config.kernels[k], x, y, sqdist);
        const std::size_t slot = k * static_cast<std::size_t>(max_reps) +
                                 static_cast<std::size_t>(r);
        if (run_asymptotic && r < asym_reps) {
          try {
            asym[slot] = asymptotic_test(gram, config.alpha).reject ? kReject : kAccept;
          } catch (const DegenerateVarianceError&) {
            asym[slot] = kDegenerate;
          }
        }
        if (run_permutation && r < perm_reps) {
          const std::uint64_t perm_seed = derive_stream(
              {kSaltPermutationSeed, config.seed, cell, static_cast<std::uint64_t>(r)});
          perm[slot] = permutation_test(gram, config.permutations, config.alpha, perm_seed)
                               .reject
                           ? kReject
                           : kAccept;
        }
      }
    });

    const double elapsed = seconds_since(start);
    for (std::size_t k = 0; k < kernel_count; ++k) {
      const std::size_t offset = k * static_cast<std::size_t>(max_reps);
      if (run_asymptotic) {
        RateCell rate = reduce_rates(asym.data() + offset, asym_reps);
        rate.size = sizes;
        rate.kernel = config.kernels[k];
        rate.method = TestMethod::Asymptotic;
        rate.wall_seconds = elapsed;
        report.cells.push_back(rate);
      }
      if (run_permutation) {
        RateCell rate = reduce_rates(perm.data() + offset, perm_reps);
        rate.size = sizes;
        rate.kernel = config.kernels[k];
        rate.method = TestMethod::Permutation;
        rate.wall_seconds = elapsed;
        report.cells.push_back(rate);
      }
    }
  }
  return report;
}

ExperimentReport run_power_curve(const PowerExperimentConfig& config) {
  if (config.beta_grid.empty() || config.sizes.empty() || config.kernels.empty() ||
      config.replications < 1 || config.methods.empty()) {
    throw std::invalid_argument("run_power_curve: empty grid or no replications");
  }
  for (const double beta : config.beta_grid) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
      throw std::invalid_argument("run_power_curve: beta outside [0,1]");
    }
  }
  const bool run_asymptotic = wants(config.methods, TestMethod::Asymptotic);
  const bool run_permutation = wants(config.methods, TestMethod::Permutation);
  const long asym_reps = config.replications;
  const long perm_reps = config.permutation_replications > 0
                             ? config.permutation_replications
                             : config.replications;
  const long max_reps = std::max(run_asymptotic ? asym_reps : 0,
                                 run_permutation ? perm_reps : 0);
  const std::size_t kernel_count = config.kernels.size();

  // The null process (beta = 0) always runs; it calibrates the empirical
  // critical values. Shared innovations make the beta = 0 power cell
  // reproduce the calibration sample exactly.
  std::vector<double> betas = config.beta_grid;
  if (std::find(betas.begin(), betas.end(), 0.0) == betas.end()) {
    betas.insert(betas.begin(), 0.0);
  }
  std::sort(betas.begin(), betas.end());
  const std::size_t beta_count = betas.size();

  ExperimentReport report;
  report.seed = config.seed;

  for (std::size_t cell = 0; cell < config.sizes.size(); ++cell) {
    const auto start = Clock::now();
    const SampleSizes sizes = config.sizes[cell];

    std::vector<DgpSampler> samplers;
    samplers.reserve(beta_count);
    for (const double beta : betas) {
      DgpSpec dgp = config.dgp;
      dgp.v_seed = derive_stream({kSaltDiagonal, config.seed, cell});
      if (config.shift == ShiftKind::Mean) {
        dgp.mean_shift = {config.amount, beta};
      } else {
        dgp.var_shift = {config.amount, beta};
      }
      samplers.emplace_back(dgp);
    }

    const auto slot_of = [&](std::size_t b, std::size_t k, long r) {
      return (b * kernel_count + k) * static_cast<std::size_t>(max_reps) +
             static_cast<std::size_t>(r);
    };
    std::vector<double> statistics(beta_count * kernel_count *
                                       static_cast<std::size_t>(max_reps),
                                   std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> asym(statistics.size(), kUnset);
    std::vector<std::uint8_t> perm(statistics.size(), kUnset);

    parallel_for(max_reps, config.threads, [&](long r) {
      RngStream rng(config.seed,
                    derive_stream({kSaltData, cell, static_cast<std::uint64_t>(r)}));
      // Common innovations across the beta grid.
      const Matrix x = samplers.front().draw(sizes.n, SampleRole::X, rng);
      RngStream rng_y(config.seed, derive_stream({kSaltData, cell,
                                                  static_cast<std::uint64_t>(r), 1u}));
      for (std::size_t b = 0; b < beta_count; ++b) {
        RngStream rng_b = rng_y;
        const Matrix y = samplers[b].draw(sizes.m, SampleRole::Y, rng_b);
        const Matrix sqdist = pooled_sqdist(x, y);
        for (std::size_t k = 0; k < kernel_count; ++k) {
          const GramBundle gram = gram_for(config.kernels[k], x, y, sqdist);
          const std::size_t slot = slot_of(b, k, r);
          if (run_asymptotic && r < asym_reps) {
            try {
              const TestResult res = asymptotic_test(gram, config.alpha);
              statistics[slot] = res.statistic;
              asym[slot] = res.reject ? kReject : kAccept;
            } catch (const DegenerateVarianceError&) {
              asym[slot] = kDegenerate;
            }
          }
          if (run_permutation && r < perm_reps) {
            const std::uint64_t perm_seed = derive_stream(
                {kSaltPermutationSeed, config.seed, cell, static_cast<std::uint64_t>(r)});
            perm[slot] =
                permutation_test(gram, config.permutations, config.alpha, perm_seed).reject
                    ? kReject
                    : kAccept;
          }
        }
      }
    });

    const double elapsed = seconds_since(start);
    for (std::size_t k = 0; k < kernel_count; ++k) {
      // Empirical (1-alpha) critical value from the beta = 0 statistics.
      double critical = std::numeric_limits<double>::quiet_NaN();
      if (run_asymptotic) {
        std::vector<double> null_stats;
        null_stats.reserve(static_cast<std::size_t>(asym_reps));
        for (long r = 0; r < asym_reps; ++r) {
          const double value = statistics[slot_of(0, k, r)];
          if (std::isfinite(value)) null_stats.push_back(value);
        }
        if (!null_stats.empty()) {
          std::sort(null_stats.begin(), null_stats.end());
          const std::size_t rank = static_cast<std::size_t>(std::ceil(
              (1.0 - config.alpha) * static_cast<double>(null_stats.size())));
          critical = null_stats[std::min(null_stats.size() - 1, rank == 0 ? 0 : rank - 1)];
        }
      }

      for (std::size_t b = 0; b < beta_count; ++b) {
        const double beta = betas[b];
        if (std::find(config.beta_grid.begin(), config.beta_grid.end(), beta) ==
            config.beta_grid.end()) {
          continue;  // calibration-only point
        }
        if (run_asymptotic) {
          std::vector<std::uint8_t> outcomes(static_cast<std::size_t>(asym_reps));
          for (long r = 0; r < asym_reps; ++r) {
            outcomes[static_cast<std::size_t>(r)] = asym[slot_of(b, k, r)];
          }
          RateCell rate = reduce_rates(outcomes.data(), asym_reps);
          rate.size = sizes;
          rate.kernel = config.kernels[k];
          rate.method = TestMethod::Asymptotic;
          rate.beta = beta;
          rate.wall_seconds = elapsed;
          long adjusted_rejects = 0;
          long valid = 0;
          for (long r = 0; r < asym_reps; ++r) {
            const double value = statistics[slot_of(b, k, r)];
            if (!std::isfinite(value)) continue;
            ++valid;
            if (value > critical) ++adjusted_rejects;
          }
          rate.size_adjusted_rate =
              valid > 0 ? static_cast<double>(adjusted_rejects) / valid : 0.0;
          report.cells.push_back(rate);
        }
        if (run_permutation) {
          std::vector<std::uint8_t> outcomes(static_cast<std::size_t>(perm_reps));
          for (long r = 0; r < perm_reps; ++r) {
            outcomes[static_cast<std::size_t>(r)] = perm[slot_of(b, k, r)];
          }
          RateCell rate = reduce_rates(outcomes.data(), perm_reps);
          rate.size = sizes;
          rate.kernel = config.kernels[k];
          rate.method = TestMethod::Permutation;
          rate.beta = beta;
          rate.wall_seconds = elapsed;
          report.cells.push_back(rate);
        }
      }
    }
  }
  return report;
}

DiagnosticsReport null_distribution_diagnostics(const DiagnosticsConfig& config) {
  if (config.replications < 100) {
    throw std::invalid_argument("null_distribution_diagnostics: needs at least 100 replications");
  }
  if (config.kernels.empty()) {
    throw std::invalid_argument("null_distribution_diagnostics: no kernels");
  }
  const long reps = config.replications;
  const std::size_t kernel_count = config.kernels.size();

  DiagnosticsReport report;
  report.seed = config.seed;

  const auto start = Clock::now();
  DgpSpec dgp = config.dgp;
  dgp.v_seed = derive_stream({kSaltDiagonal, config.seed, 0u});
  const DgpSampler sampler(dgp);

  std::vector<double> statistics(kernel_count * static_cast<std::size_t>(reps),
                                 std::numeric_limits<double>::quiet_NaN());
  parallel_for(reps, config.threads, [&](long r) {
    RngStream rng(config.seed, derive_stream({kSaltData, 0u, static_cast<std::uint64_t>(r)}));
    const Matrix x = sampler.draw(config.size.n, SampleRole::X, rng);
    const Matrix y = sampler.draw(config.size.m, SampleRole::Y, rng);
    const Matrix sqdist = pooled_sqdist(x, y);
    for (std::size_t k = 0; k < kernel_count; ++k) {
      const GramBundle gram = gram_for(config.kernels[k], x, y, sqdist);
      try {
        statistics[k * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)] =
            studentized_statistic(gram).value;
      } catch (const DegenerateVarianceError&) {
        // slot stays NaN and is reported as degenerate
      }
    }
  });
  const double elapsed = seconds_since(start);

  for (std::size_t k = 0; k < kernel_count; ++k) {
    DiagnosticsCell cell;
    cell.kernel = config.kernels[k];
    cell.replications = reps;
    cell.wall_seconds = elapsed;
    cell.statistics.reserve(static_cast<std::size_t>(reps));
    for (long r = 0; r < reps; ++r) {
      const double value =
          statistics[k * static_cast<std::size_t>(reps) + static_cast<std::size_t>(r)];
      if (std::isfinite(value)) {
        cell.statistics.push_back(value);
      } else {
        ++cell.degenerate;
      }
    }
    cell.ks = ks_distance_to_standard_normal(cell.statistics);
    cell.wasserstein = wasserstein_distance_to_standard_normal(cell.statistics);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

double ks_distance_to_standard_normal(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("ks_distance_to_standard_normal: empty sample");
  }
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = normal_cdf(values[i]);
    const double upper = (static_cast<double>(i) + 1.0) / count - cdf;
    const double lower = cdf - static_cast<double>(i) / count;
    distance = std::max({distance, upper, lower});
  }
  return distance;
}

double wasserstein_distance_to_standard_normal(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("wasserstein_distance_to_standard_normal: empty sample");
  }
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double quantile = normal_quantile((static_cast<double>(i) + 0.5) / count);
    total += std::abs(values[i] - quantile);
  }
  return total / count;
}

}  // namespace mmd
