#ifndef MMD_SIMULATION_HPP
#define MMD_SIMULATION_HPP

#include <cstdint>
#include <vector>

#include "mmd/inference.hpp"
#include "mmd/kernels.hpp"
#include "mmd/rng.hpp"

namespace mmd {

enum class Innovation { Gaussian, CenteredExponential };
enum class DiagonalScale { Identity, UniformOneToFive };
enum class SampleRole { X, Y };

/// Mean shift applied to Y draws: +delta on the first floor(beta*p)
/// coordinates, after the covariance coloring.
struct MeanShift {
  double delta = 0.0;
  double beta = 0.0;
};

/// Variance shift applied to Y draws: the first floor(beta*p) entries of the
/// diagonal standard-deviation matrix are multiplied by sd_factor.
struct VarianceShift {
  double sd_factor = 1.0;
  double beta = 0.0;
};

/// Data-generating process: rows are iid S * z (+ shift for Y), where
/// S = (V^{1/2} Sigma V^{1/2})^{1/2}, Sigma is AR with parameter rho and z has
/// iid standard-normal or centered-Exponential(1) coordinates. A random V
/// diagonal is drawn once from v_seed and then held fixed.
struct DgpSpec {
  Index p = 1;
  double rho = 0.0;
  Innovation innovation = Innovation::Gaussian;
  DiagonalScale v_diag = DiagonalScale::Identity;
  std::uint64_t v_seed = 0;
  MeanShift mean_shift;
  VarianceShift var_shift;
};

/// Covariance with entries rho^{|i-j|}.
Matrix ar_covariance(Index p, double rho);

/// Symmetric PSD square root via the spectral decomposition; eigenvalues
/// below -1e-10 reject the input, small negatives clamp to zero.
Matrix matrix_sqrt_psd(const MatrixRef& matrix);

/// Precomputed coloring matrices and shift vector for one DGP.
class DgpSampler {
 public:
  explicit DgpSampler(const DgpSpec& spec);

  Matrix draw(Index rows, SampleRole role, RngStream& rng) const;
  const DgpSpec& spec() const { return spec_; }

 private:
  DgpSpec spec_;
  Matrix color_x_;
  Matrix color_y_;
  Vector shift_y_;
};

Matrix draw_sample(const DgpSpec& spec, Index rows, SampleRole role, RngStream& rng);

struct SampleSizes {
  Index n = 0;
  Index m = 0;
};

struct SizeExperimentConfig {
  DgpSpec dgp;
  std::vector<SampleSizes> sizes;
  std::vector<KernelSpec> kernels;
  std::vector<TestMethod> methods{TestMethod::Asymptotic};
  double alpha = 0.05;
  long replications = 1000;
  long permutation_replications = 0;  // 0: same as replications
  long permutations = 300;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RateCell {
  SampleSizes size;
  KernelSpec kernel;
  TestMethod method;
  double beta = 0.0;                    // power grids only
  double rejection_rate = 0.0;          // over non-degenerate replications
  double size_adjusted_rate = -1.0;     // power grids, asymptotic method; -1 when absent
  long replications = 0;
  long degenerate = 0;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  std::vector<RateCell> cells;
  std::uint64_t seed = 0;
};

/// Rejection rate per (size, kernel, method) under the configured null DGP.
ExperimentReport run_size_experiment(const SizeExperimentConfig& config);

enum class ShiftKind { Mean, Variance };

struct PowerExperimentConfig {
  DgpSpec dgp;  // base process; the per-beta shift is filled in by the runner
  ShiftKind shift = ShiftKind::Mean;
  double amount = 0.15;  // mean delta, or sd factor for variance shifts
  std::vector<double> beta_grid;
  std::vector<SampleSizes> sizes;
  std::vector<KernelSpec> kernels;
  std::vector<TestMethod> methods{TestMethod::Asymptotic};
  double alpha = 0.05;
  long replications = 1000;
  long permutation_replications = 0;
  long permutations = 300;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Raw power per cell and, for the asymptotic method, size-adjusted power
/// against the empirical null critical value from matched null replications
/// (same streams, so the beta = 0 cell calibrates back to alpha).
ExperimentReport run_power_curve(const PowerExperimentConfig& config);

struct DiagnosticsConfig {
  DgpSpec dgp;
  SampleSizes size;
  std::vector<KernelSpec> kernels;
  long replications = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct DiagnosticsCell {
  KernelSpec kernel;
  double ks = 0.0;
  double wasserstein = 0.0;
  long replications = 0;
  long degenerate = 0;
  double wall_seconds = 0.0;
  std::vector<double> statistics;  // raw draws, exportable for plotting
};

struct DiagnosticsReport {
  std::vector<DiagnosticsCell> cells;
  std::uint64_t seed = 0;
};

/// Distance of the empirical null distribution of the studentized statistic
/// from the standard normal.
DiagnosticsReport null_distribution_diagnostics(const DiagnosticsConfig& config);

/// One-sample Kolmogorov-Smirnov distance to N(0,1), evaluated at the sample
/// points.
double ks_distance_to_standard_normal(std::vector<double> values);

/// Wasserstein-1 distance to N(0,1) by quantile matching at the midpoints
/// (i - 0.5)/R.
double wasserstein_distance_to_standard_normal(std::vector<double> values);

}  // namespace mmd

#endif
