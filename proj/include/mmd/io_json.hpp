#ifndef MMD_IO_JSON_HPP
#define MMD_IO_JSON_HPP

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "mmd/inference.hpp"
#include "mmd/oracle.hpp"
#include "mmd/simulation.hpp"

namespace mmd {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Config document violates the schema; the message lists the offending keys.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;

Json load_json_file(const std::string& path);

/// Kernel entry: either a family name ("l2", "l1", "gaussian", "laplacian",
/// median bandwidth implied) or {"family": ..., "bandwidth": number|"median"}.
KernelSpec parse_kernel_spec(const Json& node);
Json kernel_spec_to_json(const KernelSpec& spec);

/// Schemas for the simulate/diagnose/oracle subcommands. Unknown or missing
/// keys raise ConfigError naming them.
struct SimulateRequest {
  bool is_power = false;
  SizeExperimentConfig size;
  PowerExperimentConfig power;
};
SimulateRequest parse_simulate_config(const Json& config);
DiagnosticsConfig parse_diagnostics_config(const Json& config);

struct OracleRequest {
  ResolvedKernel kernel;
  KernelSpec spec;
  FiniteDistribution p;
  FiniteDistribution q;
  double rho = 0.5;
  Index n = 0;  // n, m > 0 add exhaustive finite-sample moments
  Index m = 0;
};
OracleRequest parse_oracle_config(const Json& config);

Json test_result_to_json(const TestResult& result);
Json experiment_report_to_json(const ExperimentReport& report);
Json diagnostics_report_to_json(const DiagnosticsReport& report, bool embed_samples);

}  // namespace mmd

#endif
