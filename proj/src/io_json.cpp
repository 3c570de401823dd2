#include "mmd/io_json.hpp"

#include <fstream>
#include <set>
#include <vector>

namespace mmd {
namespace {

void require_keys(const Json& node, const std::vector<std::string>& required,
                  const std::vector<std::string>& optional, const std::string& context) {
  if (!node.is_object()) {
    throw ConfigError(context + ": expected an object");
  }
  std::vector<std::string> missing;
  for (const auto& key : required) {
    if (!node.contains(key)) missing.push_back(key);
  }
  std::set<std::string> known(required.begin(), required.end());
  known.insert(optional.begin(), optional.end());
  std::vector<std::string> unknown;
  for (const auto& item : node.items()) {
    if (known.find(item.key()) == known.end()) unknown.push_back(item.key());
  }
  if (!missing.empty() || !unknown.empty()) {
    std::string message = context + ": schema violation";
    if (!missing.empty()) {
      message += "; missing keys:";
      for (const auto& key : missing) message += " " + key;
    }
    if (!unknown.empty()) {
      message += "; unknown keys:";
      for (const auto& key : unknown) message += " " + key;
    }
    throw ConfigError(message);
  }
}

KernelFamily parse_family(const std::string& name) {
  if (name == "l2") return KernelFamily::L2;
  if (name == "l1") return KernelFamily::L1;
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "laplacian") return KernelFamily::Laplacian;
  throw ConfigError("unknown kernel family '" + name + "'");
}

DgpSpec parse_dgp(const Json& node) {
  require_keys(node, {"p", "rho"}, {"innovation", "v_diag"}, "dgp");
  DgpSpec dgp;
  dgp.p = node.at("p").get<Index>();
  dgp.rho = node.at("rho").get<double>();
  const std::string innovation = node.value("innovation", "gaussian");
  if (innovation == "gaussian") {
    dgp.innovation = Innovation::Gaussian;
  } else if (innovation == "centered_exponential") {
    dgp.innovation = Innovation::CenteredExponential;
  } else {
    throw ConfigError("dgp.innovation: unknown value '" + innovation + "'");
  }
  const std::string v_diag = node.value("v_diag", "identity");
  if (v_diag == "identity") {
    dgp.v_diag = DiagonalScale::Identity;
  } else if (v_diag == "uniform_1_5") {
    dgp.v_diag = DiagonalScale::UniformOneToFive;
  } else {
    throw ConfigError("dgp.v_diag: unknown value '" + v_diag + "'");
  }
  if (dgp.p < 1) throw ConfigError("dgp.p: must be positive");
  if (!(dgp.rho >= 0.0 && dgp.rho < 1.0)) throw ConfigError("dgp.rho: must lie in [0,1)");
  return dgp;
}

std::vector<SampleSizes> parse_sizes(const Json& node) {
  if (!node.is_array() || node.empty()) {
    throw ConfigError("sizes: expected a non-empty array of [n, m] pairs");
  }
  std::vector<SampleSizes> sizes;
  for (const auto& entry : node) {
    if (!entry.is_array() || entry.size() != 2) {
      throw ConfigError("sizes: each entry must be an [n, m] pair");
    }
    SampleSizes s{entry.at(0).get<Index>(), entry.at(1).get<Index>()};
    if (s.n < 2 || s.m < 2) throw ConfigError("sizes: n and m must be at least 2");
    sizes.push_back(s);
  }
  return sizes;
}

std::vector<KernelSpec> parse_kernels(const Json& node) {
  if (!node.is_array() || node.empty()) {
    throw ConfigError("kernels: expected a non-empty array");
  }
  std::vector<KernelSpec> kernels;
  for (const auto& entry : node) kernels.push_back(parse_kernel_spec(entry));
  return kernels;
}

std::vector<TestMethod> parse_methods(const Json& node) {
  if (!node.is_array() || node.empty()) {
    throw ConfigError("methods: expected a non-empty array");
  }
  std::vector<TestMethod> methods;
  for (const auto& entry : node) {
    const std::string name = entry.get<std::string>();
    if (name == "asymptotic") {
      methods.push_back(TestMethod::Asymptotic);
    } else if (name == "permutation") {
      methods.push_back(TestMethod::Permutation);
    } else {
      throw ConfigError("methods: unknown method '" + name + "'");
    }
  }
  return methods;
}

FiniteDistribution parse_distribution(const Json& node, const std::string& context) {
  require_keys(node, {"atoms", "probs"}, {}, context);
  const auto& atoms = node.at("atoms");
  const auto& probs = node.at("probs");
  if (!atoms.is_array() || atoms.empty() || !probs.is_array() ||
      probs.size() != atoms.size()) {
    throw ConfigError(context + ": atoms and probs must be arrays of equal length");
  }
  FiniteDistribution dist;
  const Index count = static_cast<Index>(atoms.size());
  const Index dim = static_cast<Index>(atoms.at(0).size());
  if (dim < 1) throw ConfigError(context + ": atoms must be non-empty vectors");
  dist.atoms.resize(count, dim);
  dist.probs.resize(count);
  for (Index i = 0; i < count; ++i) {
    const auto& atom = atoms.at(static_cast<std::size_t>(i));
    if (!atom.is_array() || static_cast<Index>(atom.size()) != dim) {
      throw ConfigError(context + ": atoms must all have the same dimension");
    }
    for (Index j = 0; j < dim; ++j) {
      dist.atoms(i, j) = atom.at(static_cast<std::size_t>(j)).get<double>();
    }
    dist.probs(i) = probs.at(static_cast<std::size_t>(i)).get<double>();
  }
  dist.validate();
  return dist;
}

std::string method_name(TestMethod method) {
  return method == TestMethod::Asymptotic ? "asymptotic" : "permutation";
}

Json rate_cell_to_json(const RateCell& cell, bool with_beta) {
  Json node{{"n", cell.size.n},
            {"m", cell.size.m},
            {"kernel", kernel_spec_to_json(cell.kernel)},
            {"method", method_name(cell.method)},
            {"rejection_rate", cell.rejection_rate},
            {"replications", cell.replications},
            {"degenerate", cell.degenerate},
            {"wall_seconds", cell.wall_seconds}};
  if (with_beta) {
    node["beta"] = cell.beta;
    if (cell.size_adjusted_rate >= 0.0) {
      node["size_adjusted_rate"] = cell.size_adjusted_rate;
    }
  }
  return node;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  Json config;
  try {
    input >> config;
  } catch (const Json::parse_error& err) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + err.what());
  }
  return config;
}

KernelSpec parse_kernel_spec(const Json& node) {
  if (node.is_string()) {
    const KernelFamily family = parse_family(node.get<std::string>());
    KernelSpec spec;
    spec.family = family;
    spec.bandwidth = BandwidthPolicy::MedianHeuristic;
    return spec;
  }
  require_keys(node, {"family"}, {"bandwidth"}, "kernel");
  KernelSpec spec;
  spec.family = parse_family(node.at("family").get<std::string>());
  if (node.contains("bandwidth")) {
    const auto& bw = node.at("bandwidth");
    if (bw.is_string() && bw.get<std::string>() == "median") {
      spec.bandwidth = BandwidthPolicy::MedianHeuristic;
    } else if (bw.is_number()) {
      spec.bandwidth = BandwidthPolicy::Fixed;
      spec.bandwidth_value = bw.get<double>();
      if (!(spec.bandwidth_value > 0.0)) {
        throw ConfigError("kernel.bandwidth: must be positive");
      }
    } else {
      throw ConfigError("kernel.bandwidth: expected a number or \"median\"");
    }
  }
  if (!kernel_has_bandwidth(spec.family) && node.contains("bandwidth")) {
    throw ConfigError("kernel.bandwidth: family '" + kernel_family_name(spec.family) +
                      "' carries no bandwidth");
  }
  return spec;
}

Json kernel_spec_to_json(const KernelSpec& spec) {
  if (!kernel_has_bandwidth(spec.family)) {
    return kernel_family_name(spec.family);
  }
  Json node{{"family", kernel_family_name(spec.family)}};
  if (spec.bandwidth == BandwidthPolicy::Fixed) {
    node["bandwidth"] = spec.bandwidth_value;
  } else {
    node["bandwidth"] = "median";
  }
  return node;
}

SimulateRequest parse_simulate_config(const Json& config) {
  require_keys(config,
               {"experiment", "dgp", "sizes", "kernels", "replications"},
               {"methods", "alpha", "permutation_replications", "permutations", "seed",
                "shift", "threads"},
               "simulate");
  const std::string experiment = config.at("experiment").get<std::string>();
  SimulateRequest request;
  if (experiment == "size") {
    request.is_power = false;
  } else if (experiment == "power") {
    request.is_power = true;
  } else {
    throw ConfigError("experiment: expected \"size\" or \"power\"");
  }

  SizeExperimentConfig base;
  base.dgp = parse_dgp(config.at("dgp"));
  base.sizes = parse_sizes(config.at("sizes"));
  base.kernels = parse_kernels(config.at("kernels"));
  base.methods = config.contains("methods")
                     ? parse_methods(config.at("methods"))
                     : std::vector<TestMethod>{TestMethod::Asymptotic};
  base.alpha = config.value("alpha", 0.05);
  base.replications = config.at("replications").get<long>();
  base.permutation_replications = config.value("permutation_replications", 0L);
  base.permutations = config.value("permutations", 300L);
  base.seed = config.value("seed", 0ULL);
  base.threads = config.value("threads", 1);
  if (!(base.alpha > 0.0 && base.alpha < 1.0)) {
    throw ConfigError("alpha: must lie strictly in (0,1)");
  }
  if (base.replications < 1) throw ConfigError("replications: must be at least 1");
  if (base.permutations < 1) throw ConfigError("permutations: must be at least 1");

  if (!request.is_power) {
    if (config.contains("shift")) {
      throw ConfigError("shift: only valid for the power experiment");
    }
    request.size = base;
    return request;
  }

  if (!config.contains("shift")) {
    throw ConfigError("simulate: schema violation; missing keys: shift");
  }
  const Json& shift = config.at("shift");
  require_keys(shift, {"kind", "amount", "beta_grid"}, {}, "shift");
  PowerExperimentConfig power;
  power.dgp = base.dgp;
  power.sizes = base.sizes;
  power.kernels = base.kernels;
  power.methods = base.methods;
  power.alpha = base.alpha;
  power.replications = base.replications;
  power.permutation_replications = base.permutation_replications;
  power.permutations = base.permutations;
  power.seed = base.seed;
  power.threads = base.threads;
  const std::string kind = shift.at("kind").get<std::string>();
  if (kind == "mean") {
    power.shift = ShiftKind::Mean;
  } else if (kind == "variance") {
    power.shift = ShiftKind::Variance;
  } else {
    throw ConfigError("shift.kind: expected \"mean\" or \"variance\"");
  }
  power.amount = shift.at("amount").get<double>();
  const auto& grid = shift.at("beta_grid");
  if (!grid.is_array() || grid.empty()) {
    throw ConfigError("shift.beta_grid: expected a non-empty array");
  }
  for (const auto& beta : grid) power.beta_grid.push_back(beta.get<double>());
  request.power = power;
  return request;
}

DiagnosticsConfig parse_diagnostics_config(const Json& config) {
  require_keys(config, {"dgp", "n", "m", "kernels", "replications"},
               {"seed", "threads"}, "diagnose");
  DiagnosticsConfig diag;
  diag.dgp = parse_dgp(config.at("dgp"));
  diag.size = {config.at("n").get<Index>(), config.at("m").get<Index>()};
  diag.kernels = parse_kernels(config.at("kernels"));
  diag.replications = config.at("replications").get<long>();
  diag.seed = config.value("seed", 0ULL);
  diag.threads = config.value("threads", 1);
  if (diag.size.n < 2 || diag.size.m < 2) {
    throw ConfigError("diagnose: n and m must be at least 2");
  }
  return diag;
}

OracleRequest parse_oracle_config(const Json& config) {
  require_keys(config, {"kernel", "p", "q"}, {"rho", "n", "m"}, "oracle");
  OracleRequest request;
  request.spec = parse_kernel_spec(config.at("kernel"));
  if (kernel_has_bandwidth(request.spec.family) &&
      request.spec.bandwidth != BandwidthPolicy::Fixed) {
    throw ConfigError(
        "oracle: kernel bandwidth must be a fixed number (no data to apply the median "
        "heuristic to)");
  }
  request.kernel = ResolvedKernel{request.spec.family, request.spec.bandwidth_value};
  request.p = parse_distribution(config.at("p"), "p");
  request.q = parse_distribution(config.at("q"), "q");
  if (request.p.dim() != request.q.dim()) {
    throw ConfigError("oracle: p and q atom dimensions differ");
  }
  request.rho = config.value("rho", 0.5);
  if (!(request.rho > 0.0 && request.rho < 1.0)) {
    throw ConfigError("rho: must lie strictly in (0,1)");
  }
  request.n = config.value("n", Index{0});
  request.m = config.value("m", Index{0});
  if ((request.n > 0) != (request.m > 0)) {
    throw ConfigError("oracle: n and m must be given together");
  }
  return request;
}

Json test_result_to_json(const TestResult& result) {
  Json node{{"version", kLibraryVersion},
            {"method", method_name(result.method)},
            {"kernel", kernel_spec_to_json(result.kernel)},
            {"n", result.n},
            {"m", result.m},
            {"p", result.p},
            {"statistic", result.statistic},
            {"p_value", result.p_value},
            {"alpha", result.alpha},
            {"reject", result.reject}};
  if (kernel_has_bandwidth(result.kernel.family)) {
    node["bandwidth"] = result.bandwidth;
  }
  if (result.method == TestMethod::Permutation) {
    node["permutations"] = result.permutations;
    node["seed"] = result.seed;
  }
  return node;
}

Json experiment_report_to_json(const ExperimentReport& report) {
  bool with_beta = false;
  for (const auto& cell : report.cells) {
    if (cell.beta > 0.0 || cell.size_adjusted_rate >= 0.0) with_beta = true;
  }
  Json cells = Json::array();
  for (const auto& cell : report.cells) {
    cells.push_back(rate_cell_to_json(cell, with_beta));
  }
  return Json{{"seed", report.seed}, {"cells", cells}};
}

Json diagnostics_report_to_json(const DiagnosticsReport& report, bool embed_samples) {
  Json cells = Json::array();
  for (const auto& cell : report.cells) {
    Json node{{"kernel", kernel_spec_to_json(cell.kernel)},
              {"ks", cell.ks},
              {"wasserstein", cell.wasserstein},
              {"replications", cell.replications},
              {"degenerate", cell.degenerate},
              {"wall_seconds", cell.wall_seconds}};
    if (embed_samples) {
      node["statistics"] = cell.statistics;
    }
    cells.push_back(node);
  }
  return Json{{"seed", report.seed}, {"cells", cells}};
}

}  // namespace mmd
