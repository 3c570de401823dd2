// Command-line front end for the studentized MMD two-sample test: run tests
// on CSV data, drive simulation experiments from JSON configs, and query the
// exact finite-support oracle.

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <string>

#include "mmd/csv.hpp"
#include "mmd/inference.hpp"
#include "mmd/io_json.hpp"
#include "mmd/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitDegenerate = 2;

void write_output(const mmd::Json& payload, const std::string& out_path) {
  const std::string text = payload.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw mmd::ConfigError("cannot open output file '" + out_path + "'");
  }
  out << text;
}

mmd::KernelSpec kernel_from_flags(const std::string& kernel_name,
                                  const std::string& bandwidth) {
  mmd::Json node;
  if (bandwidth.empty()) {
    node = kernel_name;
  } else if (bandwidth == "median") {
    node = {{"family", kernel_name}, {"bandwidth", "median"}};
  } else {
    double value = 0.0;
    const auto status =
        std::from_chars(bandwidth.data(), bandwidth.data() + bandwidth.size(), value);
    if (status.ec != std::errc{} || status.ptr != bandwidth.data() + bandwidth.size()) {
      throw mmd::ConfigError("--bandwidth: expected a positive number or 'median'");
    }
    node = {{"family", kernel_name}, {"bandwidth", value}};
  }
  return mmd::parse_kernel_spec(node);
}

struct TestArgs {
  std::string x_path;
  std::string y_path;
  std::string kernel = "l2";
  std::string bandwidth;
  std::string method = "asymptotic";
  double alpha = 0.05;
  long permutations = 300;
  std::uint64_t seed = 0;
  bool header = false;
  std::string out;
};

int run_test(const TestArgs& args) {
  const mmd::KernelSpec spec = kernel_from_flags(args.kernel, args.bandwidth);
  if (!(args.alpha > 0.0 && args.alpha < 1.0)) {
    throw mmd::ConfigError("--alpha: must lie strictly in (0,1)");
  }

  const mmd::Matrix x = mmd::read_numeric_csv(args.x_path, args.header);
  const mmd::Matrix y = mmd::read_numeric_csv(args.y_path, args.header);
  if (x.cols() != y.cols()) {
    throw mmd::ConfigError("column counts differ: " + args.x_path + " has " +
                           std::to_string(x.cols()) + ", " + args.y_path + " has " +
                           std::to_string(y.cols()));
  }

  mmd::TestResult result;
  if (args.method == "asymptotic") {
    result = mmd::asymptotic_test(spec, x, y, args.alpha);
  } else if (args.method == "permutation") {
    const mmd::ResolvedKernel kernel = mmd::resolve_kernel(spec, x, y);
    result = mmd::permutation_test(kernel, x, y, args.permutations, args.alpha, args.seed);
    result.kernel = spec;  // keep the declarative choice in the report
  } else {
    throw mmd::ConfigError("--method: expected 'asymptotic' or 'permutation'");
  }

  mmd::Json payload = mmd::test_result_to_json(result);
  payload["config"] = {{"x", args.x_path},       {"y", args.y_path},
                       {"kernel", mmd::kernel_spec_to_json(spec)},
                       {"alpha", args.alpha},    {"method", args.method},
                       {"permutations", args.permutations},
                       {"seed", args.seed},      {"header", args.header}};
  write_output(payload, args.out);
  return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& out,
                 std::uint64_t seed, bool seed_given, int threads) {
  mmd::Json config = mmd::load_json_file(config_path);
  mmd::SimulateRequest request = mmd::parse_simulate_config(config);
  if (seed_given) {
    (request.is_power ? request.power.seed : request.size.seed) = seed;
    config["seed"] = seed;
  }
  if (threads > 0) {
    (request.is_power ? request.power.threads : request.size.threads) = threads;
  }
  const mmd::ExperimentReport report = request.is_power
                                           ? mmd::run_power_curve(request.power)
                                           : mmd::run_size_experiment(request.size);
  mmd::Json payload{{"version", mmd::kLibraryVersion},
                    {"config", config},
                    {"report", mmd::experiment_report_to_json(report)}};
  write_output(payload, out);
  return kExitOk;
}

int run_diagnose(const std::string& config_path, const std::string& out,
                 const std::string& samples_csv, bool embed_samples, std::uint64_t seed,
                 bool seed_given, int threads) {
  mmd::Json config = mmd::load_json_file(config_path);
  mmd::DiagnosticsConfig diag = mmd::parse_diagnostics_config(config);
  if (seed_given) {
    diag.seed = seed;
    config["seed"] = seed;
  }
  if (threads > 0) diag.threads = threads;
  const mmd::DiagnosticsReport report = mmd::null_distribution_diagnostics(diag);
  mmd::Json payload{{"version", mmd::kLibraryVersion},
                    {"config", config},
                    {"report", mmd::diagnostics_report_to_json(report, embed_samples)}};
  write_output(payload, out);

  if (!samples_csv.empty()) {
    // Long format: kernel index, replication slot, statistic value.
    long rows = 0;
    for (const auto& cell : report.cells) rows += static_cast<long>(cell.statistics.size());
    mmd::Matrix table(rows, 3);
    long row = 0;
    for (std::size_t k = 0; k < report.cells.size(); ++k) {
      const auto& statistics = report.cells[k].statistics;
      for (std::size_t r = 0; r < statistics.size(); ++r) {
        table(row, 0) = static_cast<double>(k);
        table(row, 1) = static_cast<double>(r);
        table(row, 2) = statistics[r];
        ++row;
      }
    }
    mmd::write_numeric_csv(samples_csv, table);
  }
  return kExitOk;
}

int run_oracle(const std::string& config_path, const std::string& out) {
  const mmd::Json config = mmd::load_json_file(config_path);
  const mmd::OracleRequest request = mmd::parse_oracle_config(config);
  const mmd::FiniteDistribution z = mmd::mixture(request.p, request.q, request.rho);
  const mmd::FourthMomentPair g4 = mmd::population_g4(request.kernel, z);

  mmd::Json results{{"mmd_sq", mmd::population_mmd_sq(request.kernel, request.p, request.q)},
                    {"hsic_self", mmd::population_hsic_self(request.kernel, z)},
                    {"g4", {{"direct", g4.direct}, {"moment_formula", g4.moment_formula}}}};
  if (request.n > 0) {
    const mmd::ExactMoments moments =
        mmd::exhaustive_moments(request.kernel, request.p, request.q, request.n, request.m);
    results["moments"] = {{"mean_mmd", moments.mean_mmd},
                          {"var_mmd", moments.var_mmd},
                          {"mean_variance_estimate", moments.mean_variance_estimate}};
  }
  mmd::Json payload{{"version", mmd::kLibraryVersion}, {"config", config},
                    {"results", results}};
  write_output(payload, out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Studentized MMD two-sample testing for high-dimensional data"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (default: single-threaded)");

  TestArgs test_args;
  CLI::App* cmd_test = app.add_subcommand("test", "Two-sample test on CSV data");
  cmd_test->add_option("x_csv", test_args.x_path, "CSV with rows of the first sample")
      ->required();
  cmd_test->add_option("y_csv", test_args.y_path, "CSV with rows of the second sample")
      ->required();
  cmd_test->add_option("--kernel", test_args.kernel,
                       "Kernel family: l2, l1, gaussian, laplacian");
  cmd_test->add_option("--bandwidth", test_args.bandwidth,
                       "Bandwidth: 'median' or a positive number (gaussian/laplacian)");
  cmd_test->add_option("--alpha", test_args.alpha, "Significance level");
  cmd_test->add_option("--method", test_args.method, "asymptotic or permutation");
  cmd_test->add_option("--permutations", test_args.permutations,
                       "Permutation count (permutation method)");
  cmd_test->add_option("--seed", test_args.seed, "Permutation seed");
  cmd_test->add_flag("--header", test_args.header, "Skip one header row in both CSVs");
  cmd_test->add_option("--out", test_args.out, "Output JSON path (default: stdout)");

  std::string config_path;
  std::string out_path;
  std::string samples_csv;
  bool embed_samples = false;
  std::uint64_t seed = 0;
  bool seed_given = false;

  CLI::App* cmd_simulate =
      app.add_subcommand("simulate", "Size or power experiment from a JSON config");
  cmd_simulate->add_option("config", config_path, "Experiment config JSON")->required();
  cmd_simulate->add_option("--seed", seed, "Override the config seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  cmd_simulate->add_option("--out", out_path, "Output JSON path (default: stdout)");

  CLI::App* cmd_diagnose =
      app.add_subcommand("diagnose", "Null-distribution diagnostics from a JSON config");
  cmd_diagnose->add_option("config", config_path, "Diagnostics config JSON")->required();
  cmd_diagnose->add_option("--seed", seed, "Override the config seed")
      ->each([&seed_given](const std::string&) { seed_given = true; });
  cmd_diagnose->add_option("--out", out_path, "Output JSON path (default: stdout)");
  cmd_diagnose->add_option("--samples-csv", samples_csv,
                           "Export raw statistics as CSV (kernel, slot, value)");
  cmd_diagnose->add_flag("--embed-samples", embed_samples,
                         "Embed raw statistics in the JSON report");

  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "Exact population quantities on finite supports");
  cmd_oracle->add_option("config", config_path, "Oracle config JSON")->required();
  cmd_oracle->add_option("--out", out_path, "Output JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (cmd_test->parsed()) {
      return run_test(test_args);
    }
    if (cmd_simulate->parsed()) {
      return run_simulate(config_path, out_path, seed, seed_given, threads);
    }
    if (cmd_diagnose->parsed()) {
      return run_diagnose(config_path, out_path, samples_csv, embed_samples, seed,
                          seed_given, threads);
    }
    if (cmd_oracle->parsed()) {
      return run_oracle(config_path, out_path);
    }
  } catch (const mmd::DegenerateVarianceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitDegenerate;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
