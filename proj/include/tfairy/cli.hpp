#ifndef TFAIRY_CLI_HPP
#define TFAIRY_CLI_HPP

#include <optional>
#include <string>
#include <vector>

#include "tfairy/graph.hpp"
#include "tfairy/verify.hpp"

namespace tfairy::cli {

inline constexpr const char* kArtifactVersion = "tfairy 0.1.0";

/// Analytic data preset; the exact shapes are documented in the README.
struct Preset {
  std::string type = "zero";  // zero | gaussian | bump | constant | hold_u0
  double center = 0.0, width = 1.0, amp = 1.0;  // gaussian
  double lo = 0.0, hi = 0.0;                    // bump support
  double value = 0.0;                           // constant
};

struct ScenarioConfig {
  std::string problem;  // "cauchy" | "ibvp"
  double alpha = 0.5;
  // graph
  int k = 1, m = 1;
  std::vector<double> a;
  std::vector<std::vector<double>> B;  // m rows by k cols
  std::optional<std::vector<double>> lengths;
  // grids
  double t_end = 1.0;
  int n_steps = 256;
  int n_x = 128;
  double trunc_radius = 0.0;
  int space_refine = 1;
  // data
  std::vector<Preset> u0;      // per bond
  std::vector<Preset> f;       // per bond
  std::vector<Preset> varphi;  // per bond (ibvp)
  std::vector<Preset> phi;     // incoming bonds (ibvp)
  // output
  std::string field_csv = "field.csv";
  std::string summary = "summary.json";
  // tolerances (informational overrides copied into the report)
  double energy_slack = 0.05;
};

struct ParseResult {
  std::optional<ScenarioConfig> config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty() && config.has_value(); }
};

/// Full structural and semantic validation of a configuration text (JSON).
ParseResult validate_config(const std::string& text);

struct RunOptions {
  std::string out_dir = ".";
  int levels = 0;       // > 0 runs a convergence study
  unsigned seed = 12345;
};

/// Exit codes: 0 success, 1 invalid config, 2 hypothesis violated,
/// 3 solver failure.
int run(const ScenarioConfig& cfg, const RunOptions& opts);

/// Convenience wrappers used by the command-line tool.
int run_file(const std::string& config_path, const RunOptions& opts);
int validate_file(const std::string& config_path);

/// Random-graph determinant sweep (the nondegeneracy experiment); prints a
/// short table, returns the minimal equilibrated |det M|.
double det_sweep(unsigned seed, int count, bool cauchy_valid,
                 std::string* report = nullptr);

/// Materialized problem data from a config (also used by the tests).
graph::StarGraph make_graph(const ScenarioConfig& cfg);
graph::ProblemData make_data(const ScenarioConfig& cfg,
                             const fraccalc::TimeGrid& tgrid);

}  // namespace tfairy::cli

#endif
