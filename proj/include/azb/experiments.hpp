#pragma once

// Experiment runners behind the CLI. Each runner validates its config,
// computes a list of rows and an overall verdict, and never touches I/O.
// Reports render to JSON
//   {"experiment": str, "config": {...}, "rows": [{...}], "pass": bool, "version": str}
// or to CSV (header line, then one line per row).
//
// Sweeps fan out over worker threads, one parameter point per task; rows are
// assembled in parameter order so output does not depend on `jobs`.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace azb {

enum class Format { csv, json };

struct RunConfig {
  double q = 0.5;
  int M = 8;
  int margin = -1;  // -1 selects M/4
  double tol = 1e-10;
  std::uint64_t seed = 1;
  int samples = 32;
  std::string out_path;
  Format format = Format::json;
  int jobs = 0;  // 0 selects the hardware concurrency

  std::vector<int> m_list = {8, 12, 16};  // exp-identity
  std::string pair = "schrodinger";       // verify-pair, corep
  int dim = 4;                            // H dimension for generated pairs
  int count = 1;                          // roundtrip: consecutive seeds

  int effective_margin() const { return margin < 0 ? M / 4 : margin; }
  // Throws ParameterError naming the first invalid field.
  void validate(const std::string& experiment) const;
  // Everything that affects results; `jobs` and `out_path` are excluded.
  nlohmann::ordered_json to_json(const std::string& experiment) const;
};

struct Report {
  std::string experiment;
  nlohmann::ordered_json config;
  std::vector<std::string> columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  bool pass = false;
};

std::string render(const Report& report, Format format);

Report run_fq_table(const RunConfig& cfg);
Report run_exp_identity(const RunConfig& cfg);
Report run_corep(const RunConfig& cfg);
Report run_roundtrip(const RunConfig& cfg);
Report run_verify_pair(const RunConfig& cfg);

// Dispatch by subcommand name ("fq-table", "exp-identity", ...).
Report run_experiment(const std::string& name, const RunConfig& cfg);
const std::vector<std::string>& experiment_names();

}  // namespace azb
