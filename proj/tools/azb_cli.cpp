// azb: experiment runner.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or I/O error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "azb/errors.hpp"
#include "azb/experiments.hpp"
#include "azb/version.hpp"

namespace {

void add_common(CLI::App* cmd, azb::RunConfig& cfg, std::string& format) {
  cmd->add_option("--q", cfg.q, "deformation parameter in (0, 1)")->capture_default_str();
  cmd->add_option("-M,--grid-size", cfg.M, "grid order per axis (even)")->capture_default_str();
  cmd->add_option("--margin", cfg.margin, "window margin (default M/4)");
  cmd->add_option("--tol", cfg.tol, "relation tolerance")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  cmd->add_option("--samples", cfg.samples, "sampled vectors for matrix-free residuals")->capture_default_str();
  cmd->add_option("--out", cfg.out_path, "output file (default stdout)");
  cmd->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for the quantum az+b group"};
  app.set_version_flag("--version", std::string(azb::kVersion));
  app.require_subcommand(1);

  azb::RunConfig cfg;
  std::string format = "json";

  auto* fq_table = app.add_subcommand("fq-table", "F_q conformance table over the grid");
  auto* exp_identity = app.add_subcommand("exp-identity", "exponential identity sweep over M");
  auto* corep = app.add_subcommand("corep", "corepresentation identity residual");
  auto* roundtrip = app.add_subcommand("roundtrip", "build then extract generated pairs");
  auto* verify_pair = app.add_subcommand("verify-pair", "regular pair checklist");
  for (auto* cmd : {fq_table, exp_identity, corep, roundtrip, verify_pair}) add_common(cmd, cfg, format);

  exp_identity->add_option("--M-list", cfg.m_list, "grid orders to sweep")->delimiter(',')->capture_default_str();
  corep->add_option("--pair", cfg.pair, "classical, schrodinger-block or random")->capture_default_str();
  corep->add_option("--dim", cfg.dim, "dimension of H for classical and random pairs")->capture_default_str();
  roundtrip->add_option("--dim", cfg.dim, "dimension of H")->capture_default_str();
  roundtrip->add_option("--count", cfg.count, "number of consecutive seeds")->capture_default_str();
  verify_pair->add_option("--pair", cfg.pair, "schrodinger, xx, swapped or random")->capture_default_str();
  verify_pair->add_option("--dim", cfg.dim, "dimension of H for random pairs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.format = format == "csv" ? azb::Format::csv : azb::Format::json;
  if (corep->parsed() && corep->count("--pair") == 0) cfg.pair = "classical";

  const std::string name = app.get_subcommands().front()->get_name();
  azb::Report report;
  try {
    report = azb::run_experiment(name, cfg);
  } catch (const azb::ParameterError& e) {
    std::cerr << "azb " << name << ": invalid input: " << e.what() << '\n';
    return 2;
  } catch (const azb::Error& e) {
    std::cerr << "azb " << name << ": " << e.what() << '\n';
    return 1;
  }

  const std::string text = azb::render(report, cfg.format);
  if (cfg.out_path.empty()) {
    std::cout << text;
    if (!std::cout) return 2;
  } else {
    std::ofstream out(cfg.out_path, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << "azb " << name << ": cannot write " << cfg.out_path << '\n';
      return 2;
    }
  }
  return report.pass ? 0 : 1;
}
