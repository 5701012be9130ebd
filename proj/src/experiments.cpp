#include "azb/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "azb/corep.hpp"
#include "azb/errors.hpp"
#include "azb/q2pair.hpp"
#include "azb/qexp.hpp"
#include "azb/random.hpp"
#include "azb/version.hpp"

namespace azb {

namespace {

using ojson = nlohmann::ordered_json;

// Acceptance constants recorded from the independent oracles.
constexpr double kEnvelopeFactor = 1.5;
const std::map<int, double> kPinnedExpResidual = {
    {8, 1.8955385510885066}, {12, 1.9365612010618833}, {16, 1.9594909915368954}};
const std::map<int, double> kPinnedCorepBlock = {{4, 1.4078759235646843}, {6, 1.3312296250535738}};
constexpr double kControlTol = 1e-12;
constexpr double kClassicalCorepTol = 1e-9;
constexpr double kUnitarityTol = 1e-10;
constexpr double kRoundTripTol = 1e-8;
constexpr double kUnitModulusTol = 1e-10;
constexpr double kConjugationTol = 1e-12;

template <class F>
auto parallel_map(std::size_t count, int jobs, F f) -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  std::size_t workers = jobs > 0 ? static_cast<std::size_t>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::vector<std::vector<std::pair<std::size_t, R>>> parts(workers);
  std::vector<std::future<void>> futures;
  for (std::size_t w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < count; i += workers) parts[w].emplace_back(i, f(i));
    }));
  }
  for (auto& fut : futures) fut.get();
  std::vector<std::optional<R>> slots(count);
  for (auto& part : parts) {
    for (auto& [i, r] : part) slots[i] = std::move(r);
  }
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// JSON has no infinities or NaN; they become null.
ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

QExpParams params_for(const RunConfig& cfg) {
  QExpParams p;
  p.q = cfg.q;
  return p;
}

Report start(const std::string& name, const RunConfig& cfg, std::vector<std::string> columns) {
  cfg.validate(name);
  Report r;
  r.experiment = name;
  r.config = cfg.to_json(name);
  r.columns = std::move(columns);
  return r;
}

std::string csv_field(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted.push_back('"');
      quoted.push_back(c);
    }
    return quoted + "\"";
  }
  return v.dump();
}

std::string describe_blocks(const std::vector<BlockSpec>& blocks) {
  std::string s;
  for (const auto& b : blocks) {
    if (!s.empty()) s += " + ";
    s += b.describe();
  }
  return s;
}

}  // namespace

void RunConfig::validate(const std::string& experiment) const {
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("q must lie in (0, 1)");
  if (M < 2 || M % 2 != 0) throw ParameterError("M must be even and at least 2");
  if (margin < -1 || effective_margin() > M / 2) throw ParameterError("margin must lie in [0, M/2]");
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  if (samples < 1) throw ParameterError("samples must be positive");
  if (jobs < 0) throw ParameterError("jobs must be nonnegative");
  if (experiment == "exp-identity") {
    if (m_list.empty()) throw ParameterError("M list must not be empty");
    for (int m : m_list) {
      if (m < 2 || m % 2 != 0) throw ParameterError("M list entries must be even and at least 2");
      if (margin >= 0 && margin > m / 2) throw ParameterError("margin exceeds M/2 for an M list entry");
    }
  }
  if (experiment == "corep") {
    if (M > 8) throw ParameterError("corep: M must be at most 8 (dense coproduct)");
    if (pair != "classical" && pair != "schrodinger-block" && pair != "random") {
      throw ParameterError("corep: pair must be classical, schrodinger-block or random");
    }
  }
  if (experiment == "corep" || experiment == "roundtrip") {
    if (dim < 1 || dim > 16) throw ParameterError("dim must lie in [1, 16]");
  }
  if (experiment == "roundtrip" && count < 1) throw ParameterError("count must be positive");
  if (experiment == "verify-pair" && pair != "schrodinger" && pair != "xx" && pair != "swapped" &&
      pair != "random") {
    throw ParameterError("verify-pair: pair must be schrodinger, xx, swapped or random");
  }
}

nlohmann::ordered_json RunConfig::to_json(const std::string& experiment) const {
  ojson j = {{"q", q}, {"M", M}, {"margin", effective_margin()}, {"tol", tol},
             {"seed", seed}, {"samples", samples}, {"format", format == Format::csv ? "csv" : "json"}};
  if (experiment == "exp-identity") j["M_list"] = m_list;
  if (experiment == "corep" || experiment == "verify-pair") j["pair"] = pair;
  if (experiment == "corep" || experiment == "roundtrip") j["dim"] = dim;
  if (experiment == "roundtrip") j["count"] = count;
  return j;
}

std::string render(const Report& report, Format format) {
  if (format == Format::json) {
    ojson j = {{"experiment", report.experiment},
               {"config", report.config},
               {"rows", report.rows},
               {"pass", report.pass},
               {"version", kVersion}};
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  for (std::size_t c = 0; c < report.columns.size(); ++c) os << (c ? "," : "") << report.columns[c];
  os << '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      const auto it = row.find(report.columns[c]);
      os << (c ? "," : "") << (it == row.end() ? std::string() : csv_field(*it));
    }
    os << '\n';
  }
  return os.str();
}

Report run_fq_table(const RunConfig& cfg) {
  Report r = start("fq-table", cfg,
                   {"kind", "point", "re", "im", "modulus_error", "check", "value", "threshold", "pass"});
  const GammaGrid grid(cfg.q, cfg.M);
  const QExpParams params = params_for(cfg);
  bool pass = true;

  auto rows = parallel_map(static_cast<std::size_t>(grid.size()), cfg.jobs, [&](std::size_t i) {
    const GammaPoint& g = grid.point(static_cast<Index>(i));
    const Complex f = fq(g, params);
    const double mod_err = std::abs(std::abs(f) - 1.0);
    const double conj_err = std::abs(fq(g.conj(), params) - std::conj(f));
    const bool ok = mod_err < kUnitModulusTol && conj_err < kConjugationTol;
    return ojson{{"kind", "grid"}, {"point", g.to_string()}, {"re", f.real()},      {"im", f.imag()},
                 {"modulus_error", mod_err}, {"check", "conjugation"}, {"value", conj_err},
                 {"threshold", kConjugationTol}, {"pass", ok}};
  });
  for (auto& row : rows) {
    pass = pass && row["pass"].get<bool>();
    r.rows.push_back(std::move(row));
  }

  struct Special {
    GammaPoint g;
    Complex expected;
  };
  const Turns half(1, 2);
  const std::vector<Special> specials = {{GammaPoint::zero(), {1.0, 0.0}},
                                         {GammaPoint::from_turns(0, half), {-1.0, 0.0}},
                                         {GammaPoint::from_turns(-2, half), {-1.0, 0.0}},
                                         {GammaPoint::from_turns(-4, half), {-1.0, 0.0}}};
  for (const auto& s : specials) {
    const Complex f = fq(s.g, params);
    const double err = std::abs(f - s.expected);
    const bool ok = f == s.expected;
    pass = pass && ok;
    r.rows.push_back({{"kind", "special"}, {"point", s.g.to_string()}, {"re", f.real()}, {"im", f.imag()},
                      {"modulus_error", std::abs(std::abs(f) - 1.0)}, {"check", "exact_value"}, {"value", err},
                      {"threshold", 0.0}, {"pass", ok}});
  }

  // Approach to -q^{-2} along the circle of modulus q^{-2}.
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const GammaPoint g = GammaPoint::make(-2, kPi - eps);
    const Complex f = fq(g, params);
    const double dist = std::abs(f + 1.0);
    const bool ok = dist < previous;
    pass = pass && ok;
    r.rows.push_back({{"kind", "approach"}, {"point", g.to_string()}, {"re", f.real()}, {"im", f.imag()},
                      {"modulus_error", std::abs(std::abs(f) - 1.0)}, {"check", "distance_to_minus_one"},
                      {"value", dist}, {"threshold", num(previous)}, {"pass", ok}});
    previous = dist;
  }
  r.pass = pass;
  return r;
}

Report run_exp_identity(const RunConfig& cfg) {
  Report r = start("exp-identity", cfg,
                   {"pair", "q", "M", "margin", "weyl_residual", "exp_residual", "exp_residual_swapped",
                    "sum_defect", "gamma_distance", "degraded", "threshold", "pass"});
  const QExpParams params = params_for(cfg);

  struct Point {
    int m;
    int margin;
    double weyl;
    ExpIdentityReport exp;
  };
  std::vector<int> ms = cfg.m_list;
  auto points = parallel_map(ms.size(), cfg.jobs, [&](std::size_t i) {
    const int m = ms[i];
    const GammaGrid grid(cfg.q, m);
    const Q2Pair pair = schrodinger_pair(grid, cfg.margin);
    const Q2Report v = verify_q2(pair, cfg.tol);
    const double weyl =
        std::max(v.find("weyl_modulus_generator")->value, v.find("weyl_phase_generator")->value);
    return Point{m, pair.margin, weyl, exp_identity_residual(pair, params)};
  });

  bool pass = true;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    double threshold = previous;
    bool ok = p.exp.residual < previous && !p.exp.degraded;
    if (i + 1 == points.size()) {
      const auto pinned = kPinnedExpResidual.find(p.m);
      if (pinned != kPinnedExpResidual.end() && cfg.q == 0.5) {
        threshold = std::min(threshold, kEnvelopeFactor * pinned->second);
        ok = ok && p.exp.residual < kEnvelopeFactor * pinned->second;
      }
    }
    pass = pass && ok;
    r.rows.push_back({{"pair", "schrodinger"}, {"q", cfg.q}, {"M", p.m}, {"margin", p.margin},
                      {"weyl_residual", p.weyl}, {"exp_residual", p.exp.residual},
                      {"exp_residual_swapped", p.exp.residual_swapped}, {"sum_defect", p.exp.sum_defect},
                      {"gamma_distance", p.exp.gamma_distance}, {"degraded", p.exp.degraded},
                      {"threshold", num(threshold)}, {"pass", ok}});
    previous = p.exp.residual;
  }

  // Y = 0 control on the configured grid.
  const GammaGrid grid(cfg.q, cfg.M);
  Q2Pair control = schrodinger_pair(grid, cfg.margin);
  control.y = NormalMatrix::zero(control.dim());
  const ExpIdentityReport c = exp_identity_residual(control, params);
  const bool ok = c.residual < kControlTol;
  pass = pass && ok;
  r.rows.push_back({{"pair", "control_Y0"}, {"q", cfg.q}, {"M", cfg.M}, {"margin", control.margin},
                    {"weyl_residual", nullptr}, {"exp_residual", c.residual},
                    {"exp_residual_swapped", c.residual_swapped}, {"sum_defect", c.sum_defect},
                    {"gamma_distance", c.gamma_distance}, {"degraded", c.degraded}, {"threshold", kControlTol},
                    {"pass", ok}});
  r.pass = pass;
  return r;
}

Report run_corep(const RunConfig& cfg) {
  Report r = start("corep", cfg,
                   {"pair", "blocks", "q", "M", "d", "unitarity_defect", "corep_residual", "residual_norm",
                    "degraded", "threshold", "pass"});
  const GammaGrid grid(cfg.q, cfg.M);
  const QExpParams params = params_for(cfg);

  std::vector<BlockSpec> blocks;
  SplitMix rng(cfg.seed);
  if (cfg.pair == "classical") {
    for (int i = 0; i < cfg.dim; ++i) {
      blocks.push_back(BlockSpec::trivial(grid.point(rng.uniform_int(0, static_cast<int>(grid.size()) - 1))));
    }
  } else if (cfg.pair == "schrodinger-block") {
    blocks.push_back(BlockSpec::schrodinger(2));
  } else {
    blocks = random_block_specs_exact(cfg.seed, grid, cfg.dim);
  }
  const Q2Pair pair = random_regular_pair(blocks, cfg.seed, grid);
  const Representation rep = build_rep({pair, describe_blocks(blocks)}, grid, params);
  const double unitarity = rep.unitarity_defect();
  const CorepResidual res = corep_residual(rep, cfg.samples, cfg.seed, params);
  const CorepResidual norm = corep_residual_norm(rep, cfg.seed, params);

  const bool classical = std::all_of(blocks.begin(), blocks.end(),
                                     [](const BlockSpec& b) { return b.kind == BlockSpec::Kind::trivial; });
  double threshold = cfg.tol;
  // Against a pinned envelope the degraded flag is expected (Delta b is not
  // normal) and only reported; otherwise it fails the row.
  bool enveloped = false;
  if (classical) {
    threshold = kClassicalCorepTol;
  } else if (cfg.pair == "schrodinger-block" && cfg.q == 0.5) {
    const auto pinned = kPinnedCorepBlock.find(cfg.M);
    if (pinned != kPinnedCorepBlock.end()) {
      threshold = kEnvelopeFactor * pinned->second;
      enveloped = true;
    }
  }
  const bool ok = unitarity <= kUnitarityTol && res.residual <= threshold && (enveloped || !res.degraded);
  r.rows.push_back({{"pair", cfg.pair}, {"blocks", describe_blocks(blocks)}, {"q", cfg.q}, {"M", cfg.M},
                    {"d", rep.h_dim}, {"unitarity_defect", unitarity}, {"corep_residual", res.residual},
                    {"residual_norm", norm.residual}, {"degraded", res.degraded}, {"threshold", threshold},
                    {"pass", ok}});
  r.pass = ok;
  return r;
}

Report run_roundtrip(const RunConfig& cfg) {
  Report r = start("roundtrip", cfg,
                   {"seed", "blocks", "d", "b_error", "a_error", "completeness", "family_unitarity",
                    "family_commutator", "inversion_residual", "verified", "threshold", "pass"});
  const GammaGrid grid(cfg.q, cfg.M);
  const QExpParams params = params_for(cfg);

  auto rows = parallel_map(static_cast<std::size_t>(cfg.count), cfg.jobs, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seed + i;
    const auto blocks = random_block_specs_exact(seed, grid, cfg.dim);
    const Q2Pair pair = random_regular_pair(blocks, seed, grid);
    const Representation rep = build_rep({pair, describe_blocks(blocks)}, grid, params);
    ojson row = {{"seed", seed}, {"blocks", describe_blocks(blocks)}, {"d", rep.h_dim}};
    try {
      const Extraction ex = extract_pair(rep, params, seed);
      const double eb = op_norm(ex.pair.b_t().entries() - pair.y.entries());
      const double ea = op_norm(ex.pair.a_t().entries() - pair.x.entries());
      row["b_error"] = eb;
      row["a_error"] = ea;
      row["completeness"] = ex.completeness;
      row["family_unitarity"] = ex.family_unitarity;
      row["family_commutator"] = ex.family_commutator;
      row["inversion_residual"] = ex.inversion_residual;
      row["verified"] = ex.verification.pass;
      row["threshold"] = kRoundTripTol;
      row["pass"] = eb <= kRoundTripTol && ea <= kRoundTripTol && ex.flags.empty();
    } catch (const Error& e) {
      row["verified"] = false;
      row["threshold"] = kRoundTripTol;
      row["pass"] = false;
      row["error"] = e.what();
    }
    return row;
  });
  bool pass = true;
  for (auto& row : rows) {
    pass = pass && row["pass"].get<bool>();
    r.rows.push_back(std::move(row));
  }
  r.pass = pass;
  return r;
}

Report run_verify_pair(const RunConfig& cfg) {
  Report r = start("verify-pair", cfg, {"check", "value", "threshold", "pass"});
  const GammaGrid grid(cfg.q, cfg.M);
  Q2Pair pair = schrodinger_pair(grid, cfg.margin);
  if (cfg.pair == "xx") {
    pair.y = pair.x;
  } else if (cfg.pair == "swapped") {
    std::swap(pair.x, pair.y);
    pair.weyl_window = grid.interior_mask(pair.margin).asDiagonal();
  } else if (cfg.pair == "random") {
    pair = random_regular_pair(random_block_specs_exact(cfg.seed, grid, cfg.dim), cfg.seed, grid);
  }
  const Q2Report report = verify_q2(pair, cfg.tol);
  for (const auto& c : report.checks) {
    r.rows.push_back({{"check", c.name}, {"value", num(c.value)}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  r.pass = report.pass;
  return r;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fq-table", "exp-identity", "corep", "roundtrip", "verify-pair"};
  return names;
}

Report run_experiment(const std::string& name, const RunConfig& cfg) {
  if (name == "fq-table") return run_fq_table(cfg);
  if (name == "exp-identity") return run_exp_identity(cfg);
  if (name == "corep") return run_corep(cfg);
  if (name == "roundtrip") return run_roundtrip(cfg);
  if (name == "verify-pair") return run_verify_pair(cfg);
  throw ParameterError("unknown experiment " + name);
}

}  // namespace azb
