#include "discrimax/cli.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "discrimax/config.hpp"
#include "discrimax/equivalence.hpp"
#include "discrimax/error.hpp"
#include "discrimax/io.hpp"
#include "discrimax/optimizer.hpp"

namespace discrimax {

namespace {

void print_warnings(std::ostream& err, const std::vector<std::string>& w) {
  for (const auto& s : w) fmt::print(err, "warning: {}\n", s);
}

void print_design(std::ostream& out, const Design& d) {
  fmt::print(out, "  points : ");
  for (double x : d.points) fmt::print(out, " {:.6f}", x);
  fmt::print(out, "\n  weights: ");
  for (double w : d.weights) fmt::print(out, " {:.6f}", w);
  fmt::print(out, "\n");
}

void print_verdict(std::ostream& out, const SensitivityReport& s, CriterionKind kind) {
  const double v = s.criterion.value;
  fmt::print(out, "verdict: {}{}\n", to_string(s.verdict), s.non_unique ? " (theta2* not unique)" : "");
  fmt::print(out, "value: {:.10g}\n", v);
  fmt::print(out, "theta2*:");
  for (double t : s.criterion.theta2_star) fmt::print(out, " {:.6g}", t);
  fmt::print(out, "\nmax violation: {:.6g} at x = {:.6g} ({:.3g} x value, tolerance {:.3g})\n",
             s.max_violation, s.argmax_x, s.max_violation / v, s.tol / v);
  fmt::print(out, "efficiency bound: {:.6g}{}\n", efficiency_bound(s, v),
             efficiency_bound_is_heuristic(kind) ? " (heuristic)" : "");
}

// Exact design by the naive multiplier: round n * w_i.
nlohmann::json exact_design(const Design& d, long n) {
  nlohmann::json j;
  j["n"] = n;
  std::vector<long> counts;
  for (double w : d.weights) counts.push_back(std::lround(static_cast<double>(n) * w));
  j["counts"] = counts;
  return j;
}

int cmd_solve(const std::string& config_path, const std::string& out_path, long n_obs,
              std::ostream& out, std::ostream& err) {
  const ProblemConfig cfg = load_config(config_path);
  print_warnings(err, cfg.warnings);
  const Criterion c(cfg.problem());
  const OptimizerResult res = solve_design(c, cfg.optimizer);
  const SensitivityReport s = verify(c, res.design, res.report, cfg.verify);

  nlohmann::json doc = design_json(res.design, res.report);
  doc["report"] = report_json(res.report);
  doc["trace"] = trace_json(res.trace);
  doc["verification"] = sensitivity_json(s, false);
  doc["verification"]["efficiency_bound"] = efficiency_bound(s, res.report.value);
  doc["verification"]["efficiency_bound_heuristic"] = efficiency_bound_is_heuristic(c.kind());
  if (n_obs > 0) doc["exact_design"] = exact_design(res.design, n_obs);
  write_text(out_path, doc.dump(2) + "\n");

  fmt::print(out, "{} design ({} iterations{}):\n", to_string(c.kind()),
             res.trace.iterations.empty() ? 0 : res.trace.iterations.back().iter,
             res.trace.stall_warning ? ", stalled" : "");
  print_design(out, res.design);
  print_verdict(out, s, c.kind());
  if (res.trace.stall_warning) fmt::print(err, "warning: optimizer stalled before reaching the stop tolerance\n");
  if (res.report.non_unique) fmt::print(err, "warning: minimising theta2 is not unique\n");
  fmt::print(out, "wrote {}\n", out_path);
  return s.verdict == Verdict::Optimal ? kExitOptimal : kExitNotOptimal;
}

int cmd_verify(const std::string& config_path, const std::string& design_arg, const std::string& csv,
               std::ostream& out, std::ostream& err) {
  const ProblemConfig cfg = load_config(config_path);
  print_warnings(err, cfg.warnings);
  const DesignInput in = read_design(design_arg);
  print_warnings(err, in.warnings);
  const Criterion c(cfg.problem());
  if (!in.criterion.empty() && in.criterion != to_string(c.kind())) {
    fmt::print(err, "warning: design is labelled {} but the config criterion is {}\n", in.criterion,
               to_string(c.kind()));
  }
  const SensitivityReport s = verify(c, in.design, cfg.verify);
  print_design(out, in.design);
  print_verdict(out, s, c.kind());
  fmt::print(out, "sum of w psi at support: {:.3g}\n", s.weighted_residual_sum);
  if (!csv.empty()) {
    write_text(csv, sensitivity_csv(s));
    fmt::print(out, "wrote {}\n", csv);
  }
  return s.verdict == Verdict::Optimal ? kExitOptimal : kExitNotOptimal;
}

int cmd_sensitivity(const std::string& config_path, const std::string& design_arg, const std::string& csv,
                    std::ostream& out, std::ostream& err) {
  const ProblemConfig cfg = load_config(config_path);
  print_warnings(err, cfg.warnings);
  const DesignInput in = read_design(design_arg);
  print_warnings(err, in.warnings);
  const Criterion c(cfg.problem());
  const SensitivityReport s = verify(c, in.design, cfg.verify);
  write_text(csv, sensitivity_csv(s));
  fmt::print(out, "wrote {} ({} rows, max psi {:.6g} at x = {:.6g})\n", csv, s.grid.size(), s.max_violation,
             s.argmax_x);
  return kExitOptimal;
}

int cmd_efficiency(const std::string& config_path, const std::vector<std::string>& design_args,
                   const std::string& criteria_list, const std::string& out_path, std::ostream& out,
                   std::ostream& err) {
  const ProblemConfig cfg = load_config(config_path);
  print_warnings(err, cfg.warnings);
  std::vector<DesignInput> designs;
  for (const auto& a : design_args) {
    designs.push_back(read_design(a));
    print_warnings(err, designs.back().warnings);
  }
  std::vector<CriterionKind> kinds;
  for (std::size_t start = 0; start <= criteria_list.size();) {
    std::size_t comma = criteria_list.find(',', start);
    if (comma == std::string::npos) comma = criteria_list.size();
    kinds.push_back(parse_criterion(criteria_list.substr(start, comma - start)));
    start = comma + 1;
  }

  nlohmann::json doc;
  doc["designs"] = nlohmann::json::array();
  for (const auto& d : designs) doc["designs"].push_back(d.origin);
  doc["criteria"] = nlohmann::json::array();
  doc["matrix"] = nlohmann::json::array();

  fmt::print(out, "{:<10}", "K \\ xi");
  for (const auto& d : designs) fmt::print(out, " {:>12}", d.criterion.empty() ? d.origin : d.criterion);
  fmt::print(out, "\n");
  for (CriterionKind k : kinds) {
    const Criterion c(cfg.problem(k));
    std::vector<double> values;
    for (const auto& d : designs) values.push_back(c.inner_minimize(d.design).value);
    // Reference: the design labelled with this criterion, else the best one given.
    std::size_t ref = designs.size();
    for (std::size_t j = 0; j < designs.size(); ++j) {
      if (designs[j].criterion == to_string(k)) ref = j;
    }
    if (ref == designs.size()) {
      ref = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
      fmt::print(err, "warning: no design labelled {}; using {} as reference\n", to_string(k), designs[ref].origin);
    }
    if (!(values[ref] > 0.0)) {
      throw ZeroReference(fmt::format("{} value of the reference design is {}", to_string(k), values[ref]));
    }
    fmt::print(out, "{:<10}", to_string(k));
    nlohmann::json row = nlohmann::json::array();
    for (double v : values) {
      fmt::print(out, " {:>12.4f}", v / values[ref]);
      row.push_back(v / values[ref]);
    }
    fmt::print(out, "\n");
    doc["criteria"].push_back(to_string(k));
    doc["matrix"].push_back(row);
  }
  if (!out_path.empty()) write_text(out_path, doc.dump(2) + "\n");
  return kExitOptimal;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal discrimination designs for T, KLNORMAL, KL, SKL_A and SKL_B criteria"};
  app.require_subcommand(1);

  std::string config;
  std::string out_path;
  std::string design;
  std::string csv;
  std::vector<std::string> designs;
  std::string criteria = "T,KL,SKL_A";
  long n_obs = 0;

  auto* solve = app.add_subcommand("solve", "Compute an optimal design and certify it");
  solve->add_option("config", config, "Problem config")->required();
  solve->add_option("-o,--output", out_path, "Result JSON")->required();
  solve->add_option("--n-obs", n_obs, "Also report counts round(n w_i) for n observations");

  auto* ver = app.add_subcommand("verify", "Check a design against the equivalence theorem");
  ver->add_option("config", config, "Problem config")->required();
  ver->add_option("--design", design, "Design JSON file or literal 'x1,..;w1,..'")->required();
  ver->add_option("--csv", csv, "Write the sensitivity function as CSV");

  auto* eff = app.add_subcommand("efficiency", "Cross-criterion efficiency matrix");
  eff->add_option("config", config, "Problem config")->required();
  eff->add_option("--designs", designs, "Design files or literals")->required()->expected(1, -1);
  eff->add_option("--criteria", criteria, "Comma-separated criteria");
  eff->add_option("-o,--output", out_path, "Write the matrix as JSON");

  auto* sens = app.add_subcommand("sensitivity", "Write the sensitivity function as CSV");
  sens->add_option("config", config, "Problem config")->required();
  sens->add_option("--design", design, "Design JSON file or literal")->required();
  sens->add_option("--csv", csv, "Output CSV")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOptimal : kExitConfigError;
  }

  try {
    if (*solve) return cmd_solve(config, out_path, n_obs, out, err);
    if (*ver) return cmd_verify(config, design, csv, out, err);
    if (*eff) return cmd_efficiency(config, designs, criteria, out_path, out, err);
    if (*sens) return cmd_sensitivity(config, design, csv, out, err);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const ParseError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const ArityError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kExitConfigError;
  } catch (const Error& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumericalFailure;
  } catch (const std::exception& e) {
    fmt::print(err, "numerical failure: {}\n", e.what());
    return kExitNumericalFailure;
  }
  return kExitConfigError;
}

}  // namespace discrimax
