#include "discrimax/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

namespace {

// JSON has no infinity; non-finite values are written as null.
nlohmann::json num(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json nums(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("design literal: {} entry '{}' is not a number", what, item));
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) throw ConfigError(fmt::format("design literal: {} entry '{}' is not a number", what, item));
    out.push_back(v);
  }
  return out;
}

DesignInput finish(std::vector<double> points, std::vector<double> weights, std::string criterion,
                   std::string origin) {
  DesignInput in;
  in.criterion = std::move(criterion);
  in.origin = std::move(origin);
  if (points.empty()) throw ConfigError(fmt::format("{}: design has no points", in.origin));
  if (points.size() != weights.size()) {
    throw ConfigError(fmt::format("{}: {} points but {} weights", in.origin, points.size(), weights.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i]) || !(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw ConfigError(fmt::format("{}: entry {} needs a finite point and a positive weight", in.origin, i + 1));
    }
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-6) {
    throw ConfigError(fmt::format("{}: weights sum to {:.17g}, not 1", in.origin, sum));
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    in.warnings.push_back(fmt::format("{}: weights sum to {:.17g}; renormalised", in.origin, sum));
  }
  in.design = Design::make(std::move(points), std::move(weights));
  return in;
}

}  // namespace

DesignInput design_from_json(const nlohmann::json& j, const std::string& origin) {
  if (!j.is_object() || !j.contains("points") || !j.contains("weights")) {
    throw ConfigError(fmt::format("{}: design document needs 'points' and 'weights'", origin));
  }
  std::vector<double> p;
  std::vector<double> w;
  try {
    p = j.at("points").get<std::vector<double>>();
    w = j.at("weights").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: points and weights must be number arrays ({})", origin, e.what()));
  }
  std::string crit;
  if (j.contains("criterion") && j.at("criterion").is_string()) crit = j.at("criterion").get<std::string>();
  return finish(std::move(p), std::move(w), std::move(crit), origin);
}

DesignInput read_design(const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) {
    std::ifstream in(arg);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("{}: invalid JSON ({})", arg, e.what()));
    }
    return design_from_json(j, arg);
  }
  const auto first = arg.find_first_not_of(" \t");
  if (first != std::string::npos && arg[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(arg);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(fmt::format("design literal: invalid JSON ({})", e.what()));
    }
    return design_from_json(j, "literal");
  }
  const auto semi = arg.find(';');
  if (semi == std::string::npos) {
    throw ConfigError(fmt::format("'{}' is neither a design file nor a literal 'x1,x2,...;w1,w2,...'", arg));
  }
  return finish(parse_list(arg.substr(0, semi), "point"), parse_list(arg.substr(semi + 1), "weight"), "",
                "literal");
}

nlohmann::json design_json(const Design& d, const CriterionReport& rep) {
  nlohmann::json j;
  j["points"] = nums(d.points);
  j["weights"] = nums(d.weights);
  j["criterion"] = to_string(rep.kind);
  j["value"] = num(rep.value);
  j["theta2_star"] = nums(rep.theta2_star);
  return j;
}

nlohmann::json report_json(const CriterionReport& rep) {
  nlohmann::json j;
  j["kind"] = to_string(rep.kind);
  j["value"] = num(rep.value);
  j["theta2_star"] = nums(rep.theta2_star);
  j["point_contributions"] = nums(rep.point_contributions);
  nlohmann::json st = nlohmann::json::array();
  for (PointStatus s : rep.point_status) st.push_back(to_string(s));
  j["point_status"] = st;
  j["non_unique_minimum"] = rep.non_unique;
  if (rep.non_unique) j["alternative_theta2"] = nums(rep.alternative_theta2);
  j["convention"] = rep.convention;
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& s : rep.inner_multistart_trace) {
    starts.push_back({{"start", nums(s.start)},
                      {"theta2", nums(s.theta)},
                      {"start_value", num(s.start_value)},
                      {"value", num(s.value)},
                      {"evals", s.evals},
                      {"converged", s.converged},
                      {"warm", s.warm}});
  }
  j["inner_multistart_trace"] = starts;
  return j;
}

nlohmann::json trace_json(const OptimizerTrace& trace) {
  nlohmann::json j;
  j["converged"] = trace.converged;
  j["stall_warning"] = trace.stall_warning;
  j["max_sensitivity"] = num(trace.max_sensitivity);
  j["iterations"] = trace.iterations.empty() ? 0 : trace.iterations.back().iter;
  j["notes"] = trace.notes;
  nlohmann::json it = nlohmann::json::array();
  for (const auto& r : trace.iterations) {
    it.push_back({{"iter", r.iter},
                  {"event", r.event},
                  {"value", num(r.value)},
                  {"theta2", nums(r.theta2)},
                  {"added_point", num(r.added_point)},
                  {"gamma", num(r.gamma)},
                  {"max_sensitivity", num(r.max_sensitivity)}});
  }
  j["history"] = it;
  return j;
}

nlohmann::json sensitivity_json(const SensitivityReport& s, bool include_grid) {
  nlohmann::json j;
  j["verdict"] = to_string(s.verdict);
  j["non_unique_minimum"] = s.non_unique;
  j["max_violation"] = num(s.max_violation);
  j["argmax_x"] = num(s.argmax_x);
  j["tolerance"] = num(s.tol);
  j["support_residuals"] = nums(s.support_residuals);
  j["weighted_residual_sum"] = num(s.weighted_residual_sum);
  if (include_grid) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& p : s.grid) g.push_back({num(p.x), num(p.psi)});
    j["grid"] = g;
  }
  return j;
}

std::string sensitivity_csv(const SensitivityReport& s) {
  std::string out = "x,psi\n";
  for (const auto& p : s.grid) out += fmt::format("{:.17g},{:.17g}\n", p.x, p.psi);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("{}: cannot open for writing", path));
  out << text;
  if (!out) throw ConfigError(fmt::format("{}: write failed", path));
}

}  // namespace discrimax
