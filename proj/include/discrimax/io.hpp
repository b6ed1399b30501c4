#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "discrimax/criteria.hpp"
#include "discrimax/design.hpp"
#include "discrimax/equivalence.hpp"
#include "discrimax/optimizer.hpp"

namespace discrimax {

/// A design read from disk or the command line, plus what it was labelled with.
struct DesignInput {
  Design design;
  std::string criterion;  // empty when the source does not say
  std::string origin;     // file name or "literal"
  std::vector<std::string> warnings;
};

/// Accepts a path to a JSON design document, an inline JSON object, or the
/// literal form "x1,x2,...;w1,w2,...". Weights must sum to one within 1e-9;
/// within 1e-6 they are renormalised with a warning. ConfigError otherwise.
DesignInput read_design(const std::string& arg);
DesignInput design_from_json(const nlohmann::json& j, const std::string& origin);

/// {points, weights, criterion, value, theta2_star}.
nlohmann::json design_json(const Design& d, const CriterionReport& rep);
nlohmann::json report_json(const CriterionReport& rep);
nlohmann::json trace_json(const OptimizerTrace& trace);
nlohmann::json sensitivity_json(const SensitivityReport& s, bool include_grid);

/// CSV with header "x,psi" and 17 significant digits.
std::string sensitivity_csv(const SensitivityReport& s);
void write_text(const std::string& path, const std::string& text);

}  // namespace discrimax
