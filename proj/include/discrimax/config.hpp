#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "discrimax/criteria.hpp"
#include "discrimax/equivalence.hpp"
#include "discrimax/optimizer.hpp"

namespace discrimax {

/// One `key = value` entry of an INI-style file, with its line number.
struct IniEntry {
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;  // lower-cased, including any ":TAG" suffix
  int line = 0;
  std::map<std::string, IniEntry> entries;
};

/// Sections in file order. '#' and ';' start comments; keys are case-insensitive.
/// ConfigError (with line) on malformed lines, duplicate sections or keys.
std::vector<IniSection> parse_ini(std::string_view text);

/// A fully parsed problem description. Densities can be given per criterion
/// with sections like [density1:KL]; those override [density1] for that criterion.
struct ProblemConfig {
  std::string source;  // file name used in diagnostics
  DesignSpace space;
  ModelSpec model1;
  std::vector<double> theta1;
  ModelSpec model2;
  std::map<std::string, DensityFamily> density1;  // key "" or a criterion tag
  std::map<std::string, DensityFamily> density2;
  CriterionKind criterion = CriterionKind::T;
  int criterion_line = 0;
  KlOrientation kl_orientation = KlOrientation::Forward;
  SolverConfig solver;
  InnerOptions inner;
  OptimizerConfig optimizer;
  VerifyOptions verify;
  std::vector<std::string> warnings;

  /// The problem for criterion k; ConfigError if a density it needs is missing.
  Problem problem(CriterionKind k) const;
  Problem problem() const { return problem(criterion); }
};

/// ConfigError messages carry "source:line: [section] key: ..." prefixes.
ProblemConfig parse_config(std::string_view text, const std::string& source = "<config>");
ProblemConfig load_config(const std::string& path);

}  // namespace discrimax
