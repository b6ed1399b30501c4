#include "discrimax/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "discrimax/error.hpp"

namespace discrimax {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

// Accessor for one section that reports errors with file, line, section and key.
class Reader {
 public:
  Reader(const IniSection* sec, std::string source, std::set<std::string> allowed)
      : sec_(sec), source_(std::move(source)) {
    if (!sec_) return;
    for (const auto& [k, e] : sec_->entries) {
      if (!allowed.count(k)) {
        throw ConfigError(fmt::format("{}:{}: [{}] unknown key '{}'", source_, e.line, sec_->name, k), e.line);
      }
    }
  }

  bool present() const { return sec_ != nullptr; }
  bool has(const std::string& key) const { return sec_ && sec_->entries.count(key); }
  int line(const std::string& key) const { return has(key) ? sec_->entries.at(key).line : (sec_ ? sec_->line : 0); }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const int l = line(key);
    const std::string where = sec_ ? sec_->name : std::string("?");
    throw ConfigError(fmt::format("{}:{}: [{}] {}: {}", source_, l, where, key, msg), l);
  }

  const std::string& raw(const std::string& key) const {
    if (!has(key)) fail(key, "required key is missing");
    return sec_->entries.at(key).value;
  }

  double number(const std::string& key) const { return to_double(key, raw(key)); }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const std::string& s = raw(key);
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(key, fmt::format("'{}' is not an integer", s));
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string s = lower(raw(key));
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    fail(key, fmt::format("'{}' is not a boolean", raw(key)));
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(raw(key), ',')) out.push_back(to_double(key, item));
    return out;
  }

  MeanExpr expression(const std::string& key) const {
    const std::string& s = raw(key);
    try {
      return MeanExpr::parse(s);
    } catch (const ParseError& e) {
      std::string expected;
      for (const auto& t : e.expected()) expected += (expected.empty() ? "" : ", ") + t;
      fail(key, fmt::format("{} at column {}{}", e.what(), e.offset() + 1,
                            expected.empty() ? "" : fmt::format(" (expected {})", expected)));
    } catch (const ArityError& e) {
      fail(key, e.what());
    }
  }

 private:
  double to_double(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      fail(key, fmt::format("'{}' is not a finite number", s));
    }
    return v;
  }

  const IniSection* sec_;
  std::string source_;
};

DensityFamily read_density(const Reader& r) {
  const std::string kind = lower(r.raw("kind"));
  const MeanExpr var = r.expression("variance");
  try {
    if (kind == "truncated_normal") {
      if (r.has("p_lo") || r.has("p_hi")) r.fail("p_lo", "quantile truncation applies to truncated_lognormal only");
      return DensityFamily::truncated_normal(var, r.number("half_width"));
    }
    if (kind == "truncated_lognormal") {
      if (r.has("half_width")) r.fail("half_width", "half_width applies to truncated_normal only");
      return DensityFamily::truncated_lognormal(var, r.number("p_lo"), r.number("p_hi"));
    }
    if (kind == "normal" || kind == "lognormal") {
      for (const char* k : {"half_width", "p_lo", "p_hi"}) {
        if (r.has(k)) r.fail(k, fmt::format("{} densities are not truncated", kind));
      }
      return kind == "normal" ? DensityFamily::normal(var) : DensityFamily::lognormal(var);
    }
  } catch (const DomainError& e) {
    r.fail("kind", e.what());
  }
  r.fail("kind", fmt::format("unknown density kind '{}' (expected truncated_normal, "
                             "truncated_lognormal, normal or lognormal)", kind));
}

const std::set<std::string> kDensityKeys{"kind", "variance", "half_width", "p_lo", "p_hi"};

}  // namespace

std::vector<IniSection> parse_ini(std::string_view text) {
  std::vector<IniSection> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line = 0;
  while (std::getline(in, raw_line)) {
    ++line;
    std::string s = raw_line;
    const std::size_t hash = s.find_first_of("#;");
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(fmt::format("line {}: unterminated section header", line), line);
      std::string name = lower(trim(std::string_view(s).substr(1, s.size() - 2)));
      if (name.empty()) throw ConfigError(fmt::format("line {}: empty section name", line), line);
      if (!seen.insert(name).second) {
        throw ConfigError(fmt::format("line {}: section [{}] appears twice", line, name), line);
      }
      out.push_back({name, line, {}});
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value' or '[section]'", line), line);
    }
    if (out.empty()) throw ConfigError(fmt::format("line {}: key outside of any section", line), line);
    const std::string key = lower(trim(std::string_view(s).substr(0, eq)));
    const std::string value = trim(std::string_view(s).substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", line), line);
    if (!out.back().entries.emplace(key, IniEntry{value, line}).second) {
      throw ConfigError(fmt::format("line {}: [{}] key '{}' appears twice", line, out.back().name, key), line);
    }
  }
  return out;
}

ProblemConfig parse_config(std::string_view text, const std::string& source) {
  std::vector<IniSection> sections;
  try {
    sections = parse_ini(text);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}:{}", source, e.what()), e.line());
  }
  std::map<std::string, const IniSection*> by_name;
  for (const auto& s : sections) by_name[s.name] = &s;
  const auto find = [&](const std::string& n) -> const IniSection* {
    auto it = by_name.find(n);
    return it == by_name.end() ? nullptr : it->second;
  };
  const auto required = [&](const std::string& n) {
    const IniSection* s = find(n);
    if (!s) throw ConfigError(fmt::format("{}: missing section [{}]", source, n));
    return s;
  };

  ProblemConfig cfg;
  cfg.source = source;
  static const std::set<std::string> known{"design_space", "model1", "model2", "criterion",
                                           "solver", "inner", "optimizer", "verify"};
  for (const auto& s : sections) {
    const bool density = s.name.rfind("density1", 0) == 0 || s.name.rfind("density2", 0) == 0;
    if (!known.count(s.name) && !density) {
      throw ConfigError(fmt::format("{}:{}: unknown section [{}]", source, s.line, s.name), s.line);
    }
  }

  {
    const Reader r(required("design_space"), source, {"lo", "hi"});
    cfg.space.domain = {r.number("lo"), r.number("hi")};
    if (!(cfg.space.domain.lo < cfg.space.domain.hi)) r.fail("hi", "design space needs lo < hi");
  }
  {
    const Reader r(required("model1"), source, {"mean", "theta"});
    const MeanExpr mean = r.expression("mean");
    cfg.theta1 = r.numbers("theta");
    if (static_cast<int>(cfg.theta1.size()) != mean.arity()) {
      r.fail("theta", fmt::format("mean uses {} parameters but {} values are given", mean.arity(),
                                  cfg.theta1.size()));
    }
    cfg.model1 = ModelSpec::make(mean);
  }
  {
    const Reader r(required("model2"), source, {"mean", "box_lo", "box_hi"});
    const MeanExpr mean = r.expression("mean");
    const auto lo = r.numbers("box_lo");
    const auto hi = r.numbers("box_hi");
    if (static_cast<int>(lo.size()) != mean.arity()) {
      r.fail("box_lo", fmt::format("mean uses {} parameters but {} bounds are given", mean.arity(), lo.size()));
    }
    if (hi.size() != lo.size()) r.fail("box_hi", "box_lo and box_hi differ in length");
    std::vector<Interval> box;
    for (std::size_t j = 0; j < lo.size(); ++j) {
      if (!(lo[j] < hi[j])) r.fail("box_hi", fmt::format("bound {} needs box_lo < box_hi", j + 1));
      box.push_back({lo[j], hi[j]});
    }
    cfg.model2 = ModelSpec::make(mean, box);
  }
  {
    const Reader r(required("criterion"), source, {"kind", "kl_orientation"});
    try {
      cfg.criterion = parse_criterion(r.raw("kind"));
    } catch (const ConfigError& e) {
      r.fail("kind", e.what());
    }
    cfg.criterion_line = r.line("kind");
    if (r.has("kl_orientation")) {
      const std::string o = lower(r.raw("kl_orientation"));
      if (o == "forward") {
        cfg.kl_orientation = KlOrientation::Forward;
      } else if (o == "reverse") {
        cfg.kl_orientation = KlOrientation::Reverse;
      } else {
        r.fail("kl_orientation", fmt::format("'{}' is neither forward nor reverse", o));
      }
    }
  }
  for (const auto& s : sections) {
    for (const char* base : {"density1", "density2"}) {
      if (s.name.rfind(base, 0) != 0) continue;
      std::string tag;
      if (s.name.size() > 8) {
        if (s.name[8] != ':') {
          throw ConfigError(fmt::format("{}:{}: unknown section [{}]", source, s.line, s.name), s.line);
        }
        try {
          tag = to_string(parse_criterion(s.name.substr(9)));
        } catch (const ConfigError&) {
          throw ConfigError(fmt::format("{}:{}: [{}] names an unknown criterion", source, s.line, s.name), s.line);
        }
      }
      const Reader r(&s, source, kDensityKeys);
      auto& target = std::string(base) == "density1" ? cfg.density1 : cfg.density2;
      target.emplace(tag, read_density(r));
    }
  }
  {
    const Reader r(find("solver"), source, {"delta", "beta", "max_iter", "pole_offset", "quad_tol"});
    cfg.solver.delta = r.number("delta", cfg.solver.delta);
    cfg.solver.beta = r.number("beta", cfg.solver.beta);
    cfg.solver.max_iter = static_cast<int>(r.integer("max_iter", cfg.solver.max_iter));
    cfg.solver.pole_offset = r.number("pole_offset", cfg.solver.pole_offset);
    cfg.solver.quad_tol = r.number("quad_tol", cfg.solver.quad_tol);
    try {
      cfg.solver.validate();
    } catch (const DomainError& e) {
      r.fail("delta", e.what());
    }
  }
  {
    const Reader r(find("inner"), source, {"starts", "seed", "max_evals", "xtol", "ftol"});
    cfg.inner.starts = static_cast<int>(r.integer("starts", cfg.inner.starts));
    const long seed = r.integer("seed", 0);
    if (seed < 0) r.fail("seed", "seed must be nonnegative");
    cfg.inner.seed = static_cast<std::uint64_t>(seed);
    cfg.inner.max_evals = static_cast<int>(r.integer("max_evals", cfg.inner.max_evals));
    cfg.inner.xtol = r.number("xtol", cfg.inner.xtol);
    cfg.inner.ftol_rel = r.number("ftol", cfg.inner.ftol_rel);
    if (cfg.inner.starts < 1) r.fail("starts", "at least one start is needed");
    if (cfg.inner.max_evals < 1) r.fail("max_evals", "must be positive");
  }
  {
    const Reader r(find("optimizer"), source,
                   {"grid_n", "max_iter", "stop_tol", "merge_tol", "weight_floor", "consolidate_every",
                    "refine_tol", "stall_iters", "polish"});
    OptimizerConfig& o = cfg.optimizer;
    o.grid_n = static_cast<int>(r.integer("grid_n", o.grid_n));
    o.max_outer_iters = static_cast<int>(r.integer("max_iter", o.max_outer_iters));
    o.stop_tol = r.number("stop_tol", o.stop_tol);
    o.merge_tol_rel = r.number("merge_tol", o.merge_tol_rel);
    o.weight_floor = r.number("weight_floor", o.weight_floor);
    o.consolidate_every = static_cast<int>(r.integer("consolidate_every", o.consolidate_every));
    o.refine_tol = r.number("refine_tol", o.refine_tol);
    o.stall_iters = static_cast<int>(r.integer("stall_iters", o.stall_iters));
    o.polish = r.boolean("polish", o.polish);
    try {
      o.validate();
    } catch (const ConfigError& e) {
      r.fail("grid_n", e.what());
    }
    cfg.space.grid_n = o.grid_n;
  }
  {
    const Reader r(find("verify"), source, {"grid_n", "tol"});
    cfg.verify.grid_n = static_cast<int>(r.integer("grid_n", cfg.verify.grid_n));
    cfg.verify.tol = r.number("tol", cfg.verify.tol);
    if (cfg.verify.grid_n < 2) r.fail("grid_n", "needs at least two points");
    if (!(cfg.verify.tol > 0.0)) r.fail("tol", "must be positive");
  }
  // Fail early on what the target criterion needs.
  (void)cfg.problem();
  return cfg;
}

Problem ProblemConfig::problem(CriterionKind k) const {
  Problem p;
  p.space = space;
  p.model1 = model1;
  p.theta1 = theta1;
  p.model2 = model2;
  p.kind = k;
  p.kl_orientation = kl_orientation;
  p.solver = solver;
  p.inner = inner;
  const std::string tag = to_string(k);
  const auto pick = [&](const std::map<std::string, DensityFamily>& m) -> std::optional<DensityFamily> {
    if (auto it = m.find(tag); it != m.end()) return it->second;
    if (auto it = m.find(""); it != m.end()) return it->second;
    return std::nullopt;
  };
  p.density1 = pick(density1);
  p.density2 = pick(density2);
  // A density given specifically for this criterion must be one it uses.
  const bool uses1 = k == CriterionKind::KL || k == CriterionKind::SklA ||
                     (k == CriterionKind::KLNormal && !p.density2);
  const bool uses2 = k == CriterionKind::KL || k == CriterionKind::SklB || k == CriterionKind::KLNormal;
  if (!uses1 && density1.count(tag)) {
    throw ConfigError(fmt::format("{}: [density1:{}] is not used by {}", source, tag, tag));
  }
  if (!uses2 && density2.count(tag)) {
    throw ConfigError(fmt::format("{}: [density2:{}] is not used by {}", source, tag, tag));
  }
  if (!uses1) p.density1.reset();
  if (!uses2) p.density2.reset();
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}:{}: [criterion] kind: {}", source, criterion_line, e.what()),
                      criterion_line);
  }
  return p;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config file", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace discrimax
