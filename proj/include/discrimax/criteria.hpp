#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "discrimax/design.hpp"
#include "discrimax/divergence.hpp"
#include "discrimax/lambda_solver.hpp"
#include "discrimax/models.hpp"

namespace discrimax {

/// T: sum w (eta1 - eta2)^2.
/// KLNORMAL: sum w (eta1 - eta2)^2 / v2^2(x, theta2).
/// KL: sum w KL between the two parametric densities.
/// SKL_A: f1 fixed, infimum over densities with mean eta2 on the support of f1.
/// SKL_B: f2 fixed, infimum over densities with mean eta1.
enum class CriterionKind { T, KLNormal, KL, SklA, SklB };

const char* to_string(CriterionKind k);
/// Accepts T, KLNORMAL, KL, SKL_A, SKL_B (case-insensitive); ConfigError otherwise.
CriterionKind parse_criterion(std::string_view s);

/// Which way round the KL criterion takes the divergence.
enum class KlOrientation {
  Forward,  // KL(f1 || f2)
  Reverse,  // KL(f2 || f1)
};

struct InnerOptions {
  int starts = 16;
  std::uint64_t seed = 0;
  double xtol = 1e-9;
  double ftol_rel = 1e-12;
  int max_evals = 5000;
  double start_step = 0.1;  // initial simplex edge for low-discrepancy starts (unit box)
  double warm_step = 0.01;  // initial simplex edge for the warm start
  double tie_rel = 1e-8;    // values closer than this are ties
  double distinct_rel = 1e-3;
};

struct Problem {
  DesignSpace space;
  ModelSpec model1;
  std::vector<double> theta1;
  ModelSpec model2;  // its box is the search region for theta2
  std::optional<DensityFamily> density1;
  std::optional<DensityFamily> density2;
  CriterionKind kind = CriterionKind::T;
  KlOrientation kl_orientation = KlOrientation::Forward;
  SolverConfig solver;
  InnerOptions inner;

  /// ConfigError when the pieces the criterion needs are missing or inconsistent.
  void validate() const;
};

struct StartRecord {
  std::vector<double> start;
  std::vector<double> theta;
  double start_value = 0.0;  // objective at the start (penalised when infeasible)
  double value = 0.0;
  int evals = 0;
  bool converged = false;
  bool warm = false;
};

struct CriterionReport {
  CriterionKind kind = CriterionKind::T;
  double value = 0.0;
  std::vector<double> theta2_star;
  std::vector<StartRecord> inner_multistart_trace;
  std::vector<double> point_contributions;
  std::vector<PointStatus> point_status;
  bool non_unique = false;  // a different theta2 ties with the minimum
  std::vector<double> alternative_theta2;
  std::string convention;
};

/// A point contribution plus how far the point is from feasibility (0 if feasible).
struct PointValue {
  double value = 0.0;
  double infeasibility = 0.0;
  PointStatus status = PointStatus::Ok;
};

/// Criterion evaluation for a fixed problem. Thread-safe; f1 discretisations
/// are cached per design point.
class Criterion {
 public:
  explicit Criterion(Problem problem);
  ~Criterion();
  Criterion(const Criterion&) = delete;
  Criterion& operator=(const Criterion&) = delete;

  const Problem& problem() const { return p_; }
  CriterionKind kind() const { return p_.kind; }

  double eta1(double x) const;
  double eta2(double x, std::span<const double> theta2) const;

  /// Divergence of the criterion at one design point (value +inf when infeasible).
  PointDivergence point(double x, std::span<const double> theta2) const;
  PointValue point_value(double x, std::span<const double> theta2) const;

  /// sum w_i point(x_i, theta2).
  double eval_at_theta2(const Design& d, std::span<const double> theta2) const;

  /// Minimum over theta2 in the box: multistart simplex descent from scrambled
  /// Halton points plus `warm` when given. With local_only and a warm start,
  /// only the warm start is run.
  CriterionReport inner_minimize(const Design& d, const std::vector<double>* warm = nullptr,
                                 bool local_only = false) const;

  std::string convention() const;

 private:
  std::shared_ptr<const DiscreteDensity> f1_at(double x) const;

  Problem p_;
  struct Cache;
  std::unique_ptr<Cache> cache_;
};

/// Ratio of the criterion values of design and reference. ZeroReference when
/// the reference value is zero up to the inner tolerance, i.e. at most
/// inner.ftol_rel times the largest objective value at the feasible starts.
double efficiency(const Criterion& c, const Design& design, const Design& reference);

/// Penalty returned to the inner search for infeasible theta2.
inline constexpr double kInfeasiblePenalty = 1e150;

}  // namespace discrimax
