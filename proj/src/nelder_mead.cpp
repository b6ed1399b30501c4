#include "discrimax/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "discrimax/error.hpp"

namespace discrimax {

namespace {

struct Simplex {
  std::vector<std::vector<double>> v;  // unit coordinates
  std::vector<double> f;
};

class Runner {
 public:
  Runner(const Objective& f, std::span<const double> lo, std::span<const double> hi,
         const NelderMeadOptions& opt)
      : f_(f), lo_(lo), hi_(hi), opt_(opt), n_(lo.size()), x_(n_) {}

  double eval(std::vector<double>& u) {
    for (std::size_t j = 0; j < n_; ++j) {
      u[j] = std::clamp(u[j], 0.0, 1.0);
      x_[j] = lo_[j] + u[j] * (hi_[j] - lo_[j]);
    }
    ++evals;
    return f_(x_);
  }

  std::vector<double> to_box(const std::vector<double>& u) const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = lo_[j] + u[j] * (hi_[j] - lo_[j]);
    return x;
  }

  // One descent from u0; returns true on convergence.
  bool descend(std::vector<double>& best_u, double& best_f) {
    Simplex s;
    s.v.push_back(best_u);
    s.f.push_back(best_f);
    for (std::size_t j = 0; j < n_; ++j) {
      std::vector<double> u = best_u;
      // Step away from the nearer face so the vertex is not projected back.
      u[j] += u[j] + opt_.initial_step <= 1.0 ? opt_.initial_step : -opt_.initial_step;
      const double fu = eval(u);
      s.v.push_back(u);
      s.f.push_back(fu);
    }
    std::vector<std::size_t> idx(n_ + 1);
    std::vector<double> c(n_), xr(n_), xe(n_), xc(n_);
    while (true) {
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s.f[a] < s.f[b]; });
      const std::size_t b = idx.front();
      const std::size_t w = idx.back();
      const std::size_t sw = idx[n_ - 1];
      best_u = s.v[b];
      best_f = s.f[b];

      double diam = 0.0;
      for (std::size_t k = 0; k <= n_; ++k) {
        for (std::size_t j = 0; j < n_; ++j) diam = std::max(diam, std::abs(s.v[k][j] - s.v[b][j]));
      }
      const double spread = s.f[w] - s.f[b];
      if (diam < opt_.xtol && spread <= opt_.ftol_rel * std::abs(s.f[b]) + opt_.ftol_abs) return true;
      if (evals >= opt_.max_evals) return false;

      std::fill(c.begin(), c.end(), 0.0);
      for (std::size_t k = 0; k <= n_; ++k) {
        if (k == w) continue;
        for (std::size_t j = 0; j < n_; ++j) c[j] += s.v[k][j] / static_cast<double>(n_);
      }
      for (std::size_t j = 0; j < n_; ++j) xr[j] = c[j] + (c[j] - s.v[w][j]);
      const double fr = eval(xr);
      if (fr < s.f[b]) {
        for (std::size_t j = 0; j < n_; ++j) xe[j] = c[j] + 2.0 * (c[j] - s.v[w][j]);
        const double fe = eval(xe);
        if (fe < fr) {
          s.v[w] = xe;
          s.f[w] = fe;
        } else {
          s.v[w] = xr;
          s.f[w] = fr;
        }
        continue;
      }
      if (fr < s.f[sw]) {
        s.v[w] = xr;
        s.f[w] = fr;
        continue;
      }
      const bool outside = fr < s.f[w];
      for (std::size_t j = 0; j < n_; ++j) {
        xc[j] = outside ? c[j] + 0.5 * (xr[j] - c[j]) : c[j] + 0.5 * (s.v[w][j] - c[j]);
      }
      const double fc = eval(xc);
      if (fc < (outside ? fr : s.f[w])) {
        s.v[w] = xc;
        s.f[w] = fc;
        continue;
      }
      for (std::size_t k = 0; k <= n_; ++k) {
        if (k == b) continue;
        for (std::size_t j = 0; j < n_; ++j) s.v[k][j] = s.v[b][j] + 0.5 * (s.v[k][j] - s.v[b][j]);
        s.f[k] = eval(s.v[k]);
      }
    }
  }

  int evals = 0;

 private:
  const Objective& f_;
  std::span<const double> lo_;
  std::span<const double> hi_;
  const NelderMeadOptions& opt_;
  std::size_t n_;
  std::vector<double> x_;
};

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> x0,
                             std::span<const double> lo, std::span<const double> hi,
                             const NelderMeadOptions& opt) {
  const std::size_t n = lo.size();
  if (n == 0 || hi.size() != n || x0.size() != n) throw DomainError("nelder_mead: dimension mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    if (!(lo[j] < hi[j])) throw DomainError("nelder_mead: empty box");
  }
  Runner r(f, lo, hi, opt);
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = (x0[j] - lo[j]) / (hi[j] - lo[j]);
  double fu = r.eval(u);
  bool converged = r.descend(u, fu);
  for (int k = 0; k < opt.restarts && converged; ++k) {
    const double before = fu;
    converged = r.descend(u, fu);
    if (before - fu <= opt.ftol_rel * std::abs(fu) + opt.ftol_abs) break;
  }
  NelderMeadResult res;
  res.x = r.to_box(u);
  res.value = fu;
  res.evals = r.evals;
  res.converged = converged;
  return res;
}

}  // namespace discrimax
