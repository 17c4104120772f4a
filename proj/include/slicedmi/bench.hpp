#pragma once

// Convergence-rate benchmarks. The estimator's RMSE against a high-m
// Monte-Carlo Gaussian oracle is measured over grids in the sample count n
// and slice count m, and the decay rate is summarized by ordinary least
// squares on log-log points. Also hosts the per-slice log-concave MI bound
// check, 1/2 log((pi^2/8) / (1 - rho_cca^2)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/gaussian.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/smi.hpp"

namespace slicedmi {

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  int points_used = 0;
  bool excluded_smallest = false;
};

namespace detail {

inline SlopeFit ols_loglog(const std::vector<std::pair<double, double>>& pts) {
  const auto n = static_cast<double>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw numerical_error("slope fit: degenerate abscissae");
  SlopeFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0;
  for (const auto& [x, y] : pts) {
    const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  fit.points_used = static_cast<int>(pts.size());
  return fit;
}

}  // namespace detail

// Least-squares slope of log y against log x. When the smallest-x point sits
// more than 3 fit-RMSEs off the line through the remaining points (the
// pre-asymptotic bias regime), the fit without it is reported. The residual
// must be judged against the leave-one-out line: against a fit that includes
// the point, |residual| <= sqrt(n(1 - leverage)) * RMS caps the ratio near 1
// on short grids and the rule could never fire. A tiny absolute floor keeps
// exact power-law data (residuals at rounding scale on both sides) from
// tripping the comparison.
inline SlopeFit fit_loglog_slope(std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2) throw input_error("fit_loglog_slope: need at least two points");
  for (const auto& [x, y] : pts)
    if (!(x > 0.0) || !(y > 0.0))
      throw input_error("fit_loglog_slope: points must be strictly positive");
  std::sort(pts.begin(), pts.end());
  if (pts.size() >= 4) {
    const std::vector<std::pair<double, double>> rest(pts.begin() + 1, pts.end());
    SlopeFit without = detail::ols_loglog(rest);
    const double r0 = std::log(pts.front().second) -
                      (without.intercept + without.slope * std::log(pts.front().first));
    if (std::abs(r0) > std::max(3.0 * without.residual_rms, 1e-9)) {
      without.excluded_smallest = true;
      return without;
    }
  }
  return detail::ols_loglog(pts);
}

struct RateGrid {
  GaussianSpec spec;
  std::vector<std::int64_t> n_values;  // n sweep at m = fixed_m; also the joint n = m sweep
  std::vector<std::int64_t> m_values;  // m sweep at n = fixed_n
  int trials = 10;
  std::int64_t fixed_n = 10000;
  std::int64_t fixed_m = 10000;
  std::uint64_t seed = 0;
  int k = 3;
  std::int64_t oracle_m = 1000000;  // slices for the ground-truth MC oracle
  bool joint_sweep = true;
  int threads = 1;
};

struct RateRow {
  std::int64_t n = 0, m = 0;
  double rmse = 0.0;
  int trials = 0;
  std::string sweep;  // "n", "m", or "joint"
};

struct RateReport {
  std::vector<RateRow> rows;
  std::optional<SlopeFit> slope_n, slope_m, slope_joint;
  double oracle_value = 0.0;
};

namespace detail {

inline void check_increasing(const std::vector<std::int64_t>& v, const char* name) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1])
      throw input_error(std::string("run_rate_sweep: ") + name + " must be strictly increasing");
}

}  // namespace detail

inline RateReport run_rate_sweep(const RateGrid& grid) {
  if (grid.trials < 1) throw input_error("run_rate_sweep: trials must be >= 1");
  if (grid.n_values.empty() && grid.m_values.empty())
    throw input_error("run_rate_sweep: both grids empty");
  detail::check_increasing(grid.n_values, "n_values");
  detail::check_increasing(grid.m_values, "m_values");

  RateReport report;
  report.oracle_value = gaussian_smi_mc(grid.spec, grid.oracle_m, SeededRng(grid.seed, 1).next_u64()).value;

  // One RMSE cell: `trials` independent datasets and estimator seeds.
  std::uint64_t cell_counter = 0;
  auto rmse_cell = [&](std::int64_t n, std::int64_t m) {
    SeededRng cell_rng(grid.seed, 2 + cell_counter++);
    double ss = 0.0;
    for (int t = 0; t < grid.trials; ++t) {
      SeededRng data_rng = cell_rng.derived(2 * t);
      auto [x, y] = sample_gaussian(grid.spec, n, data_rng);
      SmiConfig cfg;
      cfg.m = m;
      cfg.knn.k = grid.k;
      cfg.seed = cell_rng.derived(2 * t + 1).next_u64();
      cfg.threads = grid.threads;
      const double err = estimate_smi(x, y, cfg).value - report.oracle_value;
      ss += err * err;
    }
    return std::sqrt(ss / static_cast<double>(grid.trials));
  };

  auto sweep = [&](const std::vector<std::pair<std::int64_t, std::int64_t>>& cells,
                   const char* name) -> std::optional<SlopeFit> {
    if (cells.empty()) return std::nullopt;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [n, m] : cells) {
      const double rmse = rmse_cell(n, m);
      report.rows.push_back({n, m, rmse, grid.trials, name});
      if (rmse > 0.0) pts.push_back({static_cast<double>(name[0] == 'm' ? m : n), rmse});
    }
    if (pts.size() < 2) return std::nullopt;
    return fit_loglog_slope(std::move(pts));
  };

  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  if (grid.fixed_m > 0) {
    for (auto n : grid.n_values) cells.push_back({n, grid.fixed_m});
    report.slope_n = sweep(cells, "n");
  }
  if (grid.fixed_n > 0) {
    cells.clear();
    for (auto m : grid.m_values) cells.push_back({grid.fixed_n, m});
    report.slope_m = sweep(cells, "m");
  }
  if (grid.joint_sweep) {
    cells.clear();
    for (auto n : grid.n_values) cells.push_back({n, n});
    report.slope_joint = sweep(cells, "joint");
  }
  return report;
}

struct BoundCheck {
  bool ok = false;
  double bound = 0.0;
  double max_slice_mi = 0.0;
  double margin = 0.0;  // bound - max_slice_mi
};

// Every slice of a log-concave pair obeys I(theta'X; phi'Y) <= 1/2 log(
// (pi^2/8) / (1 - rho_cca^2) ). For a Gaussian spec the slice MIs are exact,
// so this samples direction pairs and compares the worst one to the bound.
inline BoundCheck check_logconcave_bound(const GaussianSpec& spec, std::int64_t samples = 10000,
                                         std::uint64_t seed = 0) {
  if (samples < 1) throw input_error("check_logconcave_bound: samples must be >= 1");
  const double rho = cca_coefficient(spec);
  if (rho >= kNearSingularRho)
    throw near_singular_error("check_logconcave_bound: rho_cca within 1e-12 of 1");
  const double pi = 3.14159265358979323846;
  BoundCheck out;
  out.bound = 0.5 * (std::log(pi * pi / 8.0) - std::log1p(-rho * rho));

  SeededRng rng(seed, 0);
  double worst = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const UnitDirection theta = sample_unit_sphere(spec.dx(), rng);
    const UnitDirection phi = sample_unit_sphere(spec.dy(), rng);
    worst = std::max(worst, detail::slice_mi_unchecked(spec, theta, phi));
  }
  out.max_slice_mi = worst;
  out.margin = out.bound - worst;
  out.ok = worst <= out.bound;
  return out;
}

}  // namespace slicedmi
