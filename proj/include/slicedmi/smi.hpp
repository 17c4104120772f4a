#pragma once

// Monte-Carlo sliced mutual information and sliced entropy.
//
// SMI(X; Y) averages the scalar mutual information of 1-D projections over
// independent uniform direction pairs:
//
//   SMI_hat = (1/m) * sum_{i<m} I_hat(theta_i' X, phi_i' Y)
//
// with I_hat the Kozachenko-Leonenko kNN estimator (knn.hpp). All m
// direction pairs are drawn up front from stream (seed, 0) in slice order;
// slice i's jitter stream is (seed, i+1). Slice work may run on several
// threads, but results land in per_slice[i] and are reduced in index order,
// so the outcome is identical for any thread count.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/knn.hpp"
#include "slicedmi/parallel.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/sampling.hpp"

namespace slicedmi {

struct SmiConfig {
  std::int64_t m = 1000;  // number of random slices
  KnnConfig knn{};
  std::uint64_t seed = 0;
  bool clip_negative_slices = false;  // clip per-slice MI at 0 before averaging
  int threads = 1;                    // 0 = hardware concurrency
  bool store_directions = false;
};

struct SmiEstimate {
  double value = 0.0;
  std::vector<double> per_slice;
  // Spread of per_slice / sqrt(m). Slices share the sample, so this treats
  // them as independent only approximately; good enough for error bars.
  double std_error = 0.0;
  // (theta_i, phi_i) pairs when store_directions is set; for sliced entropy
  // the second member is empty.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> directions;
};

namespace detail {

// Fixed-order mean clamped into [min, max] of the inputs. The clamp repairs
// the one way IEEE rounding can betray the math: the mean of m copies of v
// must be v, and must never leave the per-slice envelope.
inline double bracketed_mean(const std::vector<double>& v) {
  double sum = 0.0, lo = v[0], hi = v[0];
  for (double x : v) {
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return std::clamp(sum / static_cast<double>(v.size()), lo, hi);
}

inline double spread_std_error(const std::vector<double>& v) {
  const auto m = static_cast<std::int64_t>(v.size());
  if (m < 2) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(m);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(m - 1)) / std::sqrt(static_cast<double>(m));
}

// First stored slice error wins, annotated with its slice index so a
// degenerate projection can be traced back.
[[noreturn]] inline void rethrow_slice_error(std::int64_t slice, std::exception_ptr ep) {
  const std::string prefix = "slice " + std::to_string(slice) + ": ";
  try {
    std::rethrow_exception(ep);
  } catch (const degenerate_distance_error& e) {
    throw degenerate_distance_error(prefix + e.what());
  } catch (const slicedmi::error& e) {
    throw numerical_error(prefix + e.what());
  }
}

inline void finish_estimate(SmiEstimate& out) {
  out.value = bracketed_mean(out.per_slice);
  out.std_error = spread_std_error(out.per_slice);
}

}  // namespace detail

inline SmiEstimate estimate_smi(const SampleMatrix& x, const SampleMatrix& y,
                                const SmiConfig& cfg) {
  check_samples(x, "estimate_smi");
  check_samples(y, "estimate_smi");
  if (x.rows() != y.rows())
    throw input_error("estimate_smi: x and y must have the same number of rows");
  if (cfg.m < 1) throw input_error("estimate_smi: m must be >= 1");
  detail::check_knn_args(x.rows(), cfg.knn, "estimate_smi");

  const int dx = static_cast<int>(x.cols());
  const int dy = static_cast<int>(y.cols());

  SeededRng direction_stream(cfg.seed, 0);
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> dirs;
  dirs.reserve(cfg.m);
  for (std::int64_t i = 0; i < cfg.m; ++i) {
    Eigen::VectorXd theta = sample_unit_sphere(dx, direction_stream).coords;
    Eigen::VectorXd phi = sample_unit_sphere(dy, direction_stream).coords;
    dirs.emplace_back(std::move(theta), std::move(phi));
  }

  SmiEstimate out;
  out.per_slice.assign(cfg.m, 0.0);
  std::vector<std::exception_ptr> failures(cfg.m);
  detail::parallel_for(cfg.m, cfg.threads, [&](std::int64_t i) {
    try {
      SeededRng jitter(cfg.seed, static_cast<std::uint64_t>(i) + 1);
      const Eigen::VectorXd px = x * dirs[i].first;
      const Eigen::VectorXd py = y * dirs[i].second;
      double v = kl_mi_1d(px, py, cfg.knn, &jitter);
      if (cfg.clip_negative_slices && v < 0.0) v = 0.0;
      out.per_slice[i] = v;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (std::int64_t i = 0; i < cfg.m; ++i)
    if (failures[i]) detail::rethrow_slice_error(i, failures[i]);

  detail::finish_estimate(out);
  if (cfg.store_directions) out.directions = std::move(dirs);
  return out;
}

// Sliced entropy: the average differential entropy of 1-D projections,
// same slicing and determinism contract as estimate_smi. Negative slice
// values are legitimate here (projections can have entropy below 0), so
// clip_negative_slices is ignored.
inline SmiEstimate estimate_sliced_entropy(const SampleMatrix& x, const SmiConfig& cfg) {
  check_samples(x, "estimate_sliced_entropy");
  if (cfg.m < 1) throw input_error("estimate_sliced_entropy: m must be >= 1");
  detail::check_knn_args(x.rows(), cfg.knn, "estimate_sliced_entropy");

  const int dx = static_cast<int>(x.cols());
  SeededRng direction_stream(cfg.seed, 0);
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> dirs;
  dirs.reserve(cfg.m);
  for (std::int64_t i = 0; i < cfg.m; ++i)
    dirs.emplace_back(sample_unit_sphere(dx, direction_stream).coords, Eigen::VectorXd());

  SmiEstimate out;
  out.per_slice.assign(cfg.m, 0.0);
  std::vector<std::exception_ptr> failures(cfg.m);
  detail::parallel_for(cfg.m, cfg.threads, [&](std::int64_t i) {
    try {
      SeededRng jitter(cfg.seed, static_cast<std::uint64_t>(i) + 1);
      SampleMatrix proj = x * dirs[i].first;
      out.per_slice[i] = kl_entropy(proj, cfg.knn, &jitter).value;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  });
  for (std::int64_t i = 0; i < cfg.m; ++i)
    if (failures[i]) detail::rethrow_slice_error(i, failures[i]);

  detail::finish_estimate(out);
  if (cfg.store_directions) out.directions = std::move(dirs);
  return out;
}

}  // namespace slicedmi
