#pragma once

// Kozachenko-Leonenko differential entropy from k-th nearest neighbor
// distances, and the derived mutual information estimator for scalar pairs.
//
//   H_hat = psi(n) - psi(k) + log c_d + (d/n) * sum_i log eps_i
//
// where eps_i is the Euclidean distance from sample i to its k-th nearest
// neighbor and c_d the unit-ball volume (c_1 = 2, c_2 = pi). Everything is
// in nats. The 1-D path sorts once and walks a two-sided window; the 2-D
// path builds a small kd-tree per call. Both sum log eps_i in original
// sample order, so any map that preserves pairwise distances exactly
// (negation, exactly-representable translation) reproduces results bit for
// bit.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/math.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/sampling.hpp"

namespace slicedmi {

enum class DegeneracyPolicy {
  error,   // throw on a zero k-th neighbor distance
  jitter,  // perturb coordinates by eps * scale uniform noise and retry
};

struct KnnConfig {
  int k = 3;
  DegeneracyPolicy degeneracy = DegeneracyPolicy::jitter;
  double jitter_eps = 1e-10;  // noise amplitude relative to max |coordinate|
};

struct EntropyEstimate {
  double value = 0.0;  // nats
  std::int64_t n = 0;
  int k = 0;
};

namespace detail {

// k-th neighbor distances on a line. Sort once, then for each point merge
// outward left/right k steps. O(n log n + n k). Output in input order.
inline void kth_distances_1d(const double* v, int n, int k, std::vector<double>& eps) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [v](int a, int b) { return v[a] < v[b]; });
  eps.resize(n);
  const double inf = std::numeric_limits<double>::infinity();
  for (int r = 0; r < n; ++r) {
    const int i = order[r];
    int lo = r - 1, hi = r + 1;
    double dist = 0.0;
    for (int t = 0; t < k; ++t) {
      const double dl = lo >= 0 ? v[i] - v[order[lo]] : inf;
      const double dr = hi < n ? v[order[hi]] - v[i] : inf;
      if (dl <= dr) {
        dist = dl;
        --lo;
      } else {
        dist = dr;
        ++hi;
      }
    }
    eps[i] = dist;
  }
}

// Bare-bones planar kd-tree: alternating median splits, bucket leaves,
// rebuilt per call. One instance serves one thread.
class KdTree2d {
 public:
  void build(const double* xs, const double* ys, int n) {
    xs_ = xs;
    ys_ = ys;
    idx_.resize(n);
    std::iota(idx_.begin(), idx_.end(), 0);
    nodes_.clear();
    nodes_.reserve(static_cast<size_t>(2 * n / kLeaf + 4));
    build_node(0, n, 0);
    px_.resize(n);
    py_.resize(n);
    for (int j = 0; j < n; ++j) {
      px_[j] = xs[idx_[j]];
      py_[j] = ys[idx_[j]];
    }
  }

  // Distance from point qi to its k-th nearest neighbor (self excluded).
  double kth_distance(int qi, int k) {
    heap_.clear();
    k_ = k;
    qx_ = xs_[qi];
    qy_ = ys_[qi];
    qi_ = qi;
    search(0);
    return std::sqrt(heap_.front());
  }

 private:
  static constexpr int kLeaf = 16;

  struct Node {
    double split;
    int axis;  // -1 marks a leaf
    int left, right;
    int lo, hi;
  };

  int build_node(int lo, int hi, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{0.0, -1, -1, -1, lo, hi});
    if (hi - lo <= kLeaf) return id;
    const int axis = depth & 1;
    const int mid = (lo + hi) / 2;
    const double* coord = axis == 0 ? xs_ : ys_;
    std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                     [coord](int a, int b) { return coord[a] < coord[b]; });
    nodes_[id].axis = axis;
    nodes_[id].split = coord[idx_[mid]];
    nodes_[id].left = build_node(lo, mid, depth + 1);
    const int right = build_node(mid, hi, depth + 1);
    nodes_[id].right = right;
    return id;
  }

  void consider(double d2) {
    if (static_cast<int>(heap_.size()) < k_) {
      heap_.push_back(d2);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (d2 < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = d2;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  void search(int id) {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (int j = node.lo; j < node.hi; ++j) {
        if (idx_[j] == qi_) continue;
        const double dx = px_[j] - qx_;
        const double dy = py_[j] - qy_;
        consider(dx * dx + dy * dy);
      }
      return;
    }
    const double q = node.axis == 0 ? qx_ : qy_;
    const double off = q - node.split;
    const int near = off < 0.0 ? node.left : node.right;
    const int far = off < 0.0 ? node.right : node.left;
    search(near);
    if (static_cast<int>(heap_.size()) < k_ || off * off < heap_.front()) search(far);
  }

  const double* xs_ = nullptr;
  const double* ys_ = nullptr;
  std::vector<int> idx_;
  std::vector<double> px_, py_;
  std::vector<Node> nodes_;
  std::vector<double> heap_;
  int k_ = 0, qi_ = 0;
  double qx_ = 0.0, qy_ = 0.0;
};

inline void kth_distances_2d(const double* xs, const double* ys, int n, int k,
                             std::vector<double>& eps) {
  KdTree2d tree;
  tree.build(xs, ys, n);
  eps.resize(n);
  for (int i = 0; i < n; ++i) eps[i] = tree.kth_distance(i, k);
}

// Reference path for any dimension: all pairwise distances, O(n^2 d).
// The test oracle for the tree, and the scorer for multivariate data in the
// independence harness where d rules the kd-tree out anyway.
inline void kth_distances_brute(const SampleMatrix& m, int k, std::vector<double>& eps) {
  const int n = static_cast<int>(m.rows());
  eps.resize(n);
  std::vector<double> d2(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d2[j] = (m.row(j) - m.row(i)).squaredNorm();
    d2[i] = std::numeric_limits<double>::infinity();
    std::nth_element(d2.begin(), d2.begin() + (k - 1), d2.end());
    eps[i] = std::sqrt(d2[k - 1]);
  }
}

inline bool any_zero(const std::vector<double>& eps) {
  for (double e : eps)
    if (e == 0.0) return true;
  return false;
}

inline double entropy_from_distances(const std::vector<double>& eps, int d, int k) {
  const auto n = static_cast<std::int64_t>(eps.size());
  double sum_log = 0.0;
  for (double e : eps) sum_log += std::log(e);
  return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) +
         log_unit_ball_volume(d) + static_cast<double>(d) / static_cast<double>(n) * sum_log;
}

inline void check_knn_args(std::int64_t n, const KnnConfig& cfg, const char* who) {
  if (cfg.k < 1) throw input_error(std::string(who) + ": k must be >= 1");
  if (!(cfg.jitter_eps > 0.0))
    throw input_error(std::string(who) + ": jitter_eps must be positive");
  if (n <= cfg.k)
    throw insufficient_samples_error(std::string(who) + ": need more than k=" +
                                     std::to_string(cfg.k) + " samples, got " +
                                     std::to_string(n));
}

// Columnwise noise amplitude for the jitter retry: eps times the largest
// coordinate magnitude of the original data (1 if the column is all zero).
inline double jitter_amplitude(const Eigen::VectorXd& col, double eps) {
  const double scale = col.cwiseAbs().maxCoeff();
  return eps * (scale > 0.0 ? scale : 1.0);
}

inline SeededRng& jitter_stream(SeededRng* supplied, SeededRng& fallback) {
  return supplied ? *supplied : fallback;
}

constexpr int kJitterAttempts = 3;
constexpr std::uint64_t kFallbackJitterSeed = 0x6A177E52ULL;

}  // namespace detail

// Differential entropy of an n x d sample, d in {1, 2}. Ties that zero out a
// k-th neighbor distance follow cfg.degeneracy; jitter noise comes from
// jitter_rng when given, otherwise from a fixed-seed internal stream, so the
// call stays deterministic either way.
inline EntropyEstimate kl_entropy(const SampleMatrix& samples, const KnnConfig& cfg = {},
                                  SeededRng* jitter_rng = nullptr) {
  check_samples(samples, "kl_entropy");
  const int d = static_cast<int>(samples.cols());
  if (d != 1 && d != 2) throw input_error("kl_entropy: d must be 1 or 2");
  const int n = static_cast<int>(samples.rows());
  detail::check_knn_args(n, cfg, "kl_entropy");

  std::vector<double> eps;
  auto compute = [&](const SampleMatrix& m) {
    if (d == 1)
      detail::kth_distances_1d(m.col(0).data(), n, cfg.k, eps);
    else {
      // Column-major storage makes col(j).data() contiguous.
      detail::kth_distances_2d(m.col(0).data(), m.col(1).data(), n, cfg.k, eps);
    }
  };

  compute(samples);
  if (detail::any_zero(eps)) {
    if (cfg.degeneracy == DegeneracyPolicy::error)
      throw degenerate_distance_error("kl_entropy: zero k-th neighbor distance (tied samples)");
    SeededRng fallback(detail::kFallbackJitterSeed);
    SeededRng& rng = detail::jitter_stream(jitter_rng, fallback);
    SampleMatrix work = samples;
    std::vector<double> amp(d);
    for (int j = 0; j < d; ++j) amp[j] = detail::jitter_amplitude(samples.col(j), cfg.jitter_eps);
    int attempt = 0;
    for (; attempt < detail::kJitterAttempts; ++attempt) {
      for (int j = 0; j < d; ++j)
        for (int i = 0; i < n; ++i) work(i, j) += rng.uniform(-amp[j], amp[j]);
      compute(work);
      if (!detail::any_zero(eps)) break;
    }
    if (attempt == detail::kJitterAttempts)
      throw degenerate_distance_error("kl_entropy: samples still tied after jitter");
  }
  return EntropyEstimate{detail::entropy_from_distances(eps, d, cfg.k), n, cfg.k};
}

// Mutual information between two scalar samples:
//   I_hat(x; y) = H_hat(x) + H_hat(y) - H_hat(x, y).
// All three terms are computed from the same (possibly jointly jittered)
// copy of the data, so a tie in any of the three spaces re-perturbs x and y
// together and keeps the estimates consistent.
inline double kl_mi_1d(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                       const KnnConfig& cfg = {}, SeededRng* jitter_rng = nullptr) {
  const int n = static_cast<int>(x.size());
  if (n != static_cast<int>(y.size()))
    throw input_error("kl_mi_1d: x and y must have the same length");
  if (n < 1) throw input_error("kl_mi_1d: empty input");
  if (!x.allFinite() || !y.allFinite())
    throw input_error("kl_mi_1d: input has non-finite entries");
  detail::check_knn_args(n, cfg, "kl_mi_1d");

  std::vector<double> ex, ey, exy;
  auto compute = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    detail::kth_distances_1d(a.data(), n, cfg.k, ex);
    detail::kth_distances_1d(b.data(), n, cfg.k, ey);
    detail::kth_distances_2d(a.data(), b.data(), n, cfg.k, exy);
    return !(detail::any_zero(ex) || detail::any_zero(ey) || detail::any_zero(exy));
  };

  if (!compute(x, y)) {
    if (cfg.degeneracy == DegeneracyPolicy::error)
      throw degenerate_distance_error("kl_mi_1d: zero k-th neighbor distance (tied samples)");
    SeededRng fallback(detail::kFallbackJitterSeed);
    SeededRng& rng = detail::jitter_stream(jitter_rng, fallback);
    Eigen::VectorXd wx = x, wy = y;
    const double ax = detail::jitter_amplitude(x, cfg.jitter_eps);
    const double ay = detail::jitter_amplitude(y, cfg.jitter_eps);
    int attempt = 0;
    for (; attempt < detail::kJitterAttempts; ++attempt) {
      for (int i = 0; i < n; ++i) wx[i] += rng.uniform(-ax, ax);
      for (int i = 0; i < n; ++i) wy[i] += rng.uniform(-ay, ay);
      if (compute(wx, wy)) break;
    }
    if (attempt == detail::kJitterAttempts)
      throw degenerate_distance_error("kl_mi_1d: samples still tied after jitter");
  }

  const double hx = detail::entropy_from_distances(ex, 1, cfg.k);
  const double hy = detail::entropy_from_distances(ey, 1, cfg.k);
  const double hxy = detail::entropy_from_distances(exy, 2, cfg.k);
  return hx + hy - hxy;
}

}  // namespace slicedmi
