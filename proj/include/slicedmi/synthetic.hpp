#pragma once

// Synthetic (X, Y) generators for the estimator experiments. All draws come
// from a SeededRng owned by the scenario seed, with a documented order (per
// sample: the X row, then the noise row), so datasets are reproducible
// byte for byte.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/sampling.hpp"

namespace slicedmi {

struct DataSet {
  SampleMatrix x, y;
};

struct Scenario {
  enum class Kind {
    overlap,             // X, Y are index slices of one standard normal vector
    one_feature_linear,  // Y = ((1'X / sqrt(d)) 1 + Z) / sqrt(2)
    one_feature_sin,     // Y = ((sin(1'X) / sqrt(d)) 1 + Z) / sqrt(2)
    two_features,        // split halves, each fed one 1/d-scaled sum feature
    low_rank,            // X = P1 V + Z1, Y = P2 V + Z2, V in R^2
    independent,         // Y = (X + Z) / sqrt(2), coordinatewise
    feature_needle,      // scalar Y = X_1 + Z0; only the first X coordinate matters
  };

  Kind kind{};
  int d = 0;                      // ambient dimension (all kinds but overlap)
  int d_total = 0;                // overlap: length of the shared source vector
  int x_lo = 0, x_hi = 0;         // overlap: 1-based inclusive X coordinate range
  int y_lo = 0, y_hi = 0;         // overlap: same for Y
  std::int64_t n = 0;
  std::uint64_t seed = 0;

  static Scenario overlap(int d_total, int x_lo, int x_hi, int y_lo, int y_hi, std::int64_t n,
                          std::uint64_t seed) {
    Scenario s;
    s.kind = Kind::overlap;
    s.d_total = d_total;
    s.x_lo = x_lo;
    s.x_hi = x_hi;
    s.y_lo = y_lo;
    s.y_hi = y_hi;
    s.n = n;
    s.seed = seed;
    return s;
  }
  static Scenario of(Kind kind, int d, std::int64_t n, std::uint64_t seed) {
    Scenario s;
    s.kind = kind;
    s.d = d;
    s.n = n;
    s.seed = seed;
    return s;
  }
};

namespace detail {

inline void fill_normal_row(SampleMatrix& m, std::int64_t row, SeededRng& rng) {
  for (int j = 0; j < m.cols(); ++j) m(row, j) = rng.normal();
}

inline void check_scenario(const Scenario& sc) {
  if (sc.n < 1) throw input_error("generate: n must be >= 1");
  if (sc.kind == Scenario::Kind::overlap) {
    if (sc.x_lo < 1 || sc.x_hi > sc.d_total || sc.x_lo > sc.x_hi || sc.y_lo < 1 ||
        sc.y_hi > sc.d_total || sc.y_lo > sc.y_hi)
      throw input_error("generate: overlap ranges must lie within 1..d_total");
    return;
  }
  if (sc.d < 1) throw input_error("generate: d must be >= 1");
  if (sc.kind == Scenario::Kind::two_features && sc.d < 2)
    throw input_error("generate: two_features needs d >= 2");
}

}  // namespace detail

inline DataSet generate(const Scenario& sc) {
  detail::check_scenario(sc);
  SeededRng rng(sc.seed);
  const std::int64_t n = sc.n;
  const int d = sc.d;
  DataSet out;

  switch (sc.kind) {
    case Scenario::Kind::overlap: {
      const int dx = sc.x_hi - sc.x_lo + 1, dy = sc.y_hi - sc.y_lo + 1;
      out.x.resize(n, dx);
      out.y.resize(n, dy);
      Eigen::VectorXd z(sc.d_total);
      for (std::int64_t i = 0; i < n; ++i) {
        for (int j = 0; j < sc.d_total; ++j) z[j] = rng.normal();
        for (int j = 0; j < dx; ++j) out.x(i, j) = z[sc.x_lo - 1 + j];
        for (int j = 0; j < dy; ++j) out.y(i, j) = z[sc.y_lo - 1 + j];
      }
      return out;
    }

    case Scenario::Kind::one_feature_linear:
    case Scenario::Kind::one_feature_sin: {
      const bool sinusoid = sc.kind == Scenario::Kind::one_feature_sin;
      const double root_half = std::sqrt(0.5), root_d = std::sqrt(static_cast<double>(d));
      out.x.resize(n, d);
      out.y.resize(n, d);
      for (std::int64_t i = 0; i < n; ++i) {
        detail::fill_normal_row(out.x, i, rng);
        const double s = out.x.row(i).sum();
        const double feature = (sinusoid ? std::sin(s) : s) / root_d;
        for (int j = 0; j < d; ++j) out.y(i, j) = root_half * (feature + rng.normal());
      }
      return out;
    }

    case Scenario::Kind::two_features: {
      const double root_half = std::sqrt(0.5);
      const int half = d / 2;  // first `half` coordinates see feature one
      out.x.resize(n, d);
      out.y.resize(n, d);
      for (std::int64_t i = 0; i < n; ++i) {
        detail::fill_normal_row(out.x, i, rng);
        const double f1 = out.x.row(i).head(half).sum() / d;
        const double f2 = out.x.row(i).tail(d - half).sum() / d;
        for (int j = 0; j < d; ++j)
          out.y(i, j) = root_half * ((j < half ? f1 : f2) + rng.normal());
      }
      return out;
    }

    case Scenario::Kind::low_rank: {
      // Fresh projection matrices every call, then per sample the shared
      // signal V and the two noise rows.
      Eigen::MatrixXd p1(d, 2), p2(d, 2);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < 2; ++c) p1(r, c) = rng.normal();
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < 2; ++c) p2(r, c) = rng.normal();
      out.x.resize(n, d);
      out.y.resize(n, d);
      Eigen::Vector2d v;
      for (std::int64_t i = 0; i < n; ++i) {
        v[0] = rng.normal();
        v[1] = rng.normal();
        const Eigen::VectorXd sx = p1 * v, sy = p2 * v;
        for (int j = 0; j < d; ++j) out.x(i, j) = sx[j] + rng.normal();
        for (int j = 0; j < d; ++j) out.y(i, j) = sy[j] + rng.normal();
      }
      return out;
    }

    case Scenario::Kind::independent: {
      const double root_half = std::sqrt(0.5);
      out.x.resize(n, d);
      out.y.resize(n, d);
      for (std::int64_t i = 0; i < n; ++i) {
        detail::fill_normal_row(out.x, i, rng);
        for (int j = 0; j < d; ++j) out.y(i, j) = root_half * (out.x(i, j) + rng.normal());
      }
      return out;
    }

    case Scenario::Kind::feature_needle: {
      out.x.resize(n, d);
      out.y.resize(n, 1);
      for (std::int64_t i = 0; i < n; ++i) {
        detail::fill_normal_row(out.x, i, rng);
        out.y(i, 0) = out.x(i, 0) + rng.normal();
      }
      return out;
    }
  }
  throw input_error("generate: unknown scenario kind");
}

// Uniform permutation of y's rows (Fisher-Yates on the supplied stream),
// breaking the pairing while keeping both marginals intact.
inline DataSet shuffle_pairing(const SampleMatrix& x, const SampleMatrix& y, SeededRng& rng) {
  if (x.rows() != y.rows())
    throw input_error("shuffle_pairing: x and y must have the same number of rows");
  const std::int64_t n = y.rows();
  std::vector<std::int64_t> perm(n);
  for (std::int64_t i = 0; i < n; ++i) perm[i] = i;
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  DataSet out;
  out.x = x;
  out.y.resize(n, y.cols());
  for (std::int64_t i = 0; i < n; ++i) out.y.row(i) = y.row(perm[i]);
  return out;
}

inline std::string scenario_kind_name(Scenario::Kind kind) {
  switch (kind) {
    case Scenario::Kind::overlap: return "overlap";
    case Scenario::Kind::one_feature_linear: return "one_feature_linear";
    case Scenario::Kind::one_feature_sin: return "one_feature_sin";
    case Scenario::Kind::two_features: return "two_features";
    case Scenario::Kind::low_rank: return "low_rank";
    case Scenario::Kind::independent: return "independent";
    case Scenario::Kind::feature_needle: return "feature_needle";
  }
  return "unknown";
}

inline Scenario::Kind scenario_kind_from_name(const std::string& name) {
  if (name == "overlap") return Scenario::Kind::overlap;
  if (name == "one_feature_linear") return Scenario::Kind::one_feature_linear;
  if (name == "one_feature_sin") return Scenario::Kind::one_feature_sin;
  if (name == "two_features") return Scenario::Kind::two_features;
  if (name == "low_rank") return Scenario::Kind::low_rank;
  if (name == "independent") return Scenario::Kind::independent;
  if (name == "feature_needle") return Scenario::Kind::feature_needle;
  throw config_error("unknown scenario kind: " + name);
}

}  // namespace slicedmi
