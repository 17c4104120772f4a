#pragma once

// Closed forms for jointly Gaussian (X, Y). A slice pair (theta, phi) maps a
// Gaussian vector pair to a bivariate Gaussian with correlation
//
//   rho(theta, phi) = theta' S_xy phi / sqrt(theta' S_x theta * phi' S_y phi)
//
// whose mutual information is -1/2 log(1 - rho^2). Averaging that over
// uniform direction pairs gives a Monte-Carlo oracle for SMI, and the
// canonical correlation coefficient (largest singular value of the whitened
// cross-covariance) bounds every slice correlation from above.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/sampling.hpp"
#include "slicedmi/smi.hpp"

namespace slicedmi {

struct GaussianSpec {
  Eigen::VectorXd mean_x, mean_y;  // empty means zero
  Eigen::MatrixXd sigma_x, sigma_y;
  Eigen::MatrixXd sigma_xy;  // dx x dy cross block

  int dx() const { return static_cast<int>(sigma_x.rows()); }
  int dy() const { return static_cast<int>(sigma_y.rows()); }
};

// Correlations this close to +-1 make -1/2 log(1 - rho^2) meaningless.
inline constexpr double kNearSingularRho = 1.0 - 1e-12;
// Marginal covariance eigenvalues below this cannot be whitened.
inline constexpr double kEigenvalueFloor = 1e-12;

namespace detail {

inline void check_square_symmetric(const Eigen::MatrixXd& s, const char* name) {
  if (s.rows() < 1 || s.rows() != s.cols())
    throw invalid_spec_error(std::string(name) + " must be square and non-empty");
  const double scale = s.cwiseAbs().maxCoeff();
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + scale))
    throw invalid_spec_error(std::string(name) + " is not symmetric");
  if (!s.allFinite()) throw invalid_spec_error(std::string(name) + " has non-finite entries");
}

inline void check_spec(const GaussianSpec& spec) {
  check_square_symmetric(spec.sigma_x, "sigma_x");
  check_square_symmetric(spec.sigma_y, "sigma_y");
  const int dx = spec.dx(), dy = spec.dy();
  if (spec.sigma_xy.rows() != dx || spec.sigma_xy.cols() != dy)
    throw invalid_spec_error("sigma_xy must be dx x dy");
  if (!spec.sigma_xy.allFinite()) throw invalid_spec_error("sigma_xy has non-finite entries");
  if (spec.mean_x.size() != 0 && spec.mean_x.size() != dx)
    throw invalid_spec_error("mean_x length does not match sigma_x");
  if (spec.mean_y.size() != 0 && spec.mean_y.size() != dy)
    throw invalid_spec_error("mean_y length does not match sigma_y");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(spec.sigma_x);
  if (ex.eigenvalues().minCoeff() <= 0.0)
    throw invalid_spec_error("sigma_x is not positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(spec.sigma_y);
  if (ey.eigenvalues().minCoeff() <= 0.0)
    throw invalid_spec_error("sigma_y is not positive definite");

  Eigen::MatrixXd joint(dx + dy, dx + dy);
  joint.topLeftCorner(dx, dx) = spec.sigma_x;
  joint.topRightCorner(dx, dy) = spec.sigma_xy;
  joint.bottomLeftCorner(dy, dx) = spec.sigma_xy.transpose();
  joint.bottomRightCorner(dy, dy) = spec.sigma_y;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ej(joint);
  const double scale = joint.cwiseAbs().maxCoeff();
  if (ej.eigenvalues().minCoeff() < -1e-9 * (1.0 + scale))
    throw invalid_spec_error("joint covariance block matrix is not positive semidefinite");
}

// S^{-1/2} through the eigendecomposition, refusing eigenvalues below the
// floor rather than amplifying noise by 1e12.
inline Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& s, const char* name) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd& lam = es.eigenvalues();
  if (lam.minCoeff() < kEigenvalueFloor)
    throw invalid_spec_error(std::string(name) + ": eigenvalue below floor 1e-12, cannot whiten");
  const Eigen::VectorXd inv_root = lam.cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

// Validation is an eigendecomposition, so the per-slice paths run it once
// up front and use these raw forms in their loops.
inline double slice_correlation_unchecked(const GaussianSpec& spec, const UnitDirection& theta,
                                          const UnitDirection& phi) {
  const double vx = theta.coords.dot(spec.sigma_x * theta.coords);
  const double vy = phi.coords.dot(spec.sigma_y * phi.coords);
  const double cxy = theta.coords.dot(spec.sigma_xy * phi.coords);
  return cxy / std::sqrt(vx * vy);
}

}  // namespace detail

inline double slice_correlation(const GaussianSpec& spec, const UnitDirection& theta,
                                const UnitDirection& phi) {
  detail::check_spec(spec);
  if (theta.dim() != spec.dx() || phi.dim() != spec.dy())
    throw input_error("slice_correlation: direction dimensions do not match the spec");
  return detail::slice_correlation_unchecked(spec, theta, phi);
}

namespace detail {

inline double slice_mi_unchecked(const GaussianSpec& spec, const UnitDirection& theta,
                                 const UnitDirection& phi) {
  const double rho = slice_correlation_unchecked(spec, theta, phi);
  if (std::abs(rho) >= kNearSingularRho)
    throw near_singular_error("slice_mi: |rho| within 1e-12 of 1 (degenerate linear dependence)");
  return -0.5 * std::log1p(-rho * rho);
}

}  // namespace detail

// MI of the sliced pair in nats: -1/2 log(1 - rho^2).
inline double slice_mi(const GaussianSpec& spec, const UnitDirection& theta,
                       const UnitDirection& phi) {
  detail::check_spec(spec);
  if (theta.dim() != spec.dx() || phi.dim() != spec.dy())
    throw input_error("slice_mi: direction dimensions do not match the spec");
  return detail::slice_mi_unchecked(spec, theta, phi);
}

// Monte-Carlo oracle: average slice_mi over m uniform direction pairs drawn
// from stream (seed, 0), the same stream layout as estimate_smi.
inline SmiEstimate gaussian_smi_mc(const GaussianSpec& spec, std::int64_t m,
                                   std::uint64_t seed = 0) {
  detail::check_spec(spec);
  if (m < 1) throw input_error("gaussian_smi_mc: m must be >= 1");
  SeededRng direction_stream(seed, 0);
  SmiEstimate out;
  out.per_slice.reserve(m);
  for (std::int64_t i = 0; i < m; ++i) {
    const UnitDirection theta = sample_unit_sphere(spec.dx(), direction_stream);
    const UnitDirection phi = sample_unit_sphere(spec.dy(), direction_stream);
    try {
      out.per_slice.push_back(detail::slice_mi_unchecked(spec, theta, phi));
    } catch (const near_singular_error& e) {
      throw near_singular_error("slice " + std::to_string(i) + ": " + e.what());
    }
  }
  detail::finish_estimate(out);
  return out;
}

// Largest canonical correlation: top singular value of the whitened cross
// block S_x^{-1/2} S_xy S_y^{-1/2}, clamped into [0, 1] against rounding.
inline double cca_coefficient(const GaussianSpec& spec) {
  detail::check_spec(spec);
  const Eigen::MatrixXd wx = detail::inverse_sqrt(spec.sigma_x, "sigma_x");
  const Eigen::MatrixXd wy = detail::inverse_sqrt(spec.sigma_y, "sigma_y");
  const Eigen::MatrixXd c = wx * spec.sigma_xy * wy;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
  return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

// SMI(X;Y) <= -1/2 log(1 - rho_cca^2): every slice correlation is bounded by
// rho_cca, and -1/2 log(1 - rho^2) is increasing in |rho|.
inline double gaussian_smi_upper_bound(const GaussianSpec& spec) {
  const double rho = cca_coefficient(spec);
  if (rho >= kNearSingularRho)
    throw near_singular_error("gaussian_smi_upper_bound: rho_cca within 1e-12 of 1");
  return -0.5 * std::log1p(-rho * rho);
}

// n joint draws from the spec. Sampling goes through the eigendecomposition
// of the joint block matrix, so PSD-singular specs (shared coordinates,
// deterministic maps) sample fine where a Cholesky would fail.
inline std::pair<SampleMatrix, SampleMatrix> sample_gaussian(const GaussianSpec& spec,
                                                             std::int64_t n, SeededRng& rng) {
  detail::check_spec(spec);
  if (n < 1) throw input_error("sample_gaussian: n must be >= 1");
  const int dx = spec.dx(), dy = spec.dy(), d = dx + dy;
  Eigen::MatrixXd joint(d, d);
  joint.topLeftCorner(dx, dx) = spec.sigma_x;
  joint.topRightCorner(dx, dy) = spec.sigma_xy;
  joint.bottomLeftCorner(dy, dx) = spec.sigma_xy.transpose();
  joint.bottomRightCorner(dy, dy) = spec.sigma_y;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(joint);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd b = es.eigenvectors() * root.asDiagonal();

  SampleMatrix x(n, dx), y(n, dy);
  Eigen::VectorXd xi(d);
  for (std::int64_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) xi[j] = rng.normal();
    const Eigen::VectorXd z = b * xi;
    for (int j = 0; j < dx; ++j) x(i, j) = z[j] + (spec.mean_x.size() ? spec.mean_x[j] : 0.0);
    for (int j = 0; j < dy; ++j) y(i, j) = z[dx + j] + (spec.mean_y.size() ? spec.mean_y[j] : 0.0);
  }
  return {std::move(x), std::move(y)};
}

// Covariance of (X, Y) = (Z[x_lo..x_hi], Z[y_lo..y_hi]) for Z ~ N(0, I).
// Ranges are 1-based inclusive; shared indices give unit cross entries.
inline GaussianSpec overlap_gaussian_spec(int d_total, int x_lo, int x_hi, int y_lo, int y_hi) {
  if (x_lo < 1 || x_hi > d_total || x_lo > x_hi || y_lo < 1 || y_hi > d_total || y_lo > y_hi)
    throw invalid_spec_error("overlap_gaussian_spec: ranges must lie within 1..d_total");
  const int dx = x_hi - x_lo + 1, dy = y_hi - y_lo + 1;
  GaussianSpec spec;
  spec.sigma_x = Eigen::MatrixXd::Identity(dx, dx);
  spec.sigma_y = Eigen::MatrixXd::Identity(dy, dy);
  spec.sigma_xy = Eigen::MatrixXd::Zero(dx, dy);
  for (int i = 0; i < dx; ++i)
    for (int j = 0; j < dy; ++j)
      if (x_lo + i == y_lo + j) spec.sigma_xy(i, j) = 1.0;
  return spec;
}

}  // namespace slicedmi
