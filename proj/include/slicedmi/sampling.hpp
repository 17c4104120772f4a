#pragma once

// Uniform directions on the unit sphere and 1-D projections of sample sets.

#include <Eigen/Dense>
#include <limits>

#include "slicedmi/errors.hpp"
#include "slicedmi/rng.hpp"

namespace slicedmi {

// One sample per row. Estimators validate shape and finiteness at entry.
using SampleMatrix = Eigen::MatrixXd;

struct UnitDirection {
  Eigen::VectorXd coords;
  int dim() const { return static_cast<int>(coords.size()); }
};

inline void check_samples(const SampleMatrix& samples, const char* who) {
  if (samples.rows() < 1 || samples.cols() < 1)
    throw input_error(std::string(who) + ": sample matrix must be non-empty");
  if (!samples.allFinite())
    throw input_error(std::string(who) + ": sample matrix has non-finite entries");
}

// Uniform draw from S^{dim-1}: fill with standard normals, normalize.
// dim == 1 degenerates to a fair +1/-1 coin so no rounding enters; this is
// what makes scalar data reduce to the plain 1-D estimator bit-for-bit.
inline UnitDirection sample_unit_sphere(int dim, SeededRng& rng) {
  if (dim < 1) throw input_error("sample_unit_sphere: dim must be >= 1");
  Eigen::VectorXd v(dim);
  if (dim == 1) {
    v[0] = rng.sign();
    return UnitDirection{std::move(v)};
  }
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = rng.normal();
    norm = v.norm();
  } while (norm < 1e-150);  // astronomically unlikely, but never divide by ~0
  v /= norm;
  return UnitDirection{std::move(v)};
}

// Projection of every sample onto a direction: entry i is <row_i, dir>.
inline Eigen::VectorXd project(const SampleMatrix& samples, const UnitDirection& dir) {
  check_samples(samples, "project");
  if (samples.cols() != dir.coords.size())
    throw input_error("project: direction dimension " + std::to_string(dir.coords.size()) +
                      " does not match sample dimension " + std::to_string(samples.cols()));
  return samples * dir.coords;
}

}  // namespace slicedmi
