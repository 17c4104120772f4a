#pragma once

// Variational (Donsker-Varadhan) SMI lower bound with a learned potential.
//
// A two-layer tanh network g takes one row per sample,
//
//   [ theta ; phi ; theta' x ; phi' y ]   (input_dim = d_x + d_y + 2)
//
// and training ascends the empirical DV objective
//
//   (1/n) sum_i g(pos_i) - log( (1/n) sum_j exp(g(neg_j)) )
//
// where negatives reuse the same x rows with y permuted. Gradients are
// hand-derived reverse mode (no autodiff dependency) and are checked against
// central finite differences in the tests. Everything trains single-threaded
// and deterministically from TrainConfig::seed.
//
// feature_extract additionally learns linear maps A_x, A_y, slicing A_x x
// and A_y y instead of the raw data, with gradients flowing through the two
// projection slots of the input row. Map rows are kept at unit norm by
// projecting after every step: per-slice MI cannot exceed what the best
// single direction achieves, so the optimum lies on the unit-row manifold,
// while unconstrained rows can decay in norm (their gradient shrinks with
// them) and freeze pointing nowhere.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/rng.hpp"
#include "slicedmi/sampling.hpp"
#include "slicedmi/synthetic.hpp"

namespace slicedmi {

struct DvModel {
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;  // hidden
  Eigen::VectorXd w2;  // hidden, linear output layer
  double b2 = 0.0;

  int input_dim() const { return static_cast<int>(w1.cols()); }
  int hidden() const { return static_cast<int>(w1.rows()); }
  bool finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && std::isfinite(b2);
  }
};

// Weights ~ N(0, 1/fan_in), biases 0.
inline DvModel make_dv_model(int input_dim, int hidden, SeededRng& rng) {
  if (input_dim < 1 || hidden < 1) throw input_error("make_dv_model: bad dimensions");
  DvModel m;
  m.w1.resize(hidden, input_dim);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
  for (int r = 0; r < hidden; ++r)
    for (int c = 0; c < input_dim; ++c) m.w1(r, c) = s1 * rng.normal();
  m.b1 = Eigen::VectorXd::Zero(hidden);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  m.w2.resize(hidden);
  for (int r = 0; r < hidden; ++r) m.w2[r] = s2 * rng.normal();
  m.b2 = 0.0;
  return m;
}

struct TrainConfig {
  int epochs = 200;
  int batch_size = 256;
  double learning_rate = 1e-3;
  enum class Optimizer { plain_gradient, adaptive_moment };
  Optimizer optimizer = Optimizer::adaptive_moment;
  std::uint64_t seed = 0;
  bool resample_directions_per_batch = true;
  int hidden = 100;
  // Pin every direction to +1 (d=1 only): slicing off, classic MINE on raw
  // scalars. Used by the equivalence tests.
  bool fix_directions_to_one = false;
};

struct FeatureMaps {
  Eigen::MatrixXd a_x;  // r_x x d_x
  Eigen::MatrixXd a_y;  // r_y x d_y; 0 x d_y when y passes through raw
};

namespace detail {

inline void check_batch(const DvModel& model, const Eigen::MatrixXd& batch, const char* who) {
  if (batch.rows() < 1) throw input_error(std::string(who) + ": empty batch");
  if (batch.cols() != model.input_dim())
    throw input_error(std::string(who) + ": batch width " + std::to_string(batch.cols()) +
                      " does not match model input_dim " + std::to_string(model.input_dim()));
}

inline std::string param_norms(const DvModel& m) {
  return "|w1|=" + std::to_string(m.w1.norm()) + " |b1|=" + std::to_string(m.b1.norm()) +
         " |w2|=" + std::to_string(m.w2.norm()) + " b2=" + std::to_string(m.b2);
}

// H = tanh(X w1' + b1), g = H w2 + b2.
inline void dv_forward(const DvModel& m, const Eigen::MatrixXd& batch, Eigen::MatrixXd& h,
                       Eigen::VectorXd& g) {
  h = ((batch * m.w1.transpose()).rowwise() + m.b1.transpose()).array().tanh().matrix();
  g = h * m.w2;
  g.array() += m.b2;
}

inline double logsumexp_vec(const Eigen::VectorXd& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

}  // namespace detail

// Network outputs for a batch of feature rows. Exposed mainly for tests and
// the CLI round-trip path.
inline Eigen::VectorXd dv_scores(const DvModel& model, const Eigen::MatrixXd& batch) {
  detail::check_batch(model, batch, "dv_scores");
  Eigen::MatrixXd h;
  Eigen::VectorXd g;
  detail::dv_forward(model, batch, h, g);
  return g;
}

inline double dv_objective(const DvModel& model, const Eigen::MatrixXd& batch_pos,
                           const Eigen::MatrixXd& batch_neg) {
  detail::check_batch(model, batch_pos, "dv_objective");
  detail::check_batch(model, batch_neg, "dv_objective");
  if (!model.finite())
    throw numerical_error("dv_objective: non-finite parameters (" + detail::param_norms(model) + ")");
  Eigen::MatrixXd h;
  Eigen::VectorXd gp, gq;
  detail::dv_forward(model, batch_pos, h, gp);
  detail::dv_forward(model, batch_neg, h, gq);
  const double value = gp.mean() - (detail::logsumexp_vec(gq) -
                                    std::log(static_cast<double>(batch_neg.rows())));
  if (!std::isfinite(value))
    throw numerical_error("dv_objective: non-finite objective (" + detail::param_norms(model) + ")");
  return value;
}

struct DvGradient {
  double value = 0.0;  // the objective, from the same forward pass
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
  // d objective / d input-row, filled only when requested: feature
  // extraction routes these into A_x, A_y.
  Eigen::MatrixXd inputs_pos, inputs_neg;
};

// Exact gradients of dv_objective with respect to every parameter, from one
// forward/backward pass per batch. The negative-batch contribution is the
// softmax-weighted feature average of the log-partition term.
inline DvGradient model_gradient(const DvModel& model, const Eigen::MatrixXd& batch_pos,
                                 const Eigen::MatrixXd& batch_neg, bool want_input_grad = false) {
  detail::check_batch(model, batch_pos, "model_gradient");
  detail::check_batch(model, batch_neg, "model_gradient");
  if (!model.finite())
    throw numerical_error("model_gradient: non-finite parameters (" + detail::param_norms(model) + ")");

  Eigen::MatrixXd hp, hq;
  Eigen::VectorXd gp, gq;
  detail::dv_forward(model, batch_pos, hp, gp);
  detail::dv_forward(model, batch_neg, hq, gq);

  const auto np = static_cast<double>(batch_pos.rows());
  const double lse = detail::logsumexp_vec(gq);
  Eigen::VectorXd soft = (gq.array() - lse).exp();  // sums to 1 by construction

  DvGradient out;
  out.value = gp.mean() - (lse - std::log(static_cast<double>(batch_neg.rows())));
  if (!std::isfinite(out.value) || !soft.allFinite())
    throw numerical_error("model_gradient: non-finite objective (" + detail::param_norms(model) + ")");

  const Eigen::VectorXd cp = Eigen::VectorXd::Constant(batch_pos.rows(), 1.0 / np);
  const Eigen::VectorXd cn = -soft;

  // For weights c over rows: delta_i = c_i * (1 - h_i^2) o w2.
  auto backprop = [&](const Eigen::MatrixXd& batch, const Eigen::MatrixXd& h,
                      const Eigen::VectorXd& c, Eigen::MatrixXd* input_grad) {
    const Eigen::MatrixXd d =
        ((1.0 - h.array().square()).rowwise() * model.w2.transpose().array()).colwise() *
        c.array();
    out.w1.noalias() += d.transpose() * batch;
    out.b1.noalias() += d.transpose() * Eigen::VectorXd::Ones(batch.rows());
    out.w2.noalias() += h.transpose() * c;
    out.b2 += c.sum();
    if (input_grad) input_grad->noalias() = d * model.w1;
  };

  out.w1 = Eigen::MatrixXd::Zero(model.hidden(), model.input_dim());
  out.b1 = Eigen::VectorXd::Zero(model.hidden());
  out.w2 = Eigen::VectorXd::Zero(model.hidden());
  backprop(batch_pos, hp, cp, want_input_grad ? &out.inputs_pos : nullptr);
  backprop(batch_neg, hq, cn, want_input_grad ? &out.inputs_neg : nullptr);
  return out;
}

namespace detail {

// Adam-style ascent state for one flat parameter vector.
class MomentAscent {
 public:
  MomentAscent(Eigen::Index size, TrainConfig::Optimizer opt, double lr)
      : opt_(opt), lr_(lr), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::Ref<Eigen::VectorXd> param, const Eigen::VectorXd& grad) {
    if (opt_ == TrainConfig::Optimizer::plain_gradient) {
      param += lr_ * grad;
      return;
    }
    ++t_;
    m_ = 0.9 * m_ + 0.1 * grad;
    v_ = 0.999 * v_ + 0.001 * grad.array().square().matrix();
    const double bc1 = 1.0 - std::pow(0.9, t_);
    const double bc2 = 1.0 - std::pow(0.999, t_);
    param.array() += lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + 1e-8);
  }

 private:
  TrainConfig::Optimizer opt_;
  double lr_;
  long t_ = 0;
  Eigen::VectorXd m_, v_;
};

inline void check_train_config(const TrainConfig& cfg) {
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.hidden < 1)
    throw input_error("train config: epochs, batch_size, hidden must be positive");
  if (!(cfg.learning_rate > 0.0)) throw input_error("train config: learning_rate must be positive");
}

inline std::vector<std::int64_t> shuffled_indices(std::int64_t n, SeededRng& rng) {
  std::vector<std::int64_t> idx(n);
  for (std::int64_t i = 0; i < n; ++i) idx[i] = i;
  for (std::int64_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(i + 1)));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

struct DirectionPair {
  Eigen::VectorXd theta, phi;
};

inline DirectionPair draw_pair(int dx, int dy, SeededRng& rng, bool fixed) {
  if (fixed) {
    if (dx != 1 || dy != 1)
      throw input_error("fix_directions_to_one requires d_x = d_y = 1");
    return {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)};
  }
  return {sample_unit_sphere(dx, rng).coords, sample_unit_sphere(dy, rng).coords};
}

inline void normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double norm = m.row(r).norm();
    if (norm > 0.0) m.row(r) /= norm;
  }
}

}  // namespace detail

struct TrainResult {
  DvModel model;
  std::vector<double> estimate_curve;  // per-epoch DV value on the held-out fifth
  double estimate = 0.0;               // mean of the last (up to) 10 curve entries
};

namespace detail {

// Shared trainer. When maps != nullptr it also learns A_x (r_x x d_x) and
// optionally A_y, slicing the mapped data; otherwise raw x, y are sliced.
inline TrainResult train_dv(const SampleMatrix& x, const SampleMatrix& y, const TrainConfig& cfg,
                            std::int64_t slices_per_batch, FeatureMaps* maps) {
  check_samples(x, "train_smine");
  check_samples(y, "train_smine");
  if (x.rows() != y.rows()) throw input_error("train_smine: x and y row counts differ");
  check_train_config(cfg);
  const std::int64_t n = x.rows();
  if (n < cfg.batch_size)
    throw insufficient_samples_error("train_smine: need n >= batch_size");
  if (slices_per_batch < 0) throw input_error("train_smine: slices_per_batch must be >= 0");

  const int dx = static_cast<int>(x.cols());
  const int dy = static_cast<int>(y.cols());
  const bool learn_x = maps != nullptr;
  const bool learn_y = maps != nullptr && maps->a_y.rows() > 0;
  const int rx = learn_x ? static_cast<int>(maps->a_x.rows()) : dx;
  const int ry = learn_y ? static_cast<int>(maps->a_y.rows()) : dy;
  const int input_dim = rx + ry + 2;

  SeededRng rng(cfg.seed);
  DvModel model = make_dv_model(input_dim, cfg.hidden, rng);

  // Seeded split: the first fifth of a shuffled index list is held out for
  // the per-epoch DV evaluation, the rest trains.
  std::vector<std::int64_t> order = detail::shuffled_indices(n, rng);
  const std::int64_t n_val = std::max<std::int64_t>(1, n / 5);
  std::vector<std::int64_t> val_idx(order.begin(), order.begin() + n_val);
  std::vector<std::int64_t> train_idx(order.begin() + n_val, order.end());
  if (train_idx.empty()) throw insufficient_samples_error("train_smine: no training rows left");

  // Fixed evaluation directions and a fixed negative permutation keep the
  // validation objective comparable across epochs.
  std::vector<detail::DirectionPair> val_dirs(val_idx.size());
  for (auto& p : val_dirs) p = detail::draw_pair(rx, ry, rng, cfg.fix_directions_to_one);
  std::vector<std::int64_t> val_perm = detail::shuffled_indices(n_val, rng);

  std::vector<detail::DirectionPair> train_dirs(train_idx.size());
  for (auto& p : train_dirs) p = detail::draw_pair(rx, ry, rng, cfg.fix_directions_to_one);

  // Optimizer state over one flat view per tensor.
  detail::MomentAscent opt_w1(model.w1.size(), cfg.optimizer, cfg.learning_rate);
  detail::MomentAscent opt_b1(model.b1.size(), cfg.optimizer, cfg.learning_rate);
  detail::MomentAscent opt_w2(model.w2.size(), cfg.optimizer, cfg.learning_rate);
  detail::MomentAscent opt_b2(1, cfg.optimizer, cfg.learning_rate);
  std::unique_ptr<detail::MomentAscent> opt_ax, opt_ay;
  if (learn_x) opt_ax = std::make_unique<detail::MomentAscent>(maps->a_x.size(), cfg.optimizer,
                                                               cfg.learning_rate);
  if (learn_y) opt_ay = std::make_unique<detail::MomentAscent>(maps->a_y.size(), cfg.optimizer,
                                                               cfg.learning_rate);

  // Feature row for sample `si` under directions `p`, y row taken from `yi`.
  auto fill_row = [&](Eigen::MatrixXd& rows, Eigen::Index r, std::int64_t si, std::int64_t yi,
                      const detail::DirectionPair& p) {
    const Eigen::VectorXd u = learn_x ? (maps->a_x * x.row(si).transpose()).eval()
                                      : x.row(si).transpose().eval();
    const Eigen::VectorXd v = learn_y ? (maps->a_y * y.row(yi).transpose()).eval()
                                      : y.row(yi).transpose().eval();
    rows.block(r, 0, 1, rx) = p.theta.transpose();
    rows.block(r, rx, 1, ry) = p.phi.transpose();
    rows(r, rx + ry) = p.theta.dot(u);
    rows(r, rx + ry + 1) = p.phi.dot(v);
  };

  TrainResult result;
  Eigen::MatrixXd pos, neg;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::int64_t> sweep = detail::shuffled_indices(
        static_cast<std::int64_t>(train_idx.size()), rng);
    for (std::size_t start = 0; start < sweep.size(); start += cfg.batch_size) {
      const auto b = static_cast<Eigen::Index>(
          std::min<std::size_t>(cfg.batch_size, sweep.size() - start));
      if (cfg.resample_directions_per_batch && !cfg.fix_directions_to_one) {
        if (slices_per_batch == 0) {
          for (Eigen::Index r = 0; r < b; ++r)
            train_dirs[sweep[start + r]] = detail::draw_pair(rx, ry, rng, false);
        } else {
          std::vector<detail::DirectionPair> pool(slices_per_batch);
          for (auto& p : pool) p = detail::draw_pair(rx, ry, rng, false);
          for (Eigen::Index r = 0; r < b; ++r)
            train_dirs[sweep[start + r]] = pool[r % slices_per_batch];
        }
      }
      std::vector<std::int64_t> perm = detail::shuffled_indices(b, rng);
      pos.resize(b, input_dim);
      neg.resize(b, input_dim);
      for (Eigen::Index r = 0; r < b; ++r) {
        const std::int64_t local = sweep[start + r];
        const std::int64_t si = train_idx[local];
        fill_row(pos, r, si, si, train_dirs[local]);
        fill_row(neg, r, si, train_idx[sweep[start + perm[r]]], train_dirs[local]);
      }

      DvGradient grad = model_gradient(model, pos, neg, learn_x || learn_y);
      if (!std::isfinite(grad.value))
        throw training_diverged_error("train_smine: objective diverged at epoch " +
                                      std::to_string(epoch));
      opt_w1.step(Eigen::Map<Eigen::VectorXd>(model.w1.data(), model.w1.size()),
                  Eigen::Map<Eigen::VectorXd>(grad.w1.data(), grad.w1.size()));
      opt_b1.step(model.b1, grad.b1);
      opt_w2.step(model.w2, grad.w2);
      Eigen::VectorXd b2v = Eigen::VectorXd::Constant(1, model.b2);
      opt_b2.step(b2v, Eigen::VectorXd::Constant(1, grad.b2));
      model.b2 = b2v[0];

      if (learn_x || learn_y) {
        // Chain rule through the two projection slots: the theta' u slot
        // contributes s_i * theta x_i', the phi' v slot s_i * phi y_i'.
        Eigen::MatrixXd gx = Eigen::MatrixXd::Zero(rx, dx);
        Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(ry, dy);
        for (Eigen::Index r = 0; r < b; ++r) {
          const std::int64_t local = sweep[start + r];
          const std::int64_t si = train_idx[local];
          const std::int64_t ni = train_idx[sweep[start + perm[r]]];
          const detail::DirectionPair& p = train_dirs[local];
          if (learn_x) {
            const double su = grad.inputs_pos(r, rx + ry) + grad.inputs_neg(r, rx + ry);
            gx.noalias() += su * p.theta * x.row(si);
          }
          if (learn_y) {
            gy.noalias() += grad.inputs_pos(r, rx + ry + 1) * p.phi * y.row(si);
            gy.noalias() += grad.inputs_neg(r, rx + ry + 1) * p.phi * y.row(ni);
          }
        }
        if (learn_x) {
          opt_ax->step(Eigen::Map<Eigen::VectorXd>(maps->a_x.data(), maps->a_x.size()),
                       Eigen::Map<Eigen::VectorXd>(gx.data(), gx.size()));
          detail::normalize_rows(maps->a_x);
        }
        if (learn_y) {
          opt_ay->step(Eigen::Map<Eigen::VectorXd>(maps->a_y.data(), maps->a_y.size()),
                       Eigen::Map<Eigen::VectorXd>(gy.data(), gy.size()));
          detail::normalize_rows(maps->a_y);
        }
      }
    }

    // Held-out DV value for this epoch.
    pos.resize(n_val, input_dim);
    neg.resize(n_val, input_dim);
    for (std::int64_t r = 0; r < n_val; ++r) {
      fill_row(pos, r, val_idx[r], val_idx[r], val_dirs[r]);
      fill_row(neg, r, val_idx[r], val_idx[val_perm[r]], val_dirs[r]);
    }
    const double val = dv_objective(model, pos, neg);
    if (!std::isfinite(val))
      throw training_diverged_error("train_smine: validation objective diverged at epoch " +
                                    std::to_string(epoch));
    result.estimate_curve.push_back(val);
  }

  const std::size_t tail = std::min<std::size_t>(10, result.estimate_curve.size());
  double acc = 0.0;
  for (std::size_t i = result.estimate_curve.size() - tail; i < result.estimate_curve.size(); ++i)
    acc += result.estimate_curve[i];
  result.estimate = acc / static_cast<double>(tail);
  result.model = std::move(model);
  return result;
}

}  // namespace detail

// Train the DV potential on paired samples; the estimate lower-bounds
// SMI(X;Y) in expectation. slices_per_batch = 0 draws one fresh direction
// pair per sample whenever a batch resamples; a positive value draws that
// many pairs per batch and tiles them across rows.
inline TrainResult train_smine(const SampleMatrix& x, const SampleMatrix& y,
                               const TrainConfig& cfg, std::int64_t slices_per_batch = 0) {
  return detail::train_dv(x, y, cfg, slices_per_batch, nullptr);
}

struct FeatureExtraction {
  FeatureMaps maps;
  DvModel model;
  std::vector<double> estimate_curve;
  double estimate = 0.0;
};

// Jointly ascend the DV objective in (A_x, A_y, network). r_y = 0 leaves y
// unmapped (it is still sliced over its raw dimension). Maps start with
// N(0, 1/d) rows renormalized to unit length, and every ascent step projects
// the rows back onto the unit sphere; no orthogonality constraint is imposed.
inline FeatureExtraction feature_extract(const SampleMatrix& x, const SampleMatrix& y, int r_x,
                                         int r_y, const TrainConfig& cfg,
                                         std::int64_t slices_per_batch = 0) {
  check_samples(x, "feature_extract");
  check_samples(y, "feature_extract");
  const int dx = static_cast<int>(x.cols());
  const int dy = static_cast<int>(y.cols());
  if (r_x < 1 || r_x > dx) throw input_error("feature_extract: need 1 <= r_x <= d_x");
  if (r_y < 0 || r_y > dy) throw input_error("feature_extract: need 0 <= r_y <= d_y");

  SeededRng init_rng(cfg.seed, 0x0FEA);  // map init kept off the training stream
  FeatureMaps maps;
  maps.a_x.resize(r_x, dx);
  const double sx = 1.0 / std::sqrt(static_cast<double>(dx));
  for (int r = 0; r < r_x; ++r)
    for (int c = 0; c < dx; ++c) maps.a_x(r, c) = sx * init_rng.normal();
  maps.a_y.resize(r_y, dy);
  const double sy = 1.0 / std::sqrt(static_cast<double>(dy));
  for (int r = 0; r < r_y; ++r)
    for (int c = 0; c < dy; ++c) maps.a_y(r, c) = sy * init_rng.normal();
  detail::normalize_rows(maps.a_x);
  detail::normalize_rows(maps.a_y);

  TrainResult tr = detail::train_dv(x, y, cfg, slices_per_batch, &maps);
  FeatureExtraction out;
  out.maps = std::move(maps);
  out.model = std::move(tr.model);
  out.estimate_curve = std::move(tr.estimate_curve);
  out.estimate = tr.estimate;
  return out;
}

// ===== Serialization =====
// Token streams, not binary: a "dvmodel 1" / "featuremaps 1" magic pair, a
// shape header, then row-major values at full round-trip precision.

namespace detail {

inline void expect_token(std::istream& is, const char* want, const char* who) {
  std::string got;
  if (!(is >> got) || got != want)
    throw input_error(std::string(who) + ": expected token '" + want + "', got '" + got + "'");
}

inline double read_value(std::istream& is, const char* who) {
  double v;
  if (!(is >> v)) throw input_error(std::string(who) + ": truncated or non-numeric value");
  return v;
}

inline long read_dim(std::istream& is, const char* who, long lo) {
  long v;
  if (!(is >> v) || v < lo) throw input_error(std::string(who) + ": bad dimension field");
  return v;
}

}  // namespace detail

inline void save_dv_model(std::ostream& os, const DvModel& m) {
  os.precision(17);
  os << "dvmodel 1 " << m.input_dim() << ' ' << m.hidden() << '\n';
  for (int r = 0; r < m.hidden(); ++r) {
    for (int c = 0; c < m.input_dim(); ++c) os << m.w1(r, c) << (c + 1 < m.input_dim() ? ' ' : '\n');
  }
  for (int r = 0; r < m.hidden(); ++r) os << m.b1[r] << (r + 1 < m.hidden() ? ' ' : '\n');
  for (int r = 0; r < m.hidden(); ++r) os << m.w2[r] << (r + 1 < m.hidden() ? ' ' : '\n');
  os << m.b2 << '\n';
}

inline DvModel load_dv_model(std::istream& is) {
  detail::expect_token(is, "dvmodel", "load_dv_model");
  detail::expect_token(is, "1", "load_dv_model");
  const long input = detail::read_dim(is, "load_dv_model", 1);
  const long hidden = detail::read_dim(is, "load_dv_model", 1);
  DvModel m;
  m.w1.resize(hidden, input);
  for (long r = 0; r < hidden; ++r)
    for (long c = 0; c < input; ++c) m.w1(r, c) = detail::read_value(is, "load_dv_model");
  m.b1.resize(hidden);
  for (long r = 0; r < hidden; ++r) m.b1[r] = detail::read_value(is, "load_dv_model");
  m.w2.resize(hidden);
  for (long r = 0; r < hidden; ++r) m.w2[r] = detail::read_value(is, "load_dv_model");
  m.b2 = detail::read_value(is, "load_dv_model");
  if (!m.finite()) throw input_error("load_dv_model: non-finite parameters");
  return m;
}

inline void save_feature_maps(std::ostream& os, const FeatureMaps& maps) {
  os.precision(17);
  os << "featuremaps 1 " << maps.a_x.rows() << ' ' << maps.a_x.cols() << ' ' << maps.a_y.rows()
     << ' ' << maps.a_y.cols() << '\n';
  for (Eigen::Index r = 0; r < maps.a_x.rows(); ++r)
    for (Eigen::Index c = 0; c < maps.a_x.cols(); ++c)
      os << maps.a_x(r, c) << (c + 1 < maps.a_x.cols() ? ' ' : '\n');
  for (Eigen::Index r = 0; r < maps.a_y.rows(); ++r)
    for (Eigen::Index c = 0; c < maps.a_y.cols(); ++c)
      os << maps.a_y(r, c) << (c + 1 < maps.a_y.cols() ? ' ' : '\n');
}

inline FeatureMaps load_feature_maps(std::istream& is) {
  detail::expect_token(is, "featuremaps", "load_feature_maps");
  detail::expect_token(is, "1", "load_feature_maps");
  const long rx = detail::read_dim(is, "load_feature_maps", 0);
  const long dx = detail::read_dim(is, "load_feature_maps", 1);
  const long ry = detail::read_dim(is, "load_feature_maps", 0);
  const long dy = detail::read_dim(is, "load_feature_maps", 0);
  FeatureMaps maps;
  maps.a_x.resize(rx, dx);
  for (long r = 0; r < rx; ++r)
    for (long c = 0; c < dx; ++c) maps.a_x(r, c) = detail::read_value(is, "load_feature_maps");
  maps.a_y.resize(ry, dy);
  for (long r = 0; r < ry; ++r)
    for (long c = 0; c < dy; ++c) maps.a_y(r, c) = detail::read_value(is, "load_feature_maps");
  if (!maps.a_x.allFinite() || !maps.a_y.allFinite())
    throw input_error("load_feature_maps: non-finite entries");
  return maps;
}

}  // namespace slicedmi
