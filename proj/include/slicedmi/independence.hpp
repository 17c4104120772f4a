#pragma once

// Independence-testing harness: how well does thresholding an estimator
// separate dependent datasets from pairing-shuffled ones? Score separation
// is summarized by AUC-ROC, computed as the Mann-Whitney statistic.

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "slicedmi/errors.hpp"
#include "slicedmi/knn.hpp"
#include "slicedmi/smi.hpp"
#include "slicedmi/synthetic.hpp"

namespace slicedmi {

struct RocInput {
  std::vector<double> positive;  // scores on dependent data
  std::vector<double> negative;  // scores on shuffled data
};

// Fraction of (positive, negative) pairs with positive > negative, ties
// counted half. Quadratic in the trial count, which is tiny here.
inline double auc_roc(const RocInput& input) {
  if (input.positive.empty() || input.negative.empty())
    throw input_error("auc_roc: both score sets must be non-empty");
  double credit = 0.0;
  for (double p : input.positive)
    for (double q : input.negative) {
      if (p > q)
        credit += 1.0;
      else if (p == q)
        credit += 0.5;
    }
  return credit / (static_cast<double>(input.positive.size()) *
                   static_cast<double>(input.negative.size()));
}

struct ExperimentPlan {
  Scenario::Kind scenario{};
  std::vector<int> dims;
  std::vector<std::int64_t> sample_sizes;
  int trials_per_cell = 20;
  std::int64_t m = 1000;  // slices per SMI estimate
  int k = 3;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ExperimentRow {
  std::string scenario;
  int d = 0;
  std::int64_t n = 0;
  std::string estimator;  // "SMI" or "MI"
  double auc = 0.0;
  int trials = 0;
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;
};

namespace detail {

// Multivariate KL entropy for the classic-MI baseline. Dimensions beyond 2
// rule the planar tree out, and harness sizes make O(n^2) scans fine.
inline double kl_entropy_any_d(const SampleMatrix& m, const KnnConfig& cfg,
                               SeededRng* jitter_rng) {
  check_samples(m, "kl_entropy_any_d");
  const int d = static_cast<int>(m.cols());
  const auto n = static_cast<std::int64_t>(m.rows());
  check_knn_args(n, cfg, "kl_entropy_any_d");
  std::vector<double> eps;
  kth_distances_brute(m, cfg.k, eps);
  if (any_zero(eps)) {
    if (cfg.degeneracy == DegeneracyPolicy::error)
      throw degenerate_distance_error("kl_entropy_any_d: zero k-th neighbor distance");
    SeededRng fallback(kFallbackJitterSeed);
    SeededRng& rng = jitter_stream(jitter_rng, fallback);
    SampleMatrix work = m;
    std::vector<double> amp(d);
    for (int j = 0; j < d; ++j) amp[j] = jitter_amplitude(m.col(j), cfg.jitter_eps);
    int attempt = 0;
    for (; attempt < kJitterAttempts; ++attempt) {
      for (int j = 0; j < d; ++j)
        for (std::int64_t i = 0; i < n; ++i) work(i, j) += rng.uniform(-amp[j], amp[j]);
      kth_distances_brute(work, cfg.k, eps);
      if (!any_zero(eps)) break;
    }
    if (attempt == kJitterAttempts)
      throw degenerate_distance_error("kl_entropy_any_d: samples still tied after jitter");
  }
  return entropy_from_distances(eps, d, cfg.k);
}

}  // namespace detail

// Classic mutual information H(X) + H(Y) - H(X,Y) at any dimension. Scalar
// pairs take the exact kl_mi_1d path, so d=1 scores coincide with the SMI
// estimator's single possible slice.
inline double kl_mi_nd(const SampleMatrix& x, const SampleMatrix& y, const KnnConfig& cfg = {},
                       SeededRng* jitter_rng = nullptr) {
  if (x.rows() != y.rows()) throw input_error("kl_mi_nd: x and y must have the same row count");
  if (x.cols() == 1 && y.cols() == 1) return kl_mi_1d(x.col(0), y.col(0), cfg, jitter_rng);
  SampleMatrix joint(x.rows(), x.cols() + y.cols());
  joint << x, y;
  const double hx = detail::kl_entropy_any_d(x, cfg, jitter_rng);
  const double hy = detail::kl_entropy_any_d(y, cfg, jitter_rng);
  const double hxy = detail::kl_entropy_any_d(joint, cfg, jitter_rng);
  return hx + hy - hxy;
}

// For every (d, n) grid cell: generate trials_per_cell dependent datasets
// and as many pairing-shuffled ones, score each with SMI and classic MI,
// and report one AUC row per estimator. Seeds are derived per cell and
// trial, so the table is a pure function of the plan.
inline ExperimentTable run_independence_experiment(const ExperimentPlan& plan) {
  if (plan.dims.empty() || plan.sample_sizes.empty())
    throw input_error("run_independence_experiment: empty grid");
  if (plan.trials_per_cell < 1) throw input_error("run_independence_experiment: trials < 1");
  if (plan.m < 1 || plan.k < 1) throw input_error("run_independence_experiment: bad m or k");

  KnnConfig knn;
  knn.k = plan.k;
  ExperimentTable table;
  SeededRng root(plan.seed);

  const std::string name = scenario_kind_name(plan.scenario);
  std::int64_t cell = 0;
  for (int d : plan.dims) {
    for (std::int64_t n : plan.sample_sizes) {
      RocInput smi_scores, mi_scores;
      int completed = 0;
      try {
        for (int t = 0; t < plan.trials_per_cell; ++t) {
          // Sub-streams: one per (cell, trial, role). Roles: 0 positive data,
          // 1 negative data, 2 the pairing shuffle, 3 jitter fallback.
          SeededRng trial_rng = root.derived(cell * 1000003 + t);
          const auto data_seed = trial_rng.derived(0).next_u64();
          const auto neg_seed = trial_rng.derived(1).next_u64();

          auto score = [&](const DataSet& ds, bool positive) {
            SmiConfig scfg;
            scfg.m = plan.m;
            scfg.knn = knn;
            scfg.seed = trial_rng.derived(positive ? 4 : 5).next_u64();
            scfg.threads = plan.threads;
            const double smi = estimate_smi(ds.x, ds.y, scfg).value;
            SeededRng jitter = trial_rng.derived(3);
            const double mi = kl_mi_nd(ds.x, ds.y, knn, &jitter);
            (positive ? smi_scores.positive : smi_scores.negative).push_back(smi);
            (positive ? mi_scores.positive : mi_scores.negative).push_back(mi);
          };

          score(generate(Scenario::of(plan.scenario, d, n, data_seed)), true);

          const DataSet fresh = generate(Scenario::of(plan.scenario, d, n, neg_seed));
          SeededRng shuffle_rng = trial_rng.derived(2);
          score(shuffle_pairing(fresh.x, fresh.y, shuffle_rng), false);
          ++completed;
        }
        table.rows.push_back({name, d, n, "SMI", auc_roc(smi_scores), plan.trials_per_cell});
        table.rows.push_back({name, d, n, "MI", auc_roc(mi_scores), plan.trials_per_cell});
      } catch (const error&) {
        // An estimator failure aborts the cell: one diagnostic row with the
        // trial count reached, NaN score, and the grid walk continues.
        table.rows.push_back(
            {name, d, n, "error", std::numeric_limits<double>::quiet_NaN(), completed});
      }
      ++cell;
    }
  }
  return table;
}

}  // namespace slicedmi
