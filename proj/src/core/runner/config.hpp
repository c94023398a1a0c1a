#pragma once

#include <optional>

#include "problems/problem.hpp"
#include "training/train.hpp"

namespace bspinn::run {

/// Experiment description: a problem name plus overrides for any of its
/// defaults. Text form is `key = value` lines with '#' comments; unknown
/// keys are rejected.
struct ExperimentConfig {
  std::string problem;
  std::vector<std::string> archs;  // empty = the problem's default pair
  std::optional<std::string> activation;
  std::optional<int> residual_blocks;
  int n_seeds = 10;
  std::uint64_t master_seed = 1;
  std::optional<long long> epochs;
  std::optional<double> lr0;
  std::optional<std::string> scheduler;  // plateau | exponential
  std::optional<double> lambda_b;
  std::optional<double> lambda_i;
  std::optional<int> n_interior;
  std::optional<int> n_initial;
  std::optional<int> n_boundary;  // per face
  std::optional<std::string> interior_sampler;
  std::string out_dir;  // default runs/<problem>, under BSPINN_OUT_ROOT
  int threads = 0;      // 0 = hardware
  int history_stride = 1;
  std::optional<std::string> burgers_ref;
  std::optional<double> kappa;
  std::optional<int> dim;
  std::optional<double> c;
  std::optional<std::pair<double, double>> domain;
  std::optional<std::vector<int>> eval_grid;
  std::optional<int> eval_points;
  std::optional<int> quad_points;
  bool channels = false;
  std::optional<int> channel_group;
  bool euler_all_fields = false;
  bool quad_sqrt = false;
  bool eval_exact_debug = false;

  /// Typed assignment from text; throws ParseError on unknown key/bad value.
  void set(const std::string& key, const std::string& value);
  /// Merges `key = value` lines into this config.
  void load_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
};

/// Config with the problem defaults merged in; what actually runs.
struct Resolved {
  prob::ProblemDef problem;
  std::vector<net::NetworkSpec> specs;
  train::TrainConfig tconf;  // seed = master seed
  int n_seeds = 10;
  std::string out_dir;
  int threads = 0;
  int history_stride = 1;
  prob::EvalKind eval_kind = prob::EvalKind::kGrid;
  std::vector<int> eval_grid;
  int eval_points = 10000;
  int quad_points = 4;
  int channel_group = 16;
  bool channels = false;
  bool euler_all_fields = false;
  bool quad_sqrt = false;
  bool eval_exact_debug = false;
  std::optional<std::string> burgers_ref;
  // Constant overrides, echoed so the effective config reruns identically.
  std::optional<double> kappa;
  std::optional<int> dim_override;
  std::optional<double> c_override;
  std::optional<std::pair<double, double>> domain_override;

  /// Canonical `key = value` echo of everything above.
  std::string effective_text() const;
};

Resolved resolve(const ExperimentConfig& config);

}  // namespace bspinn::run
