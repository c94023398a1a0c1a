#pragma once

#include <cstdint>
#include <string>

#include "training/loss.hpp"
#include "training/scheduler.hpp"

namespace bspinn::train {

struct TrainConfig {
  long long epochs = 1000;
  double lr0 = 1e-3;
  prob::SchedulerKind scheduler = prob::SchedulerKind::kPlateau;
  double plateau_factor = 0.5;
  long long plateau_patience = -1;  // -1 = epochs / 10
  double plateau_rel_threshold = 1e-4;
  double exp_factor = 0.95;
  long long exp_every = 1000;
  double lambda_b = 1.0;
  double lambda_i = 1.0;
  std::uint64_t seed = 0;
  int n_interior = 0;
  int n_initial = 0;
  int n_boundary_per_face = 0;
  std::string interior_sampler = "uniform";

  void validate() const;
  LrScheduler make_scheduler() const;
  static TrainConfig from_defaults(const prob::ProblemDefaults& d,
                                   std::uint64_t seed);
};

struct LossRow {
  long long epoch = 0;
  LossParts parts;
  double lr = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  std::vector<LossRow> history;
  long long best_epoch = -1;
  double best_loss = 0.0;
  net::ParamStore best_params;
  double wall_seconds = 0.0;
  std::size_t positivity_flags = 0;  // last epoch's count

  /// "epoch,total,loss_L,loss_B,loss_I,lr"; rows where epoch%stride == 0.
  std::string loss_csv(int stride = 1) const;
};

/// Progress callback: (seed, epoch, total loss). May be empty.
using ProgressFn = std::function<void(std::uint64_t, long long, double)>;

/// Full-batch Adam over the assembled residual losses; samples its own
/// points and initializes from config.seed; returns the best-loss snapshot.
RunRecord train(const prob::ProblemDef& problem, const net::NetworkSpec& spec,
                const TrainConfig& config, util::ThreadPool& pool,
                const ProgressFn& progress = {});

/// Runs n_seeds trainings with seeds master_seed + k; individual failures
/// are recorded in the corresponding RunRecord, not rethrown.
std::vector<RunRecord> run_ensemble(const prob::ProblemDef& problem,
                                    const net::NetworkSpec& spec,
                                    const TrainConfig& config, int n_seeds,
                                    util::ThreadPool& pool,
                                    const ProgressFn& progress = {});

}  // namespace bspinn::train
