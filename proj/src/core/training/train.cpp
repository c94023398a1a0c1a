#include "training/train.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "training/adam.hpp"
#include "util/text.hpp"

namespace bspinn::train {

void TrainConfig::validate() const {
  if (epochs <= 0) throw InvalidArgument("train: epochs must be > 0");
  if (lr0 <= 0.0) throw InvalidArgument("train: lr0 must be > 0");
  if (plateau_factor <= 0.0 || plateau_factor >= 1.0) {
    throw InvalidArgument("train: plateau factor must be in (0,1)");
  }
  if (exp_factor <= 0.0 || exp_factor >= 1.0) {
    throw InvalidArgument("train: exponential factor must be in (0,1)");
  }
  if (lambda_b < 0.0 || lambda_i < 0.0) {
    throw InvalidArgument("train: loss weights must be >= 0");
  }
}

LrScheduler TrainConfig::make_scheduler() const {
  if (scheduler == prob::SchedulerKind::kExponential) {
    return LrScheduler::exponential(lr0, exp_factor, exp_every);
  }
  const long long patience =
      plateau_patience >= 0 ? plateau_patience : epochs / 10;
  return LrScheduler::plateau(lr0, plateau_factor, patience,
                              plateau_rel_threshold);
}

TrainConfig TrainConfig::from_defaults(const prob::ProblemDefaults& d,
                                       std::uint64_t seed) {
  TrainConfig c;
  c.epochs = d.epochs;
  c.lr0 = d.lr0;
  c.scheduler = d.scheduler;
  c.lambda_b = d.lambda_b;
  c.lambda_i = d.lambda_i;
  c.seed = seed;
  c.n_interior = d.n_interior;
  c.n_initial = d.n_initial;
  c.n_boundary_per_face = d.n_boundary_per_face;
  c.interior_sampler = d.interior_sampler;
  return c;
}

std::string RunRecord::loss_csv(int stride) const {
  if (stride < 1) stride = 1;
  std::ostringstream out;
  out << "epoch,total,loss_L,loss_B,loss_I,lr\n";
  for (const LossRow& row : history) {
    if (row.epoch % stride != 0) continue;
    out << row.epoch << ',' << util::format_double(row.parts.total) << ','
        << util::format_double(row.parts.interior) << ','
        << util::format_double(row.parts.boundary) << ','
        << util::format_double(row.parts.initial) << ','
        << util::format_double(row.lr) << '\n';
  }
  return out.str();
}

RunRecord train(const prob::ProblemDef& problem, const net::NetworkSpec& spec,
                const TrainConfig& config, util::ThreadPool& pool,
                const ProgressFn& progress) {
  config.validate();
  spec.validate();

  RunRecord record;
  record.seed = config.seed;
  const auto t0 = std::chrono::steady_clock::now();

  const PointBundle points =
      sample_points(problem, config.n_interior, config.n_boundary_per_face,
                    config.n_initial, config.interior_sampler, config.seed);
  net::ParamStore params = net::init_params(spec, config.seed);
  LossProgram program(problem, spec, points, config.lambda_b, config.lambda_i);

  AdamState adam(params.size());
  LrScheduler scheduler = config.make_scheduler();
  std::vector<double> grad(params.size(), 0.0);
  record.history.reserve(static_cast<std::size_t>(config.epochs));
  record.best_loss = std::numeric_limits<double>::infinity();
  record.best_params = params;

  for (long long epoch = 0; epoch < config.epochs; ++epoch) {
    const LossParts parts =
        program.value_and_gradient(params.values(), grad, pool);
    if (!std::isfinite(parts.total)) {
      throw NumericError("training diverged: non-finite loss at epoch " +
                         std::to_string(epoch));
    }
    const double lr = scheduler.lr();
    record.history.push_back(LossRow{epoch, parts, lr});
    if (parts.total < record.best_loss) {
      record.best_loss = parts.total;
      record.best_epoch = epoch;
      record.best_params = params;
    }
    record.positivity_flags = parts.positivity_flags;
    try {
      adam_step(adam, params.values(), grad, lr);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (epoch " +
                         std::to_string(epoch) + ")");
    }
    scheduler.observe(epoch, parts.total);
    if (progress) progress(config.seed, epoch, parts.total);
  }

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return record;
}

std::vector<RunRecord> run_ensemble(const prob::ProblemDef& problem,
                                    const net::NetworkSpec& spec,
                                    const TrainConfig& config, int n_seeds,
                                    util::ThreadPool& pool,
                                    const ProgressFn& progress) {
  if (n_seeds < 1) throw InvalidArgument("ensemble: n_seeds must be >= 1");
  std::vector<RunRecord> records;
  records.reserve(n_seeds);
  for (int k = 0; k < n_seeds; ++k) {
    TrainConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(k);
    try {
      records.push_back(train(problem, spec, run_config, pool, progress));
    } catch (const Error& e) {
      RunRecord failed;
      failed.seed = run_config.seed;
      failed.failed = true;
      failed.error = e.what();
      records.push_back(std::move(failed));
    }
  }
  return records;
}

}  // namespace bspinn::train
