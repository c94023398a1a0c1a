#include "runner/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "evaluation/bands.hpp"
#include "evaluation/fields.hpp"
#include "network/checkpoint.hpp"
#include "runner/report.hpp"
#include "util/rng.hpp"
#include "util/text.hpp"

namespace fs = std::filesystem;

namespace bspinn::run {

namespace {

std::string sanitize_arch(const std::string& arch) {
  std::string out = arch;
  for (char& ch : out) {
    if (ch == ':') ch = '_';
    if (ch == '*') ch = 'x';
  }
  return out;
}

/// Exact-solution values over a point set, one error component or all.
std::vector<double> exact_values(const prob::ProblemDef& problem,
                                 const sample::PointSet& points,
                                 bool all_components) {
  if (!problem.exact) {
    throw InvalidArgument(problem.name + ": no exact solution available");
  }
  const int out_dim = problem.output_dim;
  const int keep = all_components ? out_dim : 1;
  std::vector<double> values(points.size() * static_cast<std::size_t>(keep));
  std::vector<double> buf(out_dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    problem.exact(points.point(i), buf);
    if (all_components) {
      std::copy(buf.begin(), buf.end(),
                values.begin() + static_cast<std::ptrdiff_t>(i) * keep);
    } else {
      values[i] = buf[static_cast<std::size_t>(problem.error_component)];
    }
  }
  return values;
}

std::vector<double> select_component(std::span<const double> values,
                                     int out_dim, int component) {
  std::vector<double> out(values.size() / static_cast<std::size_t>(out_dim));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = values[i * static_cast<std::size_t>(out_dim) +
                    static_cast<std::size_t>(component)];
  }
  return out;
}

}  // namespace

std::vector<double> load_reference_grid(const std::string& path,
                                        const sample::PointSet& grid) {
  const std::string text = util::read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  // Header: coordinate names then the value column.
  const int dim = grid.dim;
  std::vector<double> values(grid.size(), 0.0);
  std::vector<bool> seen(grid.size(), false);

  // Recover the per-axis node lists; the grid is a tensor product.
  std::vector<std::vector<double>> axes(dim);
  {
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) {
      std::vector<double> axis;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = grid.point(i)[d];
        if (std::find(axis.begin(), axis.end(), v) == axis.end()) {
          axis.push_back(v);
        }
      }
      std::sort(axis.begin(), axis.end());
      axes[d] = std::move(axis);
      total *= axes[d].size();
    }
    if (total != grid.size()) {
      throw ParseError(path + ": grid axes do not form a tensor product");
    }
  }

  std::size_t row_count = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = util::trim(line);
    if (trimmed.empty()) continue;
    const auto parts = util::split(trimmed, ',');
    if (static_cast<int>(parts.size()) != dim + 1) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(dim + 1) + " columns");
    }
    std::size_t index = 0;
    for (int d = 0; d < dim; ++d) {
      const double v = util::parse_double(parts[d]);
      const auto& axis = axes[d];
      // Nearest axis node; tolerance relative to the axis spacing.
      std::size_t k = std::lower_bound(axis.begin(), axis.end(), v) -
                      axis.begin();
      if (k == axis.size() || (k > 0 && v - axis[k - 1] < axis[k] - v)) --k;
      const double spacing =
          axis.size() > 1 ? axis[1] - axis[0] : 1.0;
      if (std::abs(axis[k] - v) > 1e-6 * std::max(1.0, std::abs(spacing))) {
        throw ParseError(path + ":" + std::to_string(line_no) +
                         ": coordinate off the expected grid");
      }
      index = index * axis.size() + k;
    }
    if (seen[index]) {
      throw ParseError(path + ":" + std::to_string(line_no) +
                       ": duplicate grid node");
    }
    seen[index] = true;
    values[index] = util::parse_double(parts[dim]);
    ++row_count;
  }
  if (row_count != grid.size()) {
    throw ParseError(path + ": expected " + std::to_string(grid.size()) +
                     " rows matching the evaluation grid, got " +
                     std::to_string(row_count));
  }
  return values;
}

double evaluate_params(const Resolved& r, const net::NetworkSpec& spec,
                       std::span<const double> params,
                       util::ThreadPool& pool) {
  const prob::ProblemDef& problem = r.problem;

  if (r.eval_kind == prob::EvalKind::kQuadrature) {
    const auto rule = sample::gauss_legendre(problem.domain, r.quad_points);
    const auto program = net::NetworkProgram::build(spec);
    net::NetworkEvaluator net_eval(program, params);
    std::vector<double> buf(problem.output_dim);
    const eval::ScalarFn predicted = [&](std::span<const double> x) {
      return net_eval.predict(x)[0];
    };
    const eval::ScalarFn exact = [&](std::span<const double> x) {
      problem.exact(x, buf);
      return buf[0];
    };
    const auto err = r.eval_exact_debug
                         ? eval::relative_l2_quadrature(exact, exact, rule)
                         : eval::relative_l2_quadrature(predicted, exact, rule);
    return r.quad_sqrt ? err.sqrt_ratio : err.ratio;
  }

  sample::PointSet points;
  if (r.eval_kind == prob::EvalKind::kGrid) {
    points = sample::grid_nodes(problem.domain, r.eval_grid);
  } else {
    // Random interior + boundary points under the evaluation stream.
    const std::uint64_t seed = util::derive_seed(r.tconf.seed, util::kStreamEval);
    points = sample::uniform_sample(problem.domain, r.eval_points, seed);
    const int faces = 2 * problem.domain.space_dim();
    const std::size_t per_face =
        std::max<std::size_t>(1, static_cast<std::size_t>(r.eval_points) / faces);
    const auto boundary =
        sample::boundary_sample(problem.domain, per_face, seed + 1);
    points.data.insert(points.data.end(), boundary.data.begin(),
                       boundary.data.end());
  }

  const bool all = r.euler_all_fields && problem.output_dim > 1;
  std::vector<double> reference;
  if (problem.name == "burgers1d") {
    if (!r.burgers_ref) {
      throw InvalidArgument(
          "burgers1d: a reference solution grid is required; pass "
          "--burgers-ref <file> (config key burgers_ref)");
    }
    reference = load_reference_grid(*r.burgers_ref, points);
  } else {
    reference = exact_values(problem, points, all);
  }

  if (r.eval_exact_debug) {
    return eval::relative_l2_grid(reference, reference);
  }

  std::vector<double> predicted = eval::predict(spec, params, points, pool);
  if (problem.output_dim > 1 && !all) {
    predicted =
        select_component(predicted, problem.output_dim, problem.error_component);
  }
  return eval::relative_l2_grid(predicted, reference);
}

SolveResult run_solve(const Resolved& r, const ProgressFn& progress) {
  util::ThreadPool pool(r.threads <= 0 ? 0 : static_cast<unsigned>(r.threads));

  SolveResult result;
  result.out_dir = r.out_dir;
  fs::create_directories(r.out_dir);
  util::write_file(r.out_dir + "/config.txt", r.effective_text());
  {
    std::ostringstream seeds;
    for (int k = 0; k < r.n_seeds; ++k) {
      seeds << (r.tconf.seed + static_cast<std::uint64_t>(k)) << "\n";
    }
    util::write_file(r.out_dir + "/seeds.txt", seeds.str());
  }

  for (const net::NetworkSpec& spec : r.specs) {
    ArchResult arch;
    arch.spec = spec;
    arch.dir = r.out_dir + "/" + sanitize_arch(spec.arch_string());
    fs::create_directories(arch.dir);

    const auto records =
        train::run_ensemble(r.problem, spec, r.tconf, r.n_seeds, pool, progress);

    std::vector<double> errors;
    std::ostringstream summary_csv;
    std::ostringstream timing_csv;
    summary_csv << "seed,error,best_loss,best_epoch,failed\n";
    timing_csv << "seed,wall_seconds\n";
    std::size_t best_record = 0;
    double best_error = std::numeric_limits<double>::infinity();

    for (std::size_t k = 0; k < records.size(); ++k) {
      const train::RunRecord& rec = records[k];
      const std::string seed_dir =
          arch.dir + "/seed_" + std::to_string(rec.seed);
      fs::create_directories(seed_dir);
      if (rec.failed) {
        arch.failed_seeds.push_back(rec.seed);
        util::write_file(seed_dir + "/error.txt", rec.error + "\n");
        summary_csv << rec.seed << ",nan,nan,-1,1\n";
        continue;
      }
      util::write_file(seed_dir + "/loss.csv", rec.loss_csv(r.history_stride));
      net::save_checkpoint(seed_dir + "/best.ckpt", rec.best_params, rec.seed,
                           rec.best_epoch);
      if (rec.positivity_flags > 0) {
        util::write_file(seed_dir + "/diagnostics.txt",
                         "nonpositive density at " +
                             std::to_string(rec.positivity_flags) +
                             " interior points (final epoch)\n");
      }
      const double err =
          evaluate_params(r, spec, rec.best_params.values(), pool);
      errors.push_back(err);
      summary_csv << rec.seed << ',' << util::format_double(err) << ','
                  << util::format_double(rec.best_loss) << ',' << rec.best_epoch
                  << ",0\n";
      timing_csv << rec.seed << ',' << util::format_double(rec.wall_seconds)
                 << "\n";
      if (err < best_error) {
        best_error = err;
        best_record = k;
      }
    }

    if (!errors.empty()) {
      arch.errors = eval::ErrorReport::compute(errors);
      const eval::LossBand band = eval::loss_band(records);
      util::write_file(arch.dir + "/lossband.csv", band.to_csv());

      std::ostringstream txt;
      txt << "arch: " << spec.arch_string() << "\n"
          << "seeds: " << errors.size() << " ok, " << arch.failed_seeds.size()
          << " failed\n"
          << "relative_error: " << util::format_double(arch.errors.mean)
          << " +/- " << util::format_double(arch.errors.stddev) << "\n"
          << "best_error: "
          << util::format_double(arch.errors.per_seed[arch.errors.best_index])
          << "\n";
      util::write_file(arch.dir + "/summary.txt", txt.str());

      if (r.channels && spec.residual_blocks == 0 && spec.output_dim == 1) {
        // Channel maps of the minimum-error run over the evaluation grid.
        const train::RunRecord& best = records[best_record];
        const auto grid = sample::grid_nodes(r.problem.domain, r.eval_grid);
        const int group =
            spec.kind == net::NetworkSpec::Kind::kFnn ? r.channel_group : 0;
        const auto fields = eval::channel_fields(
            spec, best.best_params.values(), grid, group, pool);
        const std::string ch_dir = arch.dir + "/channels";
        fs::create_directories(ch_dir);
        for (std::size_t ch = 0; ch < fields.channels.size(); ++ch) {
          util::write_file(
              ch_dir + "/channel_" + std::to_string(ch) + ".csv",
              eval::field_csv(grid, fields.channels[ch], 1));
        }
        util::write_file(ch_dir + "/sum_check.csv",
                         eval::field_csv(grid, fields.sum_check, 1));
      }
    }
    util::write_file(arch.dir + "/summary.csv", summary_csv.str());
    util::write_file(arch.dir + "/timing.csv", timing_csv.str());
    result.archs.push_back(std::move(arch));
  }

  util::write_file(r.out_dir + "/report.txt", build_report(r.out_dir));
  return result;
}

double run_evaluate(const Resolved& r, const std::string& checkpoint_path,
                    const EvaluateOptions& options) {
  const net::Checkpoint ckpt = net::load_checkpoint(checkpoint_path);
  const net::NetworkSpec& spec = ckpt.params.spec();
  if (spec.input_dim != r.problem.domain.dim() ||
      spec.output_dim != r.problem.output_dim) {
    throw InvalidArgument(
        "checkpoint dimensions do not match the problem (" +
        std::to_string(spec.input_dim) + "->" + std::to_string(spec.output_dim) +
        " vs " + std::to_string(r.problem.domain.dim()) + "->" +
        std::to_string(r.problem.output_dim) + ")");
  }
  util::ThreadPool pool(r.threads <= 0 ? 0 : static_cast<unsigned>(r.threads));
  const double err = evaluate_params(r, spec, ckpt.params.values(), pool);

  if (!options.fields_path.empty()) {
    if (r.eval_kind == prob::EvalKind::kGrid) {
      const auto grid = sample::grid_nodes(r.problem.domain, r.eval_grid);
      const auto values = eval::predict(spec, ckpt.params.values(), grid, pool);
      util::write_file(options.fields_path,
                       eval::field_csv(grid, values, spec.output_dim));
    } else {
      throw InvalidArgument("field export requires a grid-based problem");
    }
  }
  if (!options.channels_path.empty()) {
    if (spec.residual_blocks != 0 || spec.output_dim != 1) {
      throw InvalidArgument("channel export needs a plain scalar network");
    }
    const auto grid = sample::grid_nodes(r.problem.domain, r.eval_grid);
    const int group =
        spec.kind == net::NetworkSpec::Kind::kFnn ? r.channel_group : 0;
    const auto fields =
        eval::channel_fields(spec, ckpt.params.values(), grid, group, pool);
    for (std::size_t ch = 0; ch < fields.channels.size(); ++ch) {
      util::write_file(options.channels_path + "_" + std::to_string(ch) + ".csv",
                       eval::field_csv(grid, fields.channels[ch], 1));
    }
  }
  return err;
}

}  // namespace bspinn::run
