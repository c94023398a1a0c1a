// bspinn command-line front end. Talks to the core exclusively through the
// C API in bspinn/bspinn.h.
#include <cinttypes>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bspinn/bspinn.h"

namespace {

int report_failure(bspinn_rc rc) {
  std::fprintf(stderr, "error: %s\n", bspinn_last_error());
  return rc == BSPINN_OK ? 1 : -static_cast<int>(rc);
}

struct ExperimentDeleter {
  void operator()(bspinn_experiment* e) const { bspinn_experiment_free(e); }
};
using ExperimentPtr = std::unique_ptr<bspinn_experiment, ExperimentDeleter>;

/// Collects config-key options shared by solve/fnfit/evaluate.
struct ConfigArgs {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string config_file;

  void add_flags(CLI::App* cmd, bool with_problem) {
    cmd->add_option("--config", config_file, "Config file (key = value lines)");
    if (with_problem) {
      add("--problem", "problem", "Problem name (fnfit, burgers1d, euler2d, "
                                  "helmholtz2d, helmholtz3d, poisson10d)",
          cmd);
    }
    add("--arch", "arch", "Architecture(s), e.g. fnn:5*256,bsnn:256-16", cmd);
    add("--activation", "activation", "tanh | sin | sigmoid", cmd);
    add("--residual-blocks", "residual_blocks", "Residual block count", cmd);
    add("--seeds", "seeds", "Ensemble size", cmd);
    add("--master-seed", "master_seed", "Base random seed", cmd);
    add("--epochs", "epochs", "Training iterations", cmd);
    add("--lr0", "lr0", "Initial learning rate", cmd);
    add("--scheduler", "scheduler", "plateau | exponential", cmd);
    add("--lambda-b", "lambda_b", "Boundary loss weight", cmd);
    add("--lambda-i", "lambda_i", "Initial loss weight", cmd);
    add("--n-interior", "n_interior", "Interior training points", cmd);
    add("--n-initial", "n_initial", "Initial-condition points", cmd);
    add("--n-boundary", "n_boundary", "Boundary points per face", cmd);
    add("--interior-sampler", "interior_sampler", "uniform | lhs", cmd);
    add("--out", "out_dir", "Output directory", cmd);
    add("--threads", "threads", "Worker threads (0 = hardware)", cmd);
    add("--history-stride", "history_stride", "Loss CSV row stride", cmd);
    add("--burgers-ref", "burgers_ref", "Burgers reference grid CSV", cmd);
    add("--kappa", "kappa", "Helmholtz wavenumber", cmd);
    add("--dim", "dim", "Poisson dimension", cmd);
    add("--c", "c", "Poisson frequency constant", cmd);
    add("--domain", "domain", "Box bounds lo,hi (helmholtz3d/poisson10d)", cmd);
    add("--eval-grid", "eval_grid", "Evaluation grid nodes per dim", cmd);
    add("--eval-points", "eval_points", "Random evaluation points", cmd);
    add("--quad-points", "quad_points", "Quadrature points per dim", cmd);
    add("--channels", "channels", "Export channel fields (true/false)", cmd);
    add("--channel-group", "channel_group", "FNN channel group size", cmd);
    add("--euler-all-fields", "euler_all_fields",
        "Error over all four Euler fields", cmd);
    add("--quad-sqrt", "quad_sqrt", "Report sqrt of the quadrature ratio", cmd);
    add("--exact-debug", "eval_exact_debug",
        "Evaluate the exact solution instead of the network", cmd);
  }

  bspinn_rc apply(bspinn_experiment* exp) const {
    if (!config_file.empty()) {
      if (auto rc = bspinn_experiment_load_file(exp, config_file.c_str());
          rc != BSPINN_OK) {
        return rc;
      }
    }
    for (const auto& [key, value] : pairs) {
      if (auto rc = bspinn_experiment_set(exp, key.c_str(), value.c_str());
          rc != BSPINN_OK) {
        return rc;
      }
    }
    return BSPINN_OK;
  }

 private:
  void add(const char* flag, std::string key, const char* help,
           CLI::App* cmd) {
    cmd->add_option_function<std::string>(
        flag,
        [this, key](const std::string& value) { pairs.emplace_back(key, value); },
        help);
  }
};

void print_progress(void*, uint64_t seed, int64_t epoch, double loss) {
  if (epoch % 500 == 0) {
    std::fprintf(stderr, "  seed %" PRIu64 "  epoch %lld  loss %.6g\n", seed,
                 static_cast<long long>(epoch), loss);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary-structured PINN laboratory"};
  app.require_subcommand(1);

  // solve / fnfit ----------------------------------------------------
  ConfigArgs solve_args;
  bool solve_quiet = false;
  CLI::App* solve = app.add_subcommand("solve", "Train and evaluate ensembles");
  solve_args.add_flags(solve, true);
  solve->add_flag("--quiet", solve_quiet, "Suppress progress output");

  ConfigArgs fnfit_args;
  bool fnfit_quiet = false;
  CLI::App* fnfit =
      app.add_subcommand("fnfit", "Function-approximation comparison "
                                  "(alias for solve --problem fnfit)");
  fnfit_args.add_flags(fnfit, false);
  fnfit->add_flag("--quiet", fnfit_quiet, "Suppress progress output");

  // evaluate ----------------------------------------------------------
  ConfigArgs eval_args;
  std::string eval_checkpoint, eval_fields, eval_channels;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Evaluate a checkpoint's relative error");
  evaluate->add_option("checkpoint", eval_checkpoint, "Checkpoint file")
      ->required();
  eval_args.add_flags(evaluate, true);
  evaluate->add_option("--fields", eval_fields, "Write the prediction field CSV");
  evaluate->add_option("--channels-out", eval_channels,
                       "Write channel field CSVs with this prefix");

  // paramcount ----------------------------------------------------------
  std::string pc_arch;
  int pc_in = 2, pc_out = 1, pc_blocks = 0;
  CLI::App* paramcount =
      app.add_subcommand("paramcount", "Print a network's parameter count");
  paramcount->add_option("arch", pc_arch, "fnn:<n>*<w> or bsnn:<B>-<b>")
      ->required();
  paramcount->add_option("input_dim", pc_in, "Input dimension")->required();
  paramcount->add_option("output_dim", pc_out, "Output dimension")->required();
  paramcount->add_option("--residual-blocks", pc_blocks, "Residual blocks");

  // report ----------------------------------------------------------
  std::string report_root = ".";
  CLI::App* report =
      app.add_subcommand("report", "Aggregate summaries across run directories");
  report->add_option("root", report_root, "Directory to scan");

  CLI11_PARSE(app, argc, argv);

  if (*paramcount) {
    int64_t count = 0;
    if (auto rc = bspinn_param_count(pc_arch.c_str(), pc_in, pc_out, pc_blocks,
                                     &count);
        rc != BSPINN_OK) {
      return report_failure(rc);
    }
    std::printf("%lld\n", static_cast<long long>(count));
    return 0;
  }

  if (*report) {
    size_t needed = 0;
    if (auto rc = bspinn_report(report_root.c_str(), nullptr, 0, &needed);
        rc != BSPINN_OK) {
      return report_failure(rc);
    }
    std::string text(needed, '\0');
    if (auto rc = bspinn_report(report_root.c_str(), text.data(), text.size(),
                                &needed);
        rc != BSPINN_OK) {
      return report_failure(rc);
    }
    std::fputs(text.c_str(), stdout);
    return 0;
  }

  ExperimentPtr exp;
  {
    bspinn_experiment* raw = nullptr;
    if (auto rc = bspinn_experiment_create(&raw); rc != BSPINN_OK) {
      return report_failure(rc);
    }
    exp.reset(raw);
  }

  if (*solve || *fnfit) {
    const ConfigArgs& args = *solve ? solve_args : fnfit_args;
    const bool quiet = *solve ? solve_quiet : fnfit_quiet;
    if (*fnfit) {
      if (auto rc = bspinn_experiment_set(exp.get(), "problem", "fnfit");
          rc != BSPINN_OK) {
        return report_failure(rc);
      }
    }
    if (auto rc = args.apply(exp.get()); rc != BSPINN_OK) {
      return report_failure(rc);
    }
    if (!quiet) {
      bspinn_experiment_on_progress(exp.get(), &print_progress, nullptr);
    }
    size_t needed = 0;
    bspinn_experiment_effective(exp.get(), nullptr, 0, &needed);
    std::string effective(needed, '\0');
    if (auto rc = bspinn_experiment_effective(exp.get(), effective.data(),
                                              effective.size(), &needed);
        rc != BSPINN_OK) {
      return report_failure(rc);
    }
    std::fputs(effective.c_str(), stdout);
    if (auto rc = bspinn_experiment_run(exp.get()); rc != BSPINN_OK) {
      return report_failure(rc);
    }
    std::printf("done\n");
    return 0;
  }

  // evaluate
  if (auto rc = eval_args.apply(exp.get()); rc != BSPINN_OK) {
    return report_failure(rc);
  }
  double error = 0.0;
  if (auto rc = bspinn_experiment_evaluate(
          exp.get(), eval_checkpoint.c_str(),
          eval_fields.empty() ? nullptr : eval_fields.c_str(),
          eval_channels.empty() ? nullptr : eval_channels.c_str(), &error);
      rc != BSPINN_OK) {
    return report_failure(rc);
  }
  std::printf("relative_error %.17g\n", error);
  return 0;
}
