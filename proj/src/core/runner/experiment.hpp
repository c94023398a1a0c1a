#pragma once

#include "evaluation/metrics.hpp"
#include "runner/config.hpp"

namespace bspinn::run {

/// (seed, epoch, loss) progress events during solves.
using ProgressFn = train::ProgressFn;

struct ArchResult {
  net::NetworkSpec spec;
  eval::ErrorReport errors;  // over successful seeds
  std::vector<std::uint64_t> failed_seeds;
  std::string dir;
};

struct SolveResult {
  std::string out_dir;
  std::vector<ArchResult> archs;
};

/// Trains every architecture over the seed ensemble, writes all artifacts
/// (config snapshot, seed list, loss CSVs, checkpoints, summaries, report),
/// and returns the per-architecture error reports.
SolveResult run_solve(const Resolved& r, const ProgressFn& progress = {});

/// Relative error of a trained parameter vector under the problem's
/// evaluation convention.
double evaluate_params(const Resolved& r, const net::NetworkSpec& spec,
                       std::span<const double> params,
                       util::ThreadPool& pool);

struct EvaluateOptions {
  std::string fields_path;    // nonempty: write prediction field CSV
  std::string channels_path;  // nonempty: write channel field CSVs (prefix)
};

/// Loads a checkpoint, validates it against the problem, and evaluates it.
double run_evaluate(const Resolved& r, const std::string& checkpoint_path,
                    const EvaluateOptions& options = {});

/// Burgers reference grid (coordinates + values) in grid_nodes order;
/// validates the node coordinates against the expected grid.
std::vector<double> load_reference_grid(const std::string& path,
                                        const sample::PointSet& grid);

}  // namespace bspinn::run
