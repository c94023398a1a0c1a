// Acceptance suite: one pass/fail line per criterion. Runs everything by
// default; pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "autodiff/tangent.hpp"
#include "evaluation/fields.hpp"
#include "evaluation/transition.hpp"
#include "network/checkpoint.hpp"
#include "network/forward.hpp"
#include "network/masked.hpp"
#include "runner/experiment.hpp"
#include "sampling/quadrature.hpp"
#include "support/oracles.hpp"
#include "util/text.hpp"

using namespace bspinn;
namespace fs = std::filesystem;

namespace {

struct Checker {
  int failures = 0;
  std::chrono::steady_clock::time_point start;

  void begin(int n, const char* what) {
    std::printf("criterion %2d: %s\n", n, what);
    std::fflush(stdout);
    start = std::chrono::steady_clock::now();
  }
  void result(int n, bool pass, const std::string& detail) {
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %2d (%.1fs): %s\n", pass ? "PASS" : "FAIL", n,
                sec, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
  }
};

std::string fmt(double v) { return util::format_double(v); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// --------------------------------------------------------------- 1
void criterion_1(Checker& ck) {
  ck.begin(1, "parameter-count golden values");
  bool pass = true;
  std::ostringstream detail;
  const struct {
    const char* arch;
    int in, out;
    long long want;
  } cases[] = {
      {"fnn:4*32", 2, 1, 3297},
      {"bsnn:32-4", 2, 1, 2017},
      {"fnn:5*512", 3, 1, 1053185},
      {"bsnn:512-32", 3, 1, 496129},
  };
  for (const auto& c : cases) {
    const auto got = static_cast<long long>(
        net::param_count(net::NetworkSpec::parse_arch(c.arch, c.in, c.out)));
    if (got != c.want) pass = false;
    detail << c.arch << "=" << got << (got == c.want ? " " : "(!) ");
  }
  ck.result(1, pass, detail.str());
}

// --------------------------------------------------------------- 2
void criterion_2(Checker& ck) {
  ck.begin(2, "BsNN forward == block-masked FNN forward (100 random triples)");
  util::Rng rng(20240202);
  double worst = 0.0;
  int trials = 0;
  while (trials < 100) {
    const int B = 8 << rng.index(4);  // 8..64
    int b = 4;
    while ((b << 1) <= B && rng.index(2) == 1) b <<= 1;
    const int in_dim = 1 + static_cast<int>(rng.index(4));
    const int out_dim = 1 + static_cast<int>(rng.index(3));
    const auto spec = net::NetworkSpec::parse_arch(
        "bsnn:" + std::to_string(B) + "-" + std::to_string(b), in_dim, out_dim,
        net::Activation::kTanh);
    const auto masked = net::to_masked_fnn(spec);
    const auto params = net::init_params(spec, 7000 + trials);
    const auto dense =
        oracles::embed_bsnn_params(spec, params.values(), masked.fnn);
    net::NetworkEvaluator eval(spec, params.values());
    const auto x = oracles::random_vector(rng, in_dim, -2.0, 2.0);
    const auto got = eval.predict(x);
    const auto want = oracles::dense_forward(masked.fnn, dense, x, &masked.masks);
    for (int k = 0; k < out_dim; ++k) {
      worst = std::max(worst, std::abs(got[k] - want[k]));
    }
    ++trials;
  }
  ck.result(2, worst < 1e-12, "max abs deviation " + fmt(worst));
}

// --------------------------------------------------------------- 3
void criterion_3(Checker& ck) {
  ck.begin(3, "gradients and jets vs finite-difference oracles "
              "(100 nets per activation)");
  util::Rng rng(314159);
  double worst_grad = 0.0, worst_j1 = 0.0, worst_j2 = 0.0;
  const char* archs[] = {"fnn:1*8", "fnn:2*8", "fnn:1*16", "fnn:3*6"};
  for (const auto act : {net::Activation::kTanh, net::Activation::kSin,
                         net::Activation::kSigmoid}) {
    for (int trial = 0; trial < 100; ++trial) {
      const int in_dim = 2 + static_cast<int>(rng.index(2));
      const auto spec = net::NetworkSpec::parse_arch(
          archs[rng.index(4)], in_dim, 1, act);
      const auto params = net::init_params(spec, 40000 + trial);
      ad::Graph g;
      const auto xs = g.inputs(in_dim);
      const auto out = net::build_forward(g, spec, xs);
      const auto point = oracles::random_vector(rng, in_dim);

      // Parameter gradient of out^2 against central differences.
      const ad::Expr loss = square(out[0]);
      const auto grad = g.grad_params(loss, point, params.values());
      const auto fd = oracles::fd_gradient(
          [&](std::span<const double> p) { return g.eval(loss, point, p); },
          std::vector<double>(params.values().begin(), params.values().end()));
      for (std::size_t i = 0; i < grad.size(); ++i) {
        worst_grad = std::max(worst_grad, oracles::rel_err(grad[i], fd[i]));
      }

      // First and second input derivatives against 5-point stencils.
      const int coord = static_cast<int>(rng.index(in_dim));
      const ad::Jet2 jet = ad::input_jet(out[0], xs[coord]);
      auto moved = point;
      const auto f = [&](double v) {
        moved[coord] = v;
        return g.eval(out[0], moved, params.values());
      };
      const double j1 = g.eval(jet.first, point, params.values());
      const double j2 = g.eval(jet.second, point, params.values());
      worst_j1 = std::max(worst_j1,
                          oracles::rel_err(j1, oracles::fd_first(f, point[coord])));
      worst_j2 = std::max(
          worst_j2, oracles::rel_err(j2, oracles::fd_second(f, point[coord])));
    }
  }
  const bool pass = worst_grad < 1e-4 && worst_j1 < 1e-4 && worst_j2 < 1e-4;
  ck.result(3, pass,
            "rel err: grad " + fmt(worst_grad) + ", jet1 " + fmt(worst_j1) +
                ", jet2 " + fmt(worst_j2));
}

// --------------------------------------------------------------- 4
void criterion_4(Checker& ck) {
  ck.begin(4, "exact-solution residuals < 1e-6 at 100 random points each");
  util::Rng rng(27182818);
  double worst = 0.0;
  std::ostringstream detail;

  const auto check_field = [&](const prob::ProblemDef& p,
                               const prob::FieldFn& field) {
    double local = 0.0;
    for (int i = 0; i < 100; ++i) {
      std::vector<double> pt(p.domain.dim());
      for (int d = 0; d < p.domain.dim(); ++d) {
        pt[d] = rng.uniform(p.domain.lo[d], p.domain.hi[d]);
      }
      ad::Graph g;
      const auto xs = g.inputs(p.domain.dim());
      const auto rs = p.interior.build(field, xs, {});
      for (const auto& r : rs) {
        local = std::max(local, std::abs(g.eval(r, pt)));
      }
    }
    return local;
  };

  {
    const auto p = prob::make_helmholtz2d({});
    const double e = check_field(p, p.exact_field);
    detail << "h2d " << fmt(e) << "  ";
    worst = std::max(worst, e);
  }
  {
    const auto p = prob::make_helmholtz3d({});
    const double e = check_field(p, p.exact_field);
    detail << "h3d " << fmt(e) << "  ";
    worst = std::max(worst, e);
  }
  {
    const auto p = prob::make_poisson({});
    const double e = check_field(p, p.exact_field);
    detail << "poisson10d " << fmt(e) << "  ";
    worst = std::max(worst, e);
  }
  {
    const auto p = prob::make_euler();
    double local = 0.0;
    int done = 0;
    while (done < 100) {
      const double pt[3] = {rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0),
                            rng.uniform(0.0, 2.0)};
      if (std::abs(pt[0] - (0.5 + 0.1 * pt[2])) < 0.02) continue;
      std::vector<double> state(4);
      p.exact({pt, 3}, state);
      const prob::FieldFn field = [&state](std::span<const ad::Expr> x) {
        ad::Graph& g = *x[0].graph();
        std::vector<ad::Expr> out;
        for (double v : state) out.push_back(g.constant(v));
        return out;
      };
      ad::Graph g;
      const auto xs = g.inputs(3);
      const auto rs = p.interior.build(field, xs, {});
      for (const auto& r : rs) {
        local = std::max(local, std::abs(g.eval(r, {pt, 3})));
      }
      ++done;
    }
    detail << "euler " << fmt(local);
    worst = std::max(worst, local);
  }
  ck.result(4, worst < 1e-6, detail.str());
}

// --------------------------------------------------------------- 5
void criterion_5(Checker& ck) {
  ck.begin(5, "Gauss-Legendre: degree-7 exactness (d <= 4) and 4^10 nodes");
  util::Rng rng(1618);
  double worst = 0.0;
  for (int d = 1; d <= 4; ++d) {
    for (int trial = 0; trial < 25; ++trial) {
      sample::BoxDomain dom;
      for (int k = 0; k < d; ++k) {
        const double lo = rng.uniform(-3.0, 1.0);
        dom.lo.push_back(lo);
        dom.hi.push_back(lo + rng.uniform(0.25, 3.0));
      }
      std::vector<int> degree(d);
      for (int& deg : degree) deg = static_cast<int>(rng.index(8));
      const auto rule = sample::gauss_legendre(dom, 4);
      double got = 0.0;
      for (std::size_t i = 0; i < rule.size(); ++i) {
        double term = rule.weights[i];
        for (int k = 0; k < d; ++k) term *= std::pow(rule.node(i)[k], degree[k]);
        got += term;
      }
      double want = 1.0;
      for (int k = 0; k < d; ++k) {
        const int n = degree[k] + 1;
        want *= (std::pow(dom.hi[k], n) - std::pow(dom.lo[k], n)) / n;
      }
      worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
    }
  }
  const auto rule10 = sample::gauss_legendre(sample::BoxDomain::cube(10, -1, 1), 4);
  const bool pass = worst < 1e-10 && rule10.size() == 1048576;
  ck.result(5, pass,
            "max rel error " + fmt(worst) + ", 10-D nodes " +
                std::to_string(rule10.size()));
}

// --------------------------------------------------------------- 6
void criterion_6(Checker& ck) {
  ck.begin(6, "LHS stratification and 10-D boundary counts");
  bool pass = true;
  for (const std::size_t n : {std::size_t{4}, std::size_t{100}, std::size_t{1000}}) {
    const auto dom = sample::BoxDomain::space_time({-1.0}, {1.0}, 0.0, 1.0);
    const auto set = sample::lhs_sample(dom, n, 600 + n);
    for (int d = 0; d < 2; ++d) {
      std::vector<int> counts(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double rel = (set.point(i)[d] - dom.lo[d]) / (dom.hi[d] - dom.lo[d]);
        const double nn = static_cast<double>(n);
        int bin = static_cast<int>(d == 1 ? std::ceil(rel * nn) - 1
                                          : std::floor(rel * nn));
        bin = std::clamp(bin, 0, static_cast<int>(n) - 1);
        counts[bin] += 1;
      }
      for (int c : counts) pass = pass && c == 1;
    }
  }
  const auto boundary =
      sample::boundary_sample(sample::BoxDomain::cube(10, -1.0, 1.0), 200, 61);
  std::vector<int> per_face(20, 0);
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    per_face[static_cast<std::size_t>(boundary.faces[i])] += 1;
  }
  bool faces_ok = boundary.size() == 4000;
  for (int c : per_face) faces_ok = faces_ok && c == 200;
  pass = pass && faces_ok;
  ck.result(6, pass,
            "stratification exact; boundary " + std::to_string(boundary.size()) +
                " points over 20 faces");
}

// --------------------------------------------------------------- 7
void criterion_7(Checker& ck, const std::string& out_root) {
  ck.begin(7, "scaled Helmholtz comparison (4*64 vs 64-8, 5000 epochs, 3 seeds)");
  prob::ProblemParams params;
  params.kappa = 2.0 * std::numbers::pi;
  const auto problem = prob::make_helmholtz2d(params);

  train::TrainConfig config;
  config.epochs = 5000;
  config.lr0 = 0.001;
  config.scheduler = prob::SchedulerKind::kPlateau;
  config.lambda_b = 100.0;
  config.lambda_i = 0.0;
  config.seed = 1;
  config.n_interior = 2000;
  config.n_boundary_per_face = 40;  // 160 boundary points
  config.interior_sampler = "uniform";

  util::ThreadPool pool;
  run::ExperimentConfig ec;
  ec.set("problem", "helmholtz2d");
  ec.set("kappa", util::format_double(*params.kappa));
  ec.set("eval_grid", "500,500");
  auto resolved = run::resolve(ec);

  bool converged = true;
  std::ostringstream detail;
  std::vector<double> med(2, 0.0);
  const char* arch_names[2] = {"fnn:4*64", "bsnn:64-8"};
  for (int a = 0; a < 2; ++a) {
    const auto spec = net::NetworkSpec::parse_arch(arch_names[a], 2, 1,
                                                   net::Activation::kSin);
    const auto records = train::run_ensemble(problem, spec, config, 3, pool);
    std::vector<double> errors;
    for (const auto& rec : records) {
      if (rec.failed) {
        converged = false;
        detail << arch_names[a] << " seed " << rec.seed << " failed; ";
        continue;
      }
      const double initial = rec.history.front().parts.total;
      if (!(rec.best_loss * 10.0 < initial)) {
        converged = false;
        detail << arch_names[a] << " seed " << rec.seed << " loss "
               << fmt(initial) << "->" << fmt(rec.best_loss) << " (<10x); ";
      }
      errors.push_back(
          run::evaluate_params(resolved, spec, rec.best_params.values(), pool));
      // Keep the trained snapshots for inspection.
      const std::string dir = out_root + "/criterion7/" +
                              (a == 0 ? "fnn_4x64" : "bsnn_64-8") + "/seed_" +
                              std::to_string(rec.seed);
      fs::create_directories(dir);
      util::write_file(dir + "/loss.csv", rec.loss_csv(10));
      net::save_checkpoint(dir + "/best.ckpt", rec.best_params, rec.seed,
                           rec.best_epoch);
    }
    med[a] = errors.empty() ? 1e9 : median(errors);
    detail << arch_names[a] << " median err " << fmt(med[a]) << "; ";
  }
  const bool pass = converged && med[1] < med[0] && med[1] < 0.15;
  ck.result(7, pass, detail.str());
}

// --------------------------------------------------------------- 8
void criterion_8(Checker& ck, const std::string& out_root) {
  ck.begin(8, "function-fit comparison (4*32 vs 32-4, 3000 iters, 3 seeds)");
  const auto problem = prob::make_fnfit();

  train::TrainConfig config = train::TrainConfig::from_defaults(problem.defaults, 1);
  config.epochs = 3000;

  util::ThreadPool pool;
  const int counts[2] = {201, 201};
  const auto grid = sample::grid_nodes(problem.domain, counts);
  std::vector<double> exact(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double v = 0.0;
    problem.exact(grid.point(i), {&v, 1});
    exact[i] = v;
  }
  // Discontinuity band: |x| in [0.88,0.92] or |y| in [0.58,0.62].
  std::vector<std::size_t> band;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ax = std::abs(grid.point(i)[0]);
    const double ay = std::abs(grid.point(i)[1]);
    if ((ax >= 0.88 && ax <= 0.92) || (ay >= 0.58 && ay <= 0.62)) {
      band.push_back(i);
    }
  }

  std::ostringstream detail;
  std::vector<double> med_l2(2, 1e9), med_band(2, 1e9);
  const char* arch_names[2] = {"fnn:4*32", "bsnn:32-4"};
  bool all_ok = true;
  for (int a = 0; a < 2; ++a) {
    const auto spec = net::NetworkSpec::parse_arch(arch_names[a], 2, 1,
                                                   net::Activation::kSigmoid);
    const auto records = train::run_ensemble(problem, spec, config, 3, pool);
    std::vector<double> l2s, band_maxes;
    for (const auto& rec : records) {
      if (rec.failed) {
        all_ok = false;
        continue;
      }
      const auto pred =
          eval::predict(spec, rec.best_params.values(), grid, pool);
      l2s.push_back(eval::relative_l2_grid(pred, exact));
      double band_max = 0.0;
      for (std::size_t i : band) {
        band_max = std::max(band_max, std::abs(pred[i] - exact[i]));
      }
      band_maxes.push_back(band_max);
      const std::string dir = out_root + "/criterion8/" +
                              (a == 0 ? "fnn_4x32" : "bsnn_32-4") + "/seed_" +
                              std::to_string(rec.seed);
      fs::create_directories(dir);
      net::save_checkpoint(dir + "/best.ckpt", rec.best_params, rec.seed,
                           rec.best_epoch);
    }
    if (!l2s.empty()) {
      med_l2[a] = median(l2s);
      med_band[a] = median(band_maxes);
    }
    detail << arch_names[a] << " l2 " << fmt(med_l2[a]) << " band "
           << fmt(med_band[a]) << "; ";
  }
  const bool pass = all_ok && med_l2[1] < med_l2[0] && med_band[1] < med_band[0];
  ck.result(8, pass, detail.str());
}

// --------------------------------------------------------------- 9
void criterion_9(Checker& ck) {
  ck.begin(9, "transition-point fraction decreases from 10k to 30k points");
  const auto domain = sample::BoxDomain::space_time({0, 0}, {1, 1}, 0.0, 2.0);
  const auto small = sample::uniform_sample(domain, 10000, 4242);
  const auto large = sample::uniform_sample(domain, 30000, 4242);
  const auto r_small = eval::transition_points(small, domain, 0.5, 0.1);
  const auto r_large = eval::transition_points(large, domain, 0.5, 0.1);
  const bool pass = r_large.ratio < r_small.ratio;
  ck.result(9, pass,
            "10k: " + fmt(100.0 * r_small.ratio) + "% (" +
                std::to_string(r_small.indices.size()) + "), 30k: " +
                fmt(100.0 * r_large.ratio) + "% (" +
                std::to_string(r_large.indices.size()) + ")");
}

// --------------------------------------------------------------- 10
void criterion_10(Checker& ck, const std::string& out_root) {
  ck.begin(10, "bit-for-bit reruns and best-checkpoint reload");
  const std::string out1 = out_root + "/criterion10/a";
  const std::string out2 = out_root + "/criterion10/b";
  fs::remove_all(out1);
  fs::remove_all(out2);

  run::ExperimentConfig config;
  config.set("problem", "helmholtz2d");
  config.set("kappa", util::format_double(2.0 * std::numbers::pi));
  config.set("arch", "bsnn:16-4");
  config.set("seeds", "2");
  config.set("epochs", "40");
  config.set("n_interior", "120");
  config.set("n_boundary", "10");
  config.set("eval_grid", "21,21");

  config.set("out_dir", out1);
  config.set("threads", "2");
  run::run_solve(run::resolve(config));
  config.set("out_dir", out2);
  config.set("threads", "1");  // pool size must not influence artifacts
  run::run_solve(run::resolve(config));

  bool identical = true;
  for (const char* rel :
       {"/bsnn_16-4/seed_1/loss.csv", "/bsnn_16-4/seed_2/loss.csv",
        "/bsnn_16-4/seed_1/best.ckpt", "/bsnn_16-4/seed_2/best.ckpt",
        "/bsnn_16-4/summary.csv", "/bsnn_16-4/lossband.csv", "/seeds.txt"}) {
    if (util::read_file(out1 + rel) != util::read_file(out2 + rel)) {
      identical = false;
    }
  }

  // Reloading the best checkpoint reproduces the best loss on the same
  // training points.
  const auto resolved = run::resolve(config);
  const auto ckpt = net::load_checkpoint(out1 + "/bsnn_16-4/seed_1/best.ckpt");
  auto tconf = resolved.tconf;
  tconf.seed = 1;
  const auto points = train::sample_points(
      resolved.problem, tconf.n_interior, tconf.n_boundary_per_face,
      tconf.n_initial, tconf.interior_sampler, tconf.seed);
  train::LossProgram program(resolved.problem, ckpt.params.spec(), points,
                             tconf.lambda_b, tconf.lambda_i);
  util::ThreadPool pool(2);
  const auto parts = program.value(ckpt.params.values(), pool);

  const std::string summary = util::read_file(out1 + "/bsnn_16-4/summary.csv");
  const auto line = util::split(summary, '\n')[1];
  const double recorded_best = util::parse_double(util::split(line, ',')[2]);
  const bool reload_ok = std::abs(parts.total - recorded_best) < 1e-10;

  ck.result(10, identical && reload_ok,
            std::string(identical ? "artifacts identical" : "artifact mismatch") +
                "; reloaded best loss " + fmt(parts.total) + " vs " +
                fmt(recorded_best));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  const auto want = [&](int n) {
    return selected.empty() || selected.count(n) > 0;
  };

  const std::string out_root = "acceptance_out";
  fs::create_directories(out_root);

  Checker ck;
  if (want(1)) criterion_1(ck);
  if (want(2)) criterion_2(ck);
  if (want(3)) criterion_3(ck);
  if (want(4)) criterion_4(ck);
  if (want(5)) criterion_5(ck);
  if (want(6)) criterion_6(ck);
  if (want(7)) criterion_7(ck, out_root);
  if (want(8)) criterion_8(ck, out_root);
  if (want(9)) criterion_9(ck);
  if (want(10)) criterion_10(ck, out_root);

  if (ck.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", ck.failures);
  }
  return ck.failures == 0 ? 0 : 1;
}
