#include "runner/config.hpp"

#include <cstdlib>
#include <sstream>

#include "util/text.hpp"

namespace bspinn::run {

namespace {

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("bad boolean value: '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& part : util::split(v, ',')) {
    out.push_back(static_cast<int>(util::parse_int(part)));
  }
  return out;
}

std::pair<double, double> parse_range(const std::string& v) {
  const auto parts = util::split(v, ',');
  if (parts.size() != 2) throw ParseError("expected 'lo,hi': '" + v + "'");
  return {util::parse_double(parts[0]), util::parse_double(parts[1])};
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const std::string value(util::trim(raw));
  if (key == "problem") {
    problem = value;
  } else if (key == "arch") {
    archs.clear();
    for (const auto& part : util::split(value, ',')) {
      const auto trimmed = util::trim(part);
      if (!trimmed.empty()) archs.emplace_back(trimmed);
    }
  } else if (key == "activation") {
    net::parse_activation(value);  // validate now
    activation = value;
  } else if (key == "residual_blocks") {
    residual_blocks = static_cast<int>(util::parse_int(value));
  } else if (key == "seeds") {
    n_seeds = static_cast<int>(util::parse_int(value));
  } else if (key == "master_seed") {
    master_seed = util::parse_uint64(value);
  } else if (key == "epochs") {
    epochs = util::parse_int(value);
  } else if (key == "lr0") {
    lr0 = util::parse_double(value);
  } else if (key == "scheduler") {
    if (value != "plateau" && value != "exponential") {
      throw ParseError("scheduler must be plateau or exponential");
    }
    scheduler = value;
  } else if (key == "lambda_b") {
    lambda_b = util::parse_double(value);
  } else if (key == "lambda_i") {
    lambda_i = util::parse_double(value);
  } else if (key == "n_interior") {
    n_interior = static_cast<int>(util::parse_int(value));
  } else if (key == "n_initial") {
    n_initial = static_cast<int>(util::parse_int(value));
  } else if (key == "n_boundary") {
    n_boundary = static_cast<int>(util::parse_int(value));
  } else if (key == "interior_sampler") {
    if (value != "uniform" && value != "lhs") {
      throw ParseError("interior_sampler must be uniform or lhs");
    }
    interior_sampler = value;
  } else if (key == "out_dir") {
    out_dir = value;
  } else if (key == "threads") {
    threads = static_cast<int>(util::parse_int(value));
  } else if (key == "history_stride") {
    history_stride = static_cast<int>(util::parse_int(value));
  } else if (key == "burgers_ref") {
    burgers_ref = value;
  } else if (key == "kappa") {
    kappa = util::parse_double(value);
  } else if (key == "dim") {
    dim = static_cast<int>(util::parse_int(value));
  } else if (key == "c") {
    c = util::parse_double(value);
  } else if (key == "domain") {
    domain = parse_range(value);
  } else if (key == "eval_grid") {
    eval_grid = parse_int_list(value);
  } else if (key == "eval_points") {
    eval_points = static_cast<int>(util::parse_int(value));
  } else if (key == "quad_points") {
    quad_points = static_cast<int>(util::parse_int(value));
  } else if (key == "channels") {
    channels = parse_bool(value);
  } else if (key == "channel_group") {
    channel_group = static_cast<int>(util::parse_int(value));
  } else if (key == "euler_all_fields") {
    euler_all_fields = parse_bool(value);
  } else if (key == "quad_sqrt") {
    quad_sqrt = parse_bool(value);
  } else if (key == "eval_exact_debug") {
    eval_exact_debug = parse_bool(value);
  } else {
    throw ParseError("unknown config key: '" + key + "'");
  }
}

void ExperimentConfig::load_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto trimmed = util::trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    try {
      set(std::string(util::trim(trimmed.substr(0, eq))),
          std::string(util::trim(trimmed.substr(eq + 1))));
    } catch (const ParseError& e) {
      throw ParseError("config line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  ExperimentConfig config;
  config.load_text(util::read_file(path));
  return config;
}

Resolved resolve(const ExperimentConfig& config) {
  if (config.problem.empty()) {
    throw InvalidArgument("config: problem is required");
  }
  prob::ProblemParams params;
  params.kappa = config.kappa;
  params.dim = config.dim;
  params.c = config.c;
  params.box = config.domain;

  Resolved r;
  r.problem = prob::make_problem(config.problem, params);
  const prob::ProblemDefaults& d = r.problem.defaults;

  const net::Activation act = config.activation
                                  ? net::parse_activation(*config.activation)
                                  : d.activation;
  const int rblocks = config.residual_blocks.value_or(d.residual_blocks);
  std::vector<std::string> arch_strings = config.archs;
  if (arch_strings.empty()) arch_strings = {d.arch_fnn, d.arch_bsnn};
  for (const auto& a : arch_strings) {
    r.specs.push_back(net::NetworkSpec::parse_arch(
        a, r.problem.domain.dim(), r.problem.output_dim, act, rblocks));
  }

  if (config.n_seeds < 1) throw InvalidArgument("config: seeds must be >= 1");
  r.n_seeds = config.n_seeds;

  r.tconf.epochs = config.epochs.value_or(d.epochs);
  r.tconf.lr0 = config.lr0.value_or(d.lr0);
  r.tconf.scheduler = config.scheduler
                          ? (*config.scheduler == "exponential"
                                 ? prob::SchedulerKind::kExponential
                                 : prob::SchedulerKind::kPlateau)
                          : d.scheduler;
  r.tconf.lambda_b = config.lambda_b.value_or(d.lambda_b);
  r.tconf.lambda_i = config.lambda_i.value_or(d.lambda_i);
  r.tconf.seed = config.master_seed;
  r.tconf.n_interior = config.n_interior.value_or(d.n_interior);
  r.tconf.n_initial = config.n_initial.value_or(d.n_initial);
  r.tconf.n_boundary_per_face = config.n_boundary.value_or(d.n_boundary_per_face);
  r.tconf.interior_sampler =
      config.interior_sampler.value_or(d.interior_sampler);
  r.tconf.validate();

  std::string out = config.out_dir.empty() ? "runs/" + r.problem.name
                                           : config.out_dir;
  if (const char* root = std::getenv("BSPINN_OUT_ROOT");
      root != nullptr && *root != '\0' && out.front() != '/') {
    out = std::string(root) + "/" + out;
  }
  r.out_dir = out;

  r.threads = config.threads;
  r.history_stride = std::max(1, config.history_stride);
  r.eval_kind = d.eval_kind;
  r.eval_grid = config.eval_grid.value_or(d.eval_grid);
  if (r.eval_kind == prob::EvalKind::kGrid &&
      static_cast<int>(r.eval_grid.size()) != r.problem.domain.dim()) {
    throw InvalidArgument("config: eval_grid must list one count per dimension");
  }
  r.eval_points = config.eval_points.value_or(d.eval_random_points);
  r.quad_points = config.quad_points.value_or(d.quad_points_per_dim);
  r.channel_group = config.channel_group.value_or(d.channel_group);
  r.channels = config.channels;
  r.euler_all_fields = config.euler_all_fields;
  r.quad_sqrt = config.quad_sqrt;
  r.eval_exact_debug = config.eval_exact_debug;
  r.burgers_ref = config.burgers_ref;
  r.kappa = config.kappa;
  r.dim_override = config.dim;
  r.c_override = config.c;
  r.domain_override = config.domain;

  if (config.burgers_ref && r.problem.name != "burgers1d") {
    throw InvalidArgument("config: burgers_ref only applies to burgers1d");
  }
  if (config.euler_all_fields && r.problem.name != "euler2d") {
    throw InvalidArgument("config: euler_all_fields only applies to euler2d");
  }
  return r;
}

std::string Resolved::effective_text() const {
  std::ostringstream out;
  out << "problem = " << problem.name << "\n";
  out << "arch =";
  for (std::size_t i = 0; i < specs.size(); ++i) {
    out << (i ? ", " : " ") << specs[i].arch_string();
  }
  out << "\n";
  out << "activation = " << net::activation_name(specs[0].activation) << "\n";
  out << "residual_blocks = " << specs[0].residual_blocks << "\n";
  out << "seeds = " << n_seeds << "\n";
  out << "master_seed = " << tconf.seed << "\n";
  out << "epochs = " << tconf.epochs << "\n";
  out << "lr0 = " << util::format_double(tconf.lr0) << "\n";
  out << "scheduler = "
      << (tconf.scheduler == prob::SchedulerKind::kExponential ? "exponential"
                                                               : "plateau")
      << "\n";
  out << "lambda_b = " << util::format_double(tconf.lambda_b) << "\n";
  out << "lambda_i = " << util::format_double(tconf.lambda_i) << "\n";
  out << "n_interior = " << tconf.n_interior << "\n";
  out << "n_initial = " << tconf.n_initial << "\n";
  out << "n_boundary = " << tconf.n_boundary_per_face << "\n";
  out << "interior_sampler = " << tconf.interior_sampler << "\n";
  out << "out_dir = " << out_dir << "\n";
  out << "threads = " << threads << "\n";
  out << "history_stride = " << history_stride << "\n";
  if (burgers_ref) out << "burgers_ref = " << *burgers_ref << "\n";
  if (kappa) out << "kappa = " << util::format_double(*kappa) << "\n";
  if (dim_override) out << "dim = " << *dim_override << "\n";
  if (c_override) out << "c = " << util::format_double(*c_override) << "\n";
  if (domain_override) {
    out << "domain = " << util::format_double(domain_override->first) << ","
        << util::format_double(domain_override->second) << "\n";
  }
  if (!eval_grid.empty()) {
    out << "eval_grid =";
    for (std::size_t i = 0; i < eval_grid.size(); ++i) {
      out << (i ? "," : " ") << eval_grid[i];
    }
    out << "\n";
  }
  out << "eval_points = " << eval_points << "\n";
  out << "quad_points = " << quad_points << "\n";
  out << "channels = " << (channels ? "true" : "false") << "\n";
  out << "channel_group = " << channel_group << "\n";
  out << "euler_all_fields = " << (euler_all_fields ? "true" : "false") << "\n";
  out << "quad_sqrt = " << (quad_sqrt ? "true" : "false") << "\n";
  out << "eval_exact_debug = " << (eval_exact_debug ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace bspinn::run
