#include "bspinn/bspinn.h"

#include <cstring>
#include <string>

#include "network/checkpoint.hpp"
#include "network/forward.hpp"
#include "runner/experiment.hpp"
#include "runner/report.hpp"
#include "util/text.hpp"

namespace {

thread_local std::string g_last_error;

bspinn_rc fail(bspinn_rc rc, const char* what) {
  g_last_error = what != nullptr ? what : "unknown error";
  return rc;
}

/* Exceptions are mapped to status codes at this boundary. */
template <typename Fn>
bspinn_rc guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BSPINN_OK;
  } catch (const bspinn::InvalidArgument& e) {
    return fail(BSPINN_ERR_INVALID_ARGUMENT, e.what());
  } catch (const bspinn::ParseError& e) {
    return fail(BSPINN_ERR_PARSE, e.what());
  } catch (const bspinn::IoError& e) {
    return fail(BSPINN_ERR_IO, e.what());
  } catch (const bspinn::NumericError& e) {
    return fail(BSPINN_ERR_NUMERIC, e.what());
  } catch (const std::exception& e) {
    return fail(BSPINN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BSPINN_ERR_INTERNAL, "unknown error");
  }
}

bspinn_rc require(bool ok, const char* what) {
  return ok ? BSPINN_OK : fail(BSPINN_ERR_INVALID_ARGUMENT, what);
}

bspinn_rc copy_out(const std::string& text, char* buffer, size_t length,
                   size_t* needed_out) {
  if (needed_out != nullptr) *needed_out = text.size() + 1;
  if (buffer == nullptr || length == 0) return BSPINN_OK;
  const size_t n = std::min(length - 1, text.size());
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
  if (n < text.size()) {
    return fail(BSPINN_ERR_INVALID_ARGUMENT, "buffer too small");
  }
  return BSPINN_OK;
}

}  // namespace

struct bspinn_network {
  bspinn::net::ParamStore params;
  uint64_t seed = 0;
  int64_t epoch = 0;
};

struct bspinn_experiment {
  bspinn::run::ExperimentConfig config;
  bspinn_progress_fn progress = nullptr;
  void* progress_user = nullptr;
};

extern "C" {

const char* bspinn_version(void) { return "bspinn 1.0.0"; }

const char* bspinn_last_error(void) { return g_last_error.c_str(); }

bspinn_rc bspinn_param_count(const char* arch, int input_dim, int output_dim,
                             int residual_blocks, int64_t* count_out) {
  if (auto rc = require(arch != nullptr && count_out != nullptr,
                        "arch and count_out must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    const auto spec = bspinn::net::NetworkSpec::parse_arch(
        arch, input_dim, output_dim, bspinn::net::Activation::kTanh,
        residual_blocks);
    *count_out = static_cast<int64_t>(bspinn::net::param_count(spec));
  });
}

bspinn_rc bspinn_network_create(const char* arch, int input_dim,
                                int output_dim, const char* activation,
                                int residual_blocks, bspinn_network** out) {
  if (auto rc = require(arch != nullptr && out != nullptr,
                        "arch and out must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  *out = nullptr;
  return guarded([&] {
    const auto act = activation != nullptr && *activation != '\0'
                         ? bspinn::net::parse_activation(activation)
                         : bspinn::net::Activation::kTanh;
    const auto spec = bspinn::net::NetworkSpec::parse_arch(
        arch, input_dim, output_dim, act, residual_blocks);
    auto* net = new bspinn_network;
    net->params = bspinn::net::ParamStore(spec);
    *out = net;
  });
}

void bspinn_network_free(bspinn_network* net) { delete net; }

bspinn_rc bspinn_network_init(bspinn_network* net, uint64_t seed) {
  if (auto rc = require(net != nullptr, "net must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    net->params = bspinn::net::init_params(net->params.spec(), seed);
    net->seed = seed;
    net->epoch = 0;
  });
}

bspinn_rc bspinn_network_param_count(const bspinn_network* net,
                                     int64_t* count_out) {
  if (auto rc = require(net != nullptr && count_out != nullptr,
                        "net and count_out must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  *count_out = static_cast<int64_t>(net->params.size());
  return BSPINN_OK;
}

bspinn_rc bspinn_network_get_params(const bspinn_network* net, double* buffer,
                                    int64_t length) {
  if (auto rc = require(net != nullptr && buffer != nullptr,
                        "net and buffer must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    if (length != static_cast<int64_t>(net->params.size())) {
      throw bspinn::InvalidArgument("parameter buffer length mismatch");
    }
    const auto values = net->params.values();
    std::memcpy(buffer, values.data(), values.size() * sizeof(double));
  });
}

bspinn_rc bspinn_network_set_params(bspinn_network* net, const double* buffer,
                                    int64_t length) {
  if (auto rc = require(net != nullptr && buffer != nullptr,
                        "net and buffer must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    if (length != static_cast<int64_t>(net->params.size())) {
      throw bspinn::InvalidArgument("parameter buffer length mismatch");
    }
    std::memcpy(net->params.values().data(), buffer,
                static_cast<size_t>(length) * sizeof(double));
  });
}

bspinn_rc bspinn_network_forward(bspinn_network* net, const double* points,
                                 int64_t n_points, int input_dim,
                                 double* values_out) {
  if (auto rc = require(net != nullptr && points != nullptr &&
                            values_out != nullptr && n_points > 0,
                        "bad forward arguments");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    const auto& spec = net->params.spec();
    if (input_dim != spec.input_dim) {
      throw bspinn::InvalidArgument("input_dim does not match the network");
    }
    bspinn::net::NetworkEvaluator eval(spec, net->params.values());
    for (int64_t i = 0; i < n_points; ++i) {
      const auto y = eval.predict(
          {points + i * input_dim, static_cast<size_t>(input_dim)});
      std::memcpy(values_out + i * spec.output_dim, y.data(),
                  y.size() * sizeof(double));
    }
  });
}

bspinn_rc bspinn_network_save(const bspinn_network* net, const char* path,
                              uint64_t seed, int64_t epoch) {
  if (auto rc = require(net != nullptr && path != nullptr,
                        "net and path must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded(
      [&] { bspinn::net::save_checkpoint(path, net->params, seed, epoch); });
}

bspinn_rc bspinn_network_load(const char* path, bspinn_network** out) {
  if (auto rc = require(path != nullptr && out != nullptr,
                        "path and out must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  *out = nullptr;
  return guarded([&] {
    auto ckpt = bspinn::net::load_checkpoint(path);
    auto* net = new bspinn_network;
    net->params = std::move(ckpt.params);
    net->seed = ckpt.seed;
    net->epoch = ckpt.epoch;
    *out = net;
  });
}

bspinn_rc bspinn_experiment_create(bspinn_experiment** out) {
  if (auto rc = require(out != nullptr, "out must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  *out = new bspinn_experiment;
  return BSPINN_OK;
}

void bspinn_experiment_free(bspinn_experiment* exp) { delete exp; }

bspinn_rc bspinn_experiment_load_file(bspinn_experiment* exp,
                                      const char* path) {
  if (auto rc = require(exp != nullptr && path != nullptr,
                        "exp and path must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    exp->config.load_text(bspinn::util::read_file(path));
  });
}

bspinn_rc bspinn_experiment_set(bspinn_experiment* exp, const char* key,
                                const char* value) {
  if (auto rc = require(exp != nullptr && key != nullptr && value != nullptr,
                        "exp, key, value must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] { exp->config.set(key, value); });
}

bspinn_rc bspinn_experiment_on_progress(bspinn_experiment* exp,
                                        bspinn_progress_fn fn, void* user) {
  if (auto rc = require(exp != nullptr, "exp must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  exp->progress = fn;
  exp->progress_user = user;
  return BSPINN_OK;
}

bspinn_rc bspinn_experiment_run(bspinn_experiment* exp) {
  if (auto rc = require(exp != nullptr, "exp must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    const auto resolved = bspinn::run::resolve(exp->config);
    bspinn::run::ProgressFn progress;
    if (exp->progress != nullptr) {
      auto* fn = exp->progress;
      auto* user = exp->progress_user;
      progress = [fn, user](uint64_t seed, long long epoch, double loss) {
        fn(user, seed, epoch, loss);
      };
    }
    bspinn::run::run_solve(resolved, progress);
  });
}

bspinn_rc bspinn_experiment_evaluate(bspinn_experiment* exp,
                                     const char* checkpoint_path,
                                     const char* fields_path,
                                     const char* channels_path,
                                     double* error_out) {
  if (auto rc = require(exp != nullptr && checkpoint_path != nullptr &&
                            error_out != nullptr,
                        "exp, checkpoint_path, error_out must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  return guarded([&] {
    const auto resolved = bspinn::run::resolve(exp->config);
    bspinn::run::EvaluateOptions options;
    if (fields_path != nullptr) options.fields_path = fields_path;
    if (channels_path != nullptr) options.channels_path = channels_path;
    *error_out = bspinn::run::run_evaluate(resolved, checkpoint_path, options);
  });
}

bspinn_rc bspinn_experiment_effective(bspinn_experiment* exp, char* buffer,
                                      size_t length, size_t* needed_out) {
  if (auto rc = require(exp != nullptr, "exp must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  std::string text;
  if (auto rc = guarded([&] {
        text = bspinn::run::resolve(exp->config).effective_text();
      });
      rc != BSPINN_OK) {
    return rc;
  }
  return copy_out(text, buffer, length, needed_out);
}

bspinn_rc bspinn_report(const char* root, char* buffer, size_t length,
                        size_t* needed_out) {
  if (auto rc = require(root != nullptr, "root must be non-null");
      rc != BSPINN_OK) {
    return rc;
  }
  std::string text;
  if (auto rc = guarded([&] { text = bspinn::run::build_report(root); });
      rc != BSPINN_OK) {
    return rc;
  }
  return copy_out(text, buffer, length, needed_out);
}

}  // extern "C"
