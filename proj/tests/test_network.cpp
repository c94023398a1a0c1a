#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "network/checkpoint.hpp"
#include "network/forward.hpp"
#include "network/masked.hpp"
#include "support/oracles.hpp"

using namespace bspinn;

TEST_CASE("parameter-count golden values") {
  using net::NetworkSpec;
  CHECK(net::param_count(NetworkSpec::parse_arch("fnn:4*32", 2, 1)) == 3297);
  CHECK(net::param_count(NetworkSpec::parse_arch("bsnn:32-4", 2, 1)) == 2017);
  CHECK(net::param_count(NetworkSpec::parse_arch("fnn:5*512", 3, 1)) == 1053185);
  CHECK(net::param_count(NetworkSpec::parse_arch("bsnn:512-32", 3, 1)) == 496129);
  CHECK(net::param_count(NetworkSpec::parse_arch("fnn:4*8", 2, 1)) ==
        net::param_count(net::to_masked_fnn(
                             NetworkSpec::parse_arch("bsnn:8-1", 2, 1))
                             .fnn));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(net::NetworkSpec::parse_arch("bsnn:8-16", 2, 1), InvalidArgument);
  CHECK_THROWS_AS(net::NetworkSpec::parse_arch("bsnn:12-4", 2, 1), InvalidArgument);
  CHECK_THROWS_AS(net::NetworkSpec::parse_arch("fnn:0*8", 2, 1), InvalidArgument);
  CHECK_THROWS_AS(net::NetworkSpec::parse_arch("mlp:4*8", 2, 1), ParseError);
  CHECK_THROWS_AS(net::NetworkSpec::parse_arch("fnn:4x8", 2, 1), ParseError);
  net::NetworkSpec degenerate;  // zero dims
  CHECK_THROWS_AS(degenerate.validate(), InvalidArgument);
}

TEST_CASE("BsNN structure") {
  const auto spec = net::NetworkSpec::parse_arch("bsnn:32-4", 2, 1);
  CHECK(spec.hidden_layer_count() == 4);
  for (int l = 0; l < 4; ++l) {
    CHECK(spec.blocks_in_layer(l) * spec.block_size(l) == 32);
  }
  // 32-4 with input 2: last hidden layer has 8 blocks of size 4.
  CHECK(spec.blocks_in_layer(3) == 8);
  CHECK(spec.block_size(3) == 4);
  // 256-16: 16 channels.
  const auto big = net::NetworkSpec::parse_arch("bsnn:256-16", 2, 1);
  CHECK(big.blocks_in_layer(big.hidden_layer_count() - 1) == 16);
}

TEST_CASE("init_params bounds and determinism") {
  const auto spec = net::NetworkSpec::parse_arch("fnn:1*1", 1, 1);
  const auto store = net::init_params(spec, 123);
  CHECK(store.size() == 4);  // fan_in 1 everywhere: range [-1, 1]
  for (double v : store.values()) {
    CHECK(std::abs(v) <= 1.0);
  }

  const auto again = net::init_params(spec, 123);
  CHECK(std::vector<double>(store.values().begin(), store.values().end()) ==
        std::vector<double>(again.values().begin(), again.values().end()));

  const auto other = net::init_params(spec, 124);
  bool any_diff = false;
  for (std::size_t i = 0; i < store.size(); ++i) {
    any_diff = any_diff || store.values()[i] != other.values()[i];
  }
  CHECK(any_diff);

  // Per-map fan-in bound: layer with 32 inputs stays within 1/sqrt(32).
  const auto wide = net::NetworkSpec::parse_arch("fnn:2*32", 2, 1);
  const auto ws = net::init_params(wide, 7);
  const auto& slice = ws.layout().slices[1];
  const double bound = 1.0 / std::sqrt(32.0);
  for (int i = 0; i < slice.rows * slice.cols; ++i) {
    CHECK(std::abs(ws.values()[slice.weight_begin + i]) <= bound);
  }
}

TEST_CASE("forward_fnn basics") {
  SUBCASE("all-zero parameters give zero output") {
    const auto spec = net::NetworkSpec::parse_arch("fnn:2*8", 2, 1);
    const net::ParamStore zeros(spec);
    net::NetworkEvaluator eval(spec, zeros.values());
    const double x[2] = {0.3, -0.9};
    CHECK(eval.predict({x, 2})[0] == 0.0);
  }
  SUBCASE("1*1 identity-shaped tanh net at zero") {
    const auto spec = net::NetworkSpec::parse_arch("fnn:1*1", 1, 1,
                                                   net::Activation::kTanh);
    net::ParamStore ps(spec);
    ps.values()[0] = 1.0;  // w0
    ps.values()[1] = 0.0;  // b0
    ps.values()[2] = 1.0;  // w1
    ps.values()[3] = 0.0;  // b1
    net::NetworkEvaluator eval(spec, ps.values());
    const double zero = 0.0;
    CHECK(eval.predict({&zero, 1})[0] == 0.0);
    const double one = 1.0;
    CHECK(eval.predict({&one, 1})[0] == doctest::Approx(std::tanh(1.0)));
  }
  SUBCASE("matches the hand-rolled reference forward") {
    util::Rng rng(19);
    const auto spec = net::NetworkSpec::parse_arch("fnn:2*16", 3, 2,
                                                   net::Activation::kTanh);
    const auto params = net::init_params(spec, 5);
    net::NetworkEvaluator eval(spec, params.values());
    for (int i = 0; i < 10; ++i) {
      const auto x = oracles::random_vector(rng, 3);
      const auto got = eval.predict(x);
      const auto want = oracles::dense_forward(spec, params.values(), x);
      for (int k = 0; k < 2; ++k) {
        CHECK(std::abs(got[k] - want[k]) < 1e-12);
      }
    }
  }
}

TEST_CASE("forward_bsnn equals the masked-FNN oracle") {
  util::Rng rng(31);
  int trials = 0;
  for (int B_exp = 3; B_exp <= 6; ++B_exp) {     // B in {8,...,64}
    for (int b_exp = 2; b_exp <= B_exp; ++b_exp) {  // b >= 4
      const int B = 1 << B_exp;
      const int b = 1 << b_exp;
      for (int rep = 0; rep < 8; ++rep) {
        const int in_dim = 1 + static_cast<int>(rng.index(4));
        const int out_dim = 1 + static_cast<int>(rng.index(3));
        const auto spec = net::NetworkSpec::parse_arch(
            "bsnn:" + std::to_string(B) + "-" + std::to_string(b), in_dim,
            out_dim, net::Activation::kTanh);
        const auto masked = net::to_masked_fnn(spec);
        const auto params = net::init_params(spec, 900 + trials);
        const auto dense =
            oracles::embed_bsnn_params(spec, params.values(), masked.fnn);
        net::NetworkEvaluator eval(spec, params.values());
        const auto x = oracles::random_vector(rng, in_dim);
        const auto got = eval.predict(x);
        const auto want =
            oracles::dense_forward(masked.fnn, dense, x, &masked.masks);
        for (int k = 0; k < out_dim; ++k) {
          CHECK(std::abs(got[k] - want[k]) < 1e-12);
        }
        ++trials;
      }
    }
  }
  CHECK(trials >= 100);
}

TEST_CASE("mask structure for 32-4") {
  const auto spec = net::NetworkSpec::parse_arch("bsnn:32-4", 2, 1);
  const auto masked = net::to_masked_fnn(spec);
  REQUIRE(masked.masks.size() == 5);  // input + 3 hidden-to-hidden + output
  // Densities of the hidden-to-hidden maps: the first is fully connected
  // (one parent block), then halves per layer.
  const double expect[3] = {1.0, 0.5, 0.25};
  for (int m = 1; m <= 3; ++m) {
    std::size_t ones = 0;
    for (auto v : masked.masks[m]) ones += v;
    CHECK(static_cast<double>(ones) / (32.0 * 32.0) ==
          doctest::Approx(expect[m - 1]));
  }
  // Unmasked entries + biases match the BsNN parameter count.
  std::size_t unmasked = 0;
  for (const auto& mask : masked.masks) {
    for (auto v : mask) unmasked += v;
  }
  const std::size_t biases = 4 * 32 + 1;
  CHECK(unmasked + biases == net::param_count(spec));
}

TEST_CASE("channel decomposition") {
  const auto spec = net::NetworkSpec::parse_arch("bsnn:16-4", 2, 1,
                                                 net::Activation::kSin);
  auto params = net::init_params(spec, 3);
  const double x[2] = {0.4, 0.7};

  const auto channels = net::channel_outputs(spec, params, {x, 2});
  CHECK(channels.contributions.size() == 4);

  net::NetworkEvaluator eval(spec, params.values());
  double sum = channels.bias;
  for (double c : channels.contributions) sum += c;
  CHECK(std::abs(sum - eval.predict({x, 2})[0]) < 1e-12);

  // Zeroing one block's output-weight slice zeroes exactly that channel.
  const auto& layout = params.layout();
  const auto& out_slice = layout.slices.back();
  const int group = spec.block_size(spec.hidden_layer_count() - 1);
  for (int c = 0; c < group; ++c) {
    params.values()[out_slice.weight_begin + 1 * group + c] = 0.0;
  }
  const auto zeroed = net::channel_outputs(spec, params, {x, 2});
  CHECK(zeroed.contributions[1] == 0.0);
  CHECK(zeroed.contributions[0] == channels.contributions[0]);
  CHECK(zeroed.contributions[2] == channels.contributions[2]);

  // FNN grouping must divide the width.
  const auto fnn = net::NetworkSpec::parse_arch("fnn:2*16", 2, 1);
  const net::ParamStore fp(fnn);
  CHECK_THROWS_AS(net::channel_outputs(fnn, fp, {x, 2}, 5), InvalidArgument);
  CHECK(net::channel_outputs(fnn, fp, {x, 2}, 4).contributions.size() == 4);
}

TEST_CASE("activation wiring: hidden bounded, output affine") {
  const auto spec = net::NetworkSpec::parse_arch("fnn:2*8", 1, 1,
                                                 net::Activation::kTanh);
  auto params = net::init_params(spec, 17);
  net::NetworkEvaluator eval(spec, params.values());
  const double huge = 1e6;
  const double y0 = eval.predict({&huge, 1})[0];
  // Hidden tanh saturates, so the output is bounded by the final map.
  const auto& out_slice = params.layout().slices.back();
  double bound = std::abs(params.values()[out_slice.bias_begin]);
  for (int c = 0; c < out_slice.cols; ++c) {
    bound += std::abs(params.values()[out_slice.weight_begin + c]);
  }
  CHECK(std::abs(y0) <= bound + 1e-12);

  // The final layer is affine: shifting its bias shifts the output exactly.
  params.values()[out_slice.bias_begin] += 42.0;
  net::NetworkEvaluator shifted(spec, params.values());
  CHECK(shifted.predict({&huge, 1})[0] == doctest::Approx(y0 + 42.0).epsilon(1e-15));
}

TEST_CASE("residual networks") {
  SUBCASE("zero-parameter blocks reduce to lift + final") {
    const auto res = net::NetworkSpec::parse_arch("fnn:2*8", 2, 1,
                                                  net::Activation::kTanh, 2);
    const auto plain = net::NetworkSpec::parse_arch("fnn:2*8", 2, 1,
                                                    net::Activation::kTanh, 0);
    auto params = net::init_params(res, 4);
    // Zero everything except the lift and final maps.
    const auto& layout = params.layout();
    const std::size_t lift_end = layout.slices[0].bias_begin + 8;
    const auto& final_slice = layout.slices.back();
    for (std::size_t i = lift_end; i < final_slice.weight_begin; ++i) {
      params.values()[i] = 0.0;
    }
    net::NetworkEvaluator eval(res, params.values());

    // Reference: lift + final with the same slices.
    const double x[2] = {0.3, 0.5};
    std::vector<double> hidden(8, 0.0);
    for (int r = 0; r < 8; ++r) {
      double acc = params.values()[layout.slices[0].bias_begin + r];
      for (int c = 0; c < 2; ++c) {
        acc += params.values()[layout.slices[0].weight_begin + r * 2 + c] * x[c];
      }
      hidden[r] = std::tanh(acc);
    }
    double out = params.values()[final_slice.bias_begin];
    for (int c = 0; c < 8; ++c) {
      out += params.values()[final_slice.weight_begin + c] * hidden[c];
    }
    CHECK(eval.predict({x, 2})[0] == doctest::Approx(out).epsilon(1e-14));
    CHECK(net::param_count(res) > net::param_count(plain));
  }

  SUBCASE("finite-difference gradient check on a 2-block residual net") {
    const auto spec = net::NetworkSpec::parse_arch("bsnn:8-2", 2, 1,
                                                   net::Activation::kSin, 2);
    const auto params = net::init_params(spec, 12);
    ad::Graph g;
    const auto xs = g.inputs(2);
    const auto out = net::build_forward(g, spec, xs);
    const ad::Expr loss = square(out[0]);
    const double at[2] = {0.2, -0.4};
    const auto grad = g.grad_params(loss, {at, 2}, params.values());
    const auto fd = oracles::fd_gradient(
        [&](std::span<const double> p) { return g.eval(loss, {at, 2}, p); },
        std::vector<double>(params.values().begin(), params.values().end()));
    double worst = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      worst = std::max(worst, oracles::rel_err(grad[i], fd[i]));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("checkpoint round-trip is bit exact") {
  const auto spec = net::NetworkSpec::parse_arch("bsnn:16-2", 3, 2,
                                                 net::Activation::kSin, 1);
  const auto params = net::init_params(spec, 2024);
  const std::string text = net::checkpoint_to_string(params, 2024, 777);
  const auto back = net::checkpoint_from_string(text);
  CHECK(back.seed == 2024);
  CHECK(back.epoch == 777);
  CHECK(back.params.spec().arch_string() == spec.arch_string());
  CHECK(back.params.spec().residual_blocks == 1);
  REQUIRE(back.params.size() == params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    // Bitwise equality, not approximate.
    CHECK(std::memcmp(&back.params.values()[i], &params.values()[i],
                      sizeof(double)) == 0);
  }

  const auto path = std::filesystem::temp_directory_path() / "bspinn_ckpt_test";
  net::save_checkpoint(path.string(), params, 1, 2);
  const auto loaded = net::load_checkpoint(path.string());
  CHECK(std::vector<double>(loaded.params.values().begin(),
                            loaded.params.values().end()) ==
        std::vector<double>(params.values().begin(), params.values().end()));
  std::filesystem::remove(path);

  CHECK_THROWS_AS(net::checkpoint_from_string("bogus"), ParseError);
}
