// Copyright 2026  The revoice authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>

#include "doctest.h"
#include "revoice/common/io.h"
#include "revoice/nn/autodiff.h"
#include "revoice/nn/bridge.h"
#include "revoice/nn/checkpoint.h"
#include "revoice/nn/layers.h"
#include "revoice/nn/optim.h"
#include "testutil/toy_speech.h"

using namespace revoice;
using namespace revoice::nn;

namespace {

Tensor random_tensor(std::vector<int> shape, uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) {
    t.flat(i) = static_cast<float>(rng.normal() * scale);
  }
  return t;
}

// Central-difference check of d(loss)/d(param) against the tape gradients for
// a few probe indices of every parameter.
void check_gradients(ParamStore& store, const std::function<Var()>& build_loss,
                     double rtol = 1e-3, double atol = 3e-4, double h = 5e-3) {
  store.zero_grads();
  Var loss = build_loss();
  backward(loss);

  for (auto& [name, var] : store.entries()) {
    Var v = var;
    Tensor& p = v.mutable_value();
    const Tensor& g = v.grad();
    std::vector<int64_t> probes = {0, p.numel() / 2, p.numel() - 1};
    for (int64_t idx : probes) {
      const float saved = p.flat(idx);
      p.flat(idx) = static_cast<float>(saved + h);
      const double up = build_loss().value().flat(0);
      p.flat(idx) = static_cast<float>(saved - h);
      const double down = build_loss().value().flat(0);
      p.flat(idx) = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = g.flat(idx);
      const double tol = atol + rtol * std::max(std::abs(numeric), std::abs(analytic));
      INFO("param ", name, " idx ", idx, " analytic ", analytic, " numeric ", numeric);
      CHECK(std::abs(numeric - analytic) <= tol);
    }
  }
}

}  // namespace

TEST_CASE("linear layer gradients match finite differences") {
  ParamStore store;
  Rng rng(1);
  Linear lin(store, "lin", 6, 4, rng);
  Tensor x = random_tensor({5, 6}, 2);
  Tensor target = random_tensor({5, 4}, 3);
  check_gradients(store, [&]() {
    Var out = lin.forward(Var::constant(x));
    return sum_sq(sub(out, Var::constant(target)));
  });
}

TEST_CASE("layer norm gradients match finite differences") {
  ParamStore store;
  LayerNorm ln(store, "ln", 8);
  Var x = store.add("x", random_tensor({4, 8}, 4));
  Tensor target = random_tensor({4, 8}, 5);
  check_gradients(store, [&]() {
    return sum_sq(sub(ln.forward_rows(x), Var::constant(target)));
  });
}

TEST_CASE("channel layer norm gradients match finite differences") {
  ParamStore store;
  LayerNorm ln(store, "ln", 5);
  Var x = store.add("x", random_tensor({5, 3, 4}, 6));
  Tensor target = random_tensor({5, 3, 4}, 7);
  check_gradients(store, [&]() {
    return sum_sq(sub(ln.forward_channels(x), Var::constant(target)));
  });
}

TEST_CASE("conv1d gradients match finite differences (both pad modes)") {
  for (PadMode1d mode : {PadMode1d::kZero, PadMode1d::kReplicate}) {
    ParamStore store;
    Rng rng(8);
    Conv1d conv(store, "conv", 5, 3, 4, rng, mode);
    Var x = store.add("x", random_tensor({7, 3}, 9));
    Tensor target = random_tensor({7, 4}, 10);
    check_gradients(store, [&]() {
      return sum_sq(sub(conv.forward(x), Var::constant(target)));
    });
  }
}

TEST_CASE("conv2d gradients match finite differences (stride 1 and 2)") {
  for (int stride : {1, 2}) {
    ParamStore store;
    Rng rng(11);
    Conv2d conv(store, "conv", 2, 3, 3, 3, stride, 1, rng);
    Var x = store.add("x", random_tensor({2, 6, 8}, 12));
    const int ho = (6 + 2 - 3) / stride + 1;
    const int wo = (8 + 2 - 3) / stride + 1;
    Tensor target = random_tensor({3, ho, wo}, 13);
    check_gradients(store, [&]() {
      return sum_sq(sub(conv.forward(x), Var::constant(target)));
    });
  }
}

TEST_CASE("attention gradients match finite differences") {
  ParamStore store;
  Rng rng(14);
  MultiheadSelfAttention attn(store, "attn", 8, 2, rng);
  Var x = store.add("x", random_tensor({6, 8}, 15, 0.5));
  Tensor target = random_tensor({6, 8}, 16, 0.5);
  Tensor pos = sinusoidal_positions(6, 8);
  check_gradients(store, [&]() {
    return sum_sq(sub(attn.forward(x, &pos), Var::constant(target)));
  });
}

TEST_CASE("transformer block gradients match finite differences") {
  ParamStore store;
  Rng rng(17);
  TransformerBlock block(store, "blk", 8, 2, 16, rng);
  Var x = store.add("x", random_tensor({5, 8}, 18, 0.5));
  Tensor target = random_tensor({5, 8}, 19, 0.5);
  check_gradients(store, [&]() {
    return sum_sq(sub(block.forward(x, nullptr), Var::constant(target)));
  });
}

TEST_CASE("embedding, softmax-CE, pooling and upsample gradients") {
  ParamStore store;
  Var table = store.add("table", random_tensor({5, 4}, 20));
  std::vector<int> ids = {1, 3, 0, 3};
  check_gradients(store, [&]() {
    Var emb = embedding_lookup(table, ids);
    Var lp = log_softmax_rows(emb);
    return nll_rows(lp, {0, 1, 2, 3});
  });

  ParamStore store2;
  Var x2 = store2.add("x", random_tensor({2, 4, 6}, 21));
  Tensor target2 = random_tensor({2, 4, 6}, 22);
  check_gradients(store2, [&]() {
    Var d = upsample2x_nearest(avg_pool2x(x2));
    return sum_sq(sub(d, Var::constant(target2)));
  });
}

TEST_CASE("activation gradients (gelu, silu, tanh, leaky_relu)") {
  ParamStore store;
  Var x = store.add("x", random_tensor({3, 7}, 23));
  Tensor t = random_tensor({3, 7}, 24);
  check_gradients(store, [&]() { return sum_sq(sub(gelu(x), Var::constant(t))); });
  check_gradients(store, [&]() { return sum_sq(sub(silu(x), Var::constant(t))); });
  check_gradients(store, [&]() { return sum_sq(sub(tanh_act(x), Var::constant(t))); });
  check_gradients(store,
                  [&]() { return sum_sq(sub(leaky_relu(x, 0.1), Var::constant(t))); });
}

TEST_CASE("embedding rejects out-of-range ids") {
  ParamStore store;
  Var table = store.add("table", random_tensor({4, 3}, 25));
  CHECK_THROWS_AS(embedding_lookup(table, {0, 4}), UnitOutOfRange);
  CHECK_THROWS_AS(embedding_lookup(table, {-1}), UnitOutOfRange);
}

TEST_CASE("quadratic toy training converges monotonically after warmup") {
  // minimize ||W x - y||^2 for fixed (x, y)
  ParamStore store;
  Rng rng(26);
  Linear lin(store, "lin", 4, 4, rng);
  Tensor x = random_tensor({8, 4}, 27);
  Tensor y = random_tensor({8, 4}, 28);
  OptimizerConfig cfg;
  cfg.kind = "adam";
  cfg.learning_rate = 0.05;
  cfg.weight_decay = 0.0;
  Optimizer opt(store, cfg);
  std::vector<double> losses;
  for (int step = 0; step < 200; ++step) {
    losses.push_back(train_step(opt, [&]() {
      return sum_sq(sub(lin.forward(Var::constant(x)), Var::constant(y)));
    }));
  }
  for (size_t i = 21; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1] + 1e-9);
  CHECK(losses.back() < 0.01 * losses.front());
}

TEST_CASE("learning rate zero leaves parameters unchanged") {
  ParamStore store;
  Rng rng(29);
  Linear lin(store, "lin", 3, 3, rng);
  Tensor before = lin.w.value();
  OptimizerConfig cfg;
  cfg.kind = "adamw";
  cfg.learning_rate = 0.0;
  Optimizer opt(store, cfg);
  train_step(opt, [&]() {
    return sum_sq(lin.forward(Var::constant(random_tensor({2, 3}, 30))));
  });
  for (int64_t i = 0; i < before.numel(); ++i) {
    CHECK(lin.w.value().flat(i) == before.flat(i));
  }
}

TEST_CASE("non-finite loss aborts with NonFiniteLoss") {
  ParamStore store;
  Rng rng(31);
  Linear lin(store, "lin", 2, 2, rng);
  OptimizerConfig cfg;
  Optimizer opt(store, cfg);
  CHECK_THROWS_AS(train_step(opt, [&]() {
    Tensor bad({1});
    bad.flat(0) = std::numeric_limits<float>::quiet_NaN();
    return Var::constant(bad);
  }), NonFiniteLoss);
}

TEST_CASE("parameter counting") {
  ParamStore store;
  Rng rng(32);
  Linear lin(store, "lin", 80, 80, rng);
  CHECK(store.parameter_count() == 6480);  // 80*80 + 80

  ParamStore empty;
  CHECK(empty.parameter_count() == 0);
}

TEST_CASE("checkpoint round trip is bit-exact and tamper-evident") {
  const std::string dir = testutil::fresh_dir("ckpt");
  ParamStore store;
  Rng rng(33);
  Linear lin(store, "lin", 7, 5, rng);
  LayerNorm ln(store, "ln", 5);
  nlohmann::json config = {{"kind", "probe"}, {"in", 7}, {"out", 5}};
  const std::string path = dir + "/probe.ckpt";
  save_checkpoint(path, config, store.named_tensors());

  Checkpoint ckpt = load_checkpoint(path);
  CHECK(ckpt.config == config);
  for (const auto& [name, tensor] : store.named_tensors()) {
    REQUIRE(ckpt.tensors.count(name) == 1);
    const Tensor& loaded = ckpt.tensors.at(name);
    REQUIRE(loaded.same_shape(*tensor));
    for (int64_t i = 0; i < loaded.numel(); ++i) {
      CHECK(loaded.flat(i) == tensor->flat(i));
    }
  }

  // count matches an independent walk over serialized tensors
  int64_t walked = 0;
  for (const auto& [name, tensor] : ckpt.tensors) walked += tensor.numel();
  CHECK(walked == store.parameter_count());

  // truncation -> CorruptCheckpoint
  std::string raw = read_file(path);
  write_file(dir + "/truncated.ckpt", raw.substr(0, raw.size() - 13));
  CHECK_THROWS_AS(load_checkpoint(dir + "/truncated.ckpt"), CorruptCheckpoint);

  // payload tampering -> CorruptCheckpoint
  std::string tampered = raw;
  tampered[tampered.size() - 1] ^= 0x1;
  write_file(dir + "/tampered.ckpt", tampered);
  CHECK_THROWS_AS(load_checkpoint(dir + "/tampered.ckpt"), CorruptCheckpoint);

  // config-hash mismatch -> VersionMismatch
  nlohmann::json other = config;
  other["out"] = 6;
  CHECK_THROWS_AS(load_checkpoint_into(path, other, store), VersionMismatch);
  CHECK_NOTHROW(load_checkpoint_into(path, config, store));
}

TEST_CASE("exponential lr decay is applied per epoch") {
  ParamStore store;
  Rng rng(34);
  Linear lin(store, "lin", 2, 2, rng);
  OptimizerConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.decay_gamma = 0.5;
  Optimizer opt(store, cfg);
  opt.set_epoch(0);
  CHECK(opt.current_lr() == doctest::Approx(1.0));
  opt.set_epoch(3);
  CHECK(opt.current_lr() == doctest::Approx(0.125));
}
