// Copyright 2026 The hrtfkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <vector>

#include <doctest.h>

#include "core/error.hpp"
#include "nn/adam.hpp"
#include "nn/checkpoint.hpp"
#include "nn/gradcheck.hpp"
#include "nn/layers.hpp"

using namespace hrtf;

TEST_CASE("dense init: Gaussian 1/sqrt(fan_in) weights, zero bias") {
  Rng rng(1);
  Dense<double> layer(64, 64, rng);
  double mean = 0.0;
  for (double v : layer.w->values) mean += v;
  mean /= static_cast<double>(layer.w->numel());
  double var = 0.0;
  for (double v : layer.w->values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(layer.w->numel());
  CHECK(std::sqrt(var) == doctest::Approx(0.125).epsilon(0.05));
  for (double v : layer.b->values) CHECK(v == 0.0);
  CHECK(layer.w->requires_grad);
  CHECK(layer.b->requires_grad);
}

TEST_CASE("norm init: gamma ones, beta zeros") {
  Norm<double> norm(6);
  for (double v : norm.gamma->values) CHECK(v == 1.0);
  for (double v : norm.beta->values) CHECK(v == 0.0);
}

TEST_CASE("parameter collection uses stable dotted names") {
  Rng rng(2);
  Mhsa<double> mhsa(4, 2, rng);
  ParamList<double> params;
  mhsa.collect("attn", &params);
  REQUIRE(params.size() == 8);
  CHECK(params[0].name == "attn.wq.w");
  CHECK(params[1].name == "attn.wq.b");
  CHECK(params[6].name == "attn.wo.w");
  CHECK(params[7].name == "attn.wo.b");
}

TEST_CASE("mhsa validates head divisibility") {
  Rng rng(3);
  CHECK_THROWS_AS(Mhsa<double>(6, 4, rng), Error);
}

TEST_CASE("mhsa attention rows sum to 1 per head") {
  Rng rng(4);
  Mhsa<double> mhsa(8, 2, rng);
  TensorPtr<double> x = randn<double>({5, 8}, rng, 1.0, false);
  std::vector<std::vector<double>> probs;
  mhsa.forward(x, &probs);
  REQUIRE(probs.size() == 2);
  for (const std::vector<double>& head : probs) {
    REQUIRE(head.size() == 25);
    for (int r = 0; r < 5; ++r) {
      double row = 0.0;
      for (int c = 0; c < 5; ++c) row += head[static_cast<size_t>(r) * 5 + c];
      CHECK(std::abs(row - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("mhsa with one token applies only the value path") {
  Rng rng(5);
  Mhsa<double> mhsa(4, 2, rng);
  TensorPtr<double> x = randn<double>({1, 4}, rng, 1.0, false);
  std::vector<std::vector<double>> probs;
  TensorPtr<double> out = mhsa.forward(x, &probs);
  CHECK(probs[0][0] == 1.0);
  CHECK(probs[1][0] == 1.0);
  // With the single attention weight pinned at 1, the output is exactly
  // wo(v(x)).
  TensorPtr<double> expected = mhsa.wo.forward(mhsa.wv.forward(x));
  for (size_t i = 0; i < out->numel(); ++i) {
    CHECK(out->values[i] == doctest::Approx(expected->values[i]).epsilon(1e-12));
  }
}

TEST_CASE("mhsa is permutation-equivariant over the sequence axis") {
  Rng rng(6);
  Mhsa<double> mhsa(6, 3, rng);
  TensorPtr<double> x = randn<double>({7, 6}, rng, 1.0, false);

  const std::vector<int> perm = {3, 0, 6, 1, 5, 2, 4};
  std::vector<double> permuted(x->numel());
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 6; ++c) {
      permuted[static_cast<size_t>(r) * 6 + c] =
          x->values[static_cast<size_t>(perm[static_cast<size_t>(r)]) * 6 + c];
    }
  }
  TensorPtr<double> xp = make_tensor<double>({7, 6}, permuted);

  TensorPtr<double> y = mhsa.forward(x);
  TensorPtr<double> yp = mhsa.forward(xp);
  for (int r = 0; r < 7; ++r) {
    for (int c = 0; c < 6; ++c) {
      CHECK(yp->values[static_cast<size_t>(r) * 6 + c] ==
            doctest::Approx(y->values[static_cast<size_t>(perm[static_cast<size_t>(r)]) * 6 + c])
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("mhsa gradcheck over all projection weights") {
  Rng rng(7);
  Mhsa<double> mhsa(4, 2, rng);
  TensorPtr<double> x = randn<double>({3, 4}, rng, 0.8, false);
  ParamList<double> params;
  mhsa.collect("attn", &params);
  const double err = grad_check(
      [&]() {
        TensorPtr<double> y = mhsa.forward(x);
        return mean_all(mul(y, y));
      },
      params);
  CHECK(err < 1e-4);
}

TEST_CASE("forward passes are bitwise-repeatable for a fixed seed") {
  TensorPtr<double> x;
  {
    Rng rng(99);
    x = randn<double>({5, 6}, rng, 1.0, false);
  }
  std::vector<double> first;
  for (int run = 0; run < 2; ++run) {
    Rng rng(42);
    Mhsa<double> mhsa(6, 2, rng);
    TensorPtr<double> y = mhsa.forward(x);
    if (run == 0) {
      first = y->values;
    } else {
      CHECK(y->values == first);
    }
  }
}

TEST_CASE("conv layer: depthwise shape rules and init") {
  Rng rng(8);
  CHECK_THROWS_AS(Conv<double>(3, 4, 3, 1, true, rng), Error);
  Conv<double> dw(3, 3, 5, 1, true, rng);
  CHECK(dw.w->shape == std::vector<int>{3, 5});
  Conv<double> full(3, 4, 5, 1, false, rng);
  CHECK(full.w->shape == std::vector<int>{4, 3, 5});
  CHECK(full.b->shape == std::vector<int>{4});
}

TEST_CASE("positional embedding: zero table is the identity") {
  Rng rng(9);
  PosEmbedding<double> pe(4, 3, rng);
  for (double& v : pe.table->values) v = 0.0;
  TensorPtr<double> x = randn<double>({4, 3}, rng, 1.0, false);
  CHECK(pe.forward(x)->values == x->values);
}

TEST_CASE("positional embedding rows diverge after one training step") {
  Rng rng(10);
  PosEmbedding<double> pe(2, 3, rng);
  for (double& v : pe.table->values) v = 0.0;
  TensorPtr<double> x = zeros<double>({2, 3});

  // Loss pulls row 0 toward 1 and ignores row 1.
  TensorPtr<double> target =
      make_tensor<double>({2, 3}, {1.0, 1.0, 1.0, 0.0, 0.0, 0.0});
  ParamList<double> params;
  pe.collect("pe", &params);
  Adam<double> opt(1e-2);
  for (const auto& p : params) p.tensor->zero_grad();
  TensorPtr<double> d = sub(pe.forward(x), target);
  backward(mean_all(mul(d, d)));
  opt.step(params);

  bool rows_differ = false;
  for (int c = 0; c < 3; ++c) {
    if (pe.table->values[static_cast<size_t>(c)] !=
        pe.table->values[static_cast<size_t>(3 + c)]) {
      rows_differ = true;
    }
  }
  CHECK(rows_differ);
  // Row 1 received no gradient and must not move.
  for (int c = 0; c < 3; ++c) CHECK(pe.table->values[static_cast<size_t>(3 + c)] == 0.0);
}

TEST_CASE("positional embedding gradcheck") {
  Rng rng(11);
  PosEmbedding<double> pe(3, 4, rng);
  TensorPtr<double> x = randn<double>({3, 4}, rng, 0.5, false);
  ParamList<double> params;
  pe.collect("pe", &params);
  const double err = grad_check(
      [&]() {
        TensorPtr<double> y = pe.forward(x);
        return mean_all(mul(y, y));
      },
      params);
  CHECK(err < 1e-6);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  Rng rng(12);
  Dense<double> layer(3, 3, rng);
  const std::vector<double> before = layer.w->values;
  ParamList<double> params;
  layer.collect("layer", &params);
  Adam<double> opt(1e-3);
  for (int i = 0; i < 5; ++i) {
    for (const auto& p : params) p.tensor->zero_grad();
    opt.step(params);
  }
  CHECK(layer.w->values == before);
  CHECK(opt.step_count() == 5);
}

TEST_CASE("adam: first step is -lr * sign(grad) after bias correction") {
  TensorPtr<double> w = make_tensor<double>({1}, {0.3}, true);
  ParamList<double> params = {{"w", w}};
  Adam<double> opt(1e-3);
  w->grad[0] = 7.5;
  opt.step(params);
  CHECK(w->values[0] == doctest::Approx(0.3 - 1e-3).epsilon(1e-6));

  TensorPtr<double> w2 = make_tensor<double>({1}, {0.3}, true);
  ParamList<double> params2 = {{"w2", w2}};
  Adam<double> opt2(1e-3);
  w2->grad[0] = -0.02;
  opt2.step(params2);
  CHECK(w2->values[0] == doctest::Approx(0.3 + 1e-3).epsilon(1e-6));
}

TEST_CASE("adam: 100 steps on w^2 from 1 reach |w| < 0.05") {
  TensorPtr<double> w = make_tensor<double>({1}, {1.0}, true);
  ParamList<double> params = {{"w", w}};
  Adam<double> opt(0.1);
  for (int i = 0; i < 100; ++i) {
    w->zero_grad();
    backward(mul(w, w));
    opt.step(params);
  }
  CHECK(std::abs(w->values[0]) < 0.05);
}

TEST_CASE("adam: non-finite gradient names the parameter") {
  TensorPtr<double> w = make_tensor<double>({2}, {1.0, 2.0}, true);
  ParamList<double> params = {{"freq.block0.ffn1.lin1.w", w}};
  Adam<double> opt(1e-3);
  w->grad[1] = std::numeric_limits<double>::infinity();
  try {
    opt.step(params);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
    CHECK(std::string(e.what()).find("freq.block0.ffn1.lin1.w") != std::string::npos);
  }
}

TEST_CASE("FDCKPT01 encode/decode round-trips bit-exactly") {
  Checkpoint ckpt;
  ckpt.config_text = "variant = conformer\nlatent_dim = 16\n";
  ckpt.epoch = 37;
  ckpt.val_lsd = 4.625;
  ckpt.adam_step = 1234567;
  ckpt.learning_rate = 1e-3;
  Rng rng(13);
  for (int r = 0; r < 3; ++r) {
    CheckpointRecord rec;
    rec.name = "layer" + std::to_string(r) + ".w";
    rec.shape = {2, r + 1};
    const size_t n = static_cast<size_t>(2 * (r + 1));
    for (size_t i = 0; i < n; ++i) {
      rec.values.push_back(static_cast<float>(rng.next_gaussian()));
      rec.adam_m.push_back(static_cast<float>(rng.next_gaussian()));
      rec.adam_v.push_back(static_cast<float>(rng.next_double()));
    }
    ckpt.records.push_back(rec);
  }

  const std::vector<unsigned char> bytes = encode_checkpoint(ckpt);
  const Checkpoint back = decode_checkpoint(bytes);
  CHECK(back.config_text == ckpt.config_text);
  CHECK(back.epoch == ckpt.epoch);
  CHECK(back.val_lsd == ckpt.val_lsd);
  CHECK(back.adam_step == ckpt.adam_step);
  CHECK(back.learning_rate == ckpt.learning_rate);
  REQUIRE(back.records.size() == 3);
  for (size_t r = 0; r < 3; ++r) {
    CHECK(back.records[r].name == ckpt.records[r].name);
    CHECK(back.records[r].shape == ckpt.records[r].shape);
    CHECK(back.records[r].values == ckpt.records[r].values);
    CHECK(back.records[r].adam_m == ckpt.records[r].adam_m);
    CHECK(back.records[r].adam_v == ckpt.records[r].adam_v);
  }
  CHECK(encode_checkpoint(back) == bytes);

  const std::string path =
      (std::filesystem::temp_directory_path() / "hrtfkit_ckpt_test.fdckpt").string();
  write_checkpoint(ckpt, path);
  const Checkpoint from_file = read_checkpoint(path);
  CHECK(encode_checkpoint(from_file) == bytes);
  std::filesystem::remove(path);
}

TEST_CASE("FDCKPT01 rejects malformed bytes") {
  Checkpoint ckpt;
  ckpt.config_text = "x = 1\n";
  CheckpointRecord rec;
  rec.name = "w";
  rec.shape = {2};
  rec.values = {1.0F, 2.0F};
  rec.adam_m = {0.0F, 0.0F};
  rec.adam_v = {0.0F, 0.0F};
  ckpt.records.push_back(rec);
  std::vector<unsigned char> bytes = encode_checkpoint(ckpt);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    CHECK_THROWS_AS(decode_checkpoint(bytes), Error);
    try {
      decode_checkpoint(bytes);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kFormat);
    }
  }
  SUBCASE("truncation") {
    bytes.resize(bytes.size() - 3);
    CHECK_THROWS_AS(decode_checkpoint(bytes), Error);
  }
  SUBCASE("trailing bytes") {
    bytes.push_back(0);
    CHECK_THROWS_AS(decode_checkpoint(bytes), Error);
  }
  SUBCASE("missing file is an io error") {
    try {
      read_checkpoint("/nonexistent/path/x.fdckpt");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIo);
    }
  }
}
