// Copyright 2026 The ArtifactGen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "artifactgen/checkpoint.hpp"
#include "artifactgen/error.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace artifactgen;

namespace {

nn::ModelParams toy_params() {
  nn::ModelParams p;
  p.add("w", testing::random_tensor({2, 3}, 1));
  p.add("b", testing::random_tensor({3}, 2));
  return p;
}

}  // namespace

TEST_CASE("checkpoint round trip") {
  auto p = toy_params();
  p.init_ema();
  nn::Adam opt(p, {});
  p.zero_grad();
  ad::backward(ad::sum(ad::square(p.at(0))));
  opt.step();
  Checkpoint ck;
  ck.kind = "gan";
  ck.meta_json = R"({"x":1})";
  ck.step = 42;
  ck.groups.push_back(params_group("net", p));
  ck.groups.push_back(ema_group("net.ema", p));
  for (auto& g : optimizer_groups("net.adam", p, opt)) ck.groups.push_back(std::move(g));

  const auto bytes = encode_checkpoint(ck);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "AGCK");
  const auto back = decode_checkpoint(bytes);
  CHECK(back == ck);
  CHECK(encode_checkpoint(back) == bytes);

  auto q = toy_params();
  for (auto& t : q.tensors()) {
    auto v = const_cast<ad::Tensor&>(t).mutable_values();
    std::fill(v.begin(), v.end(), 0.0);
  }
  load_params(back.group("net"), q);
  CHECK(q.snapshot() == p.snapshot());
  load_ema(back.group("net.ema"), q);
  CHECK(q.ema() == p.ema());
  nn::Adam opt2(q, {});
  load_optimizer(back, "net.adam", opt2);
  CHECK(opt2.steps() == 1);
  CHECK(opt2.moments()[0].m == opt.moments()[0].m);
  CHECK(opt2.moments()[1].v == opt.moments()[1].v);

  const auto dir = testing::scratch("ckpt");
  write_checkpoint(dir / "a.agck", ck);
  CHECK(read_checkpoint(dir / "a.agck") == ck);
}

TEST_CASE("checkpoint validation") {
  auto p = toy_params();
  Checkpoint ck;
  ck.kind = "ddpm";
  ck.groups.push_back(params_group("net", p));
  auto bytes = encode_checkpoint(ck);
  auto bad = bytes;
  bad[1] = 'Z';
  CHECK_THROWS_AS(decode_checkpoint(bad), Error);
  bad = bytes;
  bad.resize(bad.size() - 3);
  CHECK_THROWS_AS(decode_checkpoint(bad), Error);
  CHECK_THROWS_AS(ck.group("missing"), Error);

  nn::ModelParams other;
  other.add("w", ad::Tensor::zeros({3, 2}));
  other.add("b", ad::Tensor::zeros({3}));
  CHECK_THROWS_AS(load_params(ck.group("net"), other), Error);  // shape mismatch
  CHECK_THROWS_AS(values_group("v", p, {{1.0}}), Error);
}
