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
#include "bytes.hpp"

namespace artifactgen {

const ArrayGroup& Checkpoint::group(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return g;
  }
  fail(ErrorKind::format, "checkpoint has no group '" + name + "'");
}

bool Checkpoint::has_group(const std::string& name) const {
  for (const auto& g : groups) {
    if (g.name == name) return true;
  }
  return false;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
  detail::ByteWriter w;
  w.raw("AGCK");
  w.u32(Checkpoint::kVersion);
  w.str(ck.kind);
  w.str(ck.meta_json);
  w.u64(ck.step);
  w.u32(static_cast<std::uint32_t>(ck.groups.size()));
  for (const auto& g : ck.groups) {
    w.str(g.name);
    w.u32(static_cast<std::uint32_t>(g.arrays.size()));
    for (const auto& a : g.arrays) {
      w.str(a.name);
      w.u32(static_cast<std::uint32_t>(a.shape.size()));
      std::uint64_t n = 1;
      for (auto d : a.shape) {
        w.u64(d);
        n *= d;
      }
      require(n == a.values.size(), ErrorKind::internal, "checkpoint array " + a.name + " shape/value mismatch");
      for (double v : a.values) w.f64(v);
    }
  }
  return std::move(w.bytes());
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes, const std::string& origin) {
  detail::ByteReader r(bytes, origin);
  if (r.raw(4) != "AGCK") fail(ErrorKind::format, origin + ": not a checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    fail(ErrorKind::format, origin + ": unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.kind = r.str();
  ck.meta_json = r.str();
  ck.step = r.u64();
  const std::uint32_t ng = r.u32();
  for (std::uint32_t gi = 0; gi < ng; ++gi) {
    ArrayGroup g;
    g.name = r.str();
    const std::uint32_t na = r.u32();
    for (std::uint32_t ai = 0; ai < na; ++ai) {
      NamedArray a;
      a.name = r.str();
      const std::uint32_t rank = r.u32();
      std::uint64_t n = 1;
      for (std::uint32_t d = 0; d < rank; ++d) {
        a.shape.push_back(r.u64());
        n *= a.shape.back();
      }
      if (n * 8 > r.remaining()) fail(ErrorKind::format, origin + ": truncated array " + a.name);
      a.values.resize(n);
      for (auto& v : a.values) v = r.f64();
      g.arrays.push_back(std::move(a));
    }
    ck.groups.push_back(std::move(g));
  }
  if (r.remaining() != 0) fail(ErrorKind::format, origin + ": trailing bytes after checkpoint");
  return ck;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ck) {
  detail::write_file_bytes(path, encode_checkpoint(ck));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  return decode_checkpoint(bytes, path.string());
}

namespace {

std::vector<std::uint64_t> shape_of(const ad::Tensor& t) { return {t.shape().begin(), t.shape().end()}; }

ArrayGroup group_from(const std::string& name, const nn::ModelParams& p,
                      const std::vector<std::vector<double>>& values) {
  ArrayGroup g;
  g.name = name;
  for (std::size_t i = 0; i < p.size(); ++i) {
    g.arrays.push_back({p.names()[i], shape_of(p.tensors()[i]), values[i]});
  }
  return g;
}

std::vector<std::vector<double>> values_for(const ArrayGroup& g, const nn::ModelParams& p) {
  require(g.arrays.size() == p.size(), ErrorKind::format,
          "group '" + g.name + "' has " + std::to_string(g.arrays.size()) + " arrays, model expects " +
              std::to_string(p.size()));
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = g.arrays[i];
    require(a.name == p.names()[i] && a.shape == shape_of(p.tensors()[i]), ErrorKind::format,
            "group '" + g.name + "': array " + a.name + " does not match parameter " + p.names()[i]);
    out.push_back(a.values);
  }
  return out;
}

}  // namespace

ArrayGroup values_group(const std::string& name, const nn::ModelParams& p,
                        const std::vector<std::vector<double>>& values) {
  require(values.size() == p.size(), ErrorKind::internal, "values_group: count mismatch");
  return group_from(name, p, values);
}

ArrayGroup params_group(const std::string& name, const nn::ModelParams& p) {
  return group_from(name, p, p.snapshot());
}

ArrayGroup ema_group(const std::string& name, const nn::ModelParams& p) {
  require(p.has_ema(), ErrorKind::internal, "ema_group: model has no EMA shadow");
  return group_from(name, p, p.ema());
}

std::vector<ArrayGroup> optimizer_groups(const std::string& prefix, const nn::ModelParams& p, const nn::Adam& opt) {
  std::vector<std::vector<double>> m, v;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& st = opt.moments()[i];
    m.push_back(st.m.empty() ? std::vector<double>(p.tensors()[i].size(), 0.0) : st.m);
    v.push_back(st.v.empty() ? std::vector<double>(p.tensors()[i].size(), 0.0) : st.v);
  }
  ArrayGroup step;
  step.name = prefix + ".step";
  step.arrays.push_back({"step", {1}, {static_cast<double>(opt.steps())}});
  return {group_from(prefix + ".m", p, m), group_from(prefix + ".v", p, v), step};
}

void load_params(const ArrayGroup& g, nn::ModelParams& p) { p.load(values_for(g, p)); }

void load_ema(const ArrayGroup& g, nn::ModelParams& p) { p.set_ema(values_for(g, p)); }

void load_optimizer(const Checkpoint& ck, const std::string& prefix, nn::Adam& opt) {
  // ModelParams is reachable only through the optimizer, so shapes are checked by adam_step later.
  const auto& m = ck.group(prefix + ".m");
  const auto& v = ck.group(prefix + ".v");
  const auto& s = ck.group(prefix + ".step");
  require(m.arrays.size() == v.arrays.size(), ErrorKind::format, "optimizer moment groups differ in size");
  std::vector<nn::AdamMoments> st(m.arrays.size());
  for (std::size_t i = 0; i < st.size(); ++i) {
    st[i].m = m.arrays[i].values;
    st[i].v = v.arrays[i].values;
  }
  opt.restore(static_cast<std::uint64_t>(s.arrays.at(0).values.at(0)), std::move(st));
}

}  // namespace artifactgen
