// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "nn.hpp"

#include <cmath>
#include <numeric>

#include "binio.hpp"
#include "error.hpp"

namespace e2t::nn {

namespace {
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::string_view kKindPrefix = "kind:";
}  // namespace

Tensor::Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                        std::multiplies<>());
  value.assign(n, 0.0);
  grad.assign(n, 0.0);
}

std::size_t Tensor::rows() const {
  if (shape.size() == 2) return shape[0];
  return 1;
}

std::size_t Tensor::cols() const {
  if (shape.size() == 2) return shape[1];
  if (shape.size() == 1) return shape[0];
  return size();
}

Eigen::Map<RowMatrix> Tensor::mat() {
  return {value.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}
Eigen::Map<const RowMatrix> Tensor::mat() const {
  return {value.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}
Eigen::Map<RowMatrix> Tensor::grad_mat() {
  return {grad.data(), static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols())};
}
Eigen::Map<Eigen::RowVectorXd> Tensor::row() {
  return {value.data(), static_cast<Eigen::Index>(size())};
}
Eigen::Map<const Eigen::RowVectorXd> Tensor::row() const {
  return {value.data(), static_cast<Eigen::Index>(size())};
}
Eigen::Map<Eigen::RowVectorXd> Tensor::grad_row() {
  return {grad.data(), static_cast<Eigen::Index>(size())};
}

void Tensor::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

Tensor& ParamStore::insert(const std::string& name, Tensor t) {
  auto [it, inserted] = tensors_.emplace(name, std::move(t));
  if (!inserted) throw ParameterError("duplicate parameter name '" + name + "'");
  return it->second;
}

Tensor& ParamStore::add_weight(const std::string& name, std::size_t fan_in,
                               std::size_t fan_out) {
  Tensor t({fan_in, fan_out});
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.value) v = dist(rng_);
  return insert(name, std::move(t));
}

Tensor& ParamStore::add_zeros(const std::string& name, std::vector<std::size_t> shape) {
  return insert(name, Tensor(std::move(shape)));
}

Tensor& ParamStore::at(const std::string& name) {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ParameterError("no parameter named '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ParameterError("no parameter named '" + name + "'");
  return it->second;
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  for (const auto& [name, t] : tensors_) out.push_back(name);
  return out;
}

std::size_t ParamStore::num_values() const {
  std::size_t n = 0;
  for (const auto& [name, t] : tensors_) n += t.size();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& [name, t] : tensors_) t.zero_grad();
}

void adam_update(ParamStore& params, AdamState& state) {
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (auto& [name, tensor] : params.tensors()) {
    auto& m = state.first_moment[name];
    auto& v = state.second_moment[name];
    if (m.empty()) {
      m.assign(tensor.size(), 0.0);
      v.assign(tensor.size(), 0.0);
    }
    if (m.size() != tensor.size() || tensor.grad.size() != tensor.size())
      throw ParameterError("adam: moment/gradient shape mismatch for '" + name + "'");
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double g = tensor.grad[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      tensor.value[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
  }
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

Vec softmax(const Vec& x) {
  Vec e = (x.array() - x.maxCoeff()).exp();
  return e / e.sum();
}

Mat softmax_rows(const Mat& x) {
  Mat out = x.colwise() - x.rowwise().maxCoeff();
  out = out.array().exp();
  out.array().colwise() /= out.rowwise().sum().array();
  return out;
}

Mat log_softmax_rows(const Mat& x) {
  Mat shifted = x.colwise() - x.rowwise().maxCoeff();
  const Vec lse = shifted.array().exp().rowwise().sum().log();
  return shifted.colwise() - lse;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
  // FNV-1a over the label, mixed with splitmix64.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = base ^ h;
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void put_tensor(io::ByteWriter& w, const std::string& name,
                const std::vector<std::size_t>& shape,
                const std::vector<double>& values) {
  w.put_u32(static_cast<std::uint32_t>(name.size()));
  w.put_bytes(name);
  w.put_u32(static_cast<std::uint32_t>(shape.size()));
  for (std::size_t d : shape) w.put_u64(d);
  for (double v : values) w.put_f64(v);
}

}  // namespace

std::string encode_checkpoint(const std::string& kind,
                              const std::vector<double>& meta,
                              const ParamStore& params) {
  io::ByteWriter w;
  w.put_bytes("NNCK");
  w.put_u32(kCheckpointVersion);
  w.put_u64(params.tensors().size() + 1);
  put_tensor(w, std::string(kKindPrefix) + kind, {meta.size()}, meta);
  for (const auto& [name, t] : params.tensors()) put_tensor(w, name, t.shape, t.value);
  return w.bytes();
}

Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source) {
  io::ByteReader r(bytes, source);
  r.expect_magic("NNCK");
  const std::uint32_t version = r.get_u32();
  if (version != kCheckpointVersion)
    throw IngestError(source + ": unsupported NNCK version " + std::to_string(version));
  const std::uint64_t count = r.get_u64();
  Checkpoint ckpt;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t name_len = r.get_u32();
    std::string name = r.get_bytes(name_len);
    const std::uint32_t rank = r.get_u32();
    std::vector<std::size_t> shape(rank);
    std::size_t n = 1;
    for (auto& d : shape) {
      d = r.get_u64();
      n *= d;
    }
    if (n * 8 > r.remaining()) throw IngestError(source + ": truncated tensor '" + name + "'");
    std::vector<double> values(n);
    for (double& v : values) v = r.get_f64();
    if (i == 0) {
      if (name.rfind(kKindPrefix, 0) != 0)
        throw IngestError(source + ": first entry is not a model-kind tag");
      ckpt.kind = name.substr(kKindPrefix.size());
      ckpt.meta = std::move(values);
      continue;
    }
    Tensor t;
    t.shape = std::move(shape);
    t.value = std::move(values);
    t.grad.assign(t.value.size(), 0.0);
    ckpt.tensors.emplace(std::move(name), std::move(t));
  }
  if (!r.at_end()) throw IngestError(source + ": trailing bytes after last tensor");
  return ckpt;
}

void load_parameters(ParamStore& params, const Checkpoint& ckpt,
                     const std::string& source) {
  if (ckpt.tensors.size() != params.tensors().size())
    throw IngestError(source + ": checkpoint holds " +
                      std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                      std::to_string(params.tensors().size()));
  for (auto& [name, t] : params.tensors()) {
    auto it = ckpt.tensors.find(name);
    if (it == ckpt.tensors.end())
      throw IngestError(source + ": missing tensor '" + name + "'");
    if (it->second.shape != t.shape)
      throw IngestError(source + ": shape mismatch for '" + name + "'");
    t.value = it->second.value;
    t.zero_grad();
  }
}

}  // namespace e2t::nn
