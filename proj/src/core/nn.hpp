// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "signal.hpp"

namespace e2t::nn {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Dense value buffer in row-major order plus a same-shape gradient buffer.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);

  std::size_t size() const { return value.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  Eigen::Map<RowMatrix> mat();
  Eigen::Map<const RowMatrix> mat() const;
  Eigen::Map<RowMatrix> grad_mat();
  Eigen::Map<Eigen::RowVectorXd> row();
  Eigen::Map<const Eigen::RowVectorXd> row() const;
  Eigen::Map<Eigen::RowVectorXd> grad_row();

  void zero_grad();
};

// Named parameters, iterated in lexicographic name order. Owns the seeded
// generator used for initialization so that construction order alone fixes
// every initial value.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : rng_(seed) {}

  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  // Glorot-uniform in +-sqrt(6 / (fan_in + fan_out)), shape {fan_in, fan_out}.
  Tensor& add_weight(const std::string& name, std::size_t fan_in, std::size_t fan_out);
  Tensor& add_zeros(const std::string& name, std::vector<std::size_t> shape);

  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  std::vector<std::string> names() const;
  std::size_t num_values() const;

  std::map<std::string, Tensor>& tensors() { return tensors_; }
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }

  void zero_grad();

 private:
  Tensor& insert(const std::string& name, Tensor t);

  std::map<std::string, Tensor> tensors_;
  std::mt19937_64 rng_;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::map<std::string, std::vector<double>> first_moment;
  std::map<std::string, std::vector<double>> second_moment;
};

// One bias-corrected Adam step using the gradients held in `params`.
void adam_update(ParamStore& params, AdamState& state);

double sigmoid(double x);
double relu(double x);
Vec softmax(const Vec& x);
// Row-wise softmax / log-softmax with max subtraction.
Mat softmax_rows(const Mat& x);
Mat log_softmax_rows(const Mat& x);

// Derives an independent stream seed from a base seed and a stream label.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

// "NNCK" checkpoint. The first entry is a rank-1 tensor named "kind:<tag>"
// whose values carry model metadata (dimensions, class counts).
struct Checkpoint {
  std::string kind;
  std::vector<double> meta;
  std::map<std::string, Tensor> tensors;
};

std::string encode_checkpoint(const std::string& kind,
                              const std::vector<double>& meta,
                              const ParamStore& params);
Checkpoint decode_checkpoint(std::string_view bytes, const std::string& source);
// Copies values into an identically shaped store; throws IngestError on any
// name or shape mismatch.
void load_parameters(ParamStore& params, const Checkpoint& ckpt,
                     const std::string& source);

}  // namespace e2t::nn
