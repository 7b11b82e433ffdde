// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#pragma once

#include <random>
#include <string>
#include <vector>

#include "nn.hpp"

namespace e2t::nn {

// Equal-length sequences for a batch, stored time-major: rows
// [t * batch, (t + 1) * batch) hold time step t.
struct SeqBatch {
  std::size_t steps = 0;
  std::size_t batch = 0;
  Mat data;

  SeqBatch() = default;
  SeqBatch(std::size_t steps, std::size_t batch, std::size_t channels);

  std::size_t channels() const { return static_cast<std::size_t>(data.cols()); }
  auto step(std::size_t t) {
    return data.middleRows(static_cast<Eigen::Index>(t * batch),
                           static_cast<Eigen::Index>(batch));
  }
  auto step(std::size_t t) const {
    return data.middleRows(static_cast<Eigen::Index>(t * batch),
                           static_cast<Eigen::Index>(batch));
  }

  // Packs T x C matrices of equal T into one batch.
  static SeqBatch pack(const std::vector<const RowMatrix*>& seqs);
  RowMatrix unpack(std::size_t b) const;
};

class Dense {
 public:
  Dense() = default;
  Dense(ParamStore& params, const std::string& prefix, std::size_t in, std::size_t out);

  Mat forward(const Mat& x) const;
  // Accumulates dW, db; returns dx.
  Mat backward(const Mat& x, const Mat& dy);
  Mat backward_input(const Mat& dy) const;

  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }

 private:
  Tensor* w_ = nullptr;
  Tensor* b_ = nullptr;
  std::size_t in_ = 0, out_ = 0;
};

struct GruCache {
  SeqBatch x;
  Mat h;   // (steps + 1) * batch rows; block 0 is the zero initial state
  Mat z, r, candidate;
};

// Gated recurrent unit, gates packed [update | reset | candidate]:
//   z = sig(x Wz + h Uz + bz), r = sig(x Wr + h Ur + br)
//   c = tanh(x Wc + (r * h) Uc + bc),  h' = (1 - z) * h + z * c
class Gru {
 public:
  Gru() = default;
  Gru(ParamStore& params, const std::string& prefix, std::size_t in, std::size_t hidden);

  Mat step(const Mat& x, const Mat& h_prev) const;
  // Hidden state at every step, zero initial state.
  SeqBatch forward(const SeqBatch& x, GruCache* cache) const;
  // `dh` holds the gradient w.r.t. every output step. Returns dx.
  SeqBatch backward(const GruCache& cache, const SeqBatch& dh);

  std::size_t in_dim() const { return in_; }
  std::size_t hidden() const { return hidden_; }

 private:
  Tensor* w_ = nullptr;  // in x 3H
  Tensor* u_ = nullptr;  // H x 3H
  Tensor* b_ = nullptr;  // 3H
  std::size_t in_ = 0, hidden_ = 0;
};

// Left-padded dilated causal convolution. Tap k reads x[t - (K-1-k) * dilation].
class CausalConv1d {
 public:
  CausalConv1d() = default;
  CausalConv1d(ParamStore& params, const std::string& prefix, std::size_t in,
               std::size_t out, std::size_t kernel, std::size_t dilation);

  SeqBatch forward(const SeqBatch& x) const;
  SeqBatch backward(const SeqBatch& x, const SeqBatch& dy);

 private:
  Tensor* w_ = nullptr;  // (K * in) x out
  Tensor* b_ = nullptr;
  std::size_t in_ = 0, out_ = 0, kernel_ = 0, dilation_ = 0;
};

struct TcnCache {
  SeqBatch x, pre1, act1;
};

// conv -> ReLU -> conv, plus a residual (1x1 projection when widths differ).
class TcnBlock {
 public:
  TcnBlock() = default;
  TcnBlock(ParamStore& params, const std::string& prefix, std::size_t in,
           std::size_t out, std::size_t kernel, std::size_t dilation);

  SeqBatch forward(const SeqBatch& x, TcnCache* cache) const;
  SeqBatch backward(const TcnCache& cache, const SeqBatch& dy);

  std::size_t out_dim() const { return out_; }

 private:
  CausalConv1d conv1_, conv2_;
  Dense proj_;
  bool has_proj_ = false;
  std::size_t out_ = 0;
};

// Per-channel mean over time: (steps * batch) x C -> batch x C.
Mat avg_pool_time(const SeqBatch& x);
SeqBatch avg_pool_time_backward(const Mat& dy, std::size_t steps);

// Inverted-dropout mask (entries 0 or 1 / (1 - p)).
Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::mt19937_64& rng);

}  // namespace e2t::nn
