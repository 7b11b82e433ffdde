// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eeg2text Authors

#include "layers.hpp"

#include "error.hpp"

namespace e2t::nn {

namespace {

void check_cols(const Mat& m, std::size_t expected, const char* what) {
  if (static_cast<std::size_t>(m.cols()) != expected)
    throw ParameterError(std::string(what) + ": expected " + std::to_string(expected) +
                         " columns, got " + std::to_string(m.cols()));
}

Mat sigmoid_array(const Mat& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

}  // namespace

SeqBatch::SeqBatch(std::size_t s, std::size_t b, std::size_t c)
    : steps(s), batch(b),
      data(Mat::Zero(static_cast<Eigen::Index>(s * b), static_cast<Eigen::Index>(c))) {}

SeqBatch SeqBatch::pack(const std::vector<const RowMatrix*>& seqs) {
  if (seqs.empty()) throw ParameterError("SeqBatch::pack: empty batch");
  const auto steps = static_cast<std::size_t>(seqs[0]->rows());
  const auto channels = static_cast<std::size_t>(seqs[0]->cols());
  if (steps == 0) throw ParameterError("SeqBatch::pack: empty sequence");
  SeqBatch out(steps, seqs.size(), channels);
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    if (static_cast<std::size_t>(seqs[b]->rows()) != steps ||
        static_cast<std::size_t>(seqs[b]->cols()) != channels)
      throw ParameterError("SeqBatch::pack: sequences differ in shape");
    for (std::size_t t = 0; t < steps; ++t)
      out.data.row(static_cast<Eigen::Index>(t * out.batch + b)) =
          seqs[b]->row(static_cast<Eigen::Index>(t));
  }
  return out;
}

RowMatrix SeqBatch::unpack(std::size_t b) const {
  RowMatrix out(static_cast<Eigen::Index>(steps), data.cols());
  for (std::size_t t = 0; t < steps; ++t)
    out.row(static_cast<Eigen::Index>(t)) = data.row(static_cast<Eigen::Index>(t * batch + b));
  return out;
}

Dense::Dense(ParamStore& params, const std::string& prefix, std::size_t in, std::size_t out)
    : w_(&params.add_weight(prefix + ".weight", in, out)),
      b_(&params.add_zeros(prefix + ".bias", {out})),
      in_(in), out_(out) {}

Mat Dense::forward(const Mat& x) const {
  check_cols(x, in_, "dense");
  Mat y = x * w_->mat();
  y.rowwise() += b_->row();
  return y;
}

Mat Dense::backward(const Mat& x, const Mat& dy) {
  check_cols(dy, out_, "dense backward");
  w_->grad_mat().noalias() += x.transpose() * dy;
  b_->grad_row() += dy.colwise().sum();
  return dy * w_->mat().transpose();
}

Mat Dense::backward_input(const Mat& dy) const {
  check_cols(dy, out_, "dense backward");
  return dy * w_->mat().transpose();
}

Gru::Gru(ParamStore& params, const std::string& prefix, std::size_t in, std::size_t hidden)
    : w_(&params.add_weight(prefix + ".W", in, 3 * hidden)),
      u_(&params.add_weight(prefix + ".U", hidden, 3 * hidden)),
      b_(&params.add_zeros(prefix + ".bias", {3 * hidden})),
      in_(in), hidden_(hidden) {}

Mat Gru::step(const Mat& x, const Mat& h_prev) const {
  check_cols(x, in_, "gru step input");
  check_cols(h_prev, hidden_, "gru step state");
  if (x.rows() != h_prev.rows()) throw ParameterError("gru step: batch mismatch");
  const auto H = static_cast<Eigen::Index>(hidden_);
  const auto u = u_->mat();
  Mat a = x * w_->mat();
  a.rowwise() += b_->row();
  const Mat gates = sigmoid_array(a.leftCols(2 * H) + h_prev * u.leftCols(2 * H));
  const Mat z = gates.leftCols(H);
  const Mat r = gates.rightCols(H);
  const Mat c = (a.rightCols(H) + (r.cwiseProduct(h_prev)) * u.rightCols(H)).array().tanh();
  return (1.0 - z.array()) * h_prev.array() + z.array() * c.array();
}

SeqBatch Gru::forward(const SeqBatch& x, GruCache* cache) const {
  check_cols(x.data, in_, "gru input");
  const auto H = static_cast<Eigen::Index>(hidden_);
  const auto B = static_cast<Eigen::Index>(x.batch);
  const auto u = u_->mat();
  const Mat u_gates = u.leftCols(2 * H);
  const Mat u_cand = u.rightCols(H);

  Mat xw = x.data * w_->mat();
  xw.rowwise() += b_->row();

  SeqBatch out(x.steps, x.batch, hidden_);
  Mat h_prev = Mat::Zero(B, H);
  if (cache) {
    cache->x = x;
    cache->h = Mat::Zero(static_cast<Eigen::Index>((x.steps + 1) * x.batch), H);
    cache->z.resize(x.data.rows(), H);
    cache->r.resize(x.data.rows(), H);
    cache->candidate.resize(x.data.rows(), H);
  }
  for (std::size_t t = 0; t < x.steps; ++t) {
    const Eigen::Index row0 = static_cast<Eigen::Index>(t) * B;
    const auto a = xw.middleRows(row0, B);
    const Mat gates = sigmoid_array(a.leftCols(2 * H) + h_prev * u_gates);
    const auto z = gates.leftCols(H);
    const auto r = gates.rightCols(H);
    const Mat c = (a.rightCols(H) + r.cwiseProduct(h_prev) * u_cand).array().tanh();
    Mat h = (1.0 - z.array()) * h_prev.array() + z.array() * c.array();
    if (cache) {
      cache->z.middleRows(row0, B) = z;
      cache->r.middleRows(row0, B) = r;
      cache->candidate.middleRows(row0, B) = c;
      cache->h.middleRows(row0 + B, B) = h;
    }
    out.step(t) = h;
    h_prev = std::move(h);
  }
  return out;
}

SeqBatch Gru::backward(const GruCache& cache, const SeqBatch& dh_out) {
  const auto H = static_cast<Eigen::Index>(hidden_);
  const auto B = static_cast<Eigen::Index>(cache.x.batch);
  const auto u = u_->mat();
  const Mat u_gates = u.leftCols(2 * H);
  const Mat u_cand = u.rightCols(H);

  Mat da(cache.x.data.rows(), 3 * H);
  Mat du = Mat::Zero(H, 3 * H);
  Mat dh_next = Mat::Zero(B, H);
  for (std::size_t ti = cache.x.steps; ti-- > 0;) {
    const Eigen::Index row0 = static_cast<Eigen::Index>(ti) * B;
    const auto h_prev = cache.h.middleRows(row0, B);
    const auto z = cache.z.middleRows(row0, B);
    const auto r = cache.r.middleRows(row0, B);
    const auto c = cache.candidate.middleRows(row0, B);

    const Mat dh = dh_out.step(ti) + dh_next;
    const Mat dz = dh.cwiseProduct(c - h_prev);
    const Mat dc_pre = (dh.array() * z.array() * (1.0 - c.array().square())).matrix();
    const Mat rh = r.cwiseProduct(h_prev);
    du.rightCols(H).noalias() += rh.transpose() * dc_pre;
    const Mat drh = dc_pre * u_cand.transpose();
    const Mat dr = drh.cwiseProduct(h_prev);

    auto dgates = da.middleRows(row0, B);
    dgates.leftCols(H) = (dz.array() * z.array() * (1.0 - z.array())).matrix();
    dgates.middleCols(H, H) = (dr.array() * r.array() * (1.0 - r.array())).matrix();
    dgates.rightCols(H) = dc_pre;
    du.leftCols(2 * H).noalias() += h_prev.transpose() * dgates.leftCols(2 * H);

    dh_next = (dh.array() * (1.0 - z.array())).matrix() + drh.cwiseProduct(r);
    dh_next.noalias() += dgates.leftCols(2 * H) * u_gates.transpose();
  }
  w_->grad_mat().noalias() += cache.x.data.transpose() * da;
  u_->grad_mat() += du;
  b_->grad_row() += da.colwise().sum();

  SeqBatch dx;
  dx.steps = cache.x.steps;
  dx.batch = cache.x.batch;
  dx.data = da * w_->mat().transpose();
  return dx;
}

CausalConv1d::CausalConv1d(ParamStore& params, const std::string& prefix, std::size_t in,
                           std::size_t out, std::size_t kernel, std::size_t dilation)
    : w_(&params.add_weight(prefix + ".weight", kernel * in, out)),
      b_(&params.add_zeros(prefix + ".bias", {out})),
      in_(in), out_(out), kernel_(kernel), dilation_(dilation) {
  if (kernel == 0 || dilation == 0)
    throw ParameterError("causal conv: kernel and dilation must be positive");
}

SeqBatch CausalConv1d::forward(const SeqBatch& x) const {
  check_cols(x.data, in_, "causal conv input");
  SeqBatch y(x.steps, x.batch, out_);
  y.data.rowwise() += b_->row();
  const auto w = w_->mat();
  const auto B = static_cast<Eigen::Index>(x.batch);
  for (std::size_t k = 0; k < kernel_; ++k) {
    const std::size_t shift = (kernel_ - 1 - k) * dilation_;
    if (shift >= x.steps) continue;
    const Eigen::Index rows = static_cast<Eigen::Index>(x.steps - shift) * B;
    y.data.middleRows(static_cast<Eigen::Index>(shift) * B, rows).noalias() +=
        x.data.topRows(rows) *
        w.middleRows(static_cast<Eigen::Index>(k * in_), static_cast<Eigen::Index>(in_));
  }
  return y;
}

SeqBatch CausalConv1d::backward(const SeqBatch& x, const SeqBatch& dy) {
  check_cols(dy.data, out_, "causal conv backward");
  SeqBatch dx(x.steps, x.batch, in_);
  const auto w = w_->mat();
  auto gw = w_->grad_mat();
  const auto B = static_cast<Eigen::Index>(x.batch);
  for (std::size_t k = 0; k < kernel_; ++k) {
    const std::size_t shift = (kernel_ - 1 - k) * dilation_;
    if (shift >= x.steps) continue;
    const Eigen::Index rows = static_cast<Eigen::Index>(x.steps - shift) * B;
    const auto dy_block = dy.data.middleRows(static_cast<Eigen::Index>(shift) * B, rows);
    const auto wk =
        w.middleRows(static_cast<Eigen::Index>(k * in_), static_cast<Eigen::Index>(in_));
    gw.middleRows(static_cast<Eigen::Index>(k * in_), static_cast<Eigen::Index>(in_))
        .noalias() += x.data.topRows(rows).transpose() * dy_block;
    dx.data.topRows(rows).noalias() += dy_block * wk.transpose();
  }
  b_->grad_row() += dy.data.colwise().sum();
  return dx;
}

TcnBlock::TcnBlock(ParamStore& params, const std::string& prefix, std::size_t in,
                   std::size_t out, std::size_t kernel, std::size_t dilation)
    : conv1_(params, prefix + ".conv1", in, out, kernel, dilation),
      conv2_(params, prefix + ".conv2", out, out, kernel, dilation),
      has_proj_(in != out),
      out_(out) {
  if (has_proj_) proj_ = Dense(params, prefix + ".proj", in, out);
}

SeqBatch TcnBlock::forward(const SeqBatch& x, TcnCache* cache) const {
  if (x.steps == 0) throw ParameterError("tcn block: empty sequence");
  SeqBatch pre1 = conv1_.forward(x);
  SeqBatch act1 = pre1;
  act1.data = act1.data.cwiseMax(0.0);
  SeqBatch y = conv2_.forward(act1);
  if (has_proj_)
    y.data += proj_.forward(x.data);
  else
    y.data += x.data;
  if (cache) {
    cache->x = x;
    cache->pre1 = std::move(pre1);
    cache->act1 = std::move(act1);
  }
  return y;
}

SeqBatch TcnBlock::backward(const TcnCache& cache, const SeqBatch& dy) {
  SeqBatch dact1 = conv2_.backward(cache.act1, dy);
  dact1.data = dact1.data.cwiseProduct(
      (cache.pre1.data.array() > 0.0).cast<double>().matrix());
  SeqBatch dx = conv1_.backward(cache.x, dact1);
  if (has_proj_)
    dx.data += proj_.backward(cache.x.data, dy.data);
  else
    dx.data += dy.data;
  return dx;
}

Mat avg_pool_time(const SeqBatch& x) {
  if (x.steps == 0) throw ParameterError("avg_pool_time: empty sequence");
  Mat out = Mat::Zero(static_cast<Eigen::Index>(x.batch), x.data.cols());
  for (std::size_t t = 0; t < x.steps; ++t) out += x.step(t);
  return out / static_cast<double>(x.steps);
}

SeqBatch avg_pool_time_backward(const Mat& dy, std::size_t steps) {
  if (steps == 0) throw ParameterError("avg_pool_time: empty sequence");
  SeqBatch dx(steps, static_cast<std::size_t>(dy.rows()), static_cast<std::size_t>(dy.cols()));
  const Mat share = dy / static_cast<double>(steps);
  for (std::size_t t = 0; t < steps; ++t) dx.step(t) = share;
  return dx;
}

Mat dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::mt19937_64& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("dropout: p must be in [0, 1)");
  Mat mask(rows, cols);
  std::bernoulli_distribution keep(1.0 - p);
  const double scale = 1.0 / (1.0 - p);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = keep(rng) ? scale : 0.0;
  return mask;
}

}  // namespace e2t::nn
