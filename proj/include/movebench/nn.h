#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "movebench/rng.h"

namespace movebench {

// Fully connected net with SiLU hidden activations and a linear output
// layer. Templated so gradient checks run at 64-bit while training runs at
// 32-bit. Forward/backward are hand-written; rows are batch samples.
template <typename Scalar>
class Mlp {
 public:
  using Mat =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Grads {
    std::vector<Mat> w;
    std::vector<Vec> b;
  };

  // Activations remembered by forward() for the backward pass.
  struct Cache {
    std::vector<Mat> inputs;  // inputs[l]: what layer l consumed
    std::vector<Mat> pre;     // pre[l]: pre-activation of layer l
  };

  // Glorot-uniform weights (row-major draw order), zero biases.
  Mlp(std::vector<int> sizes, Rng& rng) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) {
      throw std::invalid_argument("mlp needs at least input and output sizes");
    }
    for (int s : sizes_) {
      if (s < 1) throw std::invalid_argument("mlp layer size must be >= 1");
    }
    const int layers = num_layers();
    w_.resize(layers);
    b_.resize(layers);
    for (int l = 0; l < layers; ++l) {
      const int fan_in = sizes_[l];
      const int fan_out = sizes_[l + 1];
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      w_[l].resize(fan_out, fan_in);
      for (int i = 0; i < fan_out; ++i) {
        for (int j = 0; j < fan_in; ++j) {
          w_[l](i, j) = static_cast<Scalar>(rng.uniform(-limit, limit));
        }
      }
      b_[l] = Vec::Zero(fan_out);
    }
  }

  int num_layers() const { return static_cast<int>(sizes_.size()) - 1; }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<Mat>& weights() const { return w_; }
  const std::vector<Vec>& biases() const { return b_; }

  Mat forward(const Mat& x) const {
    Cache cache;
    return forward(x, cache);
  }

  Mat forward(const Mat& x, Cache& cache) const {
    if (x.cols() != sizes_.front()) {
      throw std::invalid_argument("mlp forward: input width mismatch");
    }
    const int layers = num_layers();
    cache.inputs.assign(layers, Mat());
    cache.pre.assign(layers, Mat());
    Mat a = x;
    for (int l = 0; l < layers; ++l) {
      cache.inputs[l] = a;
      Mat z = a * w_[l].transpose();
      z.rowwise() += b_[l].transpose();
      cache.pre[l] = z;
      a = (l + 1 < layers) ? silu(z) : z;
    }
    return a;
  }

  // Backpropagates dL/dy, filling parameter gradients; returns dL/dx.
  Mat backward(const Cache& cache, const Mat& dy, Grads& grads) const {
    const int layers = num_layers();
    if (static_cast<int>(cache.inputs.size()) != layers ||
        static_cast<int>(cache.pre.size()) != layers) {
      throw std::logic_error("mlp backward: cache missing or stale");
    }
    for (int l = 0; l < layers; ++l) {
      if (cache.inputs[l].cols() != sizes_[l] ||
          cache.pre[l].cols() != sizes_[l + 1]) {
        throw std::logic_error("mlp backward: cache does not match network");
      }
    }
    if (dy.cols() != sizes_.back() || dy.rows() != cache.pre.back().rows()) {
      throw std::logic_error("mlp backward: output gradient shape mismatch");
    }
    grads.w.assign(layers, Mat());
    grads.b.assign(layers, Vec());
    Mat dz = dy;
    for (int l = layers - 1; l >= 0; --l) {
      if (l + 1 < layers) {
        dz = dz.cwiseProduct(silu_grad(cache.pre[l]));
      }
      grads.w[l] = dz.transpose() * cache.inputs[l];
      grads.b[l] = dz.colwise().sum().transpose();
      if (l > 0) dz = (dz * w_[l]).eval();
    }
    return dz * w_[0];
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (int l = 0; l < num_layers(); ++l) {
      n += static_cast<std::size_t>(w_[l].size()) +
           static_cast<std::size_t>(b_[l].size());
    }
    return n;
  }

  // Parameters in declaration order: W0, b0, W1, b1, ... (weights row-major).
  std::vector<Scalar> flatten() const {
    std::vector<Scalar> out;
    out.reserve(param_count());
    for (int l = 0; l < num_layers(); ++l) {
      out.insert(out.end(), w_[l].data(), w_[l].data() + w_[l].size());
      out.insert(out.end(), b_[l].data(), b_[l].data() + b_[l].size());
    }
    return out;
  }

  void unflatten(const std::vector<Scalar>& params) {
    if (params.size() != param_count()) {
      throw std::invalid_argument("mlp unflatten: parameter count mismatch");
    }
    std::size_t at = 0;
    for (int l = 0; l < num_layers(); ++l) {
      std::copy(params.begin() + at, params.begin() + at + w_[l].size(),
                w_[l].data());
      at += w_[l].size();
      std::copy(params.begin() + at, params.begin() + at + b_[l].size(),
                b_[l].data());
      at += b_[l].size();
    }
  }

  // Mutable access for the optimizer and finite-difference probes.
  std::vector<Mat>& mutable_weights() { return w_; }
  std::vector<Vec>& mutable_biases() { return b_; }

 private:
  static Mat silu(const Mat& z) {
    return (z.array() / (1 + (-z.array()).exp())).matrix();
  }
  static Mat silu_grad(const Mat& z) {
    const auto s = (1 / (1 + (-z.array()).exp())).eval();
    return (s * (1 + z.array() * (1 - s))).matrix();
  }

  std::vector<int> sizes_;
  std::vector<Mat> w_;
  std::vector<Vec> b_;
};

// Adam with standard bias correction. Rejects non-finite gradients so a
// diverged loss cannot silently poison the parameters.
template <typename Scalar>
class Adam {
 public:
  using Mat = typename Mlp<Scalar>::Mat;
  using Vec = typename Mlp<Scalar>::Vec;

  explicit Adam(const Mlp<Scalar>& net, double lr, double beta1 = 0.9,
                double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    if (!(lr > 0)) throw std::invalid_argument("adam: lr must be positive");
    for (int l = 0; l < net.num_layers(); ++l) {
      mw_.push_back(Mat::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
      vw_.push_back(Mat::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
      mb_.push_back(Vec::Zero(net.biases()[l].size()));
      vb_.push_back(Vec::Zero(net.biases()[l].size()));
    }
  }

  void step(Mlp<Scalar>& net, const typename Mlp<Scalar>::Grads& grads) {
    for (const auto& g : grads.w) {
      if (!g.allFinite()) {
        throw std::invalid_argument("adam: non-finite gradient");
      }
    }
    for (const auto& g : grads.b) {
      if (!g.allFinite()) {
        throw std::invalid_argument("adam: non-finite gradient");
      }
    }
    ++t_;
    const Scalar c1 = static_cast<Scalar>(1.0 - std::pow(beta1_, t_));
    const Scalar c2 = static_cast<Scalar>(1.0 - std::pow(beta2_, t_));
    const Scalar b1 = static_cast<Scalar>(beta1_);
    const Scalar b2 = static_cast<Scalar>(beta2_);
    const Scalar lr = static_cast<Scalar>(lr_);
    const Scalar eps = static_cast<Scalar>(eps_);
    auto& w = net.mutable_weights();
    auto& b = net.mutable_biases();
    for (std::size_t l = 0; l < w.size(); ++l) {
      mw_[l] = b1 * mw_[l] + (1 - b1) * grads.w[l];
      vw_[l] = b2 * vw_[l] + (1 - b2) * grads.w[l].cwiseProduct(grads.w[l]);
      w[l].array() -=
          lr * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps);
      mb_[l] = b1 * mb_[l] + (1 - b1) * grads.b[l];
      vb_[l] = b2 * vb_[l] + (1 - b2) * grads.b[l].cwiseProduct(grads.b[l]);
      b[l].array() -=
          lr * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps);
    }
  }

  int steps_taken() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
  std::vector<Mat> mw_, vw_;
  std::vector<Vec> mb_, vb_;
};

}  // namespace movebench
