#include "neural.hpp"

#include <cmath>

namespace mamimo {

const char* head_name(Head head) {
  return head == Head::kTanh ? "tanh" : "identity";
}

Head head_from_name(const std::string& name) {
  if (name == "tanh") return Head::kTanh;
  if (name == "identity") return Head::kIdentity;
  fail(ErrorCode::kCheckpointInvalid, "unknown activation tag \"" + name + "\"");
}

Mlp Mlp::create(const std::vector<int>& sizes, Head head, Rng& rng) {
  if (sizes.size() < 2)
    fail(ErrorCode::kInvalidArgument, "network needs input and output layers");
  for (int s : sizes)
    if (s < 1) fail(ErrorCode::kInvalidArgument, "layer sizes must be >= 1");

  Mlp net;
  net.sizes = sizes;
  net.head = head;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l];
    const int fan_out = sizes[l + 1];
    // Hidden layers: uniform +-1/sqrt(fan_in). Output layer: uniform +-3e-3,
    // so initial actions and value estimates start near zero and the first
    // target updates cannot saturate the tanh head or blow up the critic.
    const bool output_layer = l + 2 == sizes.size();
    const double limit =
        output_layer ? 3e-3 : 1.0 / std::sqrt(static_cast<double>(fan_in));
    RMatrix w(fan_out, fan_in);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r)
        w(r, c) = rng.uniform(-limit, limit);
    RVector b(fan_out);
    for (Eigen::Index r = 0; r < b.size(); ++r) b[r] = rng.uniform(-limit, limit);
    net.w.push_back(std::move(w));
    net.b.push_back(std::move(b));
  }
  return net;
}

RMatrix forward(const Mlp& net, const RMatrix& input, ForwardCache* cache) {
  if (input.rows() != net.input_dim())
    fail(ErrorCode::kInvalidArgument,
         "input has " + std::to_string(input.rows()) + " rows, network expects " +
             std::to_string(net.input_dim()));
  if (cache) {
    cache->activations.clear();
    cache->pre.clear();
    cache->activations.push_back(input);
  }

  RMatrix x = input;
  const int last = net.layers() - 1;
  for (int l = 0; l <= last; ++l) {
    RMatrix z = (net.w[l] * x).colwise() + net.b[l];
    if (l < last)
      x = z.cwiseMax(0.0);
    else if (net.head == Head::kTanh)
      x = z.array().tanh().matrix();
    else
      x = z;
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->activations.push_back(x);
    }
  }
  return x;
}

RVector forward(const Mlp& net, const RVector& input) {
  return forward(net, RMatrix(input), nullptr).col(0);
}

Gradients backward(const Mlp& net, const ForwardCache& cache,
                   const RMatrix& upstream, bool upstream_at_preactivation) {
  const int layers = net.layers();
  if (static_cast<int>(cache.pre.size()) != layers)
    fail(ErrorCode::kInvalidArgument, "forward cache does not match the network");
  if (upstream.rows() != net.output_dim() ||
      upstream.cols() != cache.activations.back().cols())
    fail(ErrorCode::kInvalidArgument, "upstream gradient shape mismatch");

  Gradients g;
  g.w.resize(static_cast<size_t>(layers));
  g.b.resize(static_cast<size_t>(layers));

  // Output head first: tanh'(z) = 1 - tanh(z)^2, with tanh(z) cached as the
  // final activation.
  RMatrix delta;
  if (upstream_at_preactivation) {
    delta = upstream;
  } else if (net.head == Head::kTanh) {
    const RMatrix& y = cache.activations.back();
    delta = upstream.cwiseProduct(RMatrix::Ones(y.rows(), y.cols()) -
                                  y.cwiseProduct(y));
  } else {
    delta = upstream;
  }

  for (int l = layers - 1; l >= 0; --l) {
    g.w[static_cast<size_t>(l)] = delta * cache.activations[static_cast<size_t>(l)].transpose();
    g.b[static_cast<size_t>(l)] = delta.rowwise().sum();
    RMatrix dx = net.w[static_cast<size_t>(l)].transpose() * delta;
    if (l > 0) {
      // ReLU mask from the previous layer's pre-activation sign.
      const RMatrix& z = cache.pre[static_cast<size_t>(l - 1)];
      delta = dx.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    } else {
      g.input = std::move(dx);
    }
  }
  return g;
}

AdamState AdamState::create(const Mlp& net, double lr) {
  AdamState s;
  s.lr = lr;
  for (int l = 0; l < net.layers(); ++l) {
    s.mw.push_back(RMatrix::Zero(net.w[static_cast<size_t>(l)].rows(),
                                 net.w[static_cast<size_t>(l)].cols()));
    s.vw.push_back(s.mw.back());
    s.mb.push_back(RVector::Zero(net.b[static_cast<size_t>(l)].size()));
    s.vb.push_back(s.mb.back());
  }
  return s;
}

namespace {

template <typename Tensor>
void adam_update(double lr, double eps, double beta1, double beta2,
                 double bias1, double bias2, Tensor& m, Tensor& v,
                 Tensor& param, const Tensor& grad) {
  m = beta1 * m + (1.0 - beta1) * grad;
  v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
  param.array() -=
      lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps);
}

}  // namespace

void adam_step(AdamState& state, Mlp& net, const Gradients& grads) {
  if (grads.w.size() != net.w.size() || state.mw.size() != net.w.size())
    fail(ErrorCode::kArchitectureMismatch, "optimizer state does not match the network");
  ++state.step;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t l = 0; l < net.w.size(); ++l) {
    adam_update(state.lr, state.eps, state.beta1, state.beta2, bias1, bias2,
                state.mw[l], state.vw[l], net.w[l], grads.w[l]);
    adam_update(state.lr, state.eps, state.beta1, state.beta2, bias1, bias2,
                state.mb[l], state.vb[l], net.b[l], grads.b[l]);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.sizes != online.sizes || target.head != online.head)
    fail(ErrorCode::kArchitectureMismatch,
         "target and online networks have different architectures");
  for (size_t l = 0; l < target.w.size(); ++l) {
    target.w[l] = tau * online.w[l] + (1.0 - tau) * target.w[l];
    target.b[l] = tau * online.b[l] + (1.0 - tau) * target.b[l];
  }
}

long long parameter_count(const Mlp& net) {
  long long count = 0;
  for (size_t l = 0; l < net.w.size(); ++l)
    count += net.w[l].size() + net.b[l].size();
  return count;
}

}  // namespace mamimo
