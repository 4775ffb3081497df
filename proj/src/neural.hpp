#pragma once

#include <string>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mamimo {

// Output activation: actors squash into (-1, 1), critics stay linear.
enum class Head { kTanh, kIdentity };

const char* head_name(Head head);
Head head_from_name(const std::string& name);

// Dense ReLU network. sizes = [input, hidden..., output]; w[l] maps
// activations of layer l to pre-activations of layer l+1 (rows = fan-out).
struct Mlp {
  std::vector<int> sizes;
  Head head = Head::kIdentity;
  std::vector<RMatrix> w;
  std::vector<RVector> b;

  int layers() const { return static_cast<int>(w.size()); }
  int input_dim() const { return sizes.front(); }
  int output_dim() const { return sizes.back(); }

  // Seed-deterministic init: hidden layers uniform +-1/sqrt(fan_in), output
  // layer uniform +-3e-3 so fresh networks start near zero output.
  static Mlp create(const std::vector<int>& sizes, Head head, Rng& rng);
};

// Intermediate values of one forward pass, needed by backward.
// Batches are stored column-wise: activations[l] is sizes[l] x batch.
struct ForwardCache {
  std::vector<RMatrix> activations;  // activations[0] = input
  std::vector<RMatrix> pre;          // pre[l] = w[l]*activations[l] + b[l]
};

// Batched forward pass (columns = batch items). Pass a cache to record the
// intermediates for a subsequent backward call.
RMatrix forward(const Mlp& net, const RMatrix& input, ForwardCache* cache = nullptr);
RVector forward(const Mlp& net, const RVector& input);

// Parameter gradients plus the gradient w.r.t. the input batch. Parameter
// gradients are summed over batch columns, so an objective defined as a
// batch mean wants upstream already scaled by 1/batch.
struct Gradients {
  std::vector<RMatrix> w;
  std::vector<RVector> b;
  RMatrix input;
};

// Exact reverse-mode gradients through the cached forward pass; `upstream`
// holds d(objective)/d(output) per batch column. With
// `upstream_at_preactivation` the upstream is taken as d(objective)/d(z) of
// the final pre-activation instead, skipping the output head entirely —
// used for objectives defined on the raw logits of a squashed network.
Gradients backward(const Mlp& net, const ForwardCache& cache,
                   const RMatrix& upstream,
                   bool upstream_at_preactivation = false);

// Standard bias-corrected Adam over all network parameters.
struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long step = 0;
  std::vector<RMatrix> mw, vw;
  std::vector<RVector> mb, vb;

  static AdamState create(const Mlp& net, double lr);
};

void adam_step(AdamState& state, Mlp& net, const Gradients& grads);

// theta_target <- tau * theta_online + (1 - tau) * theta_target.
// Throws Error(kArchitectureMismatch) when shapes disagree.
void soft_update(Mlp& target, const Mlp& online, double tau);

// Total scalar parameter count (weights + biases).
long long parameter_count(const Mlp& net);

}  // namespace mamimo
