#pragma once

// Reverse-mode gradients over a small set of batched primitives: affine
// layers, tanh, per-head categorical log-prob and entropy, exp, elementwise
// arithmetic, square, clip, min, and mean. Enough to express the clipped
// surrogate, value and entropy terms of the training losses and to get
// exact gradients with respect to every bound parameter vector.
//
// Subgradient convention: clip propagates through the interior branch
// inclusive of the bounds, min ties go to the first argument.

#include <vector>

#include <Eigen/Core>

#include "satmarl/nn.hpp"

namespace satmarl {

class Tape {
 public:
  using Id = int;

  // Registers a parameter vector for gradient accumulation. The reference
  // must outlive the tape.
  int bind(const ParamVector& params);

  Id input(Eigen::MatrixXd value);

  // y = x * W(layer)^T + b(layer), using `binding`'s shape table.
  Id affine(Id x, int binding, int layer);
  // Full MLP of the bound spec (affine + tanh chain, linear output).
  Id mlp(Id x, int binding);

  Id tanh_(Id x);
  // Per-sample joint log-prob of the chosen action per head. `logits` has
  // n_heads blocks of equal width; `actions` has one column per head.
  Id log_prob(Id logits, Eigen::MatrixXi actions, int n_heads);
  // Per-sample entropy summed over heads.
  Id entropy(Id logits, int n_heads);
  Id exp_(Id x);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id mul(Id a, Id b);  // elementwise
  Id scale(Id x, double c);
  Id square(Id x);
  Id clip(Id x, double lo, double hi);
  Id min_(Id a, Id b);
  Id mean(Id x);  // mean over all entries -> 1x1

  // The whole flat parameter vector of a binding as a (n x 1) value.
  Id param_ref(int binding);
  Id sum(Id x);  // sum over all entries -> 1x1

  const Eigen::MatrixXd& value(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  double scalar(Id id) const;

  // Reverse pass from a 1x1 loss node. May be called once per tape.
  void backward(Id loss);
  const Eigen::VectorXd& grad(int binding) const;

 private:
  enum class Op {
    input,
    affine,
    tanh_op,
    log_prob,
    entropy,
    exp_op,
    add,
    sub,
    mul,
    scale,
    square,
    clip,
    min_op,
    mean,
    sum,
    param_ref,
  };

  struct Node {
    Op op;
    Id a = -1, b = -1;
    int binding = -1;
    int layer = -1;
    double c0 = 0.0, c1 = 0.0;
    int n_heads = 1;
    Eigen::MatrixXi actions;
    Eigen::MatrixXd value;
    Eigen::MatrixXd aux;   // cached probs (log_prob / entropy)
    Eigen::MatrixXd aux2;  // cached log-probs (entropy) / pre-clip input
    Eigen::MatrixXd grad;
  };

  Id push(Node n);
  void check_same_shape(Id a, Id b, const char* what) const;
  Eigen::MatrixXd& grad_of(Id id);

  std::vector<Node> nodes_;
  std::vector<const ParamVector*> bindings_;
  std::vector<Eigen::VectorXd> binding_grads_;
  bool backward_done_ = false;
};

}  // namespace satmarl
