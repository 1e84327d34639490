#include "satmarl/tape.hpp"

#include <cmath>

namespace satmarl {

int Tape::bind(const ParamVector& params) {
  bindings_.push_back(&params);
  binding_grads_.emplace_back(Eigen::VectorXd::Zero(params.data.size()));
  return static_cast<int>(bindings_.size()) - 1;
}

Tape::Id Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

void Tape::check_same_shape(Id a, Id b, const char* what) const {
  const auto& va = nodes_[static_cast<std::size_t>(a)].value;
  const auto& vb = nodes_[static_cast<std::size_t>(b)].value;
  if (va.rows() != vb.rows() || va.cols() != vb.cols()) {
    throw ContractError(std::string("tape: shape mismatch in ") + what);
  }
}

Tape::Id Tape::input(Eigen::MatrixXd value) {
  Node n;
  n.op = Op::input;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::Id Tape::param_ref(int binding) {
  Node n;
  n.op = Op::param_ref;
  n.binding = binding;
  n.value = bindings_[static_cast<std::size_t>(binding)]->data;
  return push(std::move(n));
}

Tape::Id Tape::affine(Id x, int binding, int layer) {
  const ParamVector& p = *bindings_[static_cast<std::size_t>(binding)];
  const auto W = p.weight(layer);
  if (nodes_[static_cast<std::size_t>(x)].value.cols() != W.cols()) {
    throw ContractError("tape: affine input width mismatch");
  }
  Node n;
  n.op = Op::affine;
  n.a = x;
  n.binding = binding;
  n.layer = layer;
  n.value = nodes_[static_cast<std::size_t>(x)].value * W.transpose();
  n.value.rowwise() += p.bias(layer).transpose();
  return push(std::move(n));
}

Tape::Id Tape::mlp(Id x, int binding) {
  const ParamVector& p = *bindings_[static_cast<std::size_t>(binding)];
  Id h = x;
  const int n_layers = p.spec.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    h = affine(h, binding, l);
    if (l < n_layers - 1) h = tanh_(h);
  }
  return h;
}

Tape::Id Tape::tanh_(Id x) {
  Node n;
  n.op = Op::tanh_op;
  n.a = x;
  n.value = nodes_[static_cast<std::size_t>(x)].value.array().tanh();
  return push(std::move(n));
}

Tape::Id Tape::log_prob(Id logits, Eigen::MatrixXi actions, int n_heads) {
  Eigen::MatrixXd probs, log_probs;
  softmax_rows(nodes_[static_cast<std::size_t>(logits)].value, n_heads, probs, log_probs);
  Node n;
  n.op = Op::log_prob;
  n.a = logits;
  n.n_heads = n_heads;
  n.value = gather_log_probs(log_probs, n_heads, actions);
  n.actions = std::move(actions);
  n.aux = std::move(probs);
  return push(std::move(n));
}

Tape::Id Tape::entropy(Id logits, int n_heads) {
  Eigen::MatrixXd probs, log_probs;
  softmax_rows(nodes_[static_cast<std::size_t>(logits)].value, n_heads, probs, log_probs);
  Node n;
  n.op = Op::entropy;
  n.a = logits;
  n.n_heads = n_heads;
  n.value = entropy_rows(probs, log_probs, n_heads);
  n.aux = std::move(probs);
  n.aux2 = std::move(log_probs);
  return push(std::move(n));
}

Tape::Id Tape::exp_(Id x) {
  Node n;
  n.op = Op::exp_op;
  n.a = x;
  n.value = nodes_[static_cast<std::size_t>(x)].value.array().exp();
  return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
  check_same_shape(a, b, "add");
  Node n;
  n.op = Op::add;
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value + nodes_[static_cast<std::size_t>(b)].value;
  return push(std::move(n));
}

Tape::Id Tape::sub(Id a, Id b) {
  check_same_shape(a, b, "sub");
  Node n;
  n.op = Op::sub;
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value - nodes_[static_cast<std::size_t>(b)].value;
  return push(std::move(n));
}

Tape::Id Tape::mul(Id a, Id b) {
  check_same_shape(a, b, "mul");
  Node n;
  n.op = Op::mul;
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value.cwiseProduct(
      nodes_[static_cast<std::size_t>(b)].value);
  return push(std::move(n));
}

Tape::Id Tape::scale(Id x, double c) {
  Node n;
  n.op = Op::scale;
  n.a = x;
  n.c0 = c;
  n.value = c * nodes_[static_cast<std::size_t>(x)].value;
  return push(std::move(n));
}

Tape::Id Tape::square(Id x) {
  Node n;
  n.op = Op::square;
  n.a = x;
  n.value = nodes_[static_cast<std::size_t>(x)].value.array().square();
  return push(std::move(n));
}

Tape::Id Tape::clip(Id x, double lo, double hi) {
  if (lo > hi) throw ContractError("tape: clip bounds inverted");
  Node n;
  n.op = Op::clip;
  n.a = x;
  n.c0 = lo;
  n.c1 = hi;
  n.aux2 = nodes_[static_cast<std::size_t>(x)].value;
  n.value = n.aux2.array().min(hi).max(lo);
  return push(std::move(n));
}

Tape::Id Tape::min_(Id a, Id b) {
  check_same_shape(a, b, "min");
  Node n;
  n.op = Op::min_op;
  n.a = a;
  n.b = b;
  n.value = nodes_[static_cast<std::size_t>(a)].value.cwiseMin(
      nodes_[static_cast<std::size_t>(b)].value);
  return push(std::move(n));
}

Tape::Id Tape::mean(Id x) {
  const auto& v = nodes_[static_cast<std::size_t>(x)].value;
  if (v.size() == 0) throw ContractError("tape: mean of empty value");
  Node n;
  n.op = Op::mean;
  n.a = x;
  n.value = Eigen::MatrixXd::Constant(1, 1, v.mean());
  return push(std::move(n));
}

Tape::Id Tape::sum(Id x) {
  Node n;
  n.op = Op::sum;
  n.a = x;
  n.value = Eigen::MatrixXd::Constant(1, 1, nodes_[static_cast<std::size_t>(x)].value.sum());
  return push(std::move(n));
}

double Tape::scalar(Id id) const {
  const auto& v = nodes_[static_cast<std::size_t>(id)].value;
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("tape: scalar() on non-scalar node");
  return v(0, 0);
}

Eigen::MatrixXd& Tape::grad_of(Id id) {
  auto& n = nodes_[static_cast<std::size_t>(id)];
  if (n.grad.size() == 0) n.grad.setZero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Id loss) {
  if (backward_done_) throw ContractError("tape: backward() may only run once");
  backward_done_ = true;
  if (nodes_[static_cast<std::size_t>(loss)].value.size() != 1) {
    throw ContractError("tape: backward() requires a scalar loss");
  }
  grad_of(loss).setConstant(1.0);

  for (Id id = loss; id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) continue;  // not on any path to the loss
    const Eigen::MatrixXd& g = n.grad;
    switch (n.op) {
      case Op::input:
        break;
      case Op::param_ref:
        binding_grads_[static_cast<std::size_t>(n.binding)] += g.col(0);
        break;
      case Op::affine: {
        const ParamVector& p = *bindings_[static_cast<std::size_t>(n.binding)];
        const auto& sw = p.shapes[static_cast<std::size_t>(2 * n.layer)];
        const auto& sb = p.shapes[static_cast<std::size_t>(2 * n.layer + 1)];
        const auto& x = nodes_[static_cast<std::size_t>(n.a)].value;
        auto& bg = binding_grads_[static_cast<std::size_t>(n.binding)];
        Eigen::Map<Eigen::MatrixXd>(bg.data() + sw.offset, sw.rows, sw.cols) +=
            g.transpose() * x;
        Eigen::Map<Eigen::VectorXd>(bg.data() + sb.offset, sb.rows) +=
            g.colwise().sum().transpose();
        grad_of(n.a) += g * p.weight(n.layer);
        break;
      }
      case Op::tanh_op:
        grad_of(n.a).array() += g.array() * (1.0 - n.value.array().square());
        break;
      case Op::log_prob: {
        const int n_actions = static_cast<int>(n.aux.cols()) / n.n_heads;
        auto& ga = grad_of(n.a);
        for (Eigen::Index i = 0; i < n.aux.rows(); ++i) {
          const double gi = g(i, 0);
          for (int h = 0; h < n.n_heads; ++h) {
            const int base = h * n_actions;
            for (int j = 0; j < n_actions; ++j) {
              ga(i, base + j) -= gi * n.aux(i, base + j);
            }
            ga(i, base + n.actions(i, h)) += gi;
          }
        }
        break;
      }
      case Op::entropy: {
        const int n_actions = static_cast<int>(n.aux.cols()) / n.n_heads;
        auto& ga = grad_of(n.a);
        for (Eigen::Index i = 0; i < n.aux.rows(); ++i) {
          const double gi = g(i, 0);
          for (int h = 0; h < n.n_heads; ++h) {
            // Per-head entropy H_h; d H_h / d z_j = -p_j (log p_j + H_h).
            double head_h = 0.0;
            const int base = h * n_actions;
            for (int j = 0; j < n_actions; ++j) {
              head_h -= n.aux(i, base + j) * n.aux2(i, base + j);
            }
            for (int j = 0; j < n_actions; ++j) {
              ga(i, base + j) -=
                  gi * n.aux(i, base + j) * (n.aux2(i, base + j) + head_h);
            }
          }
        }
        break;
      }
      case Op::exp_op:
        grad_of(n.a).array() += g.array() * n.value.array();
        break;
      case Op::add:
        grad_of(n.a) += g;
        grad_of(n.b) += g;
        break;
      case Op::sub:
        grad_of(n.a) += g;
        grad_of(n.b) -= g;
        break;
      case Op::mul:
        grad_of(n.a).array() += g.array() * nodes_[static_cast<std::size_t>(n.b)].value.array();
        grad_of(n.b).array() += g.array() * nodes_[static_cast<std::size_t>(n.a)].value.array();
        break;
      case Op::scale:
        grad_of(n.a) += n.c0 * g;
        break;
      case Op::square:
        grad_of(n.a).array() +=
            2.0 * g.array() * nodes_[static_cast<std::size_t>(n.a)].value.array();
        break;
      case Op::clip: {
        // Pass-through on [lo, hi] inclusive; ties go to the argument.
        const auto inside = (n.aux2.array() >= n.c0 && n.aux2.array() <= n.c1);
        grad_of(n.a).array() += inside.select(g.array(), 0.0);
        break;
      }
      case Op::min_op: {
        const auto& va = nodes_[static_cast<std::size_t>(n.a)].value;
        const auto& vb = nodes_[static_cast<std::size_t>(n.b)].value;
        const auto take_a = (va.array() <= vb.array());
        grad_of(n.a).array() += take_a.select(g.array(), 0.0);
        grad_of(n.b).array() += take_a.select(0.0, g.array());
        break;
      }
      case Op::mean:
        grad_of(n.a).array() +=
            g(0, 0) / static_cast<double>(nodes_[static_cast<std::size_t>(n.a)].value.size());
        break;
      case Op::sum:
        grad_of(n.a).array() += g(0, 0);
        break;
    }
  }
}

const Eigen::VectorXd& Tape::grad(int binding) const {
  if (!backward_done_) throw ContractError("tape: grad() before backward()");
  return binding_grads_[static_cast<std::size_t>(binding)];
}

}  // namespace satmarl
