#include "satmarl/nn.hpp"

#include <cmath>

namespace satmarl {

std::vector<int> MlpSpec::layer_dims() const {
  std::vector<int> dims;
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output_dim());
  return dims;
}

bool operator==(const MlpSpec& a, const MlpSpec& b) {
  return a.input_dim == b.input_dim && a.hidden == b.hidden && a.head == b.head &&
         a.n_actions == b.n_actions && a.n_heads == b.n_heads;
}

Eigen::Map<const Eigen::MatrixXd> ParamVector::weight(int layer) const {
  const auto& s = shapes[static_cast<std::size_t>(2 * layer)];
  return {data.data() + s.offset, s.rows, s.cols};
}

Eigen::Map<const Eigen::VectorXd> ParamVector::bias(int layer) const {
  const auto& s = shapes[static_cast<std::size_t>(2 * layer + 1)];
  return {data.data() + s.offset, s.rows};
}

ParamVector init_params(const MlpSpec& spec, std::uint64_t seed) {
  for (int d : spec.layer_dims()) {
    if (d < 1) throw ConfigError("init_params: all layer dims must be >= 1");
  }
  ParamVector p;
  p.spec = spec;
  const auto dims = spec.layer_dims();
  const int n_layers = spec.n_layers();

  std::ptrdiff_t total = 0;
  for (int l = 0; l < n_layers; ++l) {
    const int in = dims[static_cast<std::size_t>(l)];
    const int out = dims[static_cast<std::size_t>(l) + 1];
    p.shapes.push_back({"l" + std::to_string(l) + ".W", total, out, in});
    total += static_cast<std::ptrdiff_t>(out) * in;
    p.shapes.push_back({"l" + std::to_string(l) + ".b", total, out, 1});
    total += out;
  }
  p.data.setZero(total);

  Rng rng(seed);
  for (int l = 0; l < n_layers; ++l) {
    const auto& s = p.shapes[static_cast<std::size_t>(2 * l)];
    const double fan = std::sqrt(6.0 / (s.rows + s.cols));
    const double scale = (l == n_layers - 1 && spec.head == HeadKind::categorical) ? 0.01 : 1.0;
    double* w = p.data.data() + s.offset;
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(s.rows) * s.cols; ++k) {
      w[k] = scale * rng.uniform(-fan, fan);
    }
  }
  return p;
}

Eigen::MatrixXd mlp_forward(const ParamVector& p, const Eigen::MatrixXd& input) {
  if (!input.allFinite()) throw NumericError("mlp_forward: non-finite input");
  if (input.cols() != p.spec.input_dim) {
    throw ContractError("mlp_forward: input width does not match spec");
  }
  Eigen::MatrixXd h = input;
  const int n_layers = p.spec.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    Eigen::MatrixXd z = h * p.weight(l).transpose();
    z.rowwise() += p.bias(l).transpose();
    h = (l < n_layers - 1) ? z.array().tanh().matrix() : std::move(z);
  }
  return h;
}

void softmax_rows(const Eigen::MatrixXd& logits, int n_heads, Eigen::MatrixXd& probs,
                  Eigen::MatrixXd& log_probs) {
  const int width = static_cast<int>(logits.cols());
  if (n_heads < 1 || width % n_heads != 0) throw ContractError("softmax_rows: bad head layout");
  const int n_actions = width / n_heads;
  probs.resize(logits.rows(), width);
  log_probs.resize(logits.rows(), width);
  for (int h = 0; h < n_heads; ++h) {
    const auto block = logits.middleCols(h * n_actions, n_actions);
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
      const double mx = block.row(i).maxCoeff();
      Eigen::ArrayXd shifted = block.row(i).transpose().array() - mx;
      const double lse = std::log(shifted.exp().sum());
      log_probs.row(i).segment(h * n_actions, n_actions) = (shifted - lse).matrix().transpose();
      probs.row(i).segment(h * n_actions, n_actions) =
          (shifted - lse).exp().matrix().transpose();
    }
  }
}

Eigen::VectorXd gather_log_probs(const Eigen::MatrixXd& log_probs, int n_heads,
                                 const Eigen::MatrixXi& actions) {
  const int n_actions = static_cast<int>(log_probs.cols()) / n_heads;
  if (actions.rows() != log_probs.rows() || actions.cols() != n_heads) {
    throw ContractError("gather_log_probs: action matrix shape mismatch");
  }
  Eigen::VectorXd out(log_probs.rows());
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i) {
    double lp = 0.0;
    for (int h = 0; h < n_heads; ++h) {
      const int a = actions(i, h);
      if (a < 0 || a >= n_actions) throw ContractError("gather_log_probs: action out of range");
      lp += log_probs(i, h * n_actions + a);
    }
    out[i] = lp;
  }
  return out;
}

Eigen::VectorXd entropy_rows(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& log_probs,
                             int n_heads) {
  (void)n_heads;
  return -(probs.array() * log_probs.array()).rowwise().sum();
}

PolicyEval policy_forward(const ParamVector& p, const Eigen::VectorXd& obs) {
  if (p.spec.head != HeadKind::categorical) {
    throw ContractError("policy_forward: parameters are not a categorical policy");
  }
  const Eigen::MatrixXd logits = mlp_forward(p, obs.transpose());
  Eigen::MatrixXd probs, log_probs;
  softmax_rows(logits, p.spec.n_heads, probs, log_probs);
  PolicyEval ev;
  ev.logits = logits.row(0);
  ev.probs = probs.row(0);
  ev.log_probs = log_probs.row(0);
  ev.entropy = entropy_rows(probs, log_probs, p.spec.n_heads)[0];
  return ev;
}

double value_forward(const ParamVector& p, const Eigen::VectorXd& obs) {
  if (p.spec.head != HeadKind::scalar) {
    throw ContractError("value_forward: parameters are not a scalar head");
  }
  return mlp_forward(p, obs.transpose())(0, 0);
}

int sample_categorical(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

int argmax_index(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  return static_cast<int>(best);
}

AdamState make_adam(std::size_t n_params, const AdamConfig& cfg) {
  AdamState s;
  s.m.setZero(static_cast<Eigen::Index>(n_params));
  s.v.setZero(static_cast<Eigen::Index>(n_params));
  s.t = 0;
  s.cfg = cfg;
  return s;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ContractError("adam_step: size mismatch");
  }
  state.t += 1;
  const auto& c = state.cfg;
  state.m = c.beta1 * state.m + (1.0 - c.beta1) * grads;
  state.v = c.beta2 * state.v.array().matrix() + (1.0 - c.beta2) * grads.array().square().matrix();
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  params.array() -=
      c.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + c.eps);
}

}  // namespace satmarl
