#pragma once

// Small dense-network substrate: tanh MLPs with a categorical or scalar
// head, flat parameter vectors with a shape table, and Adam.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "satmarl/common.hpp"

namespace satmarl {

enum class HeadKind { categorical, scalar };

struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden{64, 64};
  HeadKind head = HeadKind::scalar;
  int n_actions = 1;  // categorical: actions per head
  int n_heads = 1;    // categorical: independent heads (factored joint policy)

  int output_dim() const { return head == HeadKind::categorical ? n_actions * n_heads : 1; }
  // Layer widths including input and output.
  std::vector<int> layer_dims() const;
  int n_layers() const { return static_cast<int>(hidden.size()) + 1; }
};

bool operator==(const MlpSpec& a, const MlpSpec& b);

struct ParamSlice {
  std::string name;
  std::ptrdiff_t offset = 0;
  int rows = 0;
  int cols = 0;  // bias slices have cols = 1
};

// Flat parameter vector plus its layer shape table. Matrices are stored
// column-major in the flat vector. Slices come in (W, b) pairs per layer.
struct ParamVector {
  MlpSpec spec;
  Eigen::VectorXd data;
  std::vector<ParamSlice> shapes;

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  std::size_t size() const { return static_cast<std::size_t>(data.size()); }
};

// Xavier-uniform weights (biases zero); a categorical head's final weights
// are scaled by 0.01 for a near-uniform initial policy.
ParamVector init_params(const MlpSpec& spec, std::uint64_t seed);

// Raw batched forward pass (rows = samples). Throws NumericError on
// non-finite input.
Eigen::MatrixXd mlp_forward(const ParamVector& p, const Eigen::MatrixXd& input);

struct PolicyEval {
  Eigen::VectorXd logits;     // n_heads * n_actions
  Eigen::VectorXd probs;      // per-head softmax, same layout
  Eigen::VectorXd log_probs;  // per-head log-softmax
  double entropy = 0.0;       // summed over heads
};

PolicyEval policy_forward(const ParamVector& p, const Eigen::VectorXd& obs);
double value_forward(const ParamVector& p, const Eigen::VectorXd& obs);

// Stable per-head softmax utilities over a logits matrix laid out as
// n_heads consecutive blocks of n_actions columns.
void softmax_rows(const Eigen::MatrixXd& logits, int n_heads, Eigen::MatrixXd& probs,
                  Eigen::MatrixXd& log_probs);
// Per-sample joint log-prob of the chosen action per head (columns of
// `actions` index heads) and per-sample entropy summed over heads.
Eigen::VectorXd gather_log_probs(const Eigen::MatrixXd& log_probs, int n_heads,
                                 const Eigen::MatrixXi& actions);
Eigen::VectorXd entropy_rows(const Eigen::MatrixXd& probs, const Eigen::MatrixXd& log_probs,
                             int n_heads);

// Inverse-CDF categorical sample from one head's probabilities.
int sample_categorical(const Eigen::VectorXd& probs, Rng& rng);
int argmax_index(const Eigen::VectorXd& v);

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;
  AdamConfig cfg;
};

AdamState make_adam(std::size_t n_params, const AdamConfig& cfg = {});

// Bias-corrected Adam update in place; increments the step counter.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state);

}  // namespace satmarl
