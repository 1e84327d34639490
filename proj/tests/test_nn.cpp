#include <cmath>

#include "doctest.h"
#include "satmarl/checkpoint.hpp"
#include "satmarl/nn.hpp"
#include "satmarl/ppo.hpp"
#include "satmarl/tape.hpp"

using namespace satmarl;

namespace {

MlpSpec categorical_spec(int input, int actions, std::vector<int> hidden = {64, 64}) {
  MlpSpec s;
  s.input_dim = input;
  s.hidden = std::move(hidden);
  s.head = HeadKind::categorical;
  s.n_actions = actions;
  return s;
}

MlpSpec scalar_spec(int input, std::vector<int> hidden = {64, 64}) {
  MlpSpec s;
  s.input_dim = input;
  s.hidden = std::move(hidden);
  s.head = HeadKind::scalar;
  return s;
}

PpoBatch random_batch(Eigen::Index m, const MlpSpec& actor, const MlpSpec& critic, Rng& rng) {
  PpoBatch b;
  b.actor_obs.resize(m, actor.input_dim);
  b.critic_obs.resize(m, critic.input_dim);
  b.actions.resize(m, actor.n_heads);
  b.old_logp.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int j = 0; j < actor.input_dim; ++j) b.actor_obs(i, j) = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < critic.input_dim; ++j) b.critic_obs(i, j) = rng.uniform(-1.0, 1.0);
    for (int h = 0; h < actor.n_heads; ++h) b.actions(i, h) = rng.uniform_int(actor.n_actions);
    b.old_logp[i] = -std::log(static_cast<double>(actor.n_actions)) * actor.n_heads +
                    rng.uniform(-0.3, 0.3);
    b.advantages[i] = rng.uniform(-2.0, 2.0);
    b.returns[i] = rng.uniform(-2.0, 2.0);
  }
  return b;
}

// Central finite differences of the PPO total loss with respect to one
// parameter vector; the oracle for the analytic gradients.
Eigen::VectorXd fd_gradient(const PpoBatch& batch, ParamVector actor, ParamVector critic,
                            const TrainConfig& cfg, bool wrt_actor, double h = 1e-5) {
  ParamVector& target = wrt_actor ? actor : critic;
  Eigen::VectorXd grad(target.data.size());
  for (Eigen::Index k = 0; k < target.data.size(); ++k) {
    const double saved = target.data[k];
    target.data[k] = saved + h;
    const double up = ppo_loss(batch, &actor, &critic, cfg).total_loss;
    target.data[k] = saved - h;
    const double dn = ppo_loss(batch, &actor, &critic, cfg).total_loss;
    target.data[k] = saved;
    grad[k] = (up - dn) / (2.0 * h);
  }
  return grad;
}

double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace

TEST_CASE("init_params: determinism, zero biases, near-uniform policy head") {
  const MlpSpec spec = categorical_spec(18, 6);
  const ParamVector a = init_params(spec, 42);
  const ParamVector b = init_params(spec, 42);
  CHECK((a.data - b.data).norm() == 0.0);
  CHECK(a.data.size() == 18 * 64 + 64 + 64 * 64 + 64 + 64 * 6 + 6);

  for (int l = 0; l < spec.n_layers(); ++l) {
    CHECK(a.bias(l).norm() == 0.0);
    const auto& sh = a.shapes[static_cast<std::size_t>(2 * l)];
    const double bound = std::sqrt(6.0 / (sh.rows + sh.cols));
    const auto W = a.weight(l);
    CHECK(W.maxCoeff() <= bound);
    CHECK(W.minCoeff() >= -bound);
  }

  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd obs(18);
    for (int i = 0; i < 18; ++i) obs[i] = rng.uniform(-1.0, 1.0);
    const PolicyEval ev = policy_forward(a, obs);
    CHECK(ev.entropy >= 0.99 * std::log(6.0));
  }
}

TEST_CASE("softmax identities") {
  const int n = 5;
  Eigen::MatrixXd probs, log_probs;

  SUBCASE("equal logits give the uniform distribution") {
    Eigen::MatrixXd logits = Eigen::MatrixXd::Constant(1, n, 3.25);
    softmax_rows(logits, 1, probs, log_probs);
    for (int j = 0; j < n; ++j) CHECK(probs(0, j) == doctest::Approx(1.0 / n).epsilon(1e-12));
    const Eigen::VectorXd h = entropy_rows(probs, log_probs, 1);
    CHECK(h[0] == doctest::Approx(std::log(static_cast<double>(n))).epsilon(1e-12));
  }

  SUBCASE("a dominant logit saturates") {
    Eigen::MatrixXd logits = Eigen::MatrixXd::Zero(1, n);
    logits(0, 2) = 50.0;
    softmax_rows(logits, 1, probs, log_probs);
    CHECK(probs(0, 2) > 0.999999);
  }

  SUBCASE("rows sum to one even for huge logits") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::MatrixXd logits(1, n);
      for (int j = 0; j < n; ++j) logits(0, j) = rng.uniform(-1e4, 1e4);
      softmax_rows(logits, 1, probs, log_probs);
      CHECK(std::abs(probs.row(0).sum() - 1.0) < 1e-12);
      CHECK(probs.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("value head basics") {
  const MlpSpec spec = scalar_spec(8, {16});
  ParamVector p = init_params(spec, 5);

  SUBCASE("zero weights give zero output") {
    p.data.setZero();
    Eigen::VectorXd obs = Eigen::VectorXd::Constant(8, 0.7);
    CHECK(value_forward(p, obs) == 0.0);
  }

  SUBCASE("deterministic and continuous") {
    Eigen::VectorXd obs = Eigen::VectorXd::Constant(8, 0.3);
    const double v = value_forward(p, obs);
    CHECK(value_forward(p, obs) == v);
    double prev_diff = 1e9;
    for (double delta : {1e-2, 1e-4, 1e-6}) {
      Eigen::VectorXd nudged = obs.array() + delta;
      const double diff = std::abs(value_forward(p, nudged) - v);
      CHECK(diff < prev_diff);
      prev_diff = diff;
    }
    CHECK(prev_diff < 1e-4);
  }

  SUBCASE("non-finite input is rejected") {
    Eigen::VectorXd obs = Eigen::VectorXd::Constant(8, 0.3);
    obs[3] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(value_forward(p, obs), NumericError);
    obs[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(policy_forward(init_params(categorical_spec(8, 4), 1), obs), NumericError);
  }
}

TEST_CASE("tape: sum of squared parameters has gradient 2p") {
  const MlpSpec spec = scalar_spec(3, {4});
  const ParamVector p = init_params(spec, 9);
  Tape tape;
  const int binding = tape.bind(p);
  const auto loss = tape.sum(tape.square(tape.param_ref(binding)));
  CHECK(tape.scalar(loss) == doctest::Approx(p.data.squaredNorm()).epsilon(1e-12));
  tape.backward(loss);
  CHECK(max_rel_error(tape.grad(binding), 2.0 * p.data) < 1e-12);
}

TEST_CASE("tape: clip passes no gradient outside the range") {
  MlpSpec spec = scalar_spec(1, {});
  ParamVector p = init_params(spec, 1);
  p.data << 3.0, 0.0;  // W = 3, b = 0

  Tape tape;
  const int binding = tape.bind(p);
  // clip(p) with p = (3, 0) against [0.5, 1.5]: the W entry sits above the
  // range, the bias inside it.
  const auto loss = tape.sum(tape.clip(tape.param_ref(binding), 0.5, 1.5));
  tape.backward(loss);
  CHECK(tape.grad(binding)[0] == 0.0);  // clipped flat
  CHECK(tape.grad(binding)[1] == 0.0);  // 0.0 < 0.5: also outside

  Tape tape2;
  const int b2 = tape2.bind(p);
  const auto loss2 = tape2.sum(tape2.clip(tape2.param_ref(b2), -1.0, 4.0));
  tape2.backward(loss2);
  CHECK(tape2.grad(b2)[0] == 1.0);  // interior: identity gradient
  CHECK(tape2.grad(b2)[1] == 1.0);

  SUBCASE("min ties route the gradient to the first argument") {
    Tape t3;
    const int b3 = t3.bind(p);
    const auto x = t3.param_ref(b3);
    const auto loss3 = t3.sum(t3.min_(x, t3.input(Eigen::MatrixXd::Constant(2, 1, 3.0))));
    t3.backward(loss3);
    CHECK(t3.grad(b3)[0] == 1.0);  // tie at 3.0 goes to the parameter
    CHECK(t3.grad(b3)[1] == 1.0);  // 0 < 3
  }
}

TEST_CASE("ppo loss gradients match central finite differences") {
  Rng rng(20250811);
  TrainConfig cfg;
  for (int trial = 0; trial < 4; ++trial) {
    const int input = 3 + rng.uniform_int(6);
    const int actions = 2 + rng.uniform_int(4);
    const int hidden = 4 + rng.uniform_int(8);
    const MlpSpec aspec = categorical_spec(input, actions, {hidden});
    const MlpSpec cspec = scalar_spec(input, {hidden});
    const ParamVector actor = init_params(aspec, rng.next_u64());
    const ParamVector critic = init_params(cspec, rng.next_u64());
    const PpoBatch batch = random_batch(6, aspec, cspec, rng);

    Eigen::VectorXd actor_grad, critic_grad;
    ppo_loss(batch, &actor, &critic, cfg, &actor_grad, &critic_grad);

    CHECK(max_rel_error(actor_grad, fd_gradient(batch, actor, critic, cfg, true)) < 1e-4);
    CHECK(max_rel_error(critic_grad, fd_gradient(batch, actor, critic, cfg, false)) < 1e-4);
  }
}

TEST_CASE("multi-head log-probs factorize") {
  MlpSpec spec = categorical_spec(6, 4);
  spec.n_heads = 3;
  const ParamVector p = init_params(spec, 33);
  Rng rng(2);
  Eigen::VectorXd obs(6);
  for (int i = 0; i < 6; ++i) obs[i] = rng.uniform(-1.0, 1.0);

  const PolicyEval ev = policy_forward(p, obs);
  REQUIRE(ev.probs.size() == 12);
  for (int h = 0; h < 3; ++h) {
    CHECK(std::abs(ev.probs.segment(4 * h, 4).sum() - 1.0) < 1e-12);
  }

  Eigen::MatrixXi actions(1, 3);
  actions << 1, 3, 0;
  Eigen::MatrixXd probs, log_probs;
  softmax_rows(ev.logits.transpose(), 3, probs, log_probs);
  const Eigen::VectorXd joint = gather_log_probs(log_probs, 3, actions);
  CHECK(joint[0] ==
        doctest::Approx(ev.log_probs[1] + ev.log_probs[4 + 3] + ev.log_probs[8 + 0])
            .epsilon(1e-12));

  // Joint entropy of the factored policy is the sum over heads.
  const Eigen::VectorXd h = entropy_rows(probs, log_probs, 3);
  double per_head = 0.0;
  for (int head = 0; head < 3; ++head) {
    for (int j = 0; j < 4; ++j) {
      const double pj = ev.probs[4 * head + j];
      if (pj > 0) per_head -= pj * std::log(pj);
    }
  }
  CHECK(h[0] == doctest::Approx(per_head).epsilon(1e-12));
}

TEST_CASE("adam: fixed points, first-step size, determinism") {
  const MlpSpec spec = scalar_spec(4, {8});
  ParamVector p = init_params(spec, 21);
  AdamState st = make_adam(p.size(), {});
  const Eigen::VectorXd before = p.data;

  SUBCASE("zero gradient leaves parameters unchanged") {
    adam_step(p.data, Eigen::VectorXd::Zero(p.data.size()), st);
    CHECK((p.data - before).norm() == 0.0);
    CHECK(st.t == 1);
  }

  SUBCASE("first step moves by ~lr in the gradient sign") {
    Eigen::VectorXd g = Eigen::VectorXd::Constant(p.data.size(), 0.5);
    adam_step(p.data, g, st);
    for (Eigen::Index i = 0; i < p.data.size(); ++i) {
      CHECK(before[i] - p.data[i] == doctest::Approx(st.cfg.lr).epsilon(1e-6));
    }
  }

  SUBCASE("identical calls from identical states agree") {
    ParamVector q = init_params(spec, 21);
    AdamState st2 = make_adam(q.size(), {});
    Rng rng(77);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd g(p.data.size());
      for (Eigen::Index k = 0; k < g.size(); ++k) g[k] = rng.uniform(-1.0, 1.0);
      adam_step(p.data, g, st);
      adam_step(q.data, g, st2);
    }
    CHECK((p.data - q.data).norm() == 0.0);
  }
}

TEST_CASE("checkpoint round trip preserves spec and parameters") {
  MlpSpec spec = categorical_spec(18, 6);
  spec.n_heads = 2;
  const ParamVector p = init_params(spec, 99);
  const std::string path = "test_checkpoint_roundtrip.nnp";
  save_params(path, p);
  const ParamVector q = load_params(path);
  CHECK(q.spec == p.spec);
  CHECK((q.data - p.data).norm() == 0.0);
  REQUIRE(q.shapes.size() == p.shapes.size());
  for (std::size_t i = 0; i < p.shapes.size(); ++i) {
    CHECK(q.shapes[i].name == p.shapes[i].name);
    CHECK(q.shapes[i].offset == p.shapes[i].offset);
    CHECK(q.shapes[i].rows == p.shapes[i].rows);
    CHECK(q.shapes[i].cols == p.shapes[i].cols);
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_params("does_not_exist.nnp"), ConfigError);
}

TEST_CASE("categorical sampling is deterministic and respects support") {
  Eigen::VectorXd probs(4);
  probs << 0.0, 0.25, 0.75, 0.0;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const int a = sample_categorical(probs, rng);
    CHECK((a == 1 || a == 2));
  }
  CHECK(argmax_index(probs) == 2);
  Eigen::VectorXd tie(3);
  tie << 0.4, 0.4, 0.2;
  CHECK(argmax_index(tie) == 0);  // ties take the lowest index
}

TEST_CASE("tape rejects malformed graphs") {
  Tape tape;
  const auto a = tape.input(Eigen::MatrixXd::Zero(2, 3));
  const auto b = tape.input(Eigen::MatrixXd::Zero(3, 2));
  CHECK_THROWS_AS(tape.add(a, b), ContractError);
  CHECK_THROWS_AS(tape.min_(a, b), ContractError);
  CHECK_THROWS_AS(tape.clip(a, 2.0, 1.0), ContractError);
  CHECK_THROWS_AS(tape.scalar(a), ContractError);
  CHECK_THROWS_AS(tape.backward(a), ContractError);  // non-scalar loss
}
