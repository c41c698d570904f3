// Copyright 2026 The dkrm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dkrm/policy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dkrm/error.hpp"
#include "dkrm/optim.hpp"
#include "dkrm/rng.hpp"

namespace dkrm {

PolicySelector::PolicySelector(FeatureSchema s, Mlp n) : schema(std::move(s)), net(std::move(n)) {
  if (net.input_dim() != schema.size()) {
    throw DataError("dimension mismatch: policy network input " +
                    std::to_string(net.input_dim()) + " vs schema size " +
                    std::to_string(schema.size()));
  }
}

PolicySelector PolicySelector::uniform_init(const FeatureSchema& schema,
                                            std::vector<std::size_t> hidden, Activation act,
                                            Rng& rng) {
  std::vector<std::size_t> dims{schema.size()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  Mlp net = Mlp::glorot_uniform(std::move(dims), act, rng);
  const std::size_t last = net.layer_count() - 1;
  std::fill(net.weights(last).begin(), net.weights(last).end(), 0.0);
  return PolicySelector(schema, std::move(net));
}

std::string_view variant_name(ObjectiveVariant v) {
  return v == ObjectiveVariant::kExactExpectation ? "exact" : "clipped";
}

ObjectiveVariant parse_variant(std::string_view name) {
  if (name == "exact") return ObjectiveVariant::kExactExpectation;
  if (name == "clipped") return ObjectiveVariant::kClippedRatio;
  throw DataError("unknown objective variant '" + std::string(name) +
                  "' (expected exact or clipped)");
}

void PolicyOptConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw DataError("beta must be finite and >= 0");
  if (!(learning_rate > 0.0)) throw DataError("learning_rate must be positive");
  if (epochs == 0) throw DataError("epochs must be positive");
  if (steps_per_epoch == 0) throw DataError("steps_per_epoch must be positive");
  if (variant == ObjectiveVariant::kClippedRatio && !(epsilon > 0.0 && epsilon < 1.0)) {
    throw DataError("epsilon must lie in (0, 1)");
  }
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double s = 0.0;
  for (double z : logits) s += std::exp(z - mx);
  const double lse = mx + std::log(s);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

namespace {

// A pool with everything the objectives need precomputed.
struct PreparedPool {
  std::size_t m = 0;
  std::size_t dim = 0;
  std::vector<double> inputs;  // m x dim, normalized
  std::vector<double> reward;
  std::vector<double> log_ref;
  std::size_t argmax = 0;

  std::span<const double> input(std::size_t s) const {
    return std::span<const double>(inputs).subspan(s * dim, dim);
  }
};

std::vector<PreparedPool> prepare(const FeatureSchema& schema,
                                  std::span<const CandidatePool> pools,
                                  const RewardModel& reward) {
  if (!(reward.schema == schema)) throw DataError("pool/reward schema mismatch");
  RewardEvaluator eval(reward);
  std::vector<PreparedPool> out;
  out.reserve(pools.size());
  for (const auto& pool : pools) {
    if (pool.candidates.empty()) throw DataError("empty pool '" + pool.context_id + "'");
    PreparedPool p;
    p.m = pool.candidates.size();
    p.dim = schema.size();
    p.inputs.resize(p.m * p.dim);
    std::vector<double> sft(p.m);
    for (std::size_t s = 0; s < p.m; ++s) {
      const auto& c = pool.candidates[s];
      if (c.features.size() != schema.size()) {
        throw DataError("pool/reward schema mismatch: candidate '" + c.candidate_id + "' has " +
                        std::to_string(c.features.size()) + " features");
      }
      schema.normalize(c.features.span(),
                       std::span<double>(p.inputs).subspan(s * p.dim, p.dim));
      p.reward.push_back(eval(c.features.span()));
      sft[s] = c.sft_logprob;
    }
    p.log_ref = log_softmax(sft);
    p.argmax = static_cast<std::size_t>(
        std::max_element(p.reward.begin(), p.reward.end()) - p.reward.begin());
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> logits_of(const Mlp& net, const PreparedPool& p, MlpWorkspace& ws) {
  std::vector<double> z(p.m);
  for (std::size_t s = 0; s < p.m; ++s) z[s] = net.forward(p.input(s), ws);
  return z;
}

double kl_divergence(std::span<const double> logp, std::span<const double> logq) {
  double kl = 0.0;
  for (std::size_t s = 0; s < logp.size(); ++s) kl += std::exp(logp[s]) * (logp[s] - logq[s]);
  return kl;
}

// Backpropagates dL/dz for every candidate of one pool.
void backprop_logits(const Mlp& net, const PreparedPool& p, std::span<const double> dz,
                     MlpWorkspace& ws, std::span<double> grad) {
  for (std::size_t s = 0; s < p.m; ++s) {
    if (dz[s] == 0.0) continue;
    net.forward(p.input(s), ws);
    net.backward(ws, dz[s], grad);
  }
}

double exact_loss_grad(const Mlp& net, std::span<const PreparedPool* const> pools, double beta,
                       std::span<double> grad) {
  if (!grad.empty()) std::fill(grad.begin(), grad.end(), 0.0);
  MlpWorkspace ws(net);
  const double inv_p = 1.0 / static_cast<double>(pools.size());
  double loss = 0.0;
  for (const PreparedPool* p : pools) {
    const auto z = logits_of(net, *p, ws);
    const auto logp = log_softmax(z);
    std::vector<double> g(p->m);
    double j = 0.0;
    for (std::size_t s = 0; s < p->m; ++s) {
      g[s] = p->reward[s] - beta * (logp[s] - p->log_ref[s]);
      j += std::exp(logp[s]) * g[s];
    }
    loss -= j * inv_p;
    if (grad.empty()) continue;
    std::vector<double> dz(p->m);
    for (std::size_t s = 0; s < p->m; ++s) dz[s] = -inv_p * std::exp(logp[s]) * (g[s] - j);
    backprop_logits(net, *p, dz, ws, grad);
  }
  return loss;
}

double clipped_loss_grad(const Mlp& net, std::span<const PreparedPool* const> pools,
                         std::span<const std::vector<double>* const> old_probs, double epsilon,
                         double beta, std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  MlpWorkspace ws(net);
  const double inv_p = 1.0 / static_cast<double>(pools.size());
  double loss = 0.0;
  for (std::size_t k = 0; k < pools.size(); ++k) {
    const PreparedPool& p = *pools[k];
    const std::vector<double>& old = *old_probs[k];
    if (old.size() != p.m) throw DataError("old policy snapshot does not match pool size");
    const auto z = logits_of(net, p, ws);
    const auto logp = log_softmax(z);
    const double mean_r =
        std::accumulate(p.reward.begin(), p.reward.end(), 0.0) / static_cast<double>(p.m);
    std::vector<double> pi(p.m), h(p.m);
    double surrogate = 0.0;
    double h_bar = 0.0;
    for (std::size_t s = 0; s < p.m; ++s) {
      pi[s] = std::exp(logp[s]);
      const double adv = p.reward[s] - mean_r;
      const double rho = pi[s] / old[s];
      const double clipped = std::clamp(rho, 1.0 - epsilon, 1.0 + epsilon);
      surrogate += old[s] * std::min(rho * adv, clipped * adv);
      const bool active = adv >= 0.0 ? rho <= 1.0 + epsilon : rho >= 1.0 - epsilon;
      h[s] = active ? adv : 0.0;
      h_bar += pi[s] * h[s];
    }
    const double kl = kl_divergence(logp, p.log_ref);
    loss += inv_p * (-surrogate + beta * kl);
    std::vector<double> dz(p.m);
    for (std::size_t s = 0; s < p.m; ++s) {
      dz[s] = inv_p * (-pi[s] * (h[s] - h_bar) + beta * pi[s] * (logp[s] - p.log_ref[s] - kl));
    }
    backprop_logits(net, p, dz, ws, grad);
  }
  return loss;
}

std::vector<const PreparedPool*> all_of(const std::vector<PreparedPool>& v) {
  std::vector<const PreparedPool*> out;
  for (const auto& p : v) out.push_back(&p);
  return out;
}

PolicyMetrics metrics_of(const Mlp& net, const std::vector<PreparedPool>& pools, double beta) {
  PolicyMetrics m;
  MlpWorkspace ws(net);
  m.min_argmax_prob = 1.0;
  const double inv_p = 1.0 / static_cast<double>(pools.size());
  for (const auto& p : pools) {
    const auto logp = log_softmax(logits_of(net, p, ws));
    double er = 0.0;
    for (std::size_t s = 0; s < p.m; ++s) er += std::exp(logp[s]) * p.reward[s];
    const double kl = kl_divergence(logp, p.log_ref);
    const double top = std::exp(logp[p.argmax]);
    m.mean_reward += er * inv_p;
    m.mean_kl += kl * inv_p;
    m.objective -= (er - beta * kl) * inv_p;
    m.mean_argmax_prob += top * inv_p;
    m.min_argmax_prob = std::min(m.min_argmax_prob, top);
  }
  return m;
}

}  // namespace

std::vector<double> policy_logits(const PolicySelector& policy, const CandidatePool& pool) {
  std::vector<double> x(policy.schema.size());
  MlpWorkspace ws(policy.net);
  std::vector<double> z;
  z.reserve(pool.candidates.size());
  for (const auto& c : pool.candidates) {
    if (c.features.size() != policy.schema.size()) {
      throw DataError("candidate '" + c.candidate_id + "' does not match the policy schema");
    }
    policy.schema.normalize(c.features.span(), x);
    z.push_back(policy.net.forward(x, ws));
  }
  return z;
}

std::vector<double> policy_distribution(const PolicySelector& policy, const CandidatePool& pool) {
  if (pool.candidates.empty()) throw DataError("empty pool '" + pool.context_id + "'");
  return softmax(policy_logits(policy, pool));
}

std::vector<double> reference_distribution(const CandidatePool& pool) {
  if (pool.candidates.empty()) throw DataError("empty pool '" + pool.context_id + "'");
  std::vector<double> sft;
  for (const auto& c : pool.candidates) sft.push_back(c.sft_logprob);
  return softmax(sft);
}

double policy_objective(const PolicySelector& policy, std::span<const CandidatePool> pools,
                        const RewardModel& reward, double beta) {
  if (pools.empty()) throw DataError("no pools");
  const auto prepared = prepare(policy.schema, pools, reward);
  const auto ptrs = all_of(prepared);
  return exact_loss_grad(policy.net, ptrs, beta, {});
}

LossAndGrad policy_objective_grad(const PolicySelector& policy,
                                  std::span<const CandidatePool> pools,
                                  const RewardModel& reward, double beta) {
  if (pools.empty()) throw DataError("no pools");
  const auto prepared = prepare(policy.schema, pools, reward);
  const auto ptrs = all_of(prepared);
  LossAndGrad out;
  out.grad.assign(policy.net.parameter_count(), 0.0);
  out.loss = exact_loss_grad(policy.net, ptrs, beta, out.grad);
  return out;
}

LossAndGrad clipped_objective_grad(const PolicySelector& policy,
                                   std::span<const CandidatePool> pools,
                                   const RewardModel& reward,
                                   std::span<const std::vector<double>> old_probs,
                                   double epsilon, double beta) {
  if (pools.empty()) throw DataError("no pools");
  if (old_probs.size() != pools.size()) throw DataError("one old-policy snapshot per pool");
  const auto prepared = prepare(policy.schema, pools, reward);
  const auto ptrs = all_of(prepared);
  std::vector<const std::vector<double>*> olds;
  for (const auto& o : old_probs) olds.push_back(&o);
  LossAndGrad out;
  out.grad.assign(policy.net.parameter_count(), 0.0);
  out.loss = clipped_loss_grad(policy.net, ptrs, olds, epsilon, beta, out.grad);
  return out;
}

PolicyMetrics evaluate_policy(const PolicySelector& policy, std::span<const CandidatePool> pools,
                              const RewardModel& reward, double beta) {
  if (pools.empty()) throw DataError("no pools");
  return metrics_of(policy.net, prepare(policy.schema, pools, reward), beta);
}

std::string PolicyTrainReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,objective,mean_reward,mean_kl\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << e.objective << ',' << e.mean_reward << ',' << e.mean_kl << '\n';
  }
  return os.str();
}

PolicyTrainResult train_policy(std::span<const CandidatePool> pools, const RewardModel& reward,
                               const PolicyOptConfig& config, std::uint64_t init_seed) {
  config.validate();
  if (pools.empty()) throw DataError("no pools");
  const auto start = std::chrono::steady_clock::now();
  Rng init_rng(init_seed);
  PolicySelector policy = PolicySelector::uniform_init(reward.schema, config.hidden_dims,
                                                       config.activation, init_rng);
  const auto prepared = prepare(policy.schema, pools, reward);
  const std::size_t n_pools = prepared.size();
  const std::size_t batch =
      config.pool_batch_size == 0 ? n_pools : std::min(config.pool_batch_size, n_pools);

  AdamW opt(policy.net.parameter_count(), {.weight_decay = 0.0});
  Rng order_rng(config.seed);
  std::vector<std::size_t> order(n_pools);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(policy.net.parameter_count(), 0.0);
  std::vector<std::vector<double>> old(n_pools);
  const bool clipped = config.variant == ObjectiveVariant::kClippedRatio;

  PolicyTrainReport report;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (clipped) {
      MlpWorkspace ws(policy.net);
      for (std::size_t k = 0; k < n_pools; ++k) {
        old[k] = softmax(logits_of(policy.net, prepared[k], ws));
      }
    }
    for (std::size_t inner = 0; inner < config.steps_per_epoch; ++inner) {
      if (batch < n_pools) order_rng.shuffle(std::span<std::size_t>(order));
      for (std::size_t b = 0; b < n_pools; b += batch) {
        const std::size_t e = std::min(n_pools, b + batch);
        std::vector<const PreparedPool*> sel;
        std::vector<const std::vector<double>*> sel_old;
        for (std::size_t i = b; i < e; ++i) {
          sel.push_back(&prepared[order[i]]);
          sel_old.push_back(&old[order[i]]);
        }
        const double loss =
            clipped ? clipped_loss_grad(policy.net, sel, sel_old, config.epsilon, config.beta, grad)
                    : exact_loss_grad(policy.net, sel, config.beta, grad);
        if (!std::isfinite(loss)) {
          throw NumericalError("divergence: non-finite policy objective at step " +
                               std::to_string(step));
        }
        opt.step(policy.net.parameters(), grad, config.learning_rate);
        ++step;
      }
    }
    if (!policy.net.all_finite()) {
      throw NumericalError("divergence: non-finite policy parameters after step " +
                           std::to_string(step - 1));
    }
    const auto m = metrics_of(policy.net, prepared, config.beta);
    report.epochs.push_back({epoch, m.objective, m.mean_reward, m.mean_kl});
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(policy), std::move(report)};
}

}  // namespace dkrm
