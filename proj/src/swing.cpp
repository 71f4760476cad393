#include "swingpide/swing.hpp"

#include "swingpide/discretize.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace swingpide {

SwingState make_swing_state(const Grid2D& g, int global_cap) {
  if (global_cap < 0) throw std::invalid_argument("global cap must be non-negative");
  SwingState s;
  s.values.assign(static_cast<std::size_t>(global_cap) + 1, Vector::Zero(g.size()));
  return s;
}

PolicyArray::PolicyArray(int n_actions, int global_cap, Eigen::Index nodes)
    : n_actions_(n_actions), global_cap_(global_cap), nodes_(nodes) {
  data_.assign(static_cast<std::size_t>(n_actions) * static_cast<std::size_t>(global_cap) *
                   static_cast<std::size_t>(nodes),
               0);
}

std::size_t PolicyArray::offset(int action, int level, Eigen::Index node) const {
  if (action < 1 || action > n_actions_ || level < 0 || level >= global_cap_ || node < 0 || node >= nodes_)
    throw std::out_of_range("policy index out of range");
  return (static_cast<std::size_t>(action - 1) * global_cap_ + level) * nodes_ + node;
}

std::uint8_t& PolicyArray::at(int action, int level, Eigen::Index node) { return data_[offset(action, level, node)]; }

std::uint8_t PolicyArray::at(int action, int level, Eigen::Index node) const {
  return data_[offset(action, level, node)];
}

void exercise_update(SwingState& state, const SwingContract& c, const Grid2D& g, PolicyArray* policy, int action) {
  const int m = state.global_cap();
  if (m != c.global_cap) throw std::invalid_argument("swing state does not match the contract's global cap");
  for (const auto& v : state.values)
    if (v.size() != g.size()) throw std::invalid_argument("swing state does not match the grid");
  for (Eigen::Index i = 0; i < g.nx(); ++i) {
    for (Eigen::Index j = 0; j < g.ny(); ++j) {
      const Eigen::Index k = g.index(i, j);
      const double gain = g.xs[i] + g.ys[j] - c.strike;
      for (int l = 0; l < m; ++l) {
        const int b_max = std::min(c.local_cap, m - l);
        double best = state.values[l][k];
        int best_b = 0;
        for (int b = 1; b <= b_max; ++b) {
          const double cand = b * gain + state.values[l + b][k];
          if (cand > best) {
            best = cand;
            best_b = b;
          }
        }
        state.values[l][k] = best;
        if (policy) policy->at(action, l, k) = static_cast<std::uint8_t>(best_b);
      }
    }
  }
}

SwingResult price_swing(const PricingSetup& setup, const SwingContract& contract, const SwingOptions& opt) {
  setup.params.validate();
  contract.validate();
  if (contract.strike != setup.strike) throw std::invalid_argument("contract and grid strikes differ");
  if (contract.local_cap > 255) throw std::invalid_argument("local cap too large for the policy array");
  SwingResult out;
  out.grid = make_sinh_grid(setup.domain, setup.m1, setup.m2, setup.strike, setup.d);
  const Grid2D& g = out.grid;

  const std::size_t nodes = static_cast<std::size_t>(g.size());
  const std::size_t m = static_cast<std::size_t>(contract.global_cap);
  std::size_t bytes = (m + 1) * nodes * sizeof(double);
  if (opt.keep_policy) bytes += static_cast<std::size_t>(contract.n_actions) * m * nodes;
  if (bytes > opt.memory_limit_bytes)
    throw std::runtime_error("swing valuation needs " + std::to_string(bytes) + " bytes, above the limit of " +
                             std::to_string(opt.memory_limit_bytes));

  out.state = make_swing_state(g, contract.global_cap);
  if (opt.keep_policy) out.policy = PolicyArray(contract.n_actions, contract.global_cap, g.size());
  if (contract.global_cap == 0) {
    out.state.tau = contract.maturity;
    return out;
  }

  const OperatorSet ops = assemble(g, setup.params, setup.convection, BoundaryKind::Linear, setup.tail_correction);
  const double spacing = contract.action_spacing();
  const auto stepper =
      make_stepper(setup.stepper, ops, g, setup.params, {opt.steps_per_interval, spacing}, setup.options);

  for (int n = 1; n <= contract.n_actions; ++n) {
    out.state.tau = contract.maturity - (contract.n_actions - n + 1) * spacing;
    exercise_update(out.state, contract, g, opt.keep_policy ? &out.policy : nullptr, n);
    if (opt.observer) opt.observer(n, false, out.state);
    int top = contract.global_cap - 1;
    if (opt.prune_unreachable) {
      const long reach = static_cast<long>(contract.n_actions - n) * contract.local_cap;
      top = static_cast<int>(std::min<long>(top, reach));
    }
    for (int l = 0; l <= top; ++l) {
      out.state.values[l] = stepper->march(out.state.values[l], out.state.tau, &out.diagnostics);
      ++out.marches;
    }
    out.state.tau += spacing;
    if (opt.observer) opt.observer(n, true, out.state);
  }
  out.state.tau = contract.maturity;
  return out;
}

std::vector<std::vector<int>> optimal_path(const PolicyArray& policy, const SwingContract& contract) {
  const int na = policy.n_actions();
  const int m = policy.global_cap();
  if (na != contract.n_actions || m != contract.global_cap)
    throw std::invalid_argument("policy does not match the contract");
  std::vector<std::vector<int>> path(static_cast<std::size_t>(na), std::vector<int>(policy.nodes(), 0));
  for (Eigen::Index k = 0; k < policy.nodes(); ++k) {
    int level = 0;
    for (int n = 1; n <= na; ++n) {
      if (level < m) level += policy.at(na - n + 1, level, k);
      path[n - 1][k] = level;
    }
  }
  return path;
}

}  // namespace swingpide
