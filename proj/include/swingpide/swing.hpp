#pragma once

#include "swingpide/grid.hpp"
#include "swingpide/model.hpp"
#include "swingpide/stepper.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace swingpide {

/// Option values v(., ., z, tau) for z = 0..M. Level M is identically zero.
struct SwingState {
  std::vector<Vector> values;
  double tau = 0.0;

  int global_cap() const { return static_cast<int>(values.size()) - 1; }
};

SwingState make_swing_state(const Grid2D& g, int global_cap);

/// Optimal purchase b*(n, l, node) for action n = 1..N_a and level l = 0..M-1.
class PolicyArray {
 public:
  PolicyArray() = default;
  PolicyArray(int n_actions, int global_cap, Eigen::Index nodes);

  std::uint8_t& at(int action, int level, Eigen::Index node);
  std::uint8_t at(int action, int level, Eigen::Index node) const;
  int n_actions() const { return n_actions_; }
  int global_cap() const { return global_cap_; }
  Eigen::Index nodes() const { return nodes_; }

 private:
  std::size_t offset(int action, int level, Eigen::Index node) const;
  int n_actions_ = 0;
  int global_cap_ = 0;
  Eigen::Index nodes_ = 0;
  std::vector<std::uint8_t> data_;
};

/// v_l <- max_{b=0..min(L, M-l)} b (x + y - K) + v_{l+b} for all l < M,
/// reading pre-update values of the higher levels. Ties choose the smallest
/// b. When `policy` is given, b* is written to its slice `action`.
void exercise_update(SwingState& state, const SwingContract& contract, const Grid2D& g,
                     PolicyArray* policy = nullptr, int action = 0);

struct SwingOptions {
  int steps_per_interval = 100;
  /// Skip levels that cannot be reached from z = 0 in forward time. The
  /// z = 0 result is unchanged; higher levels are then not meaningful.
  bool prune_unreachable = false;
  bool keep_policy = true;
  /// Upper bound on memory for the level values and the policy.
  std::size_t memory_limit_bytes = std::size_t(3) << 30;
  /// Called after the exercise update (after_march = false) and after the
  /// interval march (after_march = true) of every action n = 1..N_a.
  std::function<void(int n, bool after_march, const SwingState&)> observer;
};

struct SwingResult {
  Grid2D grid;
  SwingState state;  ///< after the final march, tau = T
  PolicyArray policy;
  StepDiagnostics diagnostics;
  int marches = 0;

  const Vector& value() const { return state.values.front(); }
};

SwingResult price_swing(const PricingSetup& setup, const SwingContract& contract, const SwingOptions& opt);

/// Cumulative units bought after action n (n = 1..N_a) at each node when
/// following b* from z = 0. path[n - 1][node].
std::vector<std::vector<int>> optimal_path(const PolicyArray& policy, const SwingContract& contract);

}  // namespace swingpide
