#include "swingpide/config.hpp"
#include "swingpide/swing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

using namespace swingpide;

namespace {

// A tiny grid: exercise_update only looks at node coordinates.
Grid2D line_grid(std::vector<double> xs_in, double y) {
  Grid2D g;
  g.xs = Eigen::Map<const Vector>(xs_in.data(), static_cast<Eigen::Index>(xs_in.size()));
  g.ys = Vector::Constant(1, y);
  g.roi_mask.assign(xs_in.size(), true);
  return g;
}

PricingSetup small_setup(int preset_id, int m, StepperKind kind) {
  RunConfig cfg = default_config(preset_id);
  cfg.m1 = m;
  cfg.m2 = m;
  cfg.scheme = kind;
  return to_setup(cfg);
}

SwingContract contract_with(double strike, double maturity, int na, int local_cap, int global_cap) {
  SwingContract c;
  c.strike = strike;
  c.maturity = maturity;
  c.n_actions = na;
  c.local_cap = local_cap;
  c.global_cap = global_cap;
  return c;
}

// max over purchase sequences b_1..b_na in {0..L} with sum <= cap of
// sum_k b_k * gain * rho^k
double enumerate_discounted(double gain, double rho, int na, int local_cap, int cap) {
  double best = 0.0;
  std::vector<int> b(static_cast<std::size_t>(na), 0);
  std::function<void(int, int, double)> rec = [&](int k, int left, double acc) {
    if (k == na) {
      best = std::max(best, acc);
      return;
    }
    for (int q = 0; q <= std::min(local_cap, left); ++q) rec(k + 1, left - q, acc + q * gain * std::pow(rho, k + 1));
  };
  rec(0, cap, 0.0);
  return best;
}

}  // namespace

TEST(ExerciseUpdate, NegativePayoffKeepsZero) {
  const Grid2D g = line_grid({20.0}, 0.0);
  const SwingContract c = contract_with(50.0, 1.0, 3, 1, 2);
  SwingState s = make_swing_state(g, 2);
  PolicyArray pol(3, 2, g.size());
  exercise_update(s, c, g, &pol, 1);
  EXPECT_EQ(s.values[0][0], 0.0);
  EXPECT_EQ(pol.at(1, 0, 0), 0);
}

TEST(ExerciseUpdate, SingleStepPayoff) {
  const Grid2D g = line_grid({60.0}, 0.0);
  const SwingContract c = contract_with(50.0, 1.0, 3, 1, 4);
  SwingState s = make_swing_state(g, 4);
  PolicyArray pol(3, 4, g.size());
  exercise_update(s, c, g, &pol, 2);
  EXPECT_DOUBLE_EQ(s.values[0][0], 10.0);
  EXPECT_EQ(pol.at(2, 0, 0), 1);
}

TEST(ExerciseUpdate, TwoUnitExample) {
  const Grid2D g = line_grid({53.0}, 0.0);
  const SwingContract c = contract_with(50.0, 1.0, 1, 2, 2);
  SwingState s = make_swing_state(g, 2);
  s.values[1][0] = 5.0;
  PolicyArray pol(1, 2, g.size());
  exercise_update(s, c, g, &pol, 1);
  EXPECT_DOUBLE_EQ(s.values[0][0], 8.0);
  EXPECT_EQ(pol.at(1, 0, 0), 1);
  EXPECT_EQ(s.values[2][0], 0.0);
}

TEST(ExerciseUpdate, TiesPickSmallestPurchase) {
  const Grid2D g = line_grid({50.0}, 0.0);
  const SwingContract c = contract_with(50.0, 1.0, 1, 2, 2);
  SwingState s = make_swing_state(g, 2);
  s.values[0][0] = 4.0;
  s.values[1][0] = 4.0;
  PolicyArray pol(1, 2, g.size());
  exercise_update(s, c, g, &pol, 1);
  EXPECT_EQ(s.values[0][0], 4.0);
  EXPECT_EQ(pol.at(1, 0, 0), 0);
}

TEST(ExerciseUpdate, MatchesBruteForceOnRandomStates) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xdist(0.0, 100.0), vdist(0.0, 40.0);
  std::vector<double> xs(25);
  for (auto& x : xs) x = xdist(rng);
  const Grid2D g = line_grid(xs, -3.0);
  for (int local_cap : {1, 2, 3}) {
    const int cap = 5;
    const SwingContract c = contract_with(50.0, 1.0, 2, local_cap, cap);
    SwingState s = make_swing_state(g, cap);
    for (int l = 0; l < cap; ++l)
      for (Eigen::Index k = 0; k < g.size(); ++k) s.values[l][k] = vdist(rng);
    const SwingState before = s;
    PolicyArray pol(2, cap, g.size());
    exercise_update(s, c, g, &pol, 2);
    for (Eigen::Index k = 0; k < g.size(); ++k) {
      const double gain = xs[k] - 3.0 - 50.0;
      for (int l = 0; l < cap; ++l) {
        double best = -1e300;
        int arg = -1;
        for (int b = 0; b <= std::min(local_cap, cap - l); ++b) {
          const double v = b * gain + before.values[l + b][k];
          if (v > best) {
            best = v;
            arg = b;
          }
        }
        EXPECT_DOUBLE_EQ(s.values[l][k], best);
        EXPECT_EQ(pol.at(2, l, k), arg);
      }
      EXPECT_EQ(s.values[cap][k], 0.0);
    }
  }
}

TEST(ExerciseUpdate, RejectsMismatchedState) {
  const Grid2D g = line_grid({60.0}, 0.0);
  SwingState s = make_swing_state(g, 3);
  EXPECT_THROW(exercise_update(s, contract_with(50.0, 1.0, 1, 1, 2), g), std::invalid_argument);
  EXPECT_THROW(make_swing_state(g, -1), std::invalid_argument);
}

TEST(Policy, IndexBounds) {
  PolicyArray pol(3, 2, 4);
  EXPECT_NO_THROW(pol.at(3, 1, 3));
  EXPECT_THROW(pol.at(0, 0, 0), std::out_of_range);
  EXPECT_THROW(pol.at(1, 2, 0), std::out_of_range);
  EXPECT_THROW(pol.at(1, 0, 4), std::out_of_range);
}

TEST(OptimalPath, NeverBuying) {
  const SwingContract c = contract_with(50.0, 1.0, 5, 1, 3);
  const PolicyArray pol(5, 3, 6);
  for (const auto& row : optimal_path(pol, c))
    for (int v : row) EXPECT_EQ(v, 0);
}

TEST(OptimalPath, SaturatesAtGlobalCap) {
  const SwingContract c = contract_with(50.0, 1.0, 5, 1, 3);
  PolicyArray pol(5, 3, 6);
  for (int n = 1; n <= 5; ++n)
    for (int l = 0; l < 3; ++l)
      for (Eigen::Index k = 0; k < 6; ++k) pol.at(n, l, k) = 1;
  const auto path = optimal_path(pol, c);
  const std::vector<int> expected{1, 2, 3, 3, 3};
  for (Eigen::Index k = 0; k < 6; ++k)
    for (int n = 0; n < 5; ++n) EXPECT_EQ(path[n][k], expected[n]);
  EXPECT_THROW(optimal_path(pol, contract_with(50.0, 1.0, 4, 1, 3)), std::invalid_argument);
}

TEST(PriceSwing, ZeroGlobalCapIsWorthless) {
  const PricingSetup s = small_setup(1, 20, StepperKind::Cnfi);
  const SwingResult r = price_swing(s, contract_with(50.0, 1.0, 4, 1, 0), {});
  EXPECT_EQ(r.marches, 0);
  EXPECT_EQ(r.value().cwiseAbs().maxCoeff(), 0.0);
}

TEST(PriceSwing, Guards) {
  const PricingSetup s = small_setup(1, 20, StepperKind::Cnfi);
  EXPECT_THROW(price_swing(s, contract_with(60.0, 1.0, 4, 1, 2), {}), std::invalid_argument);
  SwingOptions tight;
  tight.memory_limit_bytes = 1000;
  EXPECT_THROW(price_swing(s, contract_with(50.0, 1.0, 4, 1, 2), tight), std::runtime_error);
}

// With no dynamics except discounting every node is a deterministic
// problem; the discrete discount factor of one interval is measured from the
// stepper itself and the optimum is found by enumerating purchase sequences.
TEST(PriceSwing, PureDiscountingMatchesEnumeration) {
  for (StepperKind kind : {StepperKind::Cnfi, StepperKind::Dirkfi}) {
    PricingSetup s = small_setup(1, 16, kind);
    s.params.alpha = 0.0;
    s.params.beta = 0.0;
    s.params.sigma = 0.0;
    s.params.lambda = 0.0;
    s.params.r = 0.8;
    const SwingContract c = contract_with(50.0, 1.0, 4, 2, 5);
    SwingOptions opt;
    opt.steps_per_interval = 8;
    const SwingResult r = price_swing(s, c, opt);

    const OperatorSet ops = assemble(r.grid, s.params, s.convection, BoundaryKind::Linear, s.tail_correction);
    const auto st = make_stepper(kind, ops, r.grid, s.params, {opt.steps_per_interval, c.action_spacing()}, s.options);
    const double rho = st->march(Vector::Ones(r.grid.size()))[0];
    const double a = s.params.r * c.action_spacing() / opt.steps_per_interval;
    if (kind == StepperKind::Cnfi) {
      // two full steps are replaced by four backward Euler half steps
      const double half = 1.0 / (1.0 + 0.5 * a), cn = (1.0 - 0.5 * a) / (1.0 + 0.5 * a);
      EXPECT_NEAR(rho, std::pow(half, 4) * std::pow(cn, opt.steps_per_interval - 2), 1e-12);
    } else {
      EXPECT_NEAR(rho, std::exp(-s.params.r * c.action_spacing()), 1e-3);
    }

    for (Eigen::Index i = 0; i < r.grid.nx(); i += 3)
      for (Eigen::Index j = 0; j < r.grid.ny(); j += 3) {
        const double gain = r.grid.xs[i] + r.grid.ys[j] - c.strike;
        for (int z = 0; z <= c.global_cap; ++z) {
          const double want = enumerate_discounted(gain, rho, c.n_actions, c.local_cap, c.global_cap - z);
          EXPECT_NEAR(r.state.values[z][r.grid.index(i, j)], want, 1e-9 * std::max(1.0, want))
              << to_string(kind) << " z=" << z;
        }
      }
  }
}

// One action at reversed time zero is a European call on the nodal payoff,
// scaled by the number of units the single action may buy.
TEST(PriceSwing, SingleActionIsScaledEuropean) {
  for (StepperKind kind : {StepperKind::Cnfi, StepperKind::Slcnfi}) {
    const PricingSetup s = small_setup(1, 20, kind);
    SwingOptions opt;
    opt.steps_per_interval = 6;
    const SwingContract c1 = contract_with(50.0, 0.1, 1, 1, 1);
    const SwingContract c3 = contract_with(50.0, 0.1, 1, 3, 3);
    const SwingResult r1 = price_swing(s, c1, opt);
    const SwingResult r3 = price_swing(s, c3, opt);
    const OperatorSet ops = assemble(r1.grid, s.params, s.convection, BoundaryKind::Linear, s.tail_correction);
    const auto st = make_stepper(kind, ops, r1.grid, s.params, {6, 0.1}, s.options);
    const Vector eu = st->march(nodal_payoff(r1.grid, s.strike));
    const double scale = eu.cwiseAbs().maxCoeff();
    EXPECT_LE((r1.value() - eu).cwiseAbs().maxCoeff(), 1e-12 * scale) << to_string(kind);
    EXPECT_LE((r3.value() - 3.0 * eu).cwiseAbs().maxCoeff(), 1e-6 * scale) << to_string(kind);
  }
}

TEST(PriceSwing, StructuralProperties) {
  const PricingSetup s = small_setup(1, 24, StepperKind::Cnfi);
  const SwingContract c = contract_with(50.0, 0.5, 5, 1, 3);
  SwingOptions opt;
  opt.steps_per_interval = 8;
  int calls = 0;
  double worst_monotone = 0.0, worst_negative = 0.0;
  opt.observer = [&](int, bool after_march, const SwingState& st) {
    ++calls;
    for (int l = 0; l < c.global_cap; ++l)
      worst_monotone = std::min(worst_monotone, (st.values[l] - st.values[l + 1]).minCoeff());
    if (!after_march)
      for (const Vector& v : st.values) worst_negative = std::min(worst_negative, v.minCoeff());
    EXPECT_EQ(st.values[c.global_cap].cwiseAbs().maxCoeff(), 0.0);
  };
  const SwingResult r = price_swing(s, c, opt);
  EXPECT_EQ(calls, 2 * c.n_actions);
  EXPECT_EQ(r.marches, c.n_actions * c.global_cap);
  EXPECT_GE(worst_monotone, -1e-9);
  EXPECT_GE(worst_negative, 0.0);

  for (int n = 1; n <= c.n_actions; ++n)
    for (int l = 0; l < c.global_cap; ++l)
      for (Eigen::Index k = 0; k < r.grid.size(); ++k)
        EXPECT_LE(r.policy.at(n, l, k), std::min(c.local_cap, c.global_cap - l));

  const auto path = optimal_path(r.policy, c);
  for (Eigen::Index k = 0; k < r.grid.size(); ++k) {
    int prev = 0;
    for (int n = 0; n < c.n_actions; ++n) {
      EXPECT_GE(path[n][k], prev);
      EXPECT_LE(path[n][k] - prev, c.local_cap);
      prev = path[n][k];
    }
    EXPECT_LE(prev, c.global_cap);
  }

  const EuropeanResult eu = price_european(s, c.maturity, c.n_actions * opt.steps_per_interval);
  EXPECT_GE((r.value() - eu.values).minCoeff(), -1e-9);
}

TEST(PriceSwing, PruningKeepsLevelZero) {
  const PricingSetup s = small_setup(4, 20, StepperKind::Cnfi);
  const SwingContract c = contract_with(50.0, 0.4, 4, 1, 3);
  SwingOptions full, pruned;
  full.steps_per_interval = pruned.steps_per_interval = 5;
  pruned.prune_unreachable = true;
  const SwingResult a = price_swing(s, c, full);
  const SwingResult b = price_swing(s, c, pruned);
  EXPECT_LT(b.marches, a.marches);
  EXPECT_EQ((a.value() - b.value()).cwiseAbs().maxCoeff(), 0.0);
  const auto pa = optimal_path(a.policy, c), pb = optimal_path(b.policy, c);
  EXPECT_EQ(pa, pb);
}

// At x = 150 the last unit is kept for a later price spike; far deeper
// nodes buy at every action while capacity remains.
TEST(PriceSwing, DeepInTheMoneyBuysEveryTime) {
  const PricingSetup s = small_setup(1, 30, StepperKind::Cnfi);
  const SwingContract c = contract_with(50.0, 1.0, 20, 1, 10);
  SwingOptions opt;
  opt.steps_per_interval = 5;
  opt.prune_unreachable = true;
  const SwingResult r = price_swing(s, c, opt);
  const auto path = optimal_path(r.policy, c);
  Eigen::Index i = 0, j = 0;
  for (Eigen::Index k = 0; k < r.grid.nx(); ++k)
    if (std::abs(r.grid.xs[k] - 200.0) < std::abs(r.grid.xs[i] - 200.0)) i = k;
  for (Eigen::Index k = 0; k < r.grid.ny(); ++k)
    if (std::abs(r.grid.ys[k]) < std::abs(r.grid.ys[j])) j = k;
  ASSERT_GT(r.grid.xs[i] + r.grid.ys[j] - c.strike, 120.0);
  const Eigen::Index node = r.grid.index(i, j);
  for (int n = 1; n <= c.n_actions; ++n) EXPECT_EQ(path[n - 1][node], std::min(n, c.global_cap)) << n;
}
