#include "swingpide/config.hpp"
#include "swingpide/csv.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <random>
#include <sstream>

using namespace swingpide;

TEST(Presets, TableValues) {
  struct Row {
    double sigma, lambda;
  };
  const Row rows[3] = {{11.0, 52.0}, {20.0, 100.0}, {2.0, 10.0}};
  for (int id = 1; id <= 6; ++id) {
    const Preset p = preset(id);
    EXPECT_EQ(p.params.mu, 80.0);
    EXPECT_EQ(p.params.alpha, 8.0);
    EXPECT_EQ(p.params.beta, 126.0);
    EXPECT_EQ(p.params.r, 0.03);
    EXPECT_EQ(p.params.sigma, rows[(id - 1) % 3].sigma);
    EXPECT_EQ(p.params.lambda, rows[(id - 1) % 3].lambda);
    EXPECT_EQ(p.strike, 50.0);
    EXPECT_EQ(p.domain.x_min, -100.0);
    EXPECT_EQ(p.domain.x_max, 250.0);
    if (id <= 3) {
      const auto& m = std::get<MertonJumps>(p.params.density);
      EXPECT_EQ(m.mean, 20.0);
      EXPECT_EQ(m.stddev, 60.0);
      EXPECT_EQ(p.domain.y_max, 750.0);
    } else {
      const auto& k = std::get<KouJumps>(p.params.density);
      EXPECT_EQ(k.p_up, 0.6);
      EXPECT_EQ(k.eta_up, 0.01);
      EXPECT_EQ(k.eta_down, 0.02);
      EXPECT_EQ(p.domain.y_min, -1000.0);
    }
  }
  EXPECT_THROW(preset(0), std::invalid_argument);
  EXPECT_THROW(preset(7), std::invalid_argument);
}

TEST(Config, Defaults) {
  const RunConfig c = default_config(1);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.contract.n_actions, 20);
  EXPECT_EQ(c.contract.local_cap, 1);
  EXPECT_EQ(c.contract.global_cap, 10);
  EXPECT_EQ(c.contract.maturity, 1.0);
  EXPECT_EQ(c.scheme, StepperKind::Cnfi);
  EXPECT_EQ(c.convection, ConvectionScheme::Quick);
  EXPECT_TRUE(c.rannacher);
}

TEST(Config, ParsesOverridesOnTopOfPreset) {
  const RunConfig c = parse_config(R"({
    "preset": 4,
    "model": {"sigma": 3.5, "jumps": {"eta1": 0.05}},
    "grid": {"m": 60, "m2": 80},
    "time": {"n_steps": 250},
    "scheme": "dirkfi",
    "convection": "upwind2",
    "contract": {"global_cap": 4, "actions": 8},
    "seed": 99
  })");
  EXPECT_EQ(c.preset, 4);
  EXPECT_EQ(c.params.sigma, 3.5);
  EXPECT_EQ(c.params.lambda, 52.0);
  const auto& k = std::get<KouJumps>(c.params.density);
  EXPECT_EQ(k.eta_up, 0.05);
  EXPECT_EQ(k.eta_down, 0.02);
  EXPECT_EQ(c.m1, 60);
  EXPECT_EQ(c.m2, 80);
  EXPECT_EQ(c.n_steps, 250);
  EXPECT_EQ(c.scheme, StepperKind::Dirkfi);
  EXPECT_EQ(c.convection, ConvectionScheme::Upwind2);
  EXPECT_EQ(c.contract.global_cap, 4);
  EXPECT_EQ(c.contract.n_actions, 8);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.domain.y_max, 1000.0);
}

TEST(Config, SwitchesDensityFamily) {
  const RunConfig c = parse_config(R"({"model": {"jumps": {"type": "kou", "p": 0.3}}})");
  const auto& k = std::get<KouJumps>(c.params.density);
  EXPECT_EQ(k.p_up, 0.3);
  EXPECT_THROW(parse_config(R"({"model": {"jumps": {"type": "levy"}}})"), std::invalid_argument);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{"), std::invalid_argument);
  EXPECT_THROW(parse_config("[]"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"colour": 1})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"model": {"gamma": 1}})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"grid": {"m": "many"}})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"grid": {"m": 2}})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"model": {"sigma": -1}})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"scheme": "rk4"})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"preset": 9})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"domain": {"x_min": 300}})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"mc_paths": 10})"), std::invalid_argument);
}

TEST(Config, UniformOnlyConvectionRejected) {
  EXPECT_THROW(parse_config(R"({"convection": "upwind3"})"), std::invalid_argument);
  EXPECT_THROW(parse_config(R"({"convection": "central"})"), std::invalid_argument);
  EXPECT_NO_THROW(parse_config(R"({"convection": "quick"})"));
}

TEST(Hash, Fnv1aReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Hash, StableAndSensitive) {
  const RunConfig a = default_config(2);
  RunConfig b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.out = "/somewhere/else";
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.m1 += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(default_config(1)), config_hash(default_config(4)));

  // parsing the canonical form reproduces the configuration
  const RunConfig round = parse_config(canonical_json(a));
  EXPECT_EQ(canonical_json(round), canonical_json(a));
  EXPECT_EQ(config_hash(round), config_hash(a));
}

TEST(Csv, RoundTripNumbers) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, (k % 30) - 15);
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
}

TEST(Csv, Layout) {
  std::ostringstream os;
  write_csv(os, 0xabcULL, {"name", "x", "n"}, {{std::string("a,b"), 0.5, 7LL}, {std::string("q\"t"), -2.0, -1LL}});
  EXPECT_EQ(os.str(), "# config_hash=0000000000000abc\nname,x,n\n\"a,b\",0.5,7\n\"q\"\"t\",-2,-1\n");
  std::ostringstream bad;
  EXPECT_THROW(write_csv(bad, 1, {"a", "b"}, {{1.0}}), std::invalid_argument);
}

TEST(Determinism, RepeatedEuropeanRunsAreIdentical) {
  RunConfig cfg = default_config(4);
  cfg.m1 = cfg.m2 = 24;
  const PricingSetup s = to_setup(cfg);
  const EuropeanResult a = price_european(s, 0.1, 20);
  const EuropeanResult b = price_european(s, 0.1, 20);
  ASSERT_EQ(a.values.size(), b.values.size());
  for (Eigen::Index k = 0; k < a.values.size(); ++k) EXPECT_EQ(a.values[k], b.values[k]);
}
