#pragma once

#include "swingpide/discretize.hpp"
#include "swingpide/grid.hpp"
#include "swingpide/linsolve.hpp"
#include "swingpide/model.hpp"
#include "swingpide/stepper.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace swingpide {

/// One of the six built-in parameter sets (1-3 Merton, 4-6 Kou).
struct Preset {
  int id = 1;
  ModelParams params;
  Domain domain;
  double strike = 50.0;
};

Preset preset(int id);

struct RunConfig {
  int preset = 1;
  ModelParams params;
  Domain domain;
  SwingContract contract;
  int m1 = 100;
  int m2 = 100;
  double d = 0.0;
  int n_steps = 100;
  StepperKind scheme = StepperKind::Cnfi;
  ConvectionScheme convection = ConvectionScheme::Quick;
  bool rannacher = true;
  bool tail_correction = true;
  SolverConfig solver;
  FixedPointConfig fixed_point;
  DirkConfig dirk;
  std::uint64_t seed = 20240601;
  long mc_paths = 1000000;
  std::string out = ".";

  void validate() const;
};

/// Defaults with the given preset applied.
RunConfig default_config(int preset_id = 1);

/// Parses a JSON document. A "preset" key is applied first; every other key
/// overrides single fields. Unknown keys are rejected.
RunConfig parse_config(std::string_view json_text);

/// Canonical JSON (sorted keys, no whitespace) of every field except `out`.
std::string canonical_json(const RunConfig& cfg);

/// 64-bit FNV-1a of canonical_json(cfg).
std::uint64_t config_hash(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

PricingSetup to_setup(const RunConfig& cfg);

}  // namespace swingpide
