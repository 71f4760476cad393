#include "swingpide/config.hpp"

#include <json.hpp>

#include <set>
#include <stdexcept>

namespace swingpide {

using nlohmann::json;

Preset preset(int id) {
  if (id < 1 || id > 6) throw std::invalid_argument("preset must be between 1 and 6");
  Preset p;
  p.id = id;
  p.strike = 50.0;
  const double k = p.strike;
  static constexpr double sigmas[3] = {11.0, 20.0, 2.0};
  static constexpr double lambdas[3] = {52.0, 100.0, 10.0};
  const int row = (id - 1) % 3;
  p.params.alpha = 8.0;
  p.params.beta = 126.0;
  p.params.mu = 80.0;
  p.params.r = 0.03;
  p.params.sigma = sigmas[row];
  p.params.lambda = lambdas[row];
  if (id <= 3) {
    p.params.density = MertonJumps{20.0, 60.0};
    p.domain = {-2.0 * k, 5.0 * k, -15.0 * k, 15.0 * k};
  } else {
    p.params.density = KouJumps{0.6, 0.01, 0.02};
    p.domain = {-2.0 * k, 5.0 * k, -20.0 * k, 20.0 * k};
  }
  return p;
}

void RunConfig::validate() const {
  params.validate();
  contract.validate();
  solver.validate();
  fixed_point.validate();
  dirk.validate();
  if (!(domain.x_min < domain.x_max && domain.y_min < domain.y_max))
    throw std::invalid_argument("domain bounds must be increasing");
  if (m1 < 4 || m2 < 4) throw std::invalid_argument("grid sizes must be at least 4");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  if (mc_paths < 1000) throw std::invalid_argument("mc_paths must be at least 1000");
  if ((convection == ConvectionScheme::Upwind3 || convection == ConvectionScheme::Central))
    throw std::invalid_argument(std::string(to_string(convection)) +
                                " convection requires a uniform mesh and cannot be used on the pricing grid");
}

RunConfig default_config(int id) {
  const Preset p = preset(id);
  RunConfig c;
  c.preset = id;
  c.params = p.params;
  c.domain = p.domain;
  c.contract.strike = p.strike;
  return c;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be a JSON object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw std::invalid_argument("unknown key '" + item.key() + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

json density_json(const JumpDensity& d) {
  if (const auto* m = std::get_if<MertonJumps>(&d)) return {{"type", "merton"}, {"mean", m->mean}, {"stddev", m->stddev}};
  const auto& k = std::get<KouJumps>(d);
  return {{"type", "kou"}, {"p", k.p_up}, {"eta1", k.eta_up}, {"eta2", k.eta_down}};
}

JumpDensity parse_density(const json& j, const JumpDensity& current) {
  check_keys(j, {"type", "mean", "stddev", "p", "eta1", "eta2"}, "model.jumps");
  std::string type = std::holds_alternative<MertonJumps>(current) ? "merton" : "kou";
  read(j, "type", type);
  if (type == "merton") {
    MertonJumps m = std::holds_alternative<MertonJumps>(current) ? std::get<MertonJumps>(current) : MertonJumps{};
    read(j, "mean", m.mean);
    read(j, "stddev", m.stddev);
    return m;
  }
  if (type == "kou") {
    KouJumps k = std::holds_alternative<KouJumps>(current) ? std::get<KouJumps>(current) : KouJumps{};
    read(j, "p", k.p_up);
    read(j, "eta1", k.eta_up);
    read(j, "eta2", k.eta_down);
    return k;
  }
  throw std::invalid_argument("unknown jump density type '" + type + "'");
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"preset", "model", "domain", "grid", "time", "scheme", "convection", "rannacher", "tail_correction",
                 "contract", "solver", "fixed_point", "dirk", "seed", "mc_paths", "out"},
             "config");
  try {
    RunConfig c = default_config(j.value("preset", 1));
    if (j.contains("model")) {
      const json& m = j["model"];
      check_keys(m, {"alpha", "beta", "mu", "sigma", "r", "lambda", "jumps"}, "model");
      read(m, "alpha", c.params.alpha);
      read(m, "beta", c.params.beta);
      read(m, "mu", c.params.mu);
      read(m, "sigma", c.params.sigma);
      read(m, "r", c.params.r);
      read(m, "lambda", c.params.lambda);
      if (m.contains("jumps")) c.params.density = parse_density(m["jumps"], c.params.density);
    }
    if (j.contains("domain")) {
      const json& d = j["domain"];
      check_keys(d, {"x_min", "x_max", "y_min", "y_max"}, "domain");
      read(d, "x_min", c.domain.x_min);
      read(d, "x_max", c.domain.x_max);
      read(d, "y_min", c.domain.y_min);
      read(d, "y_max", c.domain.y_max);
    }
    if (j.contains("grid")) {
      const json& g = j["grid"];
      check_keys(g, {"m", "m1", "m2", "d"}, "grid");
      if (g.contains("m")) c.m1 = c.m2 = g["m"].get<int>();
      read(g, "m1", c.m1);
      read(g, "m2", c.m2);
      read(g, "d", c.d);
    }
    if (j.contains("time")) {
      check_keys(j["time"], {"n_steps"}, "time");
      read(j["time"], "n_steps", c.n_steps);
    }
    if (j.contains("scheme")) c.scheme = parse_stepper(j["scheme"].get<std::string>());
    if (j.contains("convection")) c.convection = parse_convection(j["convection"].get<std::string>());
    read(j, "rannacher", c.rannacher);
    read(j, "tail_correction", c.tail_correction);
    if (j.contains("contract")) {
      const json& k = j["contract"];
      check_keys(k, {"strike", "maturity", "actions", "local_cap", "global_cap"}, "contract");
      read(k, "strike", c.contract.strike);
      read(k, "maturity", c.contract.maturity);
      read(k, "actions", c.contract.n_actions);
      read(k, "local_cap", c.contract.local_cap);
      read(k, "global_cap", c.contract.global_cap);
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      check_keys(s, {"rel_tol", "max_iter", "ilutp_drop", "ilutp_pivot"}, "solver");
      read(s, "rel_tol", c.solver.rel_tol);
      read(s, "max_iter", c.solver.max_iter);
      read(s, "ilutp_drop", c.solver.ilutp_drop);
      read(s, "ilutp_pivot", c.solver.ilutp_pivot);
    }
    if (j.contains("fixed_point")) {
      const json& f = j["fixed_point"];
      check_keys(f, {"tol", "l_max"}, "fixed_point");
      read(f, "tol", c.fixed_point.tol);
      read(f, "l_max", c.fixed_point.l_max);
    }
    if (j.contains("dirk")) {
      check_keys(j["dirk"], {"theta"}, "dirk");
      read(j["dirk"], "theta", c.dirk.theta);
    }
    read(j, "seed", c.seed);
    read(j, "mc_paths", c.mc_paths);
    read(j, "out", c.out);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config has a field of the wrong type: ") + e.what());
  }
}

std::string canonical_json(const RunConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["model"] = {{"alpha", c.params.alpha}, {"beta", c.params.beta},   {"mu", c.params.mu},
                {"sigma", c.params.sigma}, {"r", c.params.r},         {"lambda", c.params.lambda},
                {"jumps", density_json(c.params.density)}};
  j["domain"] = {{"x_min", c.domain.x_min}, {"x_max", c.domain.x_max}, {"y_min", c.domain.y_min},
                 {"y_max", c.domain.y_max}};
  j["grid"] = {{"m1", c.m1}, {"m2", c.m2}, {"d", c.d}};
  j["time"] = {{"n_steps", c.n_steps}};
  j["scheme"] = std::string(to_string(c.scheme));
  j["convection"] = std::string(to_string(c.convection));
  j["rannacher"] = c.rannacher;
  j["tail_correction"] = c.tail_correction;
  j["contract"] = {{"strike", c.contract.strike},
                   {"maturity", c.contract.maturity},
                   {"actions", c.contract.n_actions},
                   {"local_cap", c.contract.local_cap},
                   {"global_cap", c.contract.global_cap}};
  j["solver"] = {{"rel_tol", c.solver.rel_tol},
                 {"max_iter", c.solver.max_iter},
                 {"ilutp_drop", c.solver.ilutp_drop},
                 {"ilutp_pivot", c.solver.ilutp_pivot}};
  j["fixed_point"] = {{"tol", c.fixed_point.tol}, {"l_max", c.fixed_point.l_max}};
  j["dirk"] = {{"theta", c.dirk.theta}};
  j["seed"] = c.seed;
  j["mc_paths"] = c.mc_paths;
  return j.dump();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a64(canonical_json(cfg)); }

PricingSetup to_setup(const RunConfig& c) {
  PricingSetup s;
  s.params = c.params;
  s.domain = c.domain;
  s.strike = c.contract.strike;
  s.m1 = c.m1;
  s.m2 = c.m2;
  s.d = c.d;
  s.convection = c.convection;
  s.stepper = c.scheme;
  s.tail_correction = c.tail_correction;
  s.options.fp = c.fixed_point;
  s.options.solver = c.solver;
  s.options.dirk = c.dirk;
  s.options.rannacher = c.rannacher;
  return s;
}

}  // namespace swingpide
