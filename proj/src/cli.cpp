// Copyright 2026 The ccgrav Authors
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

#include "ccgrav/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "ccgrav/analytics.hpp"
#include "ccgrav/bounds.hpp"
#include "ccgrav/dynamics.hpp"
#include "ccgrav/errors.hpp"
#include "ccgrav/fock.hpp"
#include "ccgrav/format.hpp"
#include "ccgrav/matrix_util.hpp"

namespace ccgrav {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

class SchemaError : public Error {
 public:
  using Error::Error;
};

ParamSpec int_param(std::string name, int value, std::string help) {
  return {std::move(name), ParamType::kInt, value, std::move(help)};
}
ParamSpec real_param(std::string name, double value, std::string help) {
  return {std::move(name), ParamType::kDouble, value, std::move(help)};
}
ParamSpec text_param(std::string name, std::string value, std::string help) {
  return {std::move(name), ParamType::kString, std::move(value), std::move(help)};
}
ParamSpec list_param(std::string name, std::vector<double> value, std::string help) {
  return {std::move(name), ParamType::kDoubleList, std::move(value), std::move(help)};
}

std::string flag_name(const std::string& key) {
  std::string flag = key;
  std::replace(flag.begin(), flag.end(), '_', '-');
  return "--" + flag;
}

}  // namespace

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {"dephase",
       "noise-only decay of a single-particle coherence on a chain",
       {int_param("sites", 2, "chain length"), int_param("i", 0, "first site"),
        int_param("j", 1, "second site"), real_param("xi", 1.0, "measurement strength"),
        real_param("scale", 1.0, "coupling scale G m^2 / (2 hbar) in internal units"),
        text_param("convention", "exclude", "self feedback: exclude | include"),
        real_param("gamma_t_max", 3.0, "evolve until Gamma t reaches this value"),
        int_param("steps", 2000, "integrator steps"), int_param("record_every", 20, "snapshot stride")}},
      {"heat",
       "heating power G hbar M / a^3 (SI)",
       {real_param("mass", 1.44e-25, "mass M in kg"), real_param("a", 1e-13, "cutoff length in m")}},
      {"kappa",
       "lattice-summed kappa^2 for a separation D along x",
       {int_param("D", 20, "separation in lattice units"),
        real_param("radius", 60.0, "truncation radius in lattice units"),
        real_param("tolerance", 1e-3, "relative tolerance of the tail estimate"),
        real_param("scale", 1.0, "coupling scale s")}},
      {"integral",
       "continuum integral I(D)",
       {list_param("D", {10.0, 20.0, 50.0}, "separations, comma separated"),
        real_param("tolerance", 1e-7, "quadrature tolerance"),
        real_param("refinement_check", 1e-3, "max relative change between passes")}},
      {"circuit-check",
       "residual of the measure-and-feedback circuit against the generator",
       {int_param("sites", 2, "chain length"), int_param("particles", 1, "particle number"),
        real_param("xi", 1.0, "measurement strength"), real_param("tau", 1e-3, "largest time step"),
        int_param("halvings", 3, "number of step halvings"), int_param("levels", 24, "ancilla levels"),
        int_param("site", 0, "site of the single-site residual"),
        text_param("convention", "exclude", "self feedback: exclude | include"),
        text_param("state", "uniform", "input state: uniform | random"),
        int_param("seed", 1, "seed for the random state")}},
      {"bounds",
       "lower bounds on the cutoff length from experiments",
       {text_param("preset", "molecule", "molecule | bec | earth | none"),
        text_param("kind", "interferometry", "interferometry | heating (preset none)"),
        real_param("mass", 0.0, "kg (0 keeps the preset value)"),
        real_param("delta", 0.0, "superposition distance in m"),
        real_param("time", 0.0, "coherence time in s"), real_param("power", 0.0, "heating power in W")}},
      {"sweep",
       "evaluate one quantity over a grid",
       {text_param("target", "rate", "rate (over xi) | integral (over D) | heating (over a) | kappa (over D)"),
        list_param("values", {}, "explicit grid, comma separated"),
        real_param("start", 0.1, "grid start when no values are given"),
        real_param("stop", 10.0, "grid stop"), int_param("points", 21, "grid size"),
        text_param("spacing", "log", "log | linear"),
        real_param("kappa_sq", 2.0, "kappa^2 for target rate"),
        real_param("mass", 1.44e-25, "mass in kg for target heating"),
        real_param("radius", 60.0, "lattice sum radius for target kappa"),
        real_param("tolerance", 1e-3, "lattice sum tolerance for target kappa"),
        real_param("integral_tolerance", 1e-7, "quadrature tolerance for target integral")}},
  };
  return specs;
}

std::string config_hash(const json& resolved_config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : resolved_config.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct CommandOutput {
  json result;
  json tolerances = json::object();
  Table table;
};

json table_rows(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) obj[table.columns[c]] = row[c];
    rows.push_back(obj);
  }
  return rows;
}

// ---- parameter access and validation

const CommandSpec& find_spec(const std::string& name) {
  for (const auto& spec : command_specs()) {
    if (spec.name == name) return spec;
  }
  throw SchemaError("unknown command '" + name + "'");
}

json parse_flag_value(const ParamSpec& spec, const std::string& text) {
  auto parse_double = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) {
      throw SchemaError("parameter '" + spec.name + "' expects a number, got '" + s + "'");
    }
    return v;
  };
  switch (spec.type) {
    case ParamType::kInt: {
      char* end = nullptr;
      const long v = std::strtol(text.c_str(), &end, 10);
      if (text.empty() || end != text.c_str() + text.size() || v < INT32_MIN || v > INT32_MAX) {
        throw SchemaError("parameter '" + spec.name + "' expects an integer, got '" + text + "'");
      }
      return static_cast<int>(v);
    }
    case ParamType::kDouble:
      return parse_double(text);
    case ParamType::kString:
      return text;
    case ParamType::kDoubleList: {
      json list = json::array();
      std::stringstream stream(text);
      std::string item;
      while (std::getline(stream, item, ',')) list.push_back(parse_double(item));
      return list;
    }
  }
  return nullptr;
}

json check_config_value(const ParamSpec& spec, const json& value) {
  auto fail = [&](const char* expected) {
    throw SchemaError("parameter '" + spec.name + "' expects " + expected + ", got " + value.dump());
  };
  switch (spec.type) {
    case ParamType::kInt:
      if (!value.is_number_integer()) fail("an integer");
      if (value.get<long long>() < INT32_MIN || value.get<long long>() > INT32_MAX) fail("a 32-bit integer");
      return value.get<int>();
    case ParamType::kDouble:
      if (!value.is_number()) fail("a number");
      return value.get<double>();
    case ParamType::kString:
      if (!value.is_string()) fail("a string");
      return value;
    case ParamType::kDoubleList: {
      if (value.is_number()) return json::array({value.get<double>()});
      if (!value.is_array()) fail("an array of numbers");
      json list = json::array();
      for (const auto& item : value) {
        if (!item.is_number()) fail("an array of numbers");
        list.push_back(item.get<double>());
      }
      return list;
    }
  }
  return nullptr;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

FeedbackConvention parse_convention(const std::string& text) {
  if (text == "exclude") return FeedbackConvention::kExcludeSelf;
  if (text == "include") return FeedbackConvention::kIncludeSelf;
  throw InvalidArgument("convention must be 'exclude' or 'include'");
}

int thread_count(std::size_t jobs) {
  int threads = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("CCGRAV_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*env != '\0' && *end == '\0' && v >= 1) threads = static_cast<int>(std::min(v, 256L));
  }
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(jobs, 1)));
}

// Runs f(k) for k in [0, n) on a small thread pool; results are stored by
// index and the first failure (by index) is rethrown.
std::vector<std::vector<double>> parallel_rows(std::size_t n,
                                               const std::function<std::vector<double>(std::size_t)>& f) {
  std::vector<std::vector<double>> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        rows[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int threads = thread_count(n);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return rows;
}

// ---- commands

CommandOutput run_dephase(const json& p) {
  const int sites = p.at("sites").get<int>();
  const int i = p.at("i").get<int>();
  const int j = p.at("j").get<int>();
  const double xi = p.at("xi").get<double>();
  const double scale = p.at("scale").get<double>();
  const double gamma_t_max = p.at("gamma_t_max").get<double>();
  require(sites >= 2 && sites <= 64, "sites must be in [2, 64]");
  require(i >= 0 && i < sites && j >= 0 && j < sites && i != j, "i and j must be distinct sites");
  require(xi > 0.0, "xi must be positive");
  require(scale > 0.0, "scale must be positive");
  require(gamma_t_max > 0.0, "gamma_t_max must be positive");
  const FeedbackConvention convention = parse_convention(p.at("convention").get<std::string>());

  const LatticeSpec lattice = LatticeSpec::chain(sites);
  const CouplingKernel kernel(lattice, scale);
  const FockBasis basis(static_cast<std::size_t>(sites), 1);
  const NoiseGenerator gen(kernel, basis, xi, convention);

  const double k2 = kappa_sq_on_lattice(kernel, i, j, convention);
  const double gamma = dephasing_rate(k2, xi);
  const DephasingEstimate estimate = optimal_xi(k2);

  auto state_index = [&](int site) {
    Occupation n(static_cast<std::size_t>(sites), 0);
    n[static_cast<std::size_t>(site)] = 1;
    return static_cast<Eigen::Index>(*basis.index_of(n));
  };
  const Eigen::Index si = state_index(i);
  const Eigen::Index sj = state_index(j);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(gen.dim());
  psi(si) = psi(sj) = 1.0 / std::sqrt(2.0);

  EvolutionConfig config;
  config.total_time = gamma_t_max / gamma;
  config.steps = p.at("steps").get<int>();
  config.record_every = p.at("record_every").get<int>();
  const Trajectory trajectory = evolve(psi * psi.adjoint(), &gen, nullptr, config);

  CommandOutput output;
  output.table.columns = {"time", "gamma_t", "coherence", "exact", "relative_error"};
  double max_error = 0.0;
  for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
    const double t = trajectory.times[k];
    const double value = std::abs(trajectory.states[k](si, sj));
    const double exact = 0.5 * std::exp(-gamma * t);
    const double error = std::abs(value - exact) / exact;
    max_error = std::max(max_error, error);
    output.table.rows.push_back({t, gamma * t, value, exact, error});
  }
  output.result = {{"kappa_sq", k2},      {"rate", gamma},
                   {"xi_opt", estimate.xi_opt}, {"min_rate", estimate.min_rate},
                   {"max_relative_error", max_error}, {"trajectory", table_rows(output.table)}};
  output.tolerances = {{"halving_tolerance", config.halving_tolerance}};
  return output;
}

CommandOutput run_heat(const json& p) {
  const double mass = p.at("mass").get<double>();
  const double a = p.at("a").get<double>();
  require(mass > 0.0 && a > 0.0, "mass and a must be positive");
  CommandOutput output;
  const double rate = heating_rate(mass, a);
  output.table.columns = {"mass_kg", "a_m", "heating_rate_W"};
  output.table.rows.push_back({mass, a, rate});
  output.result = {{"mass_kg", mass}, {"a_m", a}, {"heating_rate_W", rate}};
  return output;
}

LatticeSumConfig sum_config(double radius, double tolerance) {
  require(radius >= 2.0 && radius <= 400.0, "radius must be in [2, 400]");
  require(tolerance > 0.0, "tolerance must be positive");
  return {radius, tolerance};
}

CommandOutput run_kappa(const json& p) {
  const int D = p.at("D").get<int>();
  const double scale = p.at("scale").get<double>();
  require(D >= 0, "D must be nonnegative");
  require(scale > 0.0, "scale must be positive");
  const LatticeSumConfig config = sum_config(p.at("radius").get<double>(), p.at("tolerance").get<double>());
  const KappaResult r = kappa_sq(IntVec3{0, 0, 0}, IntVec3{D, 0, 0}, config, scale);
  const double lower = D > 0 ? scale * scale * asymptotic_lower_bound(D) : 0.0;
  CommandOutput output;
  output.table.columns = {"D", "kappa_sq", "tail_bound", "radius", "lower_bound"};
  output.table.rows.push_back({static_cast<double>(D), r.kappa_sq, r.tail_bound, r.radius, lower});
  output.result = to_json(r);
  output.result["lower_bound"] = lower;
  output.tolerances = {{"lattice_sum_tolerance", config.tolerance}, {"radius", config.radius}};
  return output;
}

std::vector<double> integral_row(double D, const IntegralConfig& config) {
  const IntegralResult r = integral_I(D, config);
  return {D, r.value, r.error_estimate, asymptotic_lower_bound(D)};
}

CommandOutput run_integral(const json& p) {
  const std::vector<double> Ds = p.at("D").get<std::vector<double>>();
  require(!Ds.empty(), "D list must not be empty");
  for (double D : Ds) require(D > 0.0, "every D must be positive");
  IntegralConfig config;
  config.tolerance = p.at("tolerance").get<double>();
  config.refinement_check = p.at("refinement_check").get<double>();
  require(config.tolerance > 0.0 && config.refinement_check > 0.0, "tolerances must be positive");

  CommandOutput output;
  output.table.columns = {"D", "I", "error_estimate", "lower_bound"};
  output.table.rows = parallel_rows(Ds.size(), [&](std::size_t k) { return integral_row(Ds[k], config); });
  output.result = {{"rows", table_rows(output.table)}};
  output.tolerances = {{"tolerance", config.tolerance}, {"refinement_check", config.refinement_check}};
  return output;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

CommandOutput run_circuit_check(const json& p) {
  const int sites = p.at("sites").get<int>();
  const int particles = p.at("particles").get<int>();
  const double xi = p.at("xi").get<double>();
  const double tau = p.at("tau").get<double>();
  const int halvings = p.at("halvings").get<int>();
  const int levels = p.at("levels").get<int>();
  const int site = p.at("site").get<int>();
  const std::string state = p.at("state").get<std::string>();
  require(sites >= 1 && sites <= 6, "sites must be in [1, 6]");
  require(particles >= 1 && particles <= 4, "particles must be in [1, 4]");
  require(xi > 0.0 && tau > 0.0, "xi and tau must be positive");
  require(halvings >= 0 && halvings <= 20, "halvings must be in [0, 20]");
  require(levels >= 4 && levels <= 200, "levels must be in [4, 200]");
  require(site >= 0 && site < sites, "site out of range");
  require(state == "uniform" || state == "random", "state must be 'uniform' or 'random'");
  const FeedbackConvention convention = parse_convention(p.at("convention").get<std::string>());

  const LatticeSpec lattice = LatticeSpec::chain(sites);
  const FockBasis basis(static_cast<std::size_t>(sites), particles);
  const NoiseGenerator gen(CouplingKernel(lattice), basis, xi, convention);
  const AncillaOscillator anc(levels);

  Eigen::MatrixXcd rho;
  if (state == "uniform") {
    const Eigen::VectorXcd psi = Eigen::VectorXcd::Ones(gen.dim()) / std::sqrt(static_cast<double>(gen.dim()));
    rho = psi * psi.adjoint();
  } else {
    std::mt19937_64 rng(static_cast<std::uint64_t>(p.at("seed").get<int>()));
    rho = random_pure_state(gen.dim(), rng);
  }

  CommandOutput output;
  output.table.columns = {"tau", "site_residual", "sweep_residual"};
  std::vector<double> taus, site_res, sweep_res;
  for (int k = 0; k <= halvings; ++k) {
    const double t = tau / std::ldexp(1.0, k);
    taus.push_back(t);
    site_res.push_back(generator_residual(rho, gen, static_cast<std::size_t>(site), t, anc));
    sweep_res.push_back(sweep_residual(rho, gen, t, anc));
    output.table.rows.push_back({t, site_res.back(), sweep_res.back()});
  }
  const double site_slope = loglog_slope(taus, site_res);
  const double sweep_slope = loglog_slope(taus, sweep_res);
  output.result = {{"rows", table_rows(output.table)},
                   {"site_slope", std::isfinite(site_slope) ? json(site_slope) : json(nullptr)},
                   {"sweep_slope", std::isfinite(sweep_slope) ? json(sweep_slope) : json(nullptr)}};
  output.tolerances = {{"state_tolerance", 1e-10}, {"ancilla_overflow_population", 1e-8}};
  return output;
}

CommandOutput run_bounds(const json& p) {
  const std::string preset = p.at("preset").get<std::string>();
  ExperimentScenario scenario;
  if (preset == "molecule") {
    scenario = molecule_scenario();
  } else if (preset == "bec") {
    scenario = rubidium_bec_scenario();
  } else if (preset == "earth") {
    scenario = earth_scenario();
  } else if (preset == "none") {
    const std::string kind = p.at("kind").get<std::string>();
    if (kind == "interferometry") {
      scenario = Interferometry{};
    } else if (kind == "heating") {
      scenario = HeatingLimit{};
    } else {
      throw InvalidArgument("kind must be 'interferometry' or 'heating'");
    }
  } else {
    throw InvalidArgument("preset must be molecule, bec, earth or none");
  }
  auto override = [&](const char* key, double& field) {
    const double v = p.at(key).get<double>();
    require(v >= 0.0, std::string(key) + " must be positive");
    if (v > 0.0) field = v;
  };
  CommandOutput output;
  output.table.columns = {"a_min_m", "roundtrip"};
  BoundReport report;
  double roundtrip = 0.0;
  if (auto* s = std::get_if<Interferometry>(&scenario)) {
    override("mass", s->mass);
    override("delta", s->delta);
    override("time", s->time);
    require(p.at("power").get<double>() == 0.0, "power does not apply to an interferometry bound");
    report = interferometry_bound(s->mass, s->delta, s->time);
    roundtrip = min_dephasing_estimate(s->mass, report.a_min, s->delta) * s->time;
  } else {
    auto& h = std::get<HeatingLimit>(scenario);
    override("mass", h.mass);
    override("power", h.power);
    require(p.at("delta").get<double>() == 0.0 && p.at("time").get<double>() == 0.0,
            "delta and time do not apply to a heating bound");
    report = heating_bound(h.mass, h.power);
    roundtrip = heating_rate(h.mass, report.a_min) / h.power;
  }
  output.table.rows.push_back({report.a_min, roundtrip});
  output.result = to_json(report);
  output.result["roundtrip"] = roundtrip;
  return output;
}

CommandOutput run_sweep(const json& p) {
  const std::string target = p.at("target").get<std::string>();
  std::vector<double> grid = p.at("values").get<std::vector<double>>();
  if (grid.empty()) {
    const double start = p.at("start").get<double>();
    const double stop = p.at("stop").get<double>();
    const int points = p.at("points").get<int>();
    const std::string spacing = p.at("spacing").get<std::string>();
    require(points >= 1 && points <= 100000, "points must be in [1, 100000]");
    require(spacing == "log" || spacing == "linear", "spacing must be 'log' or 'linear'");
    if (spacing == "log") require(start > 0.0 && stop > 0.0, "log grids need positive endpoints");
    for (int k = 0; k < points; ++k) {
      const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
      grid.push_back(spacing == "log" ? start * std::pow(stop / start, f) : start + (stop - start) * f);
    }
  }

  CommandOutput output;
  std::function<std::vector<double>(std::size_t)> row;
  if (target == "rate") {
    const double k2 = p.at("kappa_sq").get<double>();
    require(k2 >= 0.0, "kappa_sq must be nonnegative");
    for (double x : grid) require(x > 0.0, "xi grid must be positive");
    output.table.columns = {"xi", "rate"};
    row = [k2, &grid](std::size_t k) { return std::vector<double>{grid[k], dephasing_rate(k2, grid[k])}; };
  } else if (target == "integral") {
    IntegralConfig config;
    config.tolerance = p.at("integral_tolerance").get<double>();
    require(config.tolerance > 0.0, "integral_tolerance must be positive");
    for (double x : grid) require(x > 0.0, "D grid must be positive");
    output.table.columns = {"D", "I", "error_estimate", "lower_bound"};
    output.tolerances = {{"tolerance", config.tolerance}, {"refinement_check", config.refinement_check}};
    row = [config, &grid](std::size_t k) { return integral_row(grid[k], config); };
  } else if (target == "heating") {
    const double mass = p.at("mass").get<double>();
    require(mass > 0.0, "mass must be positive");
    for (double x : grid) require(x > 0.0, "a grid must be positive");
    output.table.columns = {"a_m", "heating_rate_W"};
    row = [mass, &grid](std::size_t k) { return std::vector<double>{grid[k], heating_rate(mass, grid[k])}; };
  } else if (target == "kappa") {
    const LatticeSumConfig config = sum_config(p.at("radius").get<double>(), p.at("tolerance").get<double>());
    for (double x : grid) require(x >= 1.0 && x == std::round(x), "kappa grid must hold positive integers");
    output.table.columns = {"D", "kappa_sq", "tail_bound", "lower_bound"};
    output.tolerances = {{"lattice_sum_tolerance", config.tolerance}, {"radius", config.radius}};
    row = [config, &grid](std::size_t k) {
      const int D = static_cast<int>(grid[k]);
      const KappaResult r = kappa_sq(IntVec3{0, 0, 0}, IntVec3{D, 0, 0}, config);
      return std::vector<double>{grid[k], r.kappa_sq, r.tail_bound, asymptotic_lower_bound(D)};
    };
  } else {
    throw InvalidArgument("target must be rate, integral, heating or kappa");
  }
  output.table.rows = parallel_rows(grid.size(), row);
  output.result = {{"target", target}, {"rows", table_rows(output.table)}};
  if (target == "rate" && !grid.empty()) {
    const auto best = std::min_element(output.table.rows.begin(), output.table.rows.end(),
                                       [](const auto& a, const auto& b) { return a[1] < b[1]; });
    output.result["argmin_xi"] = (*best)[0];
    output.result["xi_opt"] = optimal_xi(p.at("kappa_sq").get<double>()).xi_opt;
  }
  return output;
}

CommandOutput dispatch(const std::string& command, const json& params) {
  if (command == "dephase") return run_dephase(params);
  if (command == "heat") return run_heat(params);
  if (command == "kappa") return run_kappa(params);
  if (command == "integral") return run_integral(params);
  if (command == "circuit-check") return run_circuit_check(params);
  if (command == "bounds") return run_bounds(params);
  if (command == "sweep") return run_sweep(params);
  throw SchemaError("unknown command '" + command + "'");
}

// ---- output

json rounded(const json& value) {
  if (value.is_number_float()) return round12(value.get<double>());
  if (value.is_array() || value.is_object()) {
    json copy = value;
    for (auto& item : copy) item = rounded(item);
    return copy;
  }
  return value;
}

std::string render(const std::string& command, const std::string& hash, const json& params,
                   const CommandOutput& output, const std::string& format) {
  std::ostringstream text;
  if (format == "csv") {
    text << "# command=" << command << "\n# config_hash=" << hash
         << "\n# tolerances=" << rounded(output.tolerances).dump() << '\n';
    for (std::size_t c = 0; c < output.table.columns.size(); ++c) {
      text << (c ? "," : "") << output.table.columns[c];
    }
    text << '\n';
    for (const auto& row : output.table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) text << (c ? "," : "") << format_number(row[c]);
      text << '\n';
    }
  } else {
    const json record = {{"schema_version", kSchemaVersion}, {"command", command},
                         {"config_hash", hash},              {"params", params},
                         {"tolerances", output.tolerances},  {"result", output.result}};
    text << rounded(record).dump(2) << '\n';
  }
  return text.str();
}

int report_error(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file '" + path + "'");
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!config.is_object()) throw SchemaError("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (key != "schema_version" && key != "command" && key != "params" && key != "output" && key != "format") {
      throw SchemaError("unknown config field '" + key + "'");
    }
  }
  if (!config.contains("schema_version") || !config["schema_version"].is_number_integer() ||
      config["schema_version"].get<int>() != kSchemaVersion) {
    throw SchemaError("config file needs \"schema_version\": " + std::to_string(kSchemaVersion));
  }
  if (!config.contains("command") || !config["command"].is_string()) {
    throw SchemaError("config file needs a string \"command\"");
  }
  if (config.contains("params") && !config["params"].is_object()) throw SchemaError("\"params\" must be an object");
  for (const char* key : {"output", "format"}) {
    if (config.contains(key) && !config[key].is_string()) throw SchemaError(std::string(key) + " must be a string");
  }
  return config;
}

struct SubcommandFlags {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::string config;
  std::string output;
  std::string format;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ccgrav: classical-communication gravity noise model toolkit", "ccgrav"};
  std::string top_config;
  app.add_option("--config", top_config, "JSON run configuration (schema_version 1)");
  app.require_subcommand(0, 1);

  std::vector<std::unique_ptr<SubcommandFlags>> subs;
  for (const auto& spec : command_specs()) {
    auto flags = std::make_unique<SubcommandFlags>();
    flags->app = app.add_subcommand(spec.name, spec.help);
    for (const auto& param : spec.params) {
      flags->app->add_option(flag_name(param.name), flags->values[param.name], param.help);
    }
    flags->app->add_option("--config", flags->config, "JSON run configuration; flags override it");
    flags->app->add_option("--output", flags->output, "output file (default stdout)");
    flags->app->add_option("--format", flags->format, "json | csv");
    subs.push_back(std::move(flags));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, kExitSchema, "schema", e.what());
  }

  try {
    const SubcommandFlags* chosen = nullptr;
    for (const auto& flags : subs) {
      if (flags->app->parsed()) chosen = flags.get();
    }
    std::string config_path = top_config;
    if (chosen != nullptr && !chosen->config.empty()) {
      if (!config_path.empty()) throw SchemaError("--config given twice");
      config_path = chosen->config;
    }
    json file;
    if (!config_path.empty()) file = load_config_file(config_path);

    std::string command;
    if (chosen != nullptr) {
      command = chosen->app->get_name();
      if (!file.is_null() && file["command"].get<std::string>() != command) {
        throw SchemaError("config file command '" + file["command"].get<std::string>() +
                          "' does not match '" + command + "'");
      }
    } else if (!file.is_null()) {
      command = file["command"].get<std::string>();
    } else {
      throw SchemaError("no command given; expected one of dephase, heat, kappa, integral, "
                        "circuit-check, bounds, sweep");
    }
    const CommandSpec& spec = find_spec(command);

    json params = json::object();
    for (const auto& param : spec.params) params[param.name] = param.default_value;
    if (!file.is_null() && file.contains("params")) {
      for (const auto& [key, value] : file["params"].items()) {
        auto it = std::find_if(spec.params.begin(), spec.params.end(),
                               [&](const ParamSpec& s) { return s.name == key; });
        if (it == spec.params.end()) throw SchemaError("unknown parameter '" + key + "' for " + command);
        params[key] = check_config_value(*it, value);
      }
    }
    std::string output_path = file.is_null() ? "" : file.value("output", "");
    std::string format = file.is_null() ? "json" : file.value("format", "json");
    if (chosen != nullptr) {
      for (const auto& param : spec.params) {
        if (chosen->app->count(flag_name(param.name)) > 0) {
          params[param.name] = parse_flag_value(param, chosen->values.at(param.name));
        }
      }
      if (chosen->app->count("--output") > 0) output_path = chosen->output;
      if (chosen->app->count("--format") > 0) format = chosen->format;
    }
    if (format != "json" && format != "csv") throw SchemaError("format must be 'json' or 'csv'");

    const std::string hash = config_hash(json{{"command", command}, {"params", params}});
    const CommandOutput output = dispatch(command, params);
    const std::string text = render(command, hash, params, output, format);

    if (output_path.empty()) {
      out << text;
    } else {
      std::ofstream file_out(output_path, std::ios::binary);
      file_out << text;
      if (!file_out) return report_error(err, kExitFailure, "io", "cannot write '" + output_path + "'");
    }
    return kExitOk;
  } catch (const SchemaError& e) {
    return report_error(err, kExitSchema, "schema", e.what());
  } catch (const InvalidArgument& e) {
    return report_error(err, kExitSchema, "invalid_argument", e.what());
  } catch (const ConvergenceError& e) {
    return report_error(err, kExitConvergence, "convergence", e.what());
  } catch (const Error& e) {
    return report_error(err, kExitFailure, "error", e.what());
  } catch (const std::exception& e) {
    return report_error(err, kExitFailure, "internal", e.what());
  }
}

}  // namespace ccgrav
