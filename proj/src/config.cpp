// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace podhjb {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key " + key + " has non-numeric value '" +
                                value + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config: key " + key + " has trailing characters in '" +
                                value + "'");
  }
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) {
    throw std::invalid_argument("config: key " + key + " must be an integer");
  }
  return static_cast<long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "0" || value == "false") return false;
  if (value == "1" || value == "true") return true;
  throw std::invalid_argument("config: key " + key + " must be 0/1/true/false");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(parse_double(key, trim(cell)));
  }
  if (out.empty()) {
    throw std::invalid_argument("config: key " + key + " needs at least one value");
  }
  return out;
}

}  // namespace

Grid1D PipelineConfig::grid() const {
  return make_grid(a, b, dx, t_final, dt_pde);
}

PdeParams PipelineConfig::params() const { return {epsilon, c}; }

Eigen::VectorXd PipelineConfig::initial_state(const Grid1D& g) const {
  return initial == InitialKind::kParabola ? initial_parabola(g)
                                           : initial_hat(g);
}

ControlSignal PipelineConfig::reference_control(const Grid1D& g) const {
  if (reference == ReferenceKind::kStepSchedule) {
    ControlSignal u(g.steps);
    for (int n = 0; n < g.steps; ++n) {
      const double t = g.time(n);
      u[n] = t < 1.0 ? -1.0 : (t < 2.0 ? 0.0 : 1.0);
    }
    return u;
  }
  return ControlSignal(g.steps, 0.0);
}

void PipelineConfig::validate() const {
  const Grid1D g = grid();  // checks a<b, positivity, commensurability
  const double bound = cfl_bound(params(), dx);
  if (epsilon < 0.0) {
    throw std::invalid_argument("config: pde.epsilon must be >= 0");
  }
  if (dt_pde > bound * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "config: pde.dt = " << dt_pde << " violates the stability bound "
        << bound;
    throw std::invalid_argument(msg.str());
  }
  if (!(control_weight > 0.0)) {
    throw std::invalid_argument("config: cost.R must be positive");
  }
  if (lambda < 0.0) {
    throw std::invalid_argument("config: cost.lambda must be >= 0");
  }
  if (terminal_weight < 0.0) {
    throw std::invalid_argument("config: cost.terminal_weight must be >= 0");
  }
  if (rank < 1) {
    throw std::invalid_argument("config: reduce.ell must be >= 1");
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("config: reduce.tau must lie in (0,1)");
  }
  if (!(dt_hjb > 0.0)) {
    throw std::invalid_argument("config: hjb.dt must be positive");
  }
  if (nodes_per_dim < 2) {
    throw std::invalid_argument("config: hjb.nodes_per_dim must be >= 2");
  }
  if (controls.empty()) {
    throw std::invalid_argument("config: hjb.controls must be non-empty");
  }
  if (controls.size() > 255) {
    throw std::invalid_argument("config: hjb.controls has too many values");
  }
  if (box_margin < 0.0) {
    throw std::invalid_argument("config: hjb.box_margin must be >= 0");
  }
  (void)g;
}

PipelineConfig PipelineConfig::from_string(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config: line " << lineno << " is not key=value: '" << line << "'";
      throw std::invalid_argument(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (kv.count(key)) {
      throw std::invalid_argument("config: duplicate key " + key);
    }
    kv[key] = value;
  }

  PipelineConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "pde.epsilon") {
      cfg.epsilon = parse_double(key, value);
    } else if (key == "pde.c") {
      cfg.c = parse_double(key, value);
    } else if (key == "pde.a") {
      cfg.a = parse_double(key, value);
    } else if (key == "pde.b") {
      cfg.b = parse_double(key, value);
    } else if (key == "pde.T") {
      cfg.t_final = parse_double(key, value);
    } else if (key == "pde.dx") {
      cfg.dx = parse_double(key, value);
    } else if (key == "pde.dt") {
      cfg.dt_pde_requested = parse_double(key, value);
    } else if (key == "pde.initial") {
      if (value == "parabola") {
        cfg.initial = InitialKind::kParabola;
      } else if (value == "hat") {
        cfg.initial = InitialKind::kHat;
      } else {
        throw std::invalid_argument("config: pde.initial must be parabola|hat");
      }
    } else if (key == "cost.R") {
      cfg.control_weight = parse_double(key, value);
    } else if (key == "cost.lambda") {
      cfg.lambda = parse_double(key, value);
    } else if (key == "cost.reference") {
      if (value == "zero") {
        cfg.reference = ReferenceKind::kZero;
      } else if (value == "uncontrolled") {
        cfg.reference = ReferenceKind::kUncontrolled;
      } else if (value == "step_schedule") {
        cfg.reference = ReferenceKind::kStepSchedule;
      } else {
        throw std::invalid_argument(
            "config: cost.reference must be zero|uncontrolled|step_schedule");
      }
    } else if (key == "cost.terminal_weight") {
      cfg.terminal_weight = parse_double(key, value);
    } else if (key == "reduce.ell") {
      cfg.rank = static_cast<int>(parse_long(key, value));
    } else if (key == "reduce.tau") {
      cfg.threshold = parse_double(key, value);
    } else if (key == "reduce.energy") {
      if (value == "plain") {
        cfg.energy = EnergyVariant::kFirstPower;
      } else if (value == "squared") {
        cfg.energy = EnergyVariant::kSquared;
      } else {
        throw std::invalid_argument("config: reduce.energy must be plain|squared");
      }
    } else if (key == "hjb.dt") {
      cfg.dt_hjb = parse_double(key, value);
    } else if (key == "hjb.nodes_per_dim") {
      cfg.nodes_per_dim = static_cast<int>(parse_long(key, value));
    } else if (key == "hjb.controls") {
      cfg.controls = parse_list(key, value);
    } else if (key == "hjb.box_margin") {
      cfg.box_margin = parse_double(key, value);
    } else if (key == "hjb.save_stacks") {
      cfg.save_stacks = parse_bool(key, value);
    } else if (key == "hjb.refine_control") {
      cfg.refine_control = parse_bool(key, value);
    } else if (key == "run.preset") {
      cfg.preset = value;
    } else if (key == "run.seed") {
      cfg.seed = parse_long(key, value);
    } else {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }

  // Quoted time steps that do not divide T are rounded down to the nearest
  // commensurate value; the adjustment is surfaced in the manifest.
  cfg.dt_pde = commensurate_dt(cfg.t_final, cfg.dt_pde_requested);
  cfg.dt_adjusted = cfg.dt_pde != cfg.dt_pde_requested;
  cfg.validate();
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_string(buffer.str());
}

}  // namespace podhjb
