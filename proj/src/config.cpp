#include "rough/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rough/spde.hpp"

namespace rough {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool is_power_of_two(long v) { return v >= 2 && (v & (v - 1)) == 0; }

bool parse_double(const std::string& s, double* out) {
  try {
    std::size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_long(const std::string& s, long* out) {
  try {
    std::size_t pos = 0;
    *out = std::stol(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_bool(const std::string& s, bool* out) {
  if (s == "true" || s == "1" || s == "yes") { *out = true; return true; }
  if (s == "false" || s == "0" || s == "no") { *out = false; return true; }
  return false;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    double v = 0.0;
    if (!parse_double(tok, &v))
      throw std::invalid_argument("not a number: " + tok);
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    long v = 0;
    if (!parse_long(tok, &v))
      throw std::invalid_argument("not an integer: " + tok);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> errors;
  if (!(alpha > 1.0) || !(alpha < 2.0))
    errors.push_back("alpha must lie in (1, 2), got " +
                     std::to_string(alpha));
  if (workers < 1) errors.push_back("workers must be >= 1");
  if (!(field_t > 0.0)) errors.push_back("field.t must be positive");
  if (!(field_box > 0.0)) errors.push_back("field.box must be positive");
  if (field_ns.empty()) errors.push_back("field.ns must be nonempty");
  for (int n : field_ns)
    if (n != 1 && !is_power_of_two(n))
      errors.push_back("field.ns entries must be powers of two, got " +
                       std::to_string(n));
  if (field_replicas == 0) errors.push_back("field.replicas must be >= 1");
  if (!is_power_of_two(solve_n))
    errors.push_back("solve.n must be a power of two >= 2, got " +
                     std::to_string(solve_n));
  if (!(solve_box > 0.0)) errors.push_back("solve.box must be positive");
  if (!(solve_dt > 0.0)) errors.push_back("solve.dt must be positive");
  if (!(solve_t_end >= 0.0)) errors.push_back("solve.t must be >= 0");
  try {
    SigmaSpec::parse(solve_sigma);
  } catch (const std::exception& e) {
    errors.push_back(std::string("solve.sigma: ") + e.what());
  }
  if (solve_replicas == 0) errors.push_back("solve.replicas must be >= 1");
  if (moments_k < 1) errors.push_back("moments.k must be >= 1");
  if (moments_t_grid.empty()) errors.push_back("moments.t_grid must be nonempty");
  for (double t : moments_t_grid)
    if (!(t > 0.0)) errors.push_back("moments.t_grid entries must be positive");
  if (moments_method != "solver" && moments_method != "feynman-kac")
    errors.push_back("moments.method must be 'solver' or 'feynman-kac', got " +
                     moments_method);
  if (moments_replicas == 0) errors.push_back("moments.replicas must be >= 1");
  if (!(osc_t > 0.0)) errors.push_back("oscillation.t must be positive");
  if (osc_deltas.empty()) errors.push_back("oscillation.deltas must be nonempty");
  for (double d : osc_deltas)
    if (!(d > 0.0) || d > 1.0)
      errors.push_back("oscillation.deltas entries must lie in (0, 1]");
  if (osc_replicas == 0) errors.push_back("oscillation.replicas must be >= 1");
  if (osc_budget == 0) errors.push_back("oscillation.budget must be >= 1");
  if (!(verify_replica_scale >= 0.0))
    errors.push_back("verify.replica_scale must be >= 0");
  return errors;
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  out << "alpha=" << alpha << " seed=" << seed << " out_dir=" << out_dir
      << " workers=" << workers;
  out << " field.t=" << field_t << " field.box=" << field_box
      << " field.ns=";
  for (std::size_t i = 0; i < field_ns.size(); ++i)
    out << (i ? "," : "") << field_ns[i];
  out << " field.replicas=" << field_replicas;
  out << " solve.n=" << solve_n << " solve.box=" << solve_box
      << " solve.dt=" << solve_dt << " solve.t=" << solve_t_end
      << " solve.sigma=" << solve_sigma
      << " solve.coupled=" << (solve_coupled ? "true" : "false")
      << " solve.replicas=" << solve_replicas;
  out << " moments.k=" << moments_k << " moments.method=" << moments_method
      << " moments.replicas=" << moments_replicas;
  out << " oscillation.t=" << osc_t
      << " oscillation.replicas=" << osc_replicas
      << " oscillation.budget=" << osc_budget;
  return out.str();
}

ParseOutcome parse_config_text(const std::string& text) {
  ParseOutcome out;
  ExperimentConfig& cfg = out.config;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        out.errors.push_back("line " + std::to_string(lineno) +
                             ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "kernel" && section != "field" && section != "solve" &&
          section != "moments" && section != "oscillation" &&
          section != "verify")
        out.errors.push_back("line " + std::to_string(lineno) +
                             ": unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      out.errors.push_back("line " + std::to_string(lineno) +
                           ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section.empty() ? key : section + "." + key;

    auto bad = [&](const std::string& why) {
      out.errors.push_back("line " + std::to_string(lineno) + ": " + qual +
                           ": " + why);
    };
    auto set_double = [&](double* dst) {
      double v;
      if (parse_double(value, &v)) *dst = v;
      else bad("not a number: " + value);
    };
    auto set_size = [&](std::size_t* dst) {
      long v;
      if (parse_long(value, &v) && v >= 0) *dst = static_cast<std::size_t>(v);
      else bad("not a nonnegative integer: " + value);
    };
    auto set_int = [&](int* dst) {
      long v;
      if (parse_long(value, &v)) *dst = static_cast<int>(v);
      else bad("not an integer: " + value);
    };

    if (qual == "alpha" || qual == "kernel.alpha" || qual == "field.alpha" ||
        qual == "solve.alpha" || qual == "moments.alpha")
      set_double(&cfg.alpha);
    else if (qual == "seed") {
      long v;
      if (parse_long(value, &v) && v >= 0) cfg.seed = static_cast<std::uint64_t>(v);
      else bad("not a nonnegative integer: " + value);
    } else if (qual == "out_dir") cfg.out_dir = value;
    else if (qual == "workers") set_int(&cfg.workers);
    else if (qual == "verbosity") set_int(&cfg.verbosity);
    else if (qual == "field.t") set_double(&cfg.field_t);
    else if (qual == "field.box") set_double(&cfg.field_box);
    else if (qual == "field.ns") {
      try { cfg.field_ns = parse_int_list(value); }
      catch (const std::exception& e) { bad(e.what()); }
    } else if (qual == "field.replicas") set_size(&cfg.field_replicas);
    else if (qual == "solve.n") set_int(&cfg.solve_n);
    else if (qual == "solve.box") set_double(&cfg.solve_box);
    else if (qual == "solve.dt") set_double(&cfg.solve_dt);
    else if (qual == "solve.t") set_double(&cfg.solve_t_end);
    else if (qual == "solve.sigma") cfg.solve_sigma = value;
    else if (qual == "solve.coupled") {
      bool b;
      if (parse_bool(value, &b)) cfg.solve_coupled = b;
      else bad("not a boolean: " + value);
    } else if (qual == "solve.snapshots") {
      try { cfg.solve_snapshots = parse_double_list(value); }
      catch (const std::exception& e) { bad(e.what()); }
    } else if (qual == "solve.replicas") set_size(&cfg.solve_replicas);
    else if (qual == "moments.k") set_int(&cfg.moments_k);
    else if (qual == "moments.t_grid") {
      try { cfg.moments_t_grid = parse_double_list(value); }
      catch (const std::exception& e) { bad(e.what()); }
    } else if (qual == "moments.method") cfg.moments_method = value;
    else if (qual == "moments.replicas") set_size(&cfg.moments_replicas);
    else if (qual == "oscillation.t") set_double(&cfg.osc_t);
    else if (qual == "oscillation.deltas") {
      try { cfg.osc_deltas = parse_double_list(value); }
      catch (const std::exception& e) { bad(e.what()); }
    } else if (qual == "oscillation.replicas") set_size(&cfg.osc_replicas);
    else if (qual == "oscillation.budget") set_size(&cfg.osc_budget);
    else if (qual == "verify.only") cfg.verify_only = value;
    else if (qual == "verify.replica_scale") set_double(&cfg.verify_replica_scale);
    else
      out.errors.push_back("line " + std::to_string(lineno) +
                           ": unknown key " + qual);
  }
  for (const auto& e : cfg.validate()) out.errors.push_back(e);
  return out;
}

ParseOutcome parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseOutcome out;
    out.errors.push_back("cannot open config file: " + path);
    return out;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace rough
