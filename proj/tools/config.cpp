#include "config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace dynslip::cli {

namespace pt = boost::property_tree;

std::string to_string(Study s) {
  switch (s) {
    case Study::resolvent: return "resolvent";
    case Study::sweep: return "sweep";
    case Study::korn: return "korn";
    case Study::evolve: return "evolve";
    case Study::maxreg: return "maxreg";
    case Study::convergence: return "convergence";
    case Study::interp: return "interp";
  }
  return "?";
}

std::optional<Study> parse_study(const std::string& s) {
  static const std::map<std::string, Study> names{
      {"resolvent", Study::resolvent}, {"sweep", Study::sweep},   {"korn", Study::korn},
      {"evolve", Study::evolve},       {"maxreg", Study::maxreg}, {"convergence", Study::convergence},
      {"interp", Study::interp}};
  auto it = names.find(s);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error(fmt::format("invalid configuration:\n  {}", fmt::join(problems, "\n  "))),
      problems_(std::move(problems)) {}

namespace {

std::vector<std::string> split(const std::string& s, const char* seps) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(seps));
  for (auto& p : parts) boost::trim(p);
  parts.erase(std::remove(parts.begin(), parts.end(), ""), parts.end());
  return parts;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

std::vector<double> doubles(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ",")) out.push_back(to_double(p));
  return out;
}

}  // namespace

cplx parse_complex(const std::string& raw) {
  std::string s = boost::algorithm::erase_all_copy(raw, " ");
  if (s.empty()) throw InvalidArgument("empty complex number");
  if (s.back() != 'i') return {to_double(s), 0.0};
  s.pop_back();
  // split at the last sign that is not part of an exponent
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      const std::string im = s.substr(k);
      return {to_double(s.substr(0, k)), im == "+" ? 1.0 : im == "-" ? -1.0 : to_double(im)};
    }
  }
  if (s.empty() || s == "+") return {0.0, 1.0};
  if (s == "-") return {0.0, -1.0};
  return {0.0, to_double(s)};
}

DomainSpec parse_domain(const std::string& raw) {
  const std::string s = boost::algorithm::erase_all_copy(raw, " ");
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw InvalidArgument("malformed domain: " + raw);
  const std::string kind = s.substr(0, open);
  const std::string args = s.substr(open + 1, s.size() - open - 2);
  if (kind == "disk") return DomainSpec::disk(to_double(args));
  if (kind == "ellipse") {
    const auto v = doubles(args);
    if (v.size() != 2) throw InvalidArgument("ellipse needs two semi-axes: " + raw);
    return DomainSpec::ellipse(v[0], v[1]);
  }
  if (kind == "fourier") {
    std::vector<std::string> parts;
    boost::split(parts, args, boost::is_any_of(";"));
    if (parts.empty()) throw InvalidArgument("malformed domain: " + raw);
    const double r0 = to_double(parts[0]);
    std::vector<double> c, sn;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      if (boost::starts_with(parts[i], "c=")) c = doubles(parts[i].substr(2));
      else if (boost::starts_with(parts[i], "s=")) sn = doubles(parts[i].substr(2));
      else throw InvalidArgument("malformed fourier amplitudes: " + raw);
    }
    return DomainSpec::fourier(r0, c, sn);
  }
  throw InvalidArgument("unknown domain kind: " + kind);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("config: cannot read '{}'", path)});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({fmt::format("config: {}", e.message())});
  }
  ExperimentConfig c;
  std::vector<std::string> problems;
  static const std::set<std::string> known{
      "study.name",       "study.domain",        "study.domains",    "study.alpha",
      "study.beta",       "study.alpha_fraction_of_alpha0",          "study.data",
      "study.target",     "study.initial",       "study.forcing",    "mesh.h",
      "mesh.ladder",      "lambda.values",       "lambda.omega",     "lambda.theta_over_pi",
      "lambda.angles_over_pi", "lambda.rho_min", "lambda.rho_max",   "lambda.n_per_ray",
      "lambda.n_probes",  "lambda.krylov_steps", "time.t_end",       "time.n_steps",
      "time.q",           "time.ensemble",       "run.seed",         "run.threads",
      "run.output"};
  for (const auto& [section, sub] : tree) {
    if (sub.empty() && !sub.data().empty()) {
      problems.push_back(fmt::format("{}: key outside any section", section));
      continue;
    }
    for (const auto& [key, val] : sub) {
      const std::string full = section + "." + key;
      if (!known.count(full)) problems.push_back(fmt::format("{}: unknown key", full));
    }
  }

  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto v = tree.get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return boost::trim_copy(*v);
  };
  auto field = [&](const std::string& key, auto&& apply) {
    if (auto v = get(key)) {
      try {
        apply(*v);
      } catch (const std::exception& e) {
        problems.push_back(fmt::format("{}: cannot parse '{}' ({})", key, *v, e.what()));
      }
    }
  };

  field("study.name", [&](const std::string& v) {
    auto s = parse_study(v);
    if (!s) throw InvalidArgument("unknown study");
    c.study = *s;
  });
  field("study.domain", [&](const std::string& v) { c.domains = {parse_domain(v)}; });
  field("study.domains", [&](const std::string& v) {
    c.domains.clear();
    for (const auto& p : split(v, "|")) c.domains.push_back(parse_domain(p));
  });
  field("study.alpha", [&](const std::string& v) { c.alpha = to_double(v); });
  field("study.beta", [&](const std::string& v) { c.beta = to_double(v); });
  field("study.alpha_fraction_of_alpha0", [&](const std::string& v) { c.alpha_fraction_of_alpha0 = to_double(v); });
  field("study.data", [&](const std::string& v) { c.data = v; });
  field("study.target", [&](const std::string& v) { c.target = v; });
  field("study.initial", [&](const std::string& v) { c.initial = v; });
  field("study.forcing", [&](const std::string& v) { c.forcing = v; });
  field("mesh.h", [&](const std::string& v) { c.h_levels = {to_double(v)}; });
  field("mesh.ladder", [&](const std::string& v) { c.h_levels = doubles(v); });
  field("lambda.values", [&](const std::string& v) {
    c.lambdas.emplace();
    for (const auto& p : split(v, ",")) c.lambdas->push_back(parse_complex(p));
  });
  field("lambda.omega", [&](const std::string& v) { c.omega = to_double(v); });
  field("lambda.theta_over_pi", [&](const std::string& v) { c.theta = to_double(v) * kPi; });
  field("lambda.angles_over_pi", [&](const std::string& v) {
    c.angles.emplace();
    for (double a : doubles(v)) c.angles->push_back(a * kPi);
  });
  field("lambda.rho_min", [&](const std::string& v) { c.rho_min = to_double(v); });
  field("lambda.rho_max", [&](const std::string& v) { c.rho_max = to_double(v); });
  field("lambda.n_per_ray", [&](const std::string& v) { c.n_per_ray = std::stoi(v); });
  field("lambda.n_probes", [&](const std::string& v) { c.n_probes = std::stoi(v); });
  field("lambda.krylov_steps", [&](const std::string& v) { c.krylov_steps = std::stoi(v); });
  field("time.t_end", [&](const std::string& v) { c.t_end = to_double(v); });
  field("time.n_steps", [&](const std::string& v) {
    c.n_steps.clear();
    for (const auto& p : split(v, ",")) c.n_steps.push_back(std::stoi(p));
  });
  field("time.q", [&](const std::string& v) { c.q = doubles(v); });
  field("time.ensemble", [&](const std::string& v) { c.ensemble = std::stoi(v); });
  field("run.seed", [&](const std::string& v) { c.seed = std::stoull(v); });
  field("run.threads", [&](const std::string& v) { c.threads = std::stoi(v); });
  field("run.output", [&](const std::string& v) { c.output_dir = v; });

  if (!problems.empty()) throw ConfigError(problems);
  return c;
}

void validate(const ExperimentConfig& c) {
  std::vector<std::string> p;
  if (!(c.beta > 0.0)) p.push_back("study.beta: must be positive");
  if (!std::isfinite(c.alpha)) p.push_back("study.alpha: must be finite");
  if (c.domains.empty()) p.push_back("study.domain: at least one domain is required");
  if (c.h_levels.empty()) p.push_back("mesh.h: at least one mesh size is required");
  for (double h : c.h_levels)
    if (!(h > 0.0)) p.push_back(fmt::format("mesh.h: {} is not positive", h));
  for (std::size_t i = 1; i < c.h_levels.size(); ++i)
    if (!(c.h_levels[i] < c.h_levels[i - 1])) p.push_back("mesh.ladder: sizes must decrease");
  if (c.threads < 1) p.push_back("run.threads: must be at least 1");
  if (c.output_dir.empty()) p.push_back("run.output: must not be empty");
  for (double q : c.q)
    if (!(q > 1.0)) p.push_back(fmt::format("time.q: {} must exceed 1", q));
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) p.push_back("time.t_end: must be finite and positive");
  for (int n : c.n_steps)
    if (n < 2) p.push_back(fmt::format("time.n_steps: {} is below 2", n));

  switch (c.study) {
    case Study::resolvent:
      if (!c.lambdas || c.lambdas->empty()) p.push_back("lambda.values: resolvent study needs at least one lambda");
      if (c.data != "rigid_rotation" && c.data != "stream" && c.data != "random")
        p.push_back("study.data: expected rigid_rotation, stream or random");
      break;
    case Study::sweep:
      if (c.n_per_ray < 1) p.push_back("lambda.n_per_ray: must be at least 1");
      if ((c.angles && c.angles->empty()) || (c.lambdas && c.lambdas->empty()))
        p.push_back("lambda: empty lambda grid");
      if (c.lambdas)
        for (const cplx& l : *c.lambdas) {
          const double w = c.omega.value_or(std::max(1.0, -4.0 * c.alpha) / c.beta);
          if (l == cplx(w) || !(std::abs(std::arg(l - w)) < c.theta))
            p.push_back(fmt::format("lambda.values: {}{:+}i lies outside the sector", l.real(), l.imag()));
        }
      if (!(c.rho_min > 0.0) || !(c.rho_max >= c.rho_min))
        p.push_back("lambda.rho_min/rho_max: need 0 < rho_min <= rho_max");
      if (!(c.theta > 0.0) || !(c.theta < kPi)) p.push_back("lambda.theta_over_pi: must lie in (0, 1)");
      if (c.angles)
        for (double a : *c.angles)
          if (!(std::abs(a) < c.theta)) p.push_back(fmt::format("lambda.angles_over_pi: {} lies outside the sector", a / kPi));
      if (c.n_probes < 1) p.push_back("lambda.n_probes: must be at least 1");
      break;
    case Study::maxreg:
    case Study::evolve:
      if (c.n_steps.size() != 1 && c.n_steps.size() != c.h_levels.size())
        p.push_back("time.n_steps: give one value or one per mesh level");
      if (c.study == Study::maxreg && c.ensemble < 1) p.push_back("time.ensemble: must be at least 1");
      if (c.initial != "zero" && c.initial != "random" && c.initial != "rigid_rotation")
        p.push_back("study.initial: expected zero, random or rigid_rotation");
      if (c.forcing != "zero" && c.forcing != "random" && c.forcing != "manufactured_decay")
        p.push_back("study.forcing: expected zero, random or manufactured_decay");
      break;
    case Study::convergence:
      if (c.target != "resolvent" && c.target != "evolve")
        p.push_back("study.target: expected resolvent or evolve");
      if (c.target == "resolvent" && c.h_levels.size() < 3)
        p.push_back("mesh.ladder: convergence needs at least 3 levels");
      if (c.target == "evolve" && c.n_steps.size() < 3)
        p.push_back("time.n_steps: convergence in time needs at least 3 levels");
      if (c.lambdas && c.lambdas->size() > 1) p.push_back("lambda.values: convergence uses a single lambda");
      break;
    case Study::interp:
      if (c.ensemble < 1) p.push_back("time.ensemble: must be at least 1");
      break;
    case Study::korn:
      break;
  }
  if (!p.empty()) throw ConfigError(p);
}

}  // namespace dynslip::cli
