#include "ebshrink/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ebshrink/errors.hpp"
#include "ebshrink/math.hpp"

namespace ebshrink {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

double parse_double_strict(const std::string& origin, std::size_t lineno,
                           const std::string& value, const std::string& key) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end || value.empty()) {
    throw ParseError(origin, lineno, key + ": not a number: '" + value + "'");
  }
  return out;
}

std::uint64_t parse_u64_strict(const std::string& origin, std::size_t lineno,
                               const std::string& value, const std::string& key) {
  std::uint64_t out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end || value.empty()) {
    throw ParseError(origin, lineno,
                     key + ": not a non-negative integer: '" + value + "'");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& origin,
                                      std::size_t lineno,
                                      const std::string& value,
                                      const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = value.find(',', start);
    const std::string item = trim(
        comma == std::string::npos ? value.substr(start)
                                   : value.substr(start, comma - start));
    out.push_back(parse_double_strict(origin, lineno, item, key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text,
                                   const std::string& origin) {
  std::map<std::string, std::pair<std::size_t, std::string>> kv;
  {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      const std::size_t eq = stripped.find('=');
      if (eq == std::string::npos) {
        throw ParseError(origin, lineno, "expected 'key = value': " + stripped);
      }
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty()) throw ParseError(origin, lineno, "empty key");
      if (kv.count(key)) {
        throw ParseError(origin, lineno, "duplicate key: " + key);
      }
      kv[key] = {lineno, value};
    }
  }

  const auto take = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
      throw ParseError(origin, 0, "missing required key: " + key);
    }
    auto out = it->second;
    kv.erase(it);
    return out;
  };

  ScenarioConfig cfg;
  {
    const auto [lineno, value] = take("family");
    try {
      cfg.family = family_from_string(value);
    } catch (const ConfigError& e) {
      throw ParseError(origin, lineno, e.what());
    }
  }
  {
    const auto [lineno, value] = take("n_experiments");
    cfg.n_experiments = static_cast<std::size_t>(
        parse_u64_strict(origin, lineno, value, "n_experiments"));
  }
  {
    const auto [lineno, value] = take("mu");
    cfg.mu = parse_double_list(origin, lineno, value, "mu");
  }
  {
    const auto [lineno, value] = take("epsilon");
    cfg.epsilon = parse_double_strict(origin, lineno, value, "epsilon");
  }
  {
    const auto [lineno, value] = take("sigma");
    cfg.sigma = parse_double_strict(origin, lineno, value, "sigma");
  }
  {
    const auto [lineno, value] = take("kappa");
    cfg.kappa = parse_double_strict(origin, lineno, value, "kappa");
  }
  if (cfg.family == Family::kHeavyTail) {
    const auto [lineno, value] = take("nu");
    cfg.nu = parse_double_strict(origin, lineno, value, "nu");
  }
  if (cfg.family == Family::kHiddenSelection) {
    const auto [lineno, value] = take("rho");
    cfg.rho = parse_double_strict(origin, lineno, value, "rho");
  }
  {
    const auto [lineno, value] = take("analysis_m0");
    cfg.analysis_m0 = parse_double_strict(origin, lineno, value, "analysis_m0");
  }
  {
    const auto [lineno, value] = take("analysis_tau");
    cfg.analysis_tau = parse_double_strict(origin, lineno, value, "analysis_tau");
  }
  {
    const auto [lineno, value] = take("selection_multiplier");
    cfg.selection_multiplier =
        parse_double_strict(origin, lineno, value, "selection_multiplier");
  }
  {
    const auto [lineno, value] = take("interval_level");
    cfg.interval_level =
        parse_double_strict(origin, lineno, value, "interval_level");
  }
  {
    const auto [lineno, value] = take("seed");
    cfg.seed = parse_u64_strict(origin, lineno, value, "seed");
  }

  if (!kv.empty()) {
    const auto& [key, where] = *kv.begin();
    throw ParseError(origin, where.first,
                     "unknown or inapplicable key: " + key);
  }

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(origin, 0, e.what());
  }
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path.string());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "family = " << to_string(cfg.family) << '\n';
  out << "n_experiments = " << cfg.n_experiments << '\n';
  out << "mu = ";
  for (std::size_t i = 0; i < cfg.mu.size(); ++i) {
    if (i) out << ',';
    out << format_double(cfg.mu[i]);
  }
  out << '\n';
  out << "epsilon = " << format_double(cfg.epsilon) << '\n';
  out << "sigma = " << format_double(cfg.sigma) << '\n';
  out << "kappa = " << format_double(cfg.kappa) << '\n';
  if (cfg.nu) out << "nu = " << format_double(*cfg.nu) << '\n';
  if (cfg.rho) out << "rho = " << format_double(*cfg.rho) << '\n';
  out << "analysis_m0 = " << format_double(cfg.analysis_m0) << '\n';
  out << "analysis_tau = " << format_double(cfg.analysis_tau) << '\n';
  out << "selection_multiplier = " << format_double(cfg.selection_multiplier)
      << '\n';
  out << "interval_level = " << format_double(cfg.interval_level) << '\n';
  out << "seed = " << cfg.seed << '\n';
  return out.str();
}

}  // namespace ebshrink
