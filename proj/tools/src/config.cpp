#include "ewmaopt_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ewmaopt::cli {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"command", "", "evaluate | table | figure | calibrate | optimize | simulate | selftest", true},
      {"id", "", "table id (1a, 1b, 2a, 2b) or figure id (1..5)", true},
      {"theta", "1", "post-change shift; observations have mean 1 + theta after the change", true},
      {"lambda", "0.1", "EWMA smoothing factor in (0, 1]", true},
      {"z", "0", "headstart (EWMA z or SR-r r); 'free' lets optimize choose it", true},
      {"A", "auto", "threshold; 'auto' calibrates it to gamma", true},
      {"gamma", "1000", "target ARL to false alarm", true},
      {"objective", "sadd", "sadd | stadd", true},
      {"method", "analytic", "analytic | quadrature | mc | all", true},
      {"proc", "ewma", "ewma | sr | srr", true},
      {"r", "0", "SR-r starting point", true},
      {"metric", "arl", "simulate: arl | add | stadd", true},
      {"nu", "0", "change-point for simulate --metric add (stadd: 0 means 20 x ARL)", true},
      {"kmax", "10", "evaluate: report ADD_k for k = 0..kmax", true},
      {"seed", "20240611", "Monte Carlo seed", true},
      {"reps", "100000", "Monte Carlo replications", true},
      {"threads", "0", "worker threads (0 = hardware); results do not depend on it", false},
      {"out", "", "output directory (empty: write to standard output)", false},
      {"config", "", "configuration file", false},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

void RunConfig::load_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = line;
    if (body.starts_with("#@")) {
      body.remove_prefix(2);
    } else if (trim(body).starts_with("#")) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "version") continue;
    set(key, value);
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ss.str());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown configuration key '" + key + "'");
  static const std::map<std::string, std::vector<std::string>> choices = {
      {"objective", {"sadd", "stadd"}},
      {"method", {"analytic", "quadrature", "mc", "all"}},
      {"proc", {"ewma", "sr", "srr"}},
      {"metric", {"arl", "add", "stadd"}},
  };
  if (const auto c = choices.find(key); c != choices.end()) {
    if (std::find(c->second.begin(), c->second.end(), value) == c->second.end()) {
      throw std::invalid_argument("--" + key + ": unexpected value '" + value + "'");
    }
  }
  it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown configuration key '" + key + "'");
  return it->second;
}

double RunConfig::number(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("--" + key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::uint64_t RunConfig::count(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw std::invalid_argument("--" + key + ": expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> RunConfig::provenance() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : config_keys()) {
    if (k.recorded) out.emplace_back(k.name, values_.at(k.name));
  }
  return out;
}

}  // namespace ewmaopt::cli
