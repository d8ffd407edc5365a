#include "core/config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace gfd {

namespace {

template <class T>
T parse_int(const std::string& key, const std::string& v) {
  T out{};
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) fail(Errc::config, "bad integer for " + key + ": " + v);
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(Errc::config, "bad real for " + key + ": " + v);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  fail(Errc::config, "bad boolean for " + key + ": " + v);
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(v);
  while (std::getline(ss, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

std::vector<std::string> config_keys() {
  return {"command", "map",     "alphabet", "s",          "n",      "epsilon",   "k",      "seed",    "out",
          "budget",  "words",   "max_length", "pairs",    "inject_fault", "j_lo", "j_hi",  "samples", "eta_points",
          "blocks",  "eps3",    "s0",       "x",          "seq",    "m_max",     "N",      "points",  "n_list",
          "weights"};
}

void RunConfig::set(const std::string& key, const std::string& v) {
  if (key == "command") command = v;
  else if (key == "map") map = v;
  else if (key == "alphabet") {
    // "lo..hi", "lo-hi" or a single digit
    std::string t = v;
    auto dots = t.find("..");
    std::string a, b;
    if (dots != std::string::npos) {
      a = t.substr(0, dots);
      b = t.substr(dots + 2);
    } else if (auto d = t.find('-'); d != std::string::npos && d > 0) {
      a = t.substr(0, d);
      b = t.substr(d + 1);
    } else {
      a = b = t;
    }
    alpha_lo = parse_int<Digit>(key, a);
    alpha_hi = parse_int<Digit>(key, b);
  } else if (key == "s") {
    if (v == "auto" || v.empty()) s.reset();
    else s = parse_real(key, v);
  } else if (key == "n") n = parse_int<int>(key, v);
  else if (key == "epsilon") epsilon = parse_real(key, v);
  else if (key == "k") k = parse_int<int>(key, v);
  else if (key == "seed") seed = parse_int<std::uint64_t>(key, v);
  else if (key == "out") out = v;
  else if (key == "budget") budget = parse_int<std::uint64_t>(key, v);
  else if (key == "words") words = parse_int<std::size_t>(key, v);
  else if (key == "max_length") max_length = parse_int<std::size_t>(key, v);
  else if (key == "pairs") pairs = parse_int<std::size_t>(key, v);
  else if (key == "inject_fault") inject_fault = parse_bool(key, v);
  else if (key == "j_lo") j_lo = parse_int<int>(key, v);
  else if (key == "j_hi") j_hi = parse_int<int>(key, v);
  else if (key == "samples") samples = parse_int<int>(key, v);
  else if (key == "eta_points") eta_points = parse_int<int>(key, v);
  else if (key == "blocks") blocks = parse_int<std::size_t>(key, v);
  else if (key == "eps3") eps3 = parse_real(key, v);
  else if (key == "s0") {
    if (v == "auto" || v.empty()) s0.reset();
    else s0 = parse_real(key, v);
  } else if (key == "x") {
    if (v.empty()) x.reset();
    else x = v;
  } else if (key == "seq") seq = v;
  else if (key == "m_max") m_max = parse_int<std::int64_t>(key, v);
  else if (key == "N") {
    N_grid.clear();
    for (const auto& t : split(v, ',')) N_grid.push_back(parse_int<std::size_t>(key, t));
  } else if (key == "points") points = parse_int<std::size_t>(key, v);
  else if (key == "n_list") {
    n_list.clear();
    for (const auto& t : split(v, ',')) n_list.push_back(parse_int<int>(key, t));
  } else if (key == "weights") {
    weights.clear();
    for (const auto& t : split(v, ',')) weights.push_back(parse_real(key, t));
  } else fail(Errc::config, "unknown config key: " + key);
}

void RunConfig::load_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::config, std::string("invalid JSON config: ") + e.what());
  }
  if (!j.is_object()) fail(Errc::config, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    std::string s;
    if (v.is_string()) s = v.get<std::string>();
    else if (v.is_boolean()) s = v.get<bool>() ? "true" : "false";
    else if (v.is_number_integer() || v.is_number_unsigned()) s = v.dump();
    else if (v.is_number_float()) s = format_real(v.get<double>());
    else if (v.is_null()) s = "";
    else if (v.is_array()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i].is_number_float() ? format_real(v[i].get<double>()) : v[i].dump();
      }
    } else fail(Errc::config, "unsupported value for " + it.key());
    set(it.key(), s);
  }
}

void RunConfig::load_json(const std::string& path) { load_json_text(read_file(path)); }

MarkovSystem RunConfig::system() const {
  if (map == "gauss") return MarkovSystem::gauss(std::max<Digit>(alpha_hi, 1));
  if (map == "lueroth" || map == "luroth") return MarkovSystem::lueroth(std::max<Digit>(alpha_hi, 1));
  if (map == "cantor") return MarkovSystem::cantor();
  fail(Errc::config, "unknown map: " + map);
}

void RunConfig::validate() const {
  static const std::vector<std::string> commands = {"identities", "decay", "nonconc", "expsum", "equidist", "largedev"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end())
    fail(Errc::config, "unknown command: " + command);
  if (alpha_lo < 1 || alpha_hi < alpha_lo) fail(Errc::config, "empty alphabet");
  MarkovSystem sys = system();
  if (alpha_hi > sys.cutoff()) fail(Errc::config, "alphabet exceeds the map's digit range");
  if (s && !(*s > 0 && *s <= 1)) fail(Errc::config, "s must lie in (0, 1]");
  if (n < 1 || n > 40) fail(Errc::config, "n must lie in [1, 40]");
  if (!(epsilon > 0 && epsilon < 1)) fail(Errc::config, "epsilon must lie in (0, 1)");
  if (k < 1 || k > 8) fail(Errc::config, "k must lie in [1, 8]");
  if (max_length < 1) fail(Errc::config, "max_length must be positive");
  if (j_lo < 0 || j_hi < j_lo || j_hi > 60) fail(Errc::config, "invalid dyadic range");
  if (samples < 64) fail(Errc::config, "samples per block must be at least 64");
  if (eta_points < 2) fail(Errc::config, "eta_points must be at least 2");
  if (!(eps3 > 0 && eps3 < 4)) fail(Errc::config, "eps3 must lie in (0, 4)");
  if (m_max < 1) fail(Errc::config, "m_max must be positive");
  if (N_grid.empty()) fail(Errc::config, "N grid is empty");
  for (std::size_t i = 0; i < N_grid.size(); ++i)
    if (N_grid[i] < 1 || (i && N_grid[i] <= N_grid[i - 1])) fail(Errc::config, "N grid must be positive and increasing");
  if (points < 1) fail(Errc::config, "points must be positive");
  if (n_list.empty()) fail(Errc::config, "n_list is empty");
  for (std::size_t i = 0; i < n_list.size(); ++i)
    if (n_list[i] < 1 || (i && n_list[i] <= n_list[i - 1])) fail(Errc::config, "n_list must be positive and increasing");
  if (!weights.empty()) {
    if (weights.size() != alpha_hi - alpha_lo + 1) fail(Errc::config, "weights must match the alphabet size");
    for (double w : weights)
      if (!(w > 0)) fail(Errc::config, "weights must be positive");
  }
  if (out.empty()) fail(Errc::config, "output path is empty");
}

}  // namespace gfd
