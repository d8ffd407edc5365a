#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/symbolic.hpp"
#include "core/thermo.hpp"

namespace gfd {

struct RunConfig {
  std::string command;
  std::string map = "gauss";
  Digit alpha_lo = 1;
  Digit alpha_hi = 2;
  std::optional<double> s;  // unset: dimension root of the alphabet
  int n = 8;
  double epsilon = 0.2;
  int k = 2;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::uint64_t budget = 1ull << 24;

  // identities
  std::size_t words = 10000;
  std::size_t max_length = 30;
  std::size_t pairs = 10000;
  bool inject_fault = false;
  // decay
  int j_lo = 0;
  int j_hi = 19;
  int samples = 256;
  // expsum
  int eta_points = 12;
  std::size_t blocks = 64;
  double eps3 = 0.25;
  std::optional<double> s0;  // unset: min(kappa_hat, s_hat)/4
  // equidist
  std::optional<std::string> x;  // "p/q" or decimal
  std::string seq = "identity";  // identity | pell | digits:a,b,c | file:path
  std::int64_t m_max = 5;
  std::vector<std::size_t> N_grid = {100, 1000, 10000};
  std::size_t points = 1;
  // largedev
  std::vector<int> n_list = {6, 7, 8, 9, 10, 11, 12, 13, 14};
  // bernoulli weights (cantor control, largedev on affine maps)
  std::vector<double> weights;

  // Sets a field from its textual value; config error on unknown key or bad value.
  void set(const std::string& key, const std::string& value);
  void load_json(const std::string& path);
  void load_json_text(const std::string& text);
  // Checks module preconditions; config error on failure.
  void validate() const;

  MarkovSystem system() const;
  Alphabet alphabet() const { return {alpha_lo, alpha_hi}; }
};

std::vector<std::string> config_keys();

}  // namespace gfd
