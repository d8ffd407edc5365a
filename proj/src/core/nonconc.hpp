#pragma once

#include <cstdint>
#include <vector>

#include "core/continuants.hpp"
#include "core/thermo.hpp"

namespace gfd {

std::size_t tree_index(const RegularTree& tree, const Word& a);

// D(ab, x) = T''_{ab}(x)/T'_{ab}(x) for tree words a, b.
double pair_distortion(const RegularTree& tree, std::size_t ia, std::size_t ib, double x);
std::vector<double> distortion_set(const RegularTree& tree, std::size_t ia, double x);
std::vector<double> distortion_set(const RegularTree& tree, const Word& a, double x);

std::uint64_t nonlinearity_counter(const RegularTree& tree, std::size_t ia, std::size_t ib, double x, double rho);

struct NonConcRow {
  double rho;
  std::uint64_t count;
  double bound;
  bool ok;
};

struct NonConcReport {
  int n = 0;
  std::size_t tree_size = 0;
  std::vector<NonConcRow> rows;  // rho decreasing
  double kappa_hat = 0;
  double C0_hat = 0;
  double residual = 0;
  double x_grid_slack = 0;
};

std::vector<double> default_x_grid();
std::vector<double> rho_grid(const RegularTree& tree);
NonConcReport nonlinearity_report(const RegularTree& tree, const std::vector<double>& x_grid = default_x_grid());

struct DistDiophResult {
  Rational lhs, mid, rhs;
  bool ok;
};
DistDiophResult distdioph_check(const MarkovSystem& sys, const Word& b, const Word& c, const Rational& x);
// Exact T''_w/T'_w at rational x (Gauss).
Rational distortion_exact(const Word& w, const Rational& x);

double dist_concat_slack(const RegularTree& tree, const Word& a, const Word& b, const Word& c);

struct TripleCount {
  std::uint64_t count = 0;
  double bound = 0;
  double statement_bound = 0;  // D2 only
  bool ok = false;
};
TripleCount triple_count_d1(const RegularTree& tree, std::size_t ia, double sigma, double kappa);
TripleCount triple_count_d2(const RegularTree& tree, std::size_t ia, double sigma);
std::vector<double> sigma_grid(const RegularTree& tree, int points);

struct WellDistributed {
  int k = 0;
  double s0 = 0;
  double eps3 = 0.25;
  std::vector<double> sigmas;
  std::size_t size = 0;            // |R_n|
  std::vector<std::uint8_t> good;  // good[prev*size + cur]
  std::uint64_t total_blocks = 0;
  std::uint64_t kept_blocks = 0;
  double complement_fraction = 1;

  bool contains(const std::vector<std::size_t>& block) const;
  // Uniform samples from W (blocks of k+1 tree indices).
  std::vector<std::vector<std::size_t>> sample(std::size_t count, std::uint64_t seed) const;
};

WellDistributed well_distributed_blocks(const RegularTree& tree, int k, double s0, double eps3 = 0.25);

}  // namespace gfd
