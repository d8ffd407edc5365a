#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "core/measure.hpp"
#include "core/nonconc.hpp"
#include "core/stats.hpp"
#include "core/thermo.hpp"

namespace gfd {

using Complex = std::complex<double>;

Complex fourier_transform(const DiscreteMeasure& m, double xi);

struct DecayBlock {
  int j;
  double xi_lo, xi_hi;
  double sup_abs;
  int n_samples;
  bool aliased;
};

struct DecayScan {
  std::vector<DecayBlock> blocks;
  double e_hat = 0;
  double ci_lo = 0, ci_hi = 0;
  double residual = 0;
  int fit_blocks = 0;
  double xi_max = 0;
  double min_atom_gap = 0;
};

struct DecayOptions {
  int j_lo = 0;
  int j_hi = 19;
  int samples_per_block = 256;  // lower clamp
  int sample_cap = 8192;
  int oversample = 4;           // samples = oversample * 2^j before clamping
};

// max_cylinder_length sets the aliasing guard xi_max = 0.1 / max_cylinder_length.
DecayScan decay_scan(const DiscreteMeasure& m, double max_cylinder_length, const DecayOptions& opt = {});
// Sampled sup of |m^| on the uniform grid xi_0 + (i + 1/2) h, i < count.
double sampled_sup(const DiscreteMeasure& m, double xi0, double h, int count);

DiscreteMeasure mult_convolution(const DiscreteMeasure& a, const DiscreteMeasure& b, std::uint64_t budget = 1ull << 26);

struct DyadicPiece {
  int scale;  // piece = restriction to (2^{i-1}, 2^i], rescaled by 2^{-i}
  DiscreteMeasure piece;
};
std::vector<DyadicPiece> dyadic_decompose(const DiscreteMeasure& m, double R);
DiscreteMeasure dyadic_reconstruct(const std::vector<DyadicPiece>& pieces);

struct BourgainRow {
  double rho;
  double max_ball_mass;
  double ratio;  // max_ball_mass / rho^kappa
};
struct BourgainCheck {
  bool holds = false;
  double worst_ratio = 0;
  std::vector<BourgainRow> rows;
};
double max_ball_mass(const DiscreteMeasure& m, double rho);
BourgainCheck bourgain_hypothesis_check(const DiscreteMeasure& m, double kappa, double rho_lo, double rho_hi);

// N^{-k} sum over b_1..b_k of exp(2 pi i eta prod zeta_j(b_j)).
Complex exp_sum(const std::vector<std::vector<double>>& zetas, double eta);
Complex exp_sum(const std::vector<ZetaSystem>& zetas, double eta);

struct ExpSumRow {
  double eta;
  double max_abs;
  std::size_t n_blocks;
};
struct ExpSumScan {
  std::vector<ExpSumRow> rows;
  double eta_lo = 0, eta_hi = 0;  // J_n window
  std::size_t excluded = 0;
  double eps2_hat = 0, ci_lo = 0, ci_hi = 0, residual = 0;
  double xi_scale = 0;
};
std::vector<double> jn_window(const RegularTree& tree);
std::vector<double> eta_grid(const RegularTree& tree, int points);
ExpSumScan expsum_decay_scan(const RegularTree& tree, const WellDistributed& wd, const std::vector<double>& etas,
                             std::size_t n_blocks, std::uint64_t seed);

}  // namespace gfd
