#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "core/continuants.hpp"
#include "core/measure.hpp"
#include "core/stats.hpp"
#include "core/symbolic.hpp"

namespace gfd {

struct Alphabet {
  Digit lo = 1;
  Digit hi = 2;
  std::size_t size() const { return hi - lo + 1; }
};

enum class PotentialKind { geometric, bernoulli };

// phi = s*psi - c with S_n psi(T_w x) = log|T_w'(x)| (geometric), or phi = log p_{a_1} (bernoulli).
struct GibbsSpec {
  MarkovSystem system = MarkovSystem::gauss(2);
  Alphabet alphabet;
  double s = 0.5312805;
  int n = 8;
  double epsilon = 0.2;
  double pressure_shift = 0.0;
  std::uint64_t budget = 1ull << 24;
  PotentialKind potential = PotentialKind::geometric;
  std::vector<double> probabilities;  // bernoulli, indexed by digit - lo

  double log_weight(Digit a) const;  // bernoulli only
  // s*lambda/10 bound; reported, not enforced.
  bool corridor_nondegenerate(double lambda_hat) const { return epsilon < s * lambda_hat / 10.0; }
};

// Validates alphabet against the system and sets pressure_shift to the depth-12 upper proxy.
GibbsSpec make_spec(const MarkovSystem& sys, Alphabet alphabet, double s, int n, double epsilon,
                    std::uint64_t budget);
GibbsSpec make_bernoulli_spec(const MarkovSystem& sys, Alphabet alphabet, std::vector<double> probabilities,
                              int n, double epsilon, std::uint64_t budget);
void check_alphabet(const MarkovSystem& sys, Alphabet alphabet);
void check_budget(Alphabet alphabet, int depth, std::uint64_t budget);

double birkhoff_psi(const MarkovSystem& sys, const Word& w, double x);
double birkhoff_sum(const GibbsSpec& spec, const Word& w, double x);

enum class Tail { none, analytic };
using Function = std::function<double(double)>;
double transfer_apply(const GibbsSpec& spec, const Function& f, double x, int m, Tail tail = Tail::none);
// Exact sum of the Lueroth slopes over the alphabet, plus the telescoped tail 1/(hi+1) if requested.
Rational lueroth_transfer_one_exact(Alphabet alphabet, bool tail);

struct PressureBracket {
  double upper;
  double lower;
  int depth;
};
PressureBracket pressure_estimate(const MarkovSystem& sys, Alphabet alphabet, double s, int m,
                                  std::uint64_t budget = 1ull << 26);
// log Z_{m+1} - log Z_m with sup-based partition sums.
double pressure_increment(const MarkovSystem& sys, Alphabet alphabet, double s, int m,
                          std::uint64_t budget = 1ull << 26);
// log of the leading eigenvalue of the depth-1 transfer operator, Chebyshev collocation.
double pressure_collocation(const MarkovSystem& sys, Alphabet alphabet, double s, int nodes = 24);

struct DimensionRoot {
  double lower_root;      // root of the inf-based proxy
  double upper_root;      // root of the sup-based proxy
  double increment_root;  // root of log Z_{m+1} - log Z_m
  int depth;
};
DimensionRoot pressure_root(const MarkovSystem& sys, Alphabet alphabet, int depth);
double collocation_root(const MarkovSystem& sys, Alphabet alphabet, int nodes = 24);
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

// Depth-n cylinders in lexicographic digit order.
struct CylinderMeasure {
  MarkovSystem system = MarkovSystem::gauss(2);
  Alphabet alphabet;
  int depth = 0;
  std::vector<Digit> digits;  // flattened, depth per word
  std::vector<CylinderState> states;
  std::vector<double> atoms;     // cylinder midpoints
  std::vector<double> weights;   // normalized
  std::vector<double> log_len;   // log|I_a|
  std::vector<double> log_phi;   // S_n phi at the atom
  std::vector<double> log_psi;   // S_n psi at the atom
  double gibbs_constant = 1.0;
  double log_partition = 0.0;

  std::size_t size() const { return weights.size(); }
  Word word(std::size_t i) const;
  std::size_t index_of(const Word& w) const;
  DiscreteMeasure discrete() const;
};

CylinderMeasure gibbs_measure(const GibbsSpec& spec);
CylinderMeasure gibbs_measure(const GibbsSpec& spec, int depth);
// Exact Gauss-measure masses log2((1+hi)/(1+lo)) of depth-n cylinders over 1..cutoff.
CylinderMeasure gauss_kuzmin_measure(Digit cutoff, int depth, std::uint64_t budget = 1ull << 26);

double lyapunov_estimate(const CylinderMeasure& m);
double lyapunov_increment(const CylinderMeasure& m, const CylinderMeasure& m_prev);

struct FrozenConstants {
  double lambda_hat;
  double s_hat;
  int n_ref;
};
// Increment estimates at depths n_ref and n_ref-1.
FrozenConstants estimate_constants(const GibbsSpec& spec, int n_ref);

struct RegularTree {
  GibbsSpec spec;
  int n = 0;
  double epsilon = 0, lambda_hat = 0, s_hat = 0, C_eps = 1;
  double gibbs_constant = 1;
  double kept_mass = 0;
  std::vector<Word> words;
  std::vector<CylinderState> states;
  std::vector<double> mass;   // mu(I_a)
  std::vector<double> atoms;  // x_a, cylinder midpoints

  std::size_t size() const { return words.size(); }
};

RegularTree regular_words(const GibbsSpec& spec, double lambda_hat, double s_hat);
RegularTree regular_words(const GibbsSpec& spec, double lambda_hat, double s_hat, const CylinderMeasure& mu);
// Multiscale condition at the midpoint of I_w for scale k = |w|.
bool regular_at(const GibbsSpec& spec, const CylinderState& st, double sum_log_p, double lambda_hat,
                double s_hat, double eps);

class RegularBlocks {
 public:
  RegularBlocks(const RegularTree& tree, int k);
  std::uint64_t size() const { return count_; }
  Block at(std::uint64_t index) const;
  std::vector<std::size_t> indices(std::uint64_t index) const;

 private:
  const RegularTree* tree_;
  int k_;
  std::uint64_t count_;
};
RegularBlocks regular_blocks(const RegularTree& tree, int k);

struct ZetaSystem {
  int j;
  std::vector<double> values;  // indexed like tree.words
  bool in_range;
};
// log|T'_{ab}(x)| for tree words a, b.
double pair_log_derivative(const RegularTree& tree, std::size_t ia, std::size_t ib, double x);
std::vector<double> zeta_values(const RegularTree& tree, std::size_t i_prev, std::size_t i_cur);
std::vector<ZetaSystem> zeta_table(const RegularTree& tree, const std::vector<std::size_t>& block);
bool zeta_range_ok(const RegularTree& tree, const std::vector<double>& values);

struct RegularBoundsReport {
  std::uint64_t checked = 0;
  std::uint64_t derivative_fail = 0;
  std::uint64_t length_fail = 0;
  std::uint64_t measure_fail = 0;
  std::uint64_t regcontinu_fail = 0;
  std::uint64_t mirror_fail = 0;
  double card_lower = 0, card_upper = 0;
  bool cardinality_ok = false;
};
RegularBoundsReport check_regular_bounds(const RegularTree& tree, const CylinderMeasure& mu);

struct LargeDevRow {
  int n;
  double complement_mass;
};
struct LargeDevResult {
  std::vector<LargeDevRow> rows;
  double delta_hat = 0;
  LinearFit fit;
  FrozenConstants constants{};
};
LargeDevResult large_deviation_scan(const GibbsSpec& spec, double eps, const std::vector<int>& n_list);
LargeDevResult large_deviation_scan(const GibbsSpec& spec, double eps, const std::vector<int>& n_list,
                                    const FrozenConstants& constants);

}  // namespace gfd
