#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "core/continuants.hpp"
#include "core/thermo.hpp"

namespace gfd {

enum class SequenceKind { identity, explicit_list, continuant };

struct SequenceSpec {
  SequenceKind kind = SequenceKind::identity;
  std::vector<BigInt> values;  // explicit_list
  Word digits;                 // continuant

  static SequenceSpec identity();
  static SequenceSpec explicit_list(std::vector<BigInt> v);
  static SequenceSpec continuant(Word digits);
  // Number of available terms; SIZE_MAX for identity.
  std::size_t available() const;
  BigInt term(std::size_t k) const;  // 1-based
};

// q_1 < q_2 < ... for the prefixes of w.
std::vector<BigInt> continuant_denominators(const Word& w);

struct SamplePoint {
  Word digits;
  Rational x;
  double x_double;
};
// Digits drawn one at a time with weights |I_{pb}|^s / |I_p|^s (bernoulli: p_b).
SamplePoint sample_point(const GibbsSpec& spec, std::size_t L, std::uint64_t seed);
// Shortest length whose denominator is guaranteed to exceed 2^bits for this alphabet.
std::size_t length_for_bits(const MarkovSystem& sys, Alphabet alphabet, double bits);

using WeylValue = std::complex<double>;

// (1/N) sum_{k<=N} exp(2 pi i m n_k x), exact residues modulo the denominator of x.
WeylValue weyl_sum(const Rational& x, const SequenceSpec& seq, std::size_t N, std::int64_t m);
WeylValue weyl_sum(double x, const SequenceSpec& seq, std::size_t N, std::int64_t m);
// Weyl sums at every N in an increasing grid, one pass.
std::vector<WeylValue> weyl_prefix(const Rational& x, const SequenceSpec& seq, std::int64_t m,
                                   const std::vector<std::size_t>& N_grid);

struct DelRow {
  std::int64_t m;
  std::size_t N;
  WeylValue w;
  double abs2;
  double del_partial;  // sum over grid N' <= N of |W_{N'}|^2 / N'
};
std::vector<DelRow> del_report(const Rational& x, const SequenceSpec& seq, std::int64_t m_max,
                               const std::vector<std::size_t>& N_grid);

}  // namespace gfd
