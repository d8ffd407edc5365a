#include "core/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace gfd {

namespace {

const double kTwoPi = 6.283185307179586476925286766559;

double ratio_unit(const BigInt& r, const BigInt& q) {
  // r/q in [0,1) from the leading 62 bits
  if (r == 0) return 0.0;
  std::size_t bits = boost::multiprecision::msb(q);
  if (bits <= 62) return static_cast<double>(static_cast<std::uint64_t>(r)) / static_cast<double>(static_cast<std::uint64_t>(q));
  std::size_t sh = bits - 62;
  BigInt rs = r >> sh, qs = q >> sh;
  return static_cast<double>(static_cast<std::uint64_t>(rs)) / static_cast<double>(static_cast<std::uint64_t>(qs));
}

BigInt mod_pos(const BigInt& a, const BigInt& q) {
  BigInt r = a % q;
  if (r < 0) r += q;
  return r;
}

Rational exact_double(double x) {
  if (!std::isfinite(x)) fail(Errc::domain, "non-finite x");
  int e;
  double f = std::frexp(x, &e);
  auto mant = static_cast<std::int64_t>(std::ldexp(f, 53));
  e -= 53;
  Rational r{BigInt(mant)};
  if (e >= 0) return r * Rational(BigInt(1) << e);
  return r / Rational(BigInt(1) << -e);
}

}  // namespace

SequenceSpec SequenceSpec::identity() { return {}; }

SequenceSpec SequenceSpec::explicit_list(std::vector<BigInt> v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] <= 0) fail(Errc::domain, "sequence terms must be positive");
    if (i && v[i] <= v[i - 1]) fail(Errc::domain, "sequence must be strictly increasing");
  }
  SequenceSpec s;
  s.kind = SequenceKind::explicit_list;
  s.values = std::move(v);
  return s;
}

SequenceSpec SequenceSpec::continuant(Word digits) {
  for (Digit d : digits)
    if (d < 1) fail(Errc::domain, "continuant digits must be at least 1");
  SequenceSpec s;
  s.kind = SequenceKind::continuant;
  s.digits = std::move(digits);
  return s;
}

std::size_t SequenceSpec::available() const {
  switch (kind) {
    case SequenceKind::identity:
      return std::numeric_limits<std::size_t>::max();
    case SequenceKind::explicit_list:
      return values.size();
    case SequenceKind::continuant:
      return digits.size();
  }
  return 0;
}

BigInt SequenceSpec::term(std::size_t k) const {
  if (k < 1 || k > available()) fail(Errc::domain, "sequence index out of range");
  switch (kind) {
    case SequenceKind::identity:
      return BigInt(k);
    case SequenceKind::explicit_list:
      return values[k - 1];
    case SequenceKind::continuant:
      return continuants(Word(digits.begin(), digits.begin() + k)).q;
  }
  return 0;
}

std::vector<BigInt> continuant_denominators(const Word& w) {
  std::vector<BigInt> out;
  BigInt q_prev = 0, q = 1;
  for (Digit a : w) {
    if (a < 1) fail(Errc::domain, "digits must be at least 1");
    BigInt next = BigInt(a) * q + q_prev;
    q_prev = q;
    q = next;
    out.push_back(q);
  }
  return out;
}

std::size_t length_for_bits(const MarkovSystem& sys, Alphabet alphabet, double bits) {
  // Gauss: q_{k+2} >= 2 q_k, so two digits add at least one bit (golden-ratio growth for digit 1).
  double per_digit = sys.kind() == MapKind::gauss ? std::log2((1 + std::sqrt(5.0)) / 2) : 0.0;
  if (sys.kind() == MapKind::gauss && alphabet.lo >= 2) per_digit = std::log2(alphabet.lo + 0.0);
  if (per_digit <= 0) fail(Errc::unsupported, "exact sampling is only defined for the Gauss system");
  return static_cast<std::size_t>(std::ceil(bits / per_digit)) + 2;
}

SamplePoint sample_point(const GibbsSpec& spec, std::size_t L, std::uint64_t seed) {
  const MarkovSystem& sys = spec.system;
  check_alphabet(sys, spec.alphabet);
  if (L == 0) fail(Errc::domain, "length must be positive");
  if (L > (1u << 24)) fail(Errc::resource, "length exceeds continuant budget");
  Rng rng(split_seed(seed, 0));
  const std::size_t A = spec.alphabet.size();
  std::vector<double> logw(A), w(A);
  SamplePoint out;
  out.digits.reserve(L);
  double r = 0;  // q_{k-1}/q_k
  for (std::size_t k = 0; k < L; ++k) {
    double mx = -INFINITY;
    for (std::size_t i = 0; i < A; ++i) {
      Digit b = spec.alphabet.lo + static_cast<Digit>(i);
      if (spec.potential == PotentialKind::bernoulli)
        logw[i] = spec.log_weight(b);
      else if (sys.kind() == MapKind::gauss)
        logw[i] = -spec.s * (std::log(b + r) + std::log(b + r + 1));
      else
        logw[i] = spec.s * std::log(sys.slope(b));
      mx = std::max(mx, logw[i]);
    }
    for (std::size_t i = 0; i < A; ++i) w[i] = std::exp(logw[i] - mx);
    Digit b = spec.alphabet.lo + static_cast<Digit>(rng.pick(w));
    out.digits.push_back(b);
    if (sys.kind() == MapKind::gauss) r = 1.0 / (b + r);
  }
  if (sys.kind() == MapKind::gauss) {
    out.x = cf_value(out.digits);
  } else {
    // affine systems: x = T_w(0)
    Rational x = 0;
    for (std::size_t i = out.digits.size(); i-- > 0;) {
      Digit a = out.digits[i];
      if (sys.kind() == MapKind::lueroth)
        x = (x + Rational(BigInt(a))) / Rational(BigInt(a) * (a + 1));
      else
        x = (x + Rational(BigInt(a == 1 ? 0 : 2))) / Rational(BigInt(3));
    }
    out.x = x;
  }
  out.x_double = to_double(out.x);
  return out;
}

std::vector<WeylValue> weyl_prefix(const Rational& x, const SequenceSpec& seq, std::int64_t m,
                                   const std::vector<std::size_t>& N_grid) {
  std::vector<WeylValue> out;
  if (N_grid.empty()) return out;
  for (std::size_t i = 0; i < N_grid.size(); ++i) {
    if (N_grid[i] < 1) fail(Errc::domain, "N must be positive");
    if (i && N_grid[i] <= N_grid[i - 1]) fail(Errc::domain, "N grid must be increasing");
  }
  const std::size_t Nmax = N_grid.back();
  if (Nmax > seq.available()) fail(Errc::domain, "N exceeds available sequence length");
  const BigInt p = boost::multiprecision::numerator(x);
  const BigInt q = boost::multiprecision::denominator(x);
  const BigInt mp = mod_pos(BigInt(m) * p, q);

  double re = 0, im = 0;
  std::size_t gi = 0;
  auto add = [&](const BigInt& r) {
    double ph = kTwoPi * ratio_unit(r, q);
    re += std::cos(ph);
    im += std::sin(ph);
  };
  auto emit = [&](std::size_t k) {
    if (gi < N_grid.size() && N_grid[gi] == k) {
      out.emplace_back(re / k, im / k);
      ++gi;
    }
  };
  switch (seq.kind) {
    case SequenceKind::identity: {
      BigInt r = 0;
      for (std::size_t k = 1; k <= Nmax; ++k) {
        r += mp;
        if (r >= q) r -= q;
        add(r);
        emit(k);
      }
      break;
    }
    case SequenceKind::explicit_list: {
      for (std::size_t k = 1; k <= Nmax; ++k) {
        add(mod_pos(mod_pos(seq.values[k - 1], q) * mp, q));
        emit(k);
      }
      break;
    }
    case SequenceKind::continuant: {
      // residues of m p q_k follow the continuant recurrence mod q
      BigInt r_prev = 0, r = mp;  // q_0 = 1
      for (std::size_t k = 1; k <= Nmax; ++k) {
        BigInt next = mod_pos(BigInt(seq.digits[k - 1]) * r + r_prev, q);
        r_prev = std::move(r);
        r = std::move(next);
        add(r);
        emit(k);
      }
      break;
    }
  }
  return out;
}

WeylValue weyl_sum(const Rational& x, const SequenceSpec& seq, std::size_t N, std::int64_t m) {
  return weyl_prefix(x, seq, m, {N}).front();
}

WeylValue weyl_sum(double x, const SequenceSpec& seq, std::size_t N, std::int64_t m) {
  return weyl_sum(exact_double(x), seq, N, m);
}

std::vector<DelRow> del_report(const Rational& x, const SequenceSpec& seq, std::int64_t m_max,
                               const std::vector<std::size_t>& N_grid) {
  if (m_max < 1) fail(Errc::domain, "m_max must be positive");
  std::vector<std::vector<WeylValue>> per_m(m_max);
  parallel_chunks(static_cast<std::size_t>(m_max), 1, [&](std::size_t i, std::size_t, std::size_t) {
    per_m[i] = weyl_prefix(x, seq, static_cast<std::int64_t>(i) + 1, N_grid);
  });
  std::vector<DelRow> rows;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    double partial = 0;
    for (std::size_t g = 0; g < N_grid.size(); ++g) {
      WeylValue w = per_m[m - 1][g];
      double a2 = std::norm(w);
      partial += a2 / static_cast<double>(N_grid[g]);
      rows.push_back({m, N_grid[g], w, a2, partial});
    }
  }
  return rows;
}

}  // namespace gfd
