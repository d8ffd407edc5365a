#include "core/thermo.hpp"

#include <algorithm>
#include <boost/math/special_functions/trigamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace gfd {

namespace {

std::uint64_t ipow(std::uint64_t b, int e, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (b != 0 && r > cap / b) return cap + 1;
    r *= b;
  }
  return r;
}

// Streaming log-sum-exp accumulator.
struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  void add(double v) {
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }
  void merge(const LogSum& o) {
    if (o.sum == 0.0) return;
    if (sum == 0.0) {
      *this = o;
      return;
    }
    if (o.max <= max) {
      sum += o.sum * std::exp(o.max - max);
    } else {
      sum = sum * std::exp(max - o.max) + o.sum;
      max = o.max;
    }
  }
  double value() const { return max + std::log(sum); }
};

// Visits all words of A^depth in lexicographic order, split into parallel chunks by a fixed prefix
// length. leaf(chunk, global_index, state, path) gets the cylinder state and the digit path.
int leaf_prefix_length(Alphabet alph, int depth) {
  int t = 0;
  while (t < depth && ipow(alph.size(), t, 1ull << 40) < 256) ++t;
  return t;
}

std::size_t leaf_chunk_count(Alphabet alph, int depth) {
  return ipow(alph.size(), leaf_prefix_length(alph, depth), 1ull << 40);
}

template <class Leaf>
void enumerate_leaves(const MarkovSystem& sys, Alphabet alph, int depth, std::size_t& chunks_out, Leaf&& leaf) {
  const std::uint64_t A = alph.size();
  const int t = leaf_prefix_length(alph, depth);
  const std::uint64_t chunks = ipow(A, t, 1ull << 40);
  const std::uint64_t per = ipow(A, depth - t, 1ull << 62);
  chunks_out = chunks;
  parallel_chunks(chunks, 1, [&](std::size_t c, std::size_t, std::size_t) {
    std::vector<Digit> path(depth);
    std::vector<CylinderState> st(depth + 1);
    std::uint64_t rem = c;
    for (int i = t - 1; i >= 0; --i) {
      path[i] = alph.lo + static_cast<Digit>(rem % A);
      rem /= A;
    }
    for (int i = 0; i < t; ++i) st[i + 1] = extend(sys, st[i], path[i]);
    std::uint64_t idx = c * per;
    if (t == depth) {
      leaf(c, idx, st[depth], path.data());
      return;
    }
    // iterative DFS over the remaining depth - t levels
    int lvl = t;
    path[lvl] = alph.lo;
    st[lvl + 1] = extend(sys, st[lvl], path[lvl]);
    for (;;) {
      if (lvl + 1 == depth) {
        leaf(c, idx++, st[depth], path.data());
        // advance
        while (lvl >= t && path[lvl] == alph.hi) --lvl;
        if (lvl < t) break;
        ++path[lvl];
        st[lvl + 1] = extend(sys, st[lvl], path[lvl]);
      } else {
        ++lvl;
        path[lvl] = alph.lo;
        st[lvl + 1] = extend(sys, st[lvl], path[lvl]);
      }
    }
  });
}

double log_sum_exp(const std::vector<double>& v) {
  LogSum s;
  for (double x : v) s.add(x);
  return s.value();
}

}  // namespace

double GibbsSpec::log_weight(Digit a) const {
  if (potential != PotentialKind::bernoulli) fail(Errc::unsupported, "log_weight needs a bernoulli potential");
  return std::log(probabilities.at(a - alphabet.lo));
}

void check_alphabet(const MarkovSystem& sys, Alphabet alphabet) {
  if (alphabet.lo < 1 || alphabet.hi < alphabet.lo)
    fail(Errc::config, "empty or invalid alphabet [" + std::to_string(alphabet.lo) + "," +
                           std::to_string(alphabet.hi) + "]");
  if (alphabet.hi > sys.cutoff())
    fail(Errc::config, "alphabet exceeds the system cutoff " + std::to_string(sys.cutoff()));
}

void check_budget(Alphabet alphabet, int depth, std::uint64_t budget) {
  if (depth < 0) fail(Errc::domain, "negative depth");
  if (ipow(alphabet.size(), depth, budget) > budget)
    fail(Errc::resource, "enumeration of " + std::to_string(alphabet.size()) + "^" + std::to_string(depth) +
                             " words exceeds budget " + std::to_string(budget));
}

GibbsSpec make_spec(const MarkovSystem& sys, Alphabet alphabet, double s, int n, double epsilon,
                    std::uint64_t budget) {
  check_alphabet(sys, alphabet);
  if (!(s > 0.0 && s <= 1.0)) fail(Errc::config, "exponent s must lie in (0,1]");
  if (n < 1) fail(Errc::config, "depth n must be positive");
  if (!(epsilon > 0.0)) fail(Errc::config, "epsilon must be positive");
  GibbsSpec spec;
  spec.system = sys;
  spec.alphabet = alphabet;
  spec.s = s;
  spec.n = n;
  spec.epsilon = epsilon;
  spec.budget = budget;
  int m = 12;
  while (m > 1 && ipow(alphabet.size(), m, 1ull << 22) > (1ull << 22)) --m;
  spec.pressure_shift = pressure_estimate(sys, alphabet, s, m).upper;
  return spec;
}

GibbsSpec make_bernoulli_spec(const MarkovSystem& sys, Alphabet alphabet, std::vector<double> probabilities,
                              int n, double epsilon, std::uint64_t budget) {
  check_alphabet(sys, alphabet);
  if (probabilities.size() != alphabet.size()) fail(Errc::config, "one probability per digit required");
  double tot = 0;
  for (double p : probabilities) {
    if (!(p > 0)) fail(Errc::config, "probabilities must be positive");
    tot += p;
  }
  for (double& p : probabilities) p /= tot;
  GibbsSpec spec;
  spec.system = sys;
  spec.alphabet = alphabet;
  spec.n = n;
  spec.epsilon = epsilon;
  spec.budget = budget;
  spec.potential = PotentialKind::bernoulli;
  spec.probabilities = std::move(probabilities);
  spec.pressure_shift = 0.0;
  // dimension of the Bernoulli measure as the nominal exponent
  double h = 0, lam = 0;
  for (Digit a = alphabet.lo; a <= alphabet.hi; ++a) {
    double p = spec.probabilities[a - alphabet.lo];
    h -= p * std::log(p);
    lam -= p * (sys.affine() ? std::log(sys.slope(a)) : sys.log_abs_d1(a, 0.5));
  }
  spec.s = h / lam;
  return spec;
}

double birkhoff_psi(const MarkovSystem& sys, const Word& w, double x) { return log_abs_derivative(sys, w, x); }

double birkhoff_sum(const GibbsSpec& spec, const Word& w, double x) {
  if (spec.potential == PotentialKind::bernoulli) {
    spec.system.check_word(w);
    if (!(x >= 0.0 && x <= 1.0)) fail(Errc::domain, "point outside [0,1]");
    double s = 0;
    for (Digit a : w) s += spec.log_weight(a);
    return s;
  }
  return spec.s * log_abs_derivative(spec.system, w, x) - static_cast<double>(w.size()) * spec.pressure_shift;
}

double transfer_apply(const GibbsSpec& spec, const Function& f, double x, int m, Tail tail) {
  if (!(x >= 0.0 && x <= 1.0)) fail(Errc::domain, "point outside [0,1]");
  if (m < 0) fail(Errc::domain, "negative iteration count");
  check_budget(spec.alphabet, m, spec.budget);
  const MarkovSystem& sys = spec.system;
  const Alphabet alph = spec.alphabet;
  const bool bern = spec.potential == PotentialKind::bernoulli;
  // DFS from the innermost branch outward: T_{a_1..a_m} x = T_{a_1}(... T_{a_m}(x)).
  std::vector<double> ys(m + 1), ws(m + 1);
  std::vector<Digit> dig(m + 1, alph.lo);
  ys[0] = x;
  ws[0] = 0;
  double total = 0;
  if (m == 0) return f(x);
  int lvl = 0;
  auto step = [&](int l) {
    Digit a = dig[l];
    double y = ys[l];
    ws[l + 1] = ws[l] + (bern ? spec.log_weight(a) : spec.s * sys.log_abs_d1(a, y) - spec.pressure_shift);
    ys[l + 1] = sys.apply(a, y);
  };
  step(0);
  for (;;) {
    if (lvl + 1 == m) {
      total += std::exp(ws[m]) * f(ys[m]);
      while (lvl >= 0 && dig[lvl] == alph.hi) --lvl;
      if (lvl < 0) break;
      ++dig[lvl];
      step(lvl);
    } else {
      ++lvl;
      dig[lvl] = alph.lo;
      step(lvl);
    }
  }
  if (tail == Tail::analytic) {
    if (m != 1 || bern || spec.s != 1.0 || spec.pressure_shift != 0.0)
      fail(Errc::unsupported, "analytic tail available for m = 1, phi = -log|T'| only");
    double f0 = f(0.0);
    const double N = static_cast<double>(alph.hi);
    if (sys.kind() == MapKind::gauss)
      total += f0 * boost::math::trigamma(N + 1.0 + x);
    else if (sys.kind() == MapKind::lueroth)
      total += f0 / (N + 1.0);
    else
      fail(Errc::unsupported, "finite system has no tail");
  }
  return total;
}

Rational lueroth_transfer_one_exact(Alphabet alphabet, bool tail) {
  Rational total = 0;
  for (Digit a = alphabet.lo; a <= alphabet.hi; ++a) total += Rational(BigInt(1), BigInt(a) * BigInt(a + 1));
  if (tail) total += Rational(BigInt(1), BigInt(alphabet.hi + 1));
  return total;
}

namespace {

struct PartitionSums {
  LogSum sup, inf;
};

PartitionSums partition_sums(const MarkovSystem& sys, Alphabet alph, double s, int m, std::uint64_t budget) {
  check_alphabet(sys, alph);
  check_budget(alph, m, budget);
  std::size_t chunks = 0;
  const bool gauss = sys.kind() == MapKind::gauss;
  std::vector<PartitionSums> acc(leaf_chunk_count(alph, m));
  enumerate_leaves(sys, alph, m, chunks, [&](std::size_t c, std::uint64_t, const CylinderState& st, const Digit*) {
    if (gauss) {
      acc[c].sup.add(-2.0 * s * st.log_q);
      acc[c].inf.add(-2.0 * s * (st.log_q + std::log1p(st.r)));
    } else {
      acc[c].sup.add(s * st.log_A);
      acc[c].inf.add(s * st.log_A);
    }
  });
  PartitionSums total;
  for (std::size_t c = 0; c < chunks; ++c) {
    total.sup.merge(acc[c].sup);
    total.inf.merge(acc[c].inf);
  }
  return total;
}

}  // namespace

PressureBracket pressure_estimate(const MarkovSystem& sys, Alphabet alphabet, double s, int m, std::uint64_t budget) {
  if (m < 1) fail(Errc::domain, "pressure depth must be positive");
  PartitionSums z = partition_sums(sys, alphabet, s, m, budget);
  return {z.sup.value() / m, z.inf.value() / m, m};
}

double pressure_increment(const MarkovSystem& sys, Alphabet alphabet, double s, int m, std::uint64_t budget) {
  if (m < 1) fail(Errc::domain, "pressure depth must be positive");
  return partition_sums(sys, alphabet, s, m + 1, budget).sup.value() -
         partition_sums(sys, alphabet, s, m, budget).sup.value();
}

double pressure_collocation(const MarkovSystem& sys, Alphabet alphabet, double s, int nodes) {
  check_alphabet(sys, alphabet);
  if (nodes < 4) fail(Errc::domain, "collocation needs at least 4 nodes");
  const int K = nodes;
  const double pi = std::acos(-1.0);
  std::vector<double> xs(K), bw(K);
  for (int j = 0; j < K; ++j) {
    double th = pi * (j + 0.5) / K;
    xs[j] = 0.5 * (1.0 - std::cos(th));
    bw[j] = ((j % 2) ? -1.0 : 1.0) * std::sin(th);
  }
  // M[i][j] = sum_a |T_a'(x_i)|^s l_j(T_a x_i)
  std::vector<double> M(static_cast<std::size_t>(K) * K, 0.0);
  std::vector<double> l(K);
  for (int i = 0; i < K; ++i) {
    double* row = &M[static_cast<std::size_t>(i) * K];
    for (Digit a = alphabet.lo; a <= alphabet.hi; ++a) {
      double y = sys.apply(a, xs[i]);
      double w = std::exp(s * sys.log_abs_d1(a, xs[i]));
      int hit = -1;
      double den = 0;
      for (int j = 0; j < K; ++j) {
        double d = y - xs[j];
        if (d == 0.0) {
          hit = j;
          break;
        }
        l[j] = bw[j] / d;
        den += l[j];
      }
      if (hit >= 0) {
        row[hit] += w;
      } else {
        for (int j = 0; j < K; ++j) row[j] += w * l[j] / den;
      }
    }
  }
  std::vector<double> v(K, 1.0), u(K);
  double lam = 0, prev = -1;
  for (int it = 0; it < 2000; ++it) {
    for (int i = 0; i < K; ++i) {
      double acc = 0;
      for (int j = 0; j < K; ++j) acc += M[static_cast<std::size_t>(i) * K + j] * v[j];
      u[i] = acc;
    }
    double nu = 0, nv = 0;
    for (int i = 0; i < K; ++i) {
      nu = std::max(nu, std::abs(u[i]));
      nv = std::max(nv, std::abs(v[i]));
    }
    lam = nu / nv;
    for (int i = 0; i < K; ++i) v[i] = u[i] / nu;
    if (std::abs(lam - prev) <= 1e-15 * lam && it > 10) break;
    prev = lam;
  }
  return std::log(lam);
}

double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo <= 0) return lo;
  double fhi = f(hi);
  if (fhi > 0) fail(Errc::degenerate, "pressure does not change sign on the search interval");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

DimensionRoot pressure_root(const MarkovSystem& sys, Alphabet alphabet, int depth) {
  DimensionRoot r{};
  r.depth = depth;
  r.upper_root = bisect_decreasing([&](double s) { return pressure_estimate(sys, alphabet, s, depth).upper; }, 0, 4);
  r.lower_root = bisect_decreasing([&](double s) { return pressure_estimate(sys, alphabet, s, depth).lower; }, 0, 4);
  // Z_{m+1}/Z_m in one pass per s
  r.increment_root = bisect_decreasing(
      [&](double s) {
        return partition_sums(sys, alphabet, s, depth + 1, 1ull << 26).sup.value() -
               partition_sums(sys, alphabet, s, depth, 1ull << 26).sup.value();
      },
      0, 4);
  return r;
}

double collocation_root(const MarkovSystem& sys, Alphabet alphabet, int nodes) {
  return bisect_decreasing([&](double s) { return pressure_collocation(sys, alphabet, s, nodes); }, 0, 4, 1e-9);
}

Word CylinderMeasure::word(std::size_t i) const {
  return Word(digits.begin() + i * depth, digits.begin() + (i + 1) * depth);
}

std::size_t CylinderMeasure::index_of(const Word& w) const {
  if (static_cast<int>(w.size()) != depth) fail(Errc::domain, "word length differs from measure depth");
  std::size_t idx = 0;
  for (Digit a : w) {
    if (a < alphabet.lo || a > alphabet.hi) fail(Errc::domain, "digit outside alphabet");
    idx = idx * alphabet.size() + (a - alphabet.lo);
  }
  return idx;
}

DiscreteMeasure CylinderMeasure::discrete() const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });
  DiscreteMeasure m;
  m.atoms.reserve(size());
  m.weights.reserve(size());
  for (std::size_t i : order) {
    m.atoms.push_back(atoms[i]);
    m.weights.push_back(weights[i]);
  }
  m.total_mass = 0;
  for (double w : m.weights) m.total_mass += w;
  return m;
}

namespace {

// Fills everything except weights/log_phi normalization; phi_of(state, path) gives S_n phi.
template <class Phi>
CylinderMeasure build_measure(const MarkovSystem& sys, Alphabet alph, int depth, std::uint64_t budget, Phi&& phi) {
  check_alphabet(sys, alph);
  if (depth < 1) fail(Errc::domain, "measure depth must be positive");
  check_budget(alph, depth, budget);
  const std::size_t count = ipow(alph.size(), depth, budget);
  CylinderMeasure m;
  m.system = sys;
  m.alphabet = alph;
  m.depth = depth;
  m.digits.resize(count * depth);
  m.atoms.resize(count);
  m.weights.resize(count);
  m.log_len.resize(count);
  m.log_phi.resize(count);
  m.log_psi.resize(count);
  std::size_t chunks = 0;
  enumerate_leaves(sys, alph, depth, chunks, [&](std::size_t, std::uint64_t i, const CylinderState& st, const Digit* path) {
    std::copy(path, path + depth, m.digits.begin() + i * depth);
    Interval I = state_interval(sys, st);
    m.atoms[i] = 0.5 * (I.lo + I.hi);
    m.log_len[i] = state_log_length(sys, st);
    m.log_psi[i] = state_log_derivative_mid(sys, st);
    m.log_phi[i] = phi(st, path, I);
  });
  m.log_partition = log_sum_exp(m.log_phi);
  for (std::size_t i = 0; i < count; ++i) m.weights[i] = std::exp(m.log_phi[i] - m.log_partition);
  return m;
}

double prefix_log_phi(const GibbsSpec& spec, const CylinderState& st, const Digit* path) {
  if (spec.potential == PotentialKind::bernoulli) {
    double s = 0;
    for (int i = 0; i < st.depth; ++i) s += spec.log_weight(path[i]);
    return s;
  }
  return spec.s * state_log_derivative_mid(spec.system, st) - st.depth * spec.pressure_shift;
}

// max over all prefixes of |log(mu(I_prefix) / e^{S_k phi(x_prefix)})|.
double gibbs_constant(const GibbsSpec& spec, const CylinderMeasure& m) {
  const std::size_t A = m.alphabet.size();
  std::vector<double> mass(m.weights);
  double worst = 0;
  for (int k = m.depth; k >= 1; --k) {
    // mass holds level-k masses
    for (std::size_t idx = 0; idx < mass.size(); ++idx) {
      Word prefix(m.digits.begin() + idx * ipow(A, m.depth - k, 1ull << 62) * m.depth,
                  m.digits.begin() + idx * ipow(A, m.depth - k, 1ull << 62) * m.depth + k);
      CylinderState st = cylinder_state(m.system, prefix);
      double lr = std::log(mass[idx]) - (prefix_log_phi(spec, st, prefix.data()) - 0.0);
      worst = std::max(worst, std::abs(lr));
    }
    std::vector<double> up(mass.size() / A, 0.0);
    for (std::size_t idx = 0; idx < mass.size(); ++idx) up[idx / A] += mass[idx];
    mass.swap(up);
  }
  return std::exp(worst);
}

}  // namespace

CylinderMeasure gibbs_measure(const GibbsSpec& spec) { return gibbs_measure(spec, spec.n); }

CylinderMeasure gibbs_measure(const GibbsSpec& spec, int depth) {
  CylinderMeasure m = build_measure(spec.system, spec.alphabet, depth, spec.budget,
                                    [&](const CylinderState& st, const Digit* path, const Interval&) {
                                      return prefix_log_phi(spec, st, path);
                                    });
  m.gibbs_constant = gibbs_constant(spec, m);
  return m;
}

CylinderMeasure gauss_kuzmin_measure(Digit cutoff, int depth, std::uint64_t budget) {
  MarkovSystem sys = MarkovSystem::gauss(cutoff);
  CylinderMeasure m = build_measure(sys, Alphabet{1, cutoff}, depth, budget,
                                    [&](const CylinderState&, const Digit*, const Interval& I) {
                                      return std::log(std::log1p((I.hi - I.lo) / (1.0 + I.lo)) / std::log(2.0));
                                    });
  m.gibbs_constant = std::numeric_limits<double>::quiet_NaN();
  return m;
}

double lyapunov_estimate(const CylinderMeasure& m) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    num += m.weights[i] * m.log_len[i];
    den += m.weights[i];
  }
  return -num / den / m.depth;
}

double lyapunov_increment(const CylinderMeasure& m, const CylinderMeasure& m_prev) {
  if (m.depth != m_prev.depth + 1) fail(Errc::domain, "increment needs consecutive depths");
  return m.depth * lyapunov_estimate(m) - m_prev.depth * lyapunov_estimate(m_prev);
}

FrozenConstants estimate_constants(const GibbsSpec& spec, int n_ref) {
  if (n_ref < 2) fail(Errc::domain, "reference depth must be at least 2");
  CylinderMeasure m1 = gibbs_measure(spec, n_ref);
  CylinderMeasure m0 = gibbs_measure(spec, n_ref - 1);
  auto mean = [](const CylinderMeasure& m, const std::vector<double>& v) {
    double a = 0;
    for (std::size_t i = 0; i < m.size(); ++i) a += m.weights[i] * v[i];
    return a;
  };
  FrozenConstants c{};
  c.n_ref = n_ref;
  c.lambda_hat = lyapunov_increment(m1, m0);
  double dphi = mean(m1, m1.log_phi) - mean(m0, m0.log_phi);
  double dpsi = mean(m1, m1.log_psi) - mean(m0, m0.log_psi);
  c.s_hat = dphi / dpsi;
  return c;
}

bool regular_at(const GibbsSpec& spec, const CylinderState& st, double sum_log_p, double lambda_hat, double s_hat,
                double eps) {
  const int k = st.depth;
  double spsi = state_log_derivative_mid(spec.system, st);
  double sphi = spec.potential == PotentialKind::bernoulli ? sum_log_p : spec.s * spsi - k * spec.pressure_shift;
  if (!(std::abs(spsi / k + lambda_hat) < eps)) return false;
  if (spsi == 0.0) return false;
  return std::abs(sphi / spsi - s_hat) < eps;
}

RegularTree regular_words(const GibbsSpec& spec, double lambda_hat, double s_hat) {
  CylinderMeasure mu = gibbs_measure(spec);
  return regular_words(spec, lambda_hat, s_hat, mu);
}

RegularTree regular_words(const GibbsSpec& spec, double lambda_hat, double s_hat, const CylinderMeasure& mu) {
  const int n = spec.n;
  if (mu.depth != n) fail(Errc::domain, "measure depth differs from spec depth");
  check_budget(spec.alphabet, n, spec.budget);
  const MarkovSystem& sys = spec.system;
  const Alphabet alph = spec.alphabet;
  const int k0 = std::max(1, n / 4);
  const bool bern = spec.potential == PotentialKind::bernoulli;
  RegularTree t;
  t.spec = spec;
  t.n = n;
  t.epsilon = spec.epsilon;
  t.lambda_hat = lambda_hat;
  t.s_hat = s_hat;
  t.C_eps = std::exp(spec.epsilon * n);
  t.gibbs_constant = mu.gibbs_constant;
  std::vector<Digit> path(n + 1, alph.lo);
  std::vector<CylinderState> st(n + 1);
  std::vector<double> slp(n + 1, 0.0);
  int lvl = 0;  // number of fixed digits is lvl+1 after step
  auto step = [&](int l) {
    st[l + 1] = extend(sys, st[l], path[l]);
    slp[l + 1] = slp[l] + (bern ? spec.log_weight(path[l]) : 0.0);
    int k = l + 1;
    return k < k0 || regular_at(spec, st[k], slp[k], lambda_hat, s_hat, spec.epsilon);
  };
  auto advance = [&]() -> bool {
    // next sibling or ancestor sibling; returns false when exhausted
    for (;;) {
      while (lvl >= 0 && path[lvl] == alph.hi) --lvl;
      if (lvl < 0) return false;
      ++path[lvl];
      if (step(lvl)) return true;
    }
  };
  bool ok = step(0);
  if (!ok && !advance()) lvl = -1;
  while (lvl >= 0) {
    if (lvl + 1 == n) {
      Word w(path.begin(), path.begin() + n);
      t.words.push_back(w);
      t.states.push_back(st[n]);
      double m = mu.weights[mu.index_of(w)];
      t.mass.push_back(m);
      Interval I = state_interval(sys, st[n]);
      t.atoms.push_back(0.5 * (I.lo + I.hi));
      if (!advance()) break;
    } else {
      ++lvl;
      path[lvl] = alph.lo;
      if (!step(lvl) && !advance()) break;
    }
  }
  t.kept_mass = 0;
  for (double m : t.mass) t.kept_mass += m;
  if (t.words.empty()) fail(Errc::degenerate, "regular tree is empty (epsilon too small)");
  return t;
}

RegularBlocks::RegularBlocks(const RegularTree& tree, int k) : tree_(&tree), k_(k) {
  if (k < 1) fail(Errc::domain, "block arity must be positive");
  if (tree.words.empty()) fail(Errc::degenerate, "empty regular tree");
  count_ = ipow(tree.size(), k, std::numeric_limits<std::uint64_t>::max() / 2);
}

std::vector<std::size_t> RegularBlocks::indices(std::uint64_t index) const {
  if (index >= count_) fail(Errc::domain, "block index out of range");
  std::vector<std::size_t> out(k_);
  for (int i = k_ - 1; i >= 0; --i) {
    out[i] = index % tree_->size();
    index /= tree_->size();
  }
  return out;
}

Block RegularBlocks::at(std::uint64_t index) const {
  Block b;
  for (std::size_t i : indices(index)) b.push_back(tree_->words[i]);
  return b;
}

RegularBlocks regular_blocks(const RegularTree& tree, int k) { return RegularBlocks(tree, k); }

double pair_log_derivative(const RegularTree& tree, std::size_t ia, std::size_t ib, double x) {
  const MarkovSystem& sys = tree.spec.system;
  const CylinderState& b = tree.states.at(ib);
  double y = state_apply(sys, b, x);
  return state_log_derivative(sys, tree.states.at(ia), y) + state_log_derivative(sys, b, x);
}

std::vector<double> zeta_values(const RegularTree& tree, std::size_t i_prev, std::size_t i_cur) {
  const double x = tree.atoms.at(i_cur);
  const double scale = 2.0 * tree.lambda_hat * tree.n;
  std::vector<double> v(tree.size());
  for (std::size_t b = 0; b < tree.size(); ++b) v[b] = std::exp(scale + pair_log_derivative(tree, i_prev, b, x));
  return v;
}

bool zeta_range_ok(const RegularTree& tree, const std::vector<double>& values) {
  const double lo = 1.0 / (256.0 * tree.C_eps * tree.C_eps), hi = tree.C_eps * tree.C_eps;
  for (double z : values)
    if (!(z >= lo && z <= hi)) return false;
  return true;
}

std::vector<ZetaSystem> zeta_table(const RegularTree& tree, const std::vector<std::size_t>& block) {
  if (block.size() < 2) fail(Errc::structural, "zeta table needs a block of k+1 >= 2 words");
  std::vector<ZetaSystem> out;
  for (std::size_t j = 1; j < block.size(); ++j) {
    ZetaSystem z;
    z.j = static_cast<int>(j);
    z.values = zeta_values(tree, block[j - 1], block[j]);
    z.in_range = zeta_range_ok(tree, z.values);
    out.push_back(std::move(z));
  }
  return out;
}

RegularBoundsReport check_regular_bounds(const RegularTree& tree, const CylinderMeasure& mu) {
  RegularBoundsReport r;
  const MarkovSystem& sys = tree.spec.system;
  const int n = tree.n;
  const double lam = tree.lambda_hat, eps = tree.epsilon, sh = tree.s_hat;
  const double logC = std::log(tree.gibbs_constant);
  const std::size_t A = mu.alphabet.size();
  std::vector<double> csum(mu.size() + 1, 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) csum[i + 1] = csum[i] + mu.weights[i];
  const int k0 = std::max(1, n / 4);
  for (const Word& w : tree.words) {
    CylinderState st;
    std::size_t idx = 0;
    for (int k = 1; k <= n; ++k) {
      st = extend(sys, st, w[k - 1]);
      idx = idx * A + (w[k - 1] - mu.alphabet.lo);
      if (k < k0) continue;
      ++r.checked;
      double lo = -std::log(16.0) - eps * k - lam * k, hi = eps * k - lam * k;
      double ld = state_log_derivative_mid(sys, st);
      if (!(ld >= lo && ld <= hi)) ++r.derivative_fail;
      double ll = state_log_length(sys, st);
      if (!(ll >= lo && ll <= hi)) ++r.length_fail;
      std::size_t span = ipow(A, n - k, 1ull << 62);
      double m = csum[(idx + 1) * span] - csum[idx * span];
      double lm = std::log(m);
      double base = -sh * lam * k, slack = logC + 3.0 * lam * eps * k;
      if (!(lm >= base - slack && lm <= base + slack)) ++r.measure_fail;
      if (sys.kind() == MapKind::gauss && 2 * k >= n) {
        double lq2 = 2.0 * st.log_q;
        if (!(lq2 >= -eps * n + lam * k && lq2 <= std::log(4.0) + eps * n + lam * k)) ++r.regcontinu_fail;
      }
    }
    if (sys.kind() == MapKind::gauss) {
      double lm = state_log_length(sys, cylinder_state(sys, mirror(w)));
      if (!(lm >= -std::log(16.0) - eps * n - lam * n && lm <= eps * n - lam * n)) ++r.mirror_fail;
    }
  }
  double lcard = std::log(static_cast<double>(tree.size()));
  r.card_lower = std::exp(std::log(0.5) - logC - 3 * lam * eps * n + lam * sh * n);
  r.card_upper = std::exp(logC + 3 * lam * eps * n + lam * sh * n);
  r.cardinality_ok = lcard >= std::log(r.card_lower) && lcard <= std::log(r.card_upper);
  return r;
}

LargeDevResult large_deviation_scan(const GibbsSpec& spec, double eps, const std::vector<int>& n_list) {
  if (n_list.empty()) fail(Errc::domain, "empty n list");
  int n_ref = *std::max_element(n_list.begin(), n_list.end()) + 4;
  return large_deviation_scan(spec, eps, n_list, estimate_constants(spec, n_ref));
}

LargeDevResult large_deviation_scan(const GibbsSpec& spec, double eps, const std::vector<int>& n_list,
                                    const FrozenConstants& constants) {
  if (n_list.empty()) fail(Errc::domain, "empty n list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1) fail(Errc::domain, "scan depths must be positive");
    if (i && n_list[i] <= n_list[i - 1]) fail(Errc::domain, "n list must be increasing");
  }
  const int N = std::max(constants.n_ref, n_list.back());
  CylinderMeasure mu = gibbs_measure(spec, N);
  const MarkovSystem& sys = spec.system;
  const bool bern = spec.potential == PotentialKind::bernoulli;
  const std::size_t L = n_list.size();
  const std::size_t grain = 4096;
  std::vector<std::vector<double>> part(chunk_count(mu.size(), grain), std::vector<double>(L, 0.0));
  parallel_chunks(mu.size(), grain, [&](std::size_t c, std::size_t b, std::size_t e) {
    std::vector<double> suf(N + 1), plp(N + 1);
    for (std::size_t i = b; i < e; ++i) {
      const Digit* w = &mu.digits[i * N];
      double z = sys.kind() == MapKind::gauss ? 1.0 / (2.0 + cylinder_state(sys, Word(w, w + N)).r) : 0.5;
      suf[N] = 0;
      for (int t = N - 1; t >= 0; --t) {
        suf[t] = suf[t + 1] + sys.log_abs_d1(w[t], z);
        z = sys.apply(w[t], z);
      }
      plp[0] = 0;
      if (bern)
        for (int t = 0; t < N; ++t) plp[t + 1] = plp[t] + spec.log_weight(w[t]);
      for (std::size_t li = 0; li < L; ++li) {
        const int n = n_list[li];
        double spsi = suf[0] - suf[n];
        double sphi = bern ? plp[n] : spec.s * spsi - n * spec.pressure_shift;
        bool inside = std::abs(spsi / n + constants.lambda_hat) < eps && spsi != 0.0 &&
                      std::abs(sphi / spsi - constants.s_hat) < eps;
        if (!inside) part[c][li] += mu.weights[i];
      }
    }
  });
  LargeDevResult res;
  res.constants = constants;
  std::vector<double> xs, ys;
  for (std::size_t li = 0; li < L; ++li) {
    double m = 0;
    for (const auto& p : part) m += p[li];
    res.rows.push_back({n_list[li], m});
    if (m > 0) {
      xs.push_back(n_list[li]);
      ys.push_back(std::log(m));
    }
  }
  if (xs.size() >= 2) {
    res.fit = least_squares(xs, ys);
    res.delta_hat = -res.fit.slope;
  }
  return res;
}

}  // namespace gfd
