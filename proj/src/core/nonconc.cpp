#include "core/nonconc.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace gfd {

std::size_t tree_index(const RegularTree& tree, const Word& a) {
  auto it = std::lower_bound(tree.words.begin(), tree.words.end(), a);
  if (it == tree.words.end() || *it != a) fail(Errc::domain, "word " + to_string(a) + " is not regular");
  return static_cast<std::size_t>(it - tree.words.begin());
}

double pair_distortion(const RegularTree& tree, std::size_t ia, std::size_t ib, double x) {
  const MarkovSystem& sys = tree.spec.system;
  if (sys.affine()) return 0.0;
  const CylinderState& a = tree.states[ia];
  const CylinderState& b = tree.states[ib];
  double y = state_apply(sys, b, x);
  double db = std::exp(state_log_derivative(sys, b, x));
  if (b.depth % 2) db = -db;
  return state_distortion(sys, a, y) * db + state_distortion(sys, b, x);
}

std::vector<double> distortion_set(const RegularTree& tree, std::size_t ia, double x) {
  if (ia >= tree.size()) fail(Errc::domain, "word index outside the regular tree");
  if (!(x >= 0 && x <= 1)) fail(Errc::domain, "point outside [0,1]");
  std::vector<double> v(tree.size());
  for (std::size_t b = 0; b < tree.size(); ++b) v[b] = pair_distortion(tree, ia, b, x);
  return v;
}

std::vector<double> distortion_set(const RegularTree& tree, const Word& a, double x) {
  return distortion_set(tree, tree_index(tree, a), x);
}

static std::uint64_t count_within(const std::vector<double>& sorted, double v, double rho) {
  auto lo = std::lower_bound(sorted.begin(), sorted.end(), v - rho);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), v + rho);
  return static_cast<std::uint64_t>(hi - lo);
}

static void check_rho(const RegularTree& tree, double rho) {
  double lo = std::exp(-tree.lambda_hat * tree.n / 2.0);
  if (!(rho >= lo * (1 - 1e-12) && rho <= 1.0)) fail(Errc::domain, "rho outside [e^{-lambda n/2}, 1]");
}

std::uint64_t nonlinearity_counter(const RegularTree& tree, std::size_t ia, std::size_t ib, double x, double rho) {
  check_rho(tree, rho);
  std::vector<double> v = distortion_set(tree, ia, x);
  double center = v.at(ib);
  std::uint64_t c = 0;
  for (double d : v)
    if (std::abs(center - d) <= rho) ++c;
  return c;
}

std::vector<double> default_x_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 16; ++i) g.push_back(i / 16.0);
  return g;
}

std::vector<double> rho_grid(const RegularTree& tree) {
  double lo = std::exp(-tree.lambda_hat * tree.n / 2.0);
  std::vector<double> g;
  for (double r = 1.0; r >= lo; r *= 0.5) g.push_back(r);
  return g;
}

NonConcReport nonlinearity_report(const RegularTree& tree, const std::vector<double>& x_grid) {
  NonConcReport rep;
  rep.n = tree.n;
  rep.tree_size = tree.size();
  const std::vector<double> rhos = rho_grid(tree);
  const std::size_t N = tree.size();
  // worst[ rho ] = max over (a, b, x)
  std::vector<std::vector<std::uint64_t>> part(N, std::vector<std::uint64_t>(rhos.size(), 0));
  parallel_chunks(N, 1, [&](std::size_t, std::size_t ia, std::size_t) {
    for (double x : x_grid) {
      std::vector<double> v = distortion_set(tree, ia, x);
      std::vector<double> sorted = v;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t r = 0; r < rhos.size(); ++r)
        for (double center : v) part[ia][r] = std::max(part[ia][r], count_within(sorted, center, rhos[r]));
    }
  });
  std::vector<double> lx, ly;
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    std::uint64_t worst = 0;
    for (std::size_t ia = 0; ia < N; ++ia) worst = std::max(worst, part[ia][r]);
    rep.rows.push_back({rhos[r], worst, 0.0, false});
    lx.push_back(std::log(rhos[r]));
    ly.push_back(std::log(static_cast<double>(worst) / N));
  }
  if (rhos.size() >= 2) {
    LinearFit f = least_squares(lx, ly);
    rep.kappa_hat = std::max(0.0, f.slope);
    rep.residual = f.residual_rms;
  }
  rep.C0_hat = 0;
  for (const auto& row : rep.rows)
    rep.C0_hat = std::max(rep.C0_hat, static_cast<double>(row.count) / N / std::pow(row.rho, rep.kappa_hat));
  for (auto& row : rep.rows) {
    row.bound = rep.C0_hat * std::pow(row.rho, rep.kappa_hat) * N;
    row.ok = static_cast<double>(row.count) <= row.bound * (1 + 1e-12);
  }
  // |d/dx D(w,x)| <= 2, grid spacing h: two distortions move by at most 2*2*(h/2)
  double h = 0;
  for (std::size_t i = 1; i < x_grid.size(); ++i) h = std::max(h, x_grid[i] - x_grid[i - 1]);
  rep.x_grid_slack = tree.spec.system.affine() ? 0.0 : 2.0 * h;
  return rep;
}

Rational distortion_exact(const Word& w, const Rational& x) {
  ContinuantState s = continuant_state(w);
  return Rational(-2 * s.q_prev) / (Rational(s.q_prev) * x + Rational(s.q));
}

DistDiophResult distdioph_check(const MarkovSystem& sys, const Word& b, const Word& c, const Rational& x) {
  if (sys.kind() != MapKind::gauss) fail(Errc::unsupported, "DistDioph reduction is specific to the Gauss map");
  if (b.size() != c.size()) fail(Errc::domain, "DistDioph needs words of equal length");
  if (x < 0 || x > 1) fail(Errc::domain, "point outside [0,1]");
  sys.check_word(b);
  sys.check_word(c);
  Rational gap = abs(mirror_value(b) - mirror_value(c));
  DistDiophResult r;
  r.lhs = gap / 2;
  r.mid = abs(distortion_exact(b, x) - distortion_exact(c, x));
  r.rhs = gap * 2;
  r.ok = r.lhs <= r.mid && r.mid <= r.rhs;
  return r;
}

double dist_concat_slack(const RegularTree& tree, const Word& a, const Word& b, const Word& c) {
  if (b.size() != c.size()) fail(Errc::domain, "DistConcat needs words of equal length");
  Rational lhs = abs(mirror_value(b) - mirror_value(c));
  Rational inner = abs(mirror_value(concat(a, b)) - mirror_value(concat(a, c)));
  double extra = 2.0 * tree.C_eps * std::exp(-tree.lambda_hat * tree.n / 2.0);
  return to_double(inner - lhs) + extra;
}

static void check_sigma(const RegularTree& tree, double sigma) {
  double lo = std::exp(-tree.lambda_hat * tree.n);
  if (!(sigma >= lo * (1 - 1e-12) && sigma <= 1.0)) fail(Errc::domain, "sigma outside [e^{-lambda n}, 1]");
}

std::vector<double> sigma_grid(const RegularTree& tree, int points) {
  double lo = std::exp(-tree.lambda_hat * tree.n);
  int imax = static_cast<int>(std::floor(-std::log2(lo)));
  std::vector<double> g;
  if (points < 2) points = 2;
  for (int j = 0; j < points; ++j) {
    int i = static_cast<int>(std::lround(static_cast<double>(j) * imax / (points - 1)));
    double s = std::ldexp(1.0, -i);
    if (g.empty() || g.back() != s) g.push_back(s);
  }
  return g;
}

static std::uint64_t ordered_pairs_within(std::vector<double> v, double delta) {
  std::sort(v.begin(), v.end());
  std::uint64_t c = 0;
  std::size_t lo = 0;
  // pairs (i, j) with j < i and v[i]-v[j] <= delta, doubled, plus the diagonal
  for (std::size_t i = 0; i < v.size(); ++i) {
    while (v[i] - v[lo] > delta) ++lo;
    c += 2 * (i - lo);
  }
  return c + v.size();
}

TripleCount triple_count_d1(const RegularTree& tree, std::size_t ia, double sigma, double kappa) {
  check_sigma(tree, sigma);
  const std::size_t N = tree.size();
  const double delta = 0.5 * std::sqrt(sigma);
  std::vector<std::uint64_t> per(N);
  parallel_chunks(N, 1, [&](std::size_t, std::size_t d, std::size_t) {
    per[d] = ordered_pairs_within(distortion_set(tree, ia, tree.atoms[d]), delta);
  });
  TripleCount t;
  for (auto c : per) t.count += c;
  const double lam = tree.lambda_hat;
  double alpha = 192.0 * std::exp(lam), beta = 11.0 * lam;
  t.bound = alpha * std::pow(tree.C_eps, beta) * std::exp(3.0 * lam * tree.s_hat * tree.n) * std::pow(sigma, kappa / 2);
  t.ok = static_cast<double>(t.count) <= t.bound;
  return t;
}

TripleCount triple_count_d2(const RegularTree& tree, std::size_t ia, double sigma) {
  check_sigma(tree, sigma);
  const std::size_t N = tree.size();
  const double gap = 0.5 * std::sqrt(sigma);
  const double lam = tree.lambda_hat;
  const double dwin = std::exp(-2.0 * lam * tree.n) * sigma;
  std::vector<std::uint64_t> per(N);
  parallel_chunks(N, 1, [&](std::size_t, std::size_t d, std::size_t) {
    const double x = tree.atoms[d];
    std::vector<std::pair<double, double>> v(N);  // (T'_{ab}(x), D(ab,x))
    for (std::size_t b = 0; b < N; ++b) {
      double ld = pair_log_derivative(tree, ia, b, x);
      v[b] = {std::exp(ld), pair_distortion(tree, ia, b, x)};
    }
    std::sort(v.begin(), v.end());
    std::uint64_t c = 0;
    std::size_t lo = 0;
    for (std::size_t i = 0; i < N; ++i) {
      while (v[i].first - v[lo].first > dwin) ++lo;
      for (std::size_t j = lo; j < i; ++j)
        if (std::abs(v[i].second - v[j].second) >= gap) c += 2;
    }
    per[d] = c;
  });
  TripleCount t;
  for (auto c : per) t.count += c;
  const double C = tree.gibbs_constant;
  const double core = C * C * std::exp(lam) * std::exp(3.0 * lam * tree.s_hat * tree.n) * std::pow(sigma, tree.s_hat / 2);
  t.bound = 96.0 * 96.0 * core * std::pow(tree.C_eps, 11.0 * lam);
  t.statement_bound = 96.0 * core * std::pow(tree.C_eps, 10.0 * lam);
  t.ok = static_cast<double>(t.count) <= t.bound;
  return t;
}

bool WellDistributed::contains(const std::vector<std::size_t>& block) const {
  if (block.size() != static_cast<std::size_t>(k + 1)) return false;
  for (std::size_t j = 1; j < block.size(); ++j)
    if (!good[block[j - 1] * size + block[j]]) return false;
  return true;
}

WellDistributed well_distributed_blocks(const RegularTree& tree, int k, double s0, double eps3) {
  if (k < 1) fail(Errc::domain, "block arity k must be positive");
  WellDistributed wd;
  wd.k = k;
  wd.s0 = s0;
  wd.eps3 = eps3;
  wd.size = tree.size();
  const double lam = tree.lambda_hat;
  const double lo = std::exp(-lam * tree.n), hi = std::exp(-lam * eps3 * tree.n / 4.0);
  for (int i = static_cast<int>(std::ceil(-std::log2(hi))); std::ldexp(1.0, -i) >= lo; ++i) wd.sigmas.push_back(std::ldexp(1.0, -i));
  if (wd.sigmas.empty()) fail(Errc::domain, "empty sigma grid (epsilon_3 too large)");
  const std::size_t N = tree.size();
  const double norm = std::exp(-2.0 * lam * tree.s_hat * tree.n);
  wd.good.assign(N * N, 0);
  parallel_chunks(N, 1, [&](std::size_t, std::size_t prev, std::size_t) {
    for (std::size_t cur = 0; cur < N; ++cur) {
      std::vector<double> z = zeta_values(tree, prev, cur);
      bool ok = true;
      for (double sg : wd.sigmas) {
        if (norm * static_cast<double>(ordered_pairs_within(z, sg)) > std::pow(sg, s0)) {
          ok = false;
          break;
        }
      }
      wd.good[prev * N + cur] = ok;
    }
  });
  // count chains a_0..a_k of good consecutive pairs
  std::vector<double> f(N, 1.0), g(N);
  for (int j = 1; j <= k; ++j) {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t p = 0; p < N; ++p)
      for (std::size_t c = 0; c < N; ++c)
        if (wd.good[p * N + c]) g[c] += f[p];
    f.swap(g);
  }
  double kept = 0;
  for (double v : f) kept += v;
  double total = std::pow(static_cast<double>(N), k + 1);
  wd.kept_blocks = static_cast<std::uint64_t>(kept);
  wd.total_blocks = static_cast<std::uint64_t>(total);
  wd.complement_fraction = 1.0 - kept / total;
  return wd;
}

std::vector<std::vector<std::size_t>> WellDistributed::sample(std::size_t count, std::uint64_t seed) const {
  if (kept_blocks == 0) fail(Errc::degenerate, "well-distributed set is empty");
  const std::size_t N = size;
  // back[j][i]: chains of j further steps starting at i
  std::vector<std::vector<double>> back(k + 1, std::vector<double>(N, 1.0));
  for (int j = 1; j <= k; ++j)
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0;
      for (std::size_t c = 0; c < N; ++c)
        if (good[i * N + c]) s += back[j - 1][c];
      back[j][i] = s;
    }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t t = 0; t < count; ++t) {
    Rng rng(split_seed(seed, t));
    std::vector<std::size_t> blk;
    blk.push_back(rng.pick(back[k]));
    for (int j = k - 1; j >= 0; --j) {
      std::vector<double> w(N, 0.0);
      for (std::size_t c = 0; c < N; ++c)
        if (good[blk.back() * N + c]) w[c] = back[j][c];
      blk.push_back(rng.pick(w));
    }
    out.push_back(std::move(blk));
  }
  return out;
}

}  // namespace gfd
