#include "core/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace gfd {

namespace {
const double kTwoPi = 6.283185307179586476925286766559;

inline double frac(double v) { return v - std::floor(v); }
}  // namespace

void DiscreteMeasure::validate() const {
  if (atoms.size() != weights.size()) fail(Errc::structural, "atoms and weights differ in size");
  double s = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!(weights[i] > 0)) fail(Errc::structural, "nonpositive weight");
    if (i && !(atoms[i] > atoms[i - 1])) fail(Errc::structural, "atoms not strictly increasing");
    s += weights[i];
  }
  if (std::abs(s - total_mass) > 1e-12 * std::max(1.0, total_mass)) fail(Errc::structural, "total mass mismatch");
}

DiscreteMeasure DiscreteMeasure::from_points(std::vector<double> atoms, std::vector<double> weights, double tol) {
  if (atoms.size() != weights.size()) fail(Errc::structural, "atoms and weights differ in size");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return atoms[a] < atoms[b] || (atoms[a] == atoms[b] && weights[a] < weights[b]);
  });
  DiscreteMeasure m;
  for (std::size_t i : order) {
    if (!(weights[i] > 0)) continue;
    if (!m.atoms.empty() && atoms[i] - m.atoms.back() <= tol) {
      m.weights.back() += weights[i];
    } else {
      m.atoms.push_back(atoms[i]);
      m.weights.push_back(weights[i]);
    }
  }
  m.total_mass = 0;
  for (double w : m.weights) m.total_mass += w;
  return m;
}

DiscreteMeasure DiscreteMeasure::dirac(double x, double mass) {
  DiscreteMeasure m;
  m.atoms = {x};
  m.weights = {mass};
  m.total_mass = mass;
  return m;
}

Complex fourier_transform(const DiscreteMeasure& m, double xi) {
  double re = 0, im = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double ph = kTwoPi * frac(xi * m.atoms[i]);
    re += m.weights[i] * std::cos(ph);
    im -= m.weights[i] * std::sin(ph);
  }
  return {re, im};
}

double sampled_sup(const DiscreteMeasure& m, double xi0, double h, int count) {
  // Phase rotation along the grid, re-anchored every G samples; groups are aligned so the
  // result does not depend on the thread count.
  constexpr int G = 256;
  const std::size_t groups = (count + G - 1) / G;
  std::vector<double> best(groups, 0.0);
  parallel_chunks(groups, 1, [&](std::size_t g, std::size_t, std::size_t) {
    const int first = static_cast<int>(g) * G;
    const int len = std::min(G, count - first);
    std::vector<double> ar(len, 0.0), ai(len, 0.0);
    const double start = xi0 + (first + 0.5) * h;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double x = m.atoms[i], w = m.weights[i];
      double p0 = kTwoPi * frac(start * x), ps = kTwoPi * frac(h * x);
      double zr = w * std::cos(p0), zi = -w * std::sin(p0);
      const double rr = std::cos(ps), ri = -std::sin(ps);
      for (int t = 0; t < len; ++t) {
        ar[t] += zr;
        ai[t] += zi;
        double nr = zr * rr - zi * ri;
        zi = zr * ri + zi * rr;
        zr = nr;
      }
    }
    double b = 0;
    for (int t = 0; t < len; ++t) b = std::max(b, std::hypot(ar[t], ai[t]));
    best[g] = b;
  });
  return *std::max_element(best.begin(), best.end());
}

DecayScan decay_scan(const DiscreteMeasure& m, double max_cylinder_length, const DecayOptions& opt) {
  if (opt.samples_per_block < 64) fail(Errc::domain, "samples_per_block must be at least 64");
  if (opt.j_hi < opt.j_lo) fail(Errc::domain, "empty dyadic range");
  if (m.size() == 0) fail(Errc::domain, "empty measure");
  DecayScan scan;
  scan.xi_max = 0.1 / max_cylinder_length;
  scan.min_atom_gap = INFINITY;
  for (std::size_t i = 1; i < m.size(); ++i) scan.min_atom_gap = std::min(scan.min_atom_gap, m.atoms[i] - m.atoms[i - 1]);
  std::vector<double> xs, ys;
  for (int j = opt.j_lo; j <= opt.j_hi; ++j) {
    DecayBlock b;
    b.j = j;
    b.xi_lo = std::ldexp(1.0, j);
    b.xi_hi = std::ldexp(1.0, j + 1);
    double want = std::ldexp(static_cast<double>(opt.oversample), j);
    b.n_samples = static_cast<int>(std::clamp(want, static_cast<double>(opt.samples_per_block),
                                              static_cast<double>(std::max(opt.sample_cap, opt.samples_per_block))));
    b.aliased = b.xi_hi > scan.xi_max;
    b.sup_abs = sampled_sup(m, b.xi_lo, (b.xi_hi - b.xi_lo) / b.n_samples, b.n_samples);
    scan.blocks.push_back(b);
    if (!b.aliased && b.sup_abs > 0) {
      xs.push_back(j * std::log(2.0));
      ys.push_back(std::log(b.sup_abs));
    }
  }
  scan.fit_blocks = static_cast<int>(xs.size());
  if (xs.size() >= 2) {
    LinearFit f = least_squares(xs, ys);
    scan.e_hat = -f.slope;
    scan.ci_lo = -f.ci_hi;
    scan.ci_hi = -f.ci_lo;
    scan.residual = f.residual_rms;
  }
  return scan;
}

DiscreteMeasure mult_convolution(const DiscreteMeasure& a, const DiscreteMeasure& b, std::uint64_t budget) {
  if (static_cast<double>(a.size()) * static_cast<double>(b.size()) > static_cast<double>(budget))
    fail(Errc::resource, "convolution atom count exceeds budget");
  std::vector<double> atoms, weights;
  atoms.reserve(a.size() * b.size());
  weights.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      atoms.push_back(a.atoms[i] * b.atoms[j]);
      weights.push_back(a.weights[i] * b.weights[j]);
    }
  if (atoms.empty()) return {};
  bool has_zero_mass = false;
  for (double w : weights) has_zero_mass |= !(w > 0);
  if (has_zero_mass) fail(Errc::structural, "nonpositive weight in convolution");
  return DiscreteMeasure::from_points(std::move(atoms), std::move(weights));
}

static int dyadic_scale(double x) {
  int e;
  double f = std::frexp(x, &e);  // x = f 2^e, f in [1/2, 1)
  return f == 0.5 ? e - 1 : e;
}

std::vector<DyadicPiece> dyadic_decompose(const DiscreteMeasure& m, double R) {
  if (!(R >= 1)) fail(Errc::domain, "R must be at least 1");
  std::vector<DyadicPiece> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double x = m.atoms[i];
    if (!(x >= 1.0 / R && x <= R)) fail(Errc::domain, "atom outside [1/R, R]");
    int s = dyadic_scale(x);
    if (out.empty() || out.back().scale != s) out.push_back({s, {}});
    DiscreteMeasure& p = out.back().piece;
    p.atoms.push_back(std::ldexp(x, -s));
    p.weights.push_back(m.weights[i]);
    p.total_mass += m.weights[i];
  }
  return out;
}

DiscreteMeasure dyadic_reconstruct(const std::vector<DyadicPiece>& pieces) {
  DiscreteMeasure m;
  for (const auto& p : pieces)
    for (std::size_t i = 0; i < p.piece.size(); ++i) {
      m.atoms.push_back(std::ldexp(p.piece.atoms[i], p.scale));
      m.weights.push_back(p.piece.weights[i]);
      m.total_mass += p.piece.weights[i];
    }
  return m;
}

double max_ball_mass(const DiscreteMeasure& m, double rho) {
  double best = 0, cur = 0;
  std::size_t lo = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    cur += m.weights[i];
    while (m.atoms[i] - m.atoms[lo] > 2 * rho) cur -= m.weights[lo++];
    best = std::max(best, cur);
  }
  return best;
}

BourgainCheck bourgain_hypothesis_check(const DiscreteMeasure& m, double kappa, double rho_lo, double rho_hi) {
  if (std::abs(m.total_mass - 1.0) > 1e-9) fail(Errc::domain, "measure must be normalized");
  for (double x : m.atoms)
    if (!(x >= 0.5 && x <= 1.0)) fail(Errc::domain, "measure must be supported on [1/2,1]");
  if (!(rho_lo > 0 && rho_lo <= rho_hi)) fail(Errc::domain, "invalid rho range");
  BourgainCheck c;
  c.holds = true;
  for (int i = static_cast<int>(std::ceil(-std::log2(rho_hi))); std::ldexp(1.0, -i) >= rho_lo; ++i) {
    double rho = std::ldexp(1.0, -i);
    double mass = max_ball_mass(m, rho);
    double ratio = mass / std::pow(rho, kappa);
    c.rows.push_back({rho, mass, ratio});
    c.worst_ratio = std::max(c.worst_ratio, ratio);
    if (!(mass < std::pow(rho, kappa))) c.holds = false;
  }
  if (c.rows.empty()) fail(Errc::domain, "empty rho grid");
  return c;
}

Complex exp_sum(const std::vector<std::vector<double>>& zetas, double eta) {
  if (zetas.empty()) return {1.0, 0.0};
  for (const auto& z : zetas)
    if (z.empty()) fail(Errc::structural, "empty zeta table");
  // recursive product over the k tables, innermost table summed last
  const std::size_t k = zetas.size();
  std::function<Complex(std::size_t, double)> rec = [&](std::size_t j, double prod) -> Complex {
    const auto& z = zetas[j];
    if (j + 1 == k) {
      double re = 0, im = 0;
      for (double v : z) {
        double ph = kTwoPi * frac(prod * v);
        re += std::cos(ph);
        im += std::sin(ph);
      }
      return {re / z.size(), im / z.size()};
    }
    Complex acc = 0;
    for (double v : z) acc += rec(j + 1, prod * v);
    return acc / static_cast<double>(z.size());
  };
  return rec(0, eta);
}

Complex exp_sum(const std::vector<ZetaSystem>& zetas, double eta) {
  std::vector<std::vector<double>> v;
  for (const auto& z : zetas) v.push_back(z.values);
  return exp_sum(v, eta);
}

std::vector<double> jn_window(const RegularTree& tree) {
  const double ln = tree.lambda_hat * tree.n;
  return {std::exp(ln / 4.0), tree.C_eps * std::exp(ln / 2.0)};
}

std::vector<double> eta_grid(const RegularTree& tree, int points) {
  auto w = jn_window(tree);
  std::vector<double> g;
  if (points < 2) points = 2;
  double a = std::log(w[0]), b = std::log(w[1]);
  for (int i = 0; i < points; ++i) g.push_back(std::exp(a + (b - a) * i / (points - 1)));
  g.front() = w[0];
  g.back() = w[1];
  return g;
}

ExpSumScan expsum_decay_scan(const RegularTree& tree, const WellDistributed& wd, const std::vector<double>& etas,
                             std::size_t n_blocks, std::uint64_t seed) {
  if (wd.kept_blocks == 0) fail(Errc::degenerate, "no well-distributed blocks (W is empty)");
  ExpSumScan scan;
  auto w = jn_window(tree);
  scan.eta_lo = w[0];
  scan.eta_hi = w[1];
  scan.xi_scale = std::exp((2.0 * wd.k + 1.5) * tree.lambda_hat * tree.n);
  std::vector<double> inside;
  for (double e : etas) {
    if (std::abs(e) >= w[0] * (1 - 1e-12) && std::abs(e) <= w[1] * (1 + 1e-12))
      inside.push_back(e);
    else
      ++scan.excluded;
  }
  auto blocks = wd.sample(n_blocks, seed);
  std::vector<std::vector<std::vector<double>>> tables;
  for (const auto& blk : blocks) {
    std::vector<std::vector<double>> t;
    for (std::size_t j = 1; j < blk.size(); ++j) t.push_back(zeta_values(tree, blk[j - 1], blk[j]));
    tables.push_back(std::move(t));
  }
  std::vector<double> best(inside.size(), 0.0);
  parallel_chunks(inside.size(), 1, [&](std::size_t i, std::size_t, std::size_t) {
    for (const auto& t : tables) best[i] = std::max(best[i], std::abs(exp_sum(t, inside[i])));
  });
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    scan.rows.push_back({inside[i], best[i], blocks.size()});
    if (best[i] > 0) {
      lx.push_back(std::log(std::abs(inside[i])));
      ly.push_back(std::log(best[i]));
    }
  }
  if (lx.size() >= 2) {
    LinearFit f = least_squares(lx, ly);
    scan.eps2_hat = -f.slope;
    scan.ci_lo = -f.ci_hi;
    scan.ci_hi = -f.ci_lo;
    scan.residual = f.residual_rms;
  }
  return scan;
}

}  // namespace gfd
