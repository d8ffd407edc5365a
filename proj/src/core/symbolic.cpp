#include "core/symbolic.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace gfd {

Word mirror(const Word& w) { return Word(w.rbegin(), w.rend()); }

Word shift(const Word& w) {
  if (w.empty()) fail(Errc::domain, "shift of empty word");
  return Word(w.begin() + 1, w.end());
}

Word parent(const Word& w) {
  if (w.empty()) fail(Errc::domain, "parent of empty word");
  return Word(w.begin(), w.end() - 1);
}

Word concat(const Word& u, const Word& v) {
  Word out;
  out.reserve(u.size() + v.size());
  out.insert(out.end(), u.begin(), u.end());
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string to_string(const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(w[i]);
  }
  return s + ")";
}

MarkovSystem MarkovSystem::gauss(Digit cutoff) {
  if (cutoff < 1) fail(Errc::config, "alphabet cutoff must be positive");
  return MarkovSystem(MapKind::gauss, cutoff);
}

MarkovSystem MarkovSystem::lueroth(Digit cutoff) {
  if (cutoff < 1) fail(Errc::config, "alphabet cutoff must be positive");
  return MarkovSystem(MapKind::lueroth, cutoff);
}

MarkovSystem MarkovSystem::cantor() { return MarkovSystem(MapKind::cantor, 2); }

std::string MarkovSystem::name() const {
  switch (kind_) {
    case MapKind::gauss: return "gauss";
    case MapKind::lueroth: return "lueroth";
    case MapKind::cantor: return "cantor";
  }
  return "?";
}

void MarkovSystem::check_digit(Digit a) const {
  if (a < 1 || a > cutoff_)
    fail(Errc::domain, "digit " + std::to_string(a) + " outside alphabet 1.." + std::to_string(cutoff_));
}

void MarkovSystem::check_word(const Word& w) const {
  for (Digit a : w) check_digit(a);
}

static void check_point(double x) {
  if (!(x >= 0.0 && x <= 1.0)) fail(Errc::domain, "point outside [0,1]");
}

double MarkovSystem::slope(Digit a) const {
  switch (kind_) {
    case MapKind::lueroth: return 1.0 / (double(a) * (double(a) + 1.0));
    case MapKind::cantor: return 1.0 / 3.0;
    default: fail(Errc::unsupported, "slope requested for non-affine system");
  }
}

double MarkovSystem::offset(Digit a) const {
  switch (kind_) {
    case MapKind::lueroth: return 1.0 / (double(a) + 1.0);
    case MapKind::cantor: return a == 1 ? 0.0 : 2.0 / 3.0;
    default: fail(Errc::unsupported, "offset requested for non-affine system");
  }
}

BranchValue MarkovSystem::branch(Digit a, double x) const {
  if (kind_ == MapKind::gauss) {
    double t = 1.0 / (x + a);
    return {t, -t * t, 2.0 * t * t * t};
  }
  double m = slope(a);
  return {m * x + offset(a), m, 0.0};
}

double MarkovSystem::apply(Digit a, double x) const {
  if (kind_ == MapKind::gauss) return 1.0 / (x + a);
  if (kind_ == MapKind::lueroth) return (x + a) / (double(a) * (double(a) + 1.0));
  return (x + (a == 1 ? 0.0 : 2.0)) / 3.0;
}

double MarkovSystem::log_abs_d1(Digit a, double x) const {
  if (kind_ == MapKind::gauss) return -2.0 * std::log(x + a);
  return std::log(slope(a));
}

GaussRatio gauss_ratio(const Word& w) {
  GaussRatio g;
  for (Digit a : w) g = gauss_ratio_step(g, a);
  return g;
}

double branch_point(const MarkovSystem& sys, const Word& w, double x) {
  sys.check_word(w);
  check_point(x);
  double y = x;
  for (auto it = w.rbegin(); it != w.rend(); ++it) y = sys.apply(*it, y);
  return y;
}

double log_abs_derivative(const MarkovSystem& sys, const Word& w, double x) {
  sys.check_word(w);
  check_point(x);
  if (sys.kind() == MapKind::gauss) {
    GaussRatio g = gauss_ratio(w);
    return -2.0 * (g.log_q + std::log1p(g.r * x));
  }
  double s = 0.0;
  for (Digit a : w) s += std::log(sys.slope(a));
  return s;
}

double branch_derivative(const MarkovSystem& sys, const Word& w, double x) {
  sys.check_word(w);
  check_point(x);
  if (sys.kind() == MapKind::gauss && w.size() > 20) {
    double mag = std::exp(log_abs_derivative(sys, w, x));
    return (w.size() % 2) ? -mag : mag;
  }
  double y = x, d = 1.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    BranchValue b = sys.branch(*it, y);
    d *= b.d1;
    y = b.value;
  }
  return d;
}

double distortion(const MarkovSystem& sys, const Word& w, double x) {
  sys.check_word(w);
  check_point(x);
  if (sys.affine()) return 0.0;
  double r = gauss_ratio(w).r;
  return -2.0 * r / (r * x + 1.0);
}

Interval cylinder(const MarkovSystem& sys, const Word& w) {
  if (w.empty()) return {0.0, 1.0};
  double a = branch_point(sys, w, 0.0), b = branch_point(sys, w, 1.0);
  return {std::min(a, b), std::max(a, b)};
}

double log_cylinder_length(const MarkovSystem& sys, const Word& w) {
  sys.check_word(w);
  if (sys.kind() == MapKind::gauss) {
    GaussRatio g = gauss_ratio(w);
    return -2.0 * g.log_q - std::log1p(g.r);
  }
  double s = 0.0;
  for (Digit a : w) s += std::log(sys.slope(a));
  return s;
}

double midpoint_preimage(const MarkovSystem& sys, const Word& w) {
  sys.check_word(w);
  if (sys.kind() == MapKind::gauss) return 1.0 / (2.0 + gauss_ratio(w).r);
  return 0.5;
}

double cylinder_midpoint(const MarkovSystem& sys, const Word& w) {
  Interval I = cylinder(sys, w);
  return 0.5 * (I.lo + I.hi);
}

static void check_block(const Block& A, const Block& B) {
  if (A.size() != B.size() + 1)
    fail(Errc::structural, "block arity mismatch: |A| must equal |B|+1");
  if (A.empty()) fail(Errc::structural, "empty block");
  std::size_t n = A[0].size();
  for (const Word& w : A)
    if (w.size() != n) fail(Errc::structural, "block words differ in length");
  for (const Word& w : B)
    if (w.size() != n) fail(Errc::structural, "block words differ in length");
}

Word hash_concat(const Block& A, const Block& B) {
  check_block(A, B);
  Word out;
  for (std::size_t i = 0; i < B.size(); ++i) {
    out.insert(out.end(), A[i].begin(), A[i].end());
    out.insert(out.end(), B[i].begin(), B[i].end());
  }
  return out;
}

Word star_concat(const Block& A, const Block& B) {
  Word out = hash_concat(A, B);
  out.insert(out.end(), A.back().begin(), A.back().end());
  return out;
}

}  // namespace gfd

namespace gfd {

CylinderState extend(const MarkovSystem& sys, const CylinderState& s, Digit a) {
  CylinderState t = s;
  t.depth = s.depth + 1;
  if (sys.kind() == MapKind::gauss) {
    t.p_prev = s.p;
    t.p = a * s.p + s.p_prev;
    t.q_prev = s.q;
    t.q = a * s.q + s.q_prev;
    GaussRatio g = gauss_ratio_step({s.r, s.log_q}, a);
    t.r = g.r;
    t.log_q = g.log_q;
  } else {
    double m = sys.slope(a);
    t.B = s.A * sys.offset(a) + s.B;
    t.A = s.A * m;
    t.log_A = s.log_A + std::log(m);
  }
  return t;
}

CylinderState cylinder_state(const MarkovSystem& sys, const Word& w) {
  sys.check_word(w);
  CylinderState s;
  for (Digit a : w) s = extend(sys, s, a);
  return s;
}

Interval state_interval(const MarkovSystem& sys, const CylinderState& s) {
  if (sys.kind() == MapKind::gauss) {
    double u = s.p / s.q, v = (s.p + s.p_prev) / (s.q + s.q_prev);
    return {std::min(u, v), std::max(u, v)};
  }
  return {s.B, s.B + s.A};
}

double state_log_length(const MarkovSystem& sys, const CylinderState& s) {
  if (sys.kind() == MapKind::gauss) return -2.0 * s.log_q - std::log1p(s.r);
  return s.log_A;
}

double state_midpoint_preimage(const MarkovSystem& sys, const CylinderState& s) {
  return sys.kind() == MapKind::gauss ? 1.0 / (2.0 + s.r) : 0.5;
}

double state_log_derivative(const MarkovSystem& sys, const CylinderState& s, double y) {
  if (sys.kind() == MapKind::gauss) return -2.0 * (s.log_q + std::log1p(s.r * y));
  return s.log_A;
}

double state_distortion(const MarkovSystem& sys, const CylinderState& s, double x) {
  if (sys.affine()) return 0.0;
  return -2.0 * s.r / (s.r * x + 1.0);
}

}  // namespace gfd

namespace gfd {
double state_apply(const MarkovSystem& sys, const CylinderState& s, double x) {
  if (sys.kind() == MapKind::gauss) return (s.p_prev * x + s.p) / (s.q_prev * x + s.q);
  return s.A * x + s.B;
}
}  // namespace gfd
