#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace gfd {

using Digit = std::uint32_t;
using Word = std::vector<Digit>;
using Block = std::vector<Word>;

Word mirror(const Word& w);
Word shift(const Word& w);
Word parent(const Word& w);
Word concat(const Word& u, const Word& v);
std::string to_string(const Word& w);

enum class MapKind { gauss, lueroth, cantor };

struct BranchValue {
  double value;
  double d1;
  double d2;
};

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

// Inverse branches of a uniformly expanding Markov map on [0,1].
class MarkovSystem {
 public:
  static MarkovSystem gauss(Digit cutoff);
  static MarkovSystem lueroth(Digit cutoff);
  // Ternary digits {0,2} encoded as branches 1 -> x/3, 2 -> (x+2)/3.
  static MarkovSystem cantor();

  MapKind kind() const { return kind_; }
  Digit cutoff() const { return cutoff_; }
  double distortion_bound() const { return kind_ == MapKind::gauss ? 2.0 : 0.0; }
  bool orientation_reversing() const { return kind_ == MapKind::gauss; }
  bool affine() const { return kind_ != MapKind::gauss; }
  std::string name() const;

  void check_digit(Digit a) const;
  void check_word(const Word& w) const;

  BranchValue branch(Digit a, double x) const;
  double apply(Digit a, double x) const;
  double log_abs_d1(Digit a, double x) const;
  // Affine slope and offset, T_a(x) = slope*x + offset.
  double slope(Digit a) const;
  double offset(Digit a) const;

 private:
  MarkovSystem(MapKind k, Digit cutoff) : kind_(k), cutoff_(cutoff) {}
  MapKind kind_;
  Digit cutoff_;
};

double branch_point(const MarkovSystem& sys, const Word& w, double x);
double branch_derivative(const MarkovSystem& sys, const Word& w, double x);
// log|T_w'(x)|, safe for long words.
double log_abs_derivative(const MarkovSystem& sys, const Word& w, double x);
double distortion(const MarkovSystem& sys, const Word& w, double x);
// Closed interval T_w([0,1]); the empty word maps to [0,1].
Interval cylinder(const MarkovSystem& sys, const Word& w);
double log_cylinder_length(const MarkovSystem& sys, const Word& w);
// y in [0,1] with T_w(y) the midpoint of the cylinder.
double midpoint_preimage(const MarkovSystem& sys, const Word& w);
double cylinder_midpoint(const MarkovSystem& sys, const Word& w);

// Gauss only: r = q_{n-1}/q_n (equals [w^<-]), and log q_n, by the ratio recursion.
struct GaussRatio {
  double r = 0.0;
  double log_q = 0.0;
};
GaussRatio gauss_ratio(const Word& w);
inline GaussRatio gauss_ratio_step(GaussRatio g, Digit a) {
  double t = a + g.r;
  return {1.0 / t, g.log_q + std::log(t)};
}

Word star_concat(const Block& A, const Block& B);
Word hash_concat(const Block& A, const Block& B);

// Incremental description of T_w for enumeration: Moebius coefficients for Gauss
// (exact in double while q < 2^53), affine coefficients otherwise.
struct CylinderState {
  double p_prev = 1, p = 0, q_prev = 0, q = 1;  // Gauss
  double r = 0, log_q = 0;                      // Gauss, r = q_{n-1}/q_n
  double A = 1, B = 0, log_A = 0;               // affine, T_w(x) = A x + B
  int depth = 0;
};

CylinderState extend(const MarkovSystem& sys, const CylinderState& s, Digit a);
CylinderState cylinder_state(const MarkovSystem& sys, const Word& w);
Interval state_interval(const MarkovSystem& sys, const CylinderState& s);
double state_log_length(const MarkovSystem& sys, const CylinderState& s);
double state_midpoint_preimage(const MarkovSystem& sys, const CylinderState& s);
// log|T_w'(y)|.
double state_log_derivative(const MarkovSystem& sys, const CylinderState& s, double y);
// log|T_w'| at the preimage of the cylinder midpoint, i.e. S_n psi at the midpoint.
inline double state_log_derivative_mid(const MarkovSystem& sys, const CylinderState& s) {
  return state_log_derivative(sys, s, state_midpoint_preimage(sys, s));
}
double state_distortion(const MarkovSystem& sys, const CylinderState& s, double x);

// T_w(x) from the state coefficients.
double state_apply(const MarkovSystem& sys, const CylinderState& s, double x);
}  // namespace gfd
