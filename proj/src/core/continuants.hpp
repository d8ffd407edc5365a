#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "core/symbolic.hpp"

namespace gfd {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct ContinuantPair {
  BigInt p;
  BigInt q;
};

// (p_{n-1}, p_n, q_{n-1}, q_n).
struct ContinuantState {
  BigInt p_prev{1}, p{0};
  BigInt q_prev{0}, q{1};
};

ContinuantState continuant_state(const Word& w);
ContinuantPair continuants(const Word& w);

// q_n p_{n-1} - q_{n-1} p_n; throws identity error unless (-1)^n.
int check_determinant(const Word& w);

struct MirrorReport {
  BigInt q, q_mirror;
  BigInt q_prev, p_mirror;
  bool ok;
};
MirrorReport mirror_identities(const Word& w);

Rational interval_length(const Word& w);
bool length_bounds_check(const Word& w);
Rational quasi_multiplicativity(const Word& w, std::size_t k);
Rational cf_value(const Word& w);
// [w^<-] = q_{n-1}/q_n.
Rational mirror_value(const Word& w);

double to_double(const Rational& r);

namespace testing {
// Corrupts the continuant recurrence (adds 1 to q_2) so the identity suite can be shown to fail.
void set_corrupt_recurrence(bool on);
bool corrupt_recurrence();
}  // namespace testing

}  // namespace gfd
