#include "core/continuants.hpp"

#include <atomic>

#include "core/error.hpp"

namespace gfd {

namespace testing {
static std::atomic<bool> g_corrupt{false};
void set_corrupt_recurrence(bool on) { g_corrupt = on; }
bool corrupt_recurrence() { return g_corrupt; }
}  // namespace testing

static void check_digits(const Word& w) {
  for (Digit a : w)
    if (a < 1) fail(Errc::domain, "continued-fraction digits must be >= 1");
}

ContinuantState continuant_state(const Word& w) {
  check_digits(w);
  ContinuantState s;
  bool corrupt = testing::corrupt_recurrence();
  for (std::size_t i = 0; i < w.size(); ++i) {
    BigInt p = w[i] * s.p + s.p_prev;
    BigInt q = w[i] * s.q + s.q_prev;
    if (corrupt && i == 1) q += 1;
    s.p_prev = std::move(s.p);
    s.p = std::move(p);
    s.q_prev = std::move(s.q);
    s.q = std::move(q);
  }
  return s;
}

ContinuantPair continuants(const Word& w) {
  ContinuantState s = continuant_state(w);
  return {s.p, s.q};
}

int check_determinant(const Word& w) {
  if (w.empty()) fail(Errc::domain, "determinant needs a nonempty word");
  ContinuantState s = continuant_state(w);
  BigInt d = s.q * s.p_prev - s.q_prev * s.p;
  int expect = (w.size() % 2) ? -1 : 1;
  if (d != expect)
    fail(Errc::identity, "determinant identity violated for " + to_string(w) + ": got " + d.str());
  return expect;
}

MirrorReport mirror_identities(const Word& w) {
  if (w.empty()) fail(Errc::domain, "mirror identities need a nonempty word");
  ContinuantState a = continuant_state(w);
  ContinuantState b = continuant_state(mirror(w));
  MirrorReport r{a.q, b.q, a.q_prev, b.p, false};
  r.ok = (r.q == r.q_mirror) && (r.q_prev == r.p_mirror);
  return r;
}

Rational interval_length(const Word& w) {
  if (w.empty()) fail(Errc::domain, "interval length needs a nonempty word");
  ContinuantState s = continuant_state(w);
  return Rational(BigInt(1), s.q * (s.q + s.q_prev));
}

bool length_bounds_check(const Word& w) {
  Rational len = interval_length(w);
  BigInt q = continuants(w).q;
  Rational upper(BigInt(1), q * q);
  Rational lower(BigInt(1), 4 * q * q);
  return lower <= len && len <= upper;
}

Rational quasi_multiplicativity(const Word& w, std::size_t k) {
  if (k < 1 || k >= w.size()) fail(Errc::domain, "split index k must satisfy 1 <= k < |w|");
  Word b(w.begin(), w.end() - k), c(w.end() - k, w.end());
  BigInt qn = continuants(w).q;
  BigInt qb = continuants(b).q;
  BigInt qc = continuants(c).q;
  return Rational(qn, qb * qc);
}

Rational cf_value(const Word& w) {
  ContinuantPair c = continuants(w);
  return Rational(c.p, c.q);
}

Rational mirror_value(const Word& w) {
  ContinuantState s = continuant_state(w);
  return Rational(s.q_prev, s.q);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace gfd
