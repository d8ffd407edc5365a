#include <doctest.h>

#include <random>

#include "core/continuants.hpp"
#include "core/error.hpp"
#include "oracles.hpp"

using namespace gfd;

TEST_CASE("continuant examples") {
  auto e = continuants({});
  CHECK(e.p == 0);
  CHECK(e.q == 1);
  auto a = continuants({1, 1});
  CHECK(a.p == 1);
  CHECK(a.q == 2);
  auto b = continuants({2, 3});
  CHECK(b.p == 3);
  CHECK(b.q == 7);
  CHECK(cf_value({1}) == 1);
  CHECK(cf_value({2, 3}) == Rational(3, 7));
  CHECK(cf_value({1, 1, 1, 1, 1}) == Rational(5, 8));
}

TEST_CASE("continuants match nested fractions and are coprime") {
  std::mt19937_64 g(1);
  for (int t = 0; t < 2000; ++t) {
    auto w = oracle::random_word(g, 1, 100, 1 + t % 30);
    auto c = continuants(w);
    CHECK(Rational(c.p, c.q) == oracle::nested(w));
    CHECK(gcd(c.p, c.q) == 1);
    CHECK(c.q >= c.p);
  }
}

TEST_CASE("determinant identity") {
  CHECK(check_determinant({1}) == -1);
  CHECK(check_determinant({2, 3}) == 1);
  std::mt19937_64 g(2);
  for (int t = 0; t < 1000; ++t) {
    auto w = oracle::random_word(g, 1, 50, 1 + t % 30);
    // oracle: p_{n-1}/q_{n-1} from the nested fraction of the prefix
    Rational prev = oracle::nested(Word(w.begin(), w.end() - 1));
    Rational cur = oracle::nested(w);
    BigInt pn = numerator(cur), qn = denominator(cur);
    BigInt pp = numerator(prev), qp = denominator(prev);
    int sign = (w.size() % 2) ? -1 : 1;
    CHECK(qn * pp - qp * pn == sign);
    CHECK(check_determinant(w) == sign);
  }
}

TEST_CASE("determinant failure is an identity error") {
  testing::set_corrupt_recurrence(true);
  try {
    check_determinant({2, 3});
    FAIL("expected identity error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::identity);
  }
  testing::set_corrupt_recurrence(false);
  CHECK(check_determinant({2, 3}) == 1);
}

TEST_CASE("mirror identities") {
  auto r = mirror_identities({2, 3});
  CHECK(r.q == 7);
  CHECK(r.q_mirror == 7);
  CHECK(r.q_prev == 2);
  CHECK(r.p_mirror == 2);
  CHECK(r.ok);
  CHECK(mirror_identities({1, 2, 1}).ok);
  std::mt19937_64 g(3);
  for (int t = 0; t < 500; ++t) CHECK(mirror_identities(oracle::random_word(g, 1, 40, 1 + t % 30)).ok);
}

TEST_CASE("interval length and bounds") {
  CHECK(interval_length({2, 3}) == Rational(1, 63));
  CHECK(length_bounds_check({2, 3}));
  CHECK(interval_length({1}) == Rational(1, 2));
  std::mt19937_64 g(4);
  for (int t = 0; t < 1000; ++t) {
    auto w = oracle::random_word(g, 1, 60, 1 + t % 30);
    // oracle: endpoints are the nested fraction at 0 and 1
    Rational len = abs(oracle::nested(w, 0) - oracle::nested(w, 1));
    CHECK(interval_length(w) == len);
    CHECK(length_bounds_check(w));
  }
}

TEST_CASE("quasi-multiplicativity") {
  CHECK(quasi_multiplicativity({1, 2, 3}, 1) == Rational(10, 9));
  CHECK(quasi_multiplicativity({1, 1}, 1) == 2);
  CHECK_THROWS_AS(quasi_multiplicativity({1, 1}, 2), Error);
  CHECK_THROWS_AS(quasi_multiplicativity({1, 1}, 0), Error);
  for (Digit a = 1; a <= 50; ++a)
    for (Digit b = 1; b <= 50; b += 7) {
      Rational r = quasi_multiplicativity({b, 1, 2, a}, 1);
      CHECK(r >= Rational(1, 2));
      CHECK(r <= 4);
    }
}

TEST_CASE("mirror value is [w reversed]") {
  std::mt19937_64 g(5);
  for (int t = 0; t < 200; ++t) {
    auto w = oracle::random_word(g, 1, 9, 1 + t % 20);
    CHECK(mirror_value(w) == oracle::nested(mirror(w)));
  }
}
