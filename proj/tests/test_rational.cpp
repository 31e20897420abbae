#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fiberchart/rational.hpp"

using fiberchart::CirclePos;
using fiberchart::Rational;

TEST_CASE("arithmetic and normalization") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(1, -2));
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK((Rational(1, 2) - Rational(2, 3)) == Rational(-1, 6));
  CHECK((Rational(3, 4) * Rational(2, 9)) == Rational(1, 6));
  CHECK((Rational(3, 4) / Rational(3, 2)) == Rational(1, 2));
  CHECK_THROWS(Rational(1, 0));
  CHECK_THROWS(Rational(1) / Rational(0));
}

TEST_CASE("ordering, floor, mod1") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-7, 2).floor() == -4);
  CHECK(Rational(7, 2).floor() == 3);
  CHECK(Rational(-7, 2).ceil() == -3);
  CHECK(Rational(-1, 4).mod1() == Rational(3, 4));
  CHECK(Rational(9, 4).mod1() == Rational(1, 4));
  CHECK(Rational(3).mod1() == Rational(0));
}

TEST_CASE("parse and str round-trip") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-3/4") == Rational(-3, 4));
  CHECK(Rational::parse("5") == Rational(5));
  CHECK(Rational::parse("6/-8") == Rational(-3, 4));
  CHECK_THROWS(Rational::parse("a/b"));
  CHECK_THROWS(Rational::parse("1/2x"));

  std::mt19937 rng(7);
  std::uniform_int_distribution<long long> d(-1000, 1000);
  for (int i = 0; i < 200; ++i) {
    long long n = d(rng), den = d(rng);
    if (den == 0) continue;
    Rational r(n, den);
    CHECK(Rational::parse(r.str()) == r);
  }
}

TEST_CASE("overflow is detected, not wrapped") {
  Rational big(INT64_MAX / 2, 1);
  CHECK_THROWS_AS(big * big, std::overflow_error);
}

TEST_CASE("circle positions") {
  CirclePos a(Rational(9, 8));
  CHECK(a.value() == Rational(1, 8));
  CirclePos b(Rational(7, 8));
  CHECK(a.dist(b) == Rational(1, 4));
  CHECK(CirclePos(Rational(0)).dist(CirclePos(Rational(1, 2))) == Rational(1, 2));
}
