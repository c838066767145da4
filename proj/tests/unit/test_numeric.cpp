#include <doctest.h>

#include "cuspflow/exp_sum.hpp"

using namespace cuspflow;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-7") == -7);
  CHECK(parse_rational("2.5") == Rational(5, 2));
  CHECK(parse_rational("1.25e-2") == Rational(1, 80));
  CHECK(format_rational(Rational(-6, 4)) == "-3/2");
  CHECK(format_rational(Rational(4, 2)) == "2");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational(""), ParseError);
}

TEST_CASE("exp sums merge equal exponents exactly") {
  ExpSum a(Rational(2), Rational(1, 2));
  a.add(Rational(-2), Rational(1, 2));
  CHECK(a.identically_zero());
  ExpSum b(Rational(1), Rational(3));
  b.add(Rational(5), Rational(-1));
  b.add(Rational(1), Rational(3));
  REQUIRE(b.terms().size() == 2);
  CHECK(b.terms()[0].exponent == -1);
  CHECK(b.terms()[1].coefficient == 2);
  CHECK(certified_sign(b - b, 128) == Sign::zero);
}

TEST_CASE("certified signs of nearly cancelling sums") {
  // e - 2.718281828459045 is positive but tiny.
  ExpSum near(Rational(1), Rational(1));
  near.add(-parse_rational("2.718281828459045"), Rational(0));
  CHECK(certified_sign(near, 128) == Sign::positive);
  // e^{1/2} e^{1/2} = e: the same exponent after merging.
  CHECK(compare(ExpSum(Rational(1), Rational(1)), ExpSum(Rational(1), Rational(1)), 128) == Ordering::equal);
  // e^3 vs 20.0855369231876677409285296545817 (true value 20.08553692318766774092852965458171789...)
  ExpSum cube(Rational(1), Rational(3));
  CHECK(compare(cube, ExpSum(parse_rational("20.0855369231876677409285296545817"), Rational(0)), 128) ==
        Ordering::greater);
  CHECK(compare(cube, ExpSum(parse_rational("20.0855369231876677409285296545818"), Rational(0)), 128) ==
        Ordering::less);
  // Below the reachable precision the sign is reported as uncertain.
  ExpSum tiny(Rational(1), Rational(3));
  tiny.add(-parse_rational("20.08553692318766774092852965458171789698790783855415014437893422969884587809"),
           Rational(0));
  CHECK(certified_sign(tiny, 64) == Sign::uncertain);
}

TEST_CASE("certified floor") {
  CHECK(certified_floor(ExpSum(Rational(1), Rational(3)), 128) == 20);
  CHECK(certified_floor(ExpSum(Rational(7, 2), Rational(0)), 128) == 3);
  CHECK(certified_floor(ExpSum(Rational(-7, 2), Rational(0)), 128) == -4);
  CHECK(certified_floor(ExpSum(Rational(4), Rational(0)), 128) == 4);
}

TEST_CASE("height levels") {
  CHECK(HeightLevel::parse("e^5") == HeightLevel::exp(5));
  CHECK(HeightLevel::parse("e") == HeightLevel::exp(1));
  CHECK(HeightLevel::parse("e^(1/2)") == HeightLevel::exp(Rational(1, 2)));
  CHECK(HeightLevel::parse("2*e^3") == HeightLevel(Rational(2), Rational(3)));
  CHECK(HeightLevel::parse("3/2") == HeightLevel::value(Rational(3, 2)));
  CHECK(HeightLevel::exp(5).floor_log(128) == 5);
  CHECK(HeightLevel::value(20).floor_log(128) == 2);
  CHECK(HeightLevel::value(21).floor_log(128) == 3);
  CHECK(HeightLevel::exp(2).compare_exp(Rational(2), 128) == Ordering::equal);
  CHECK(HeightLevel::value(7).compare_exp(Rational(2), 128) == Ordering::less);
  ExpSum inv = HeightLevel(Rational(2), Rational(3)).inverse_square();
  CHECK(compare(inv, ExpSum(Rational(1, 4), Rational(-6)), 128) == Ordering::equal);
  CHECK_THROWS_AS(HeightLevel::parse("e^"), ParseError);
  CHECK_THROWS_AS(HeightLevel::parse("-2"), ParseError);
}

TEST_CASE("real wrapper") {
  Real e = exp_rational(Rational(1), 200);
  CHECK(e.precision() == 200);
  CHECK(log(e).to_long_double() == doctest::Approx(1.0L).epsilon(1e-18));
  CHECK(Real(Rational(1, 3), 128).to_rational() != Rational(1, 3));
  CHECK(Real(Rational(3, 4), 128).to_rational() == Rational(3, 4));
  CHECK(to_long_double(Rational(1, 3)) == 1.0L / 3);
}
