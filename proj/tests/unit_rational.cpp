#include "doctest.h"
#include "dwlab/rational.hpp"

using dwlab::ExtRational;

TEST_CASE("rational arithmetic stays exact and reduced") {
  ExtRational a(1, 3), b(1, 6);
  CHECK((a + b) == ExtRational(1, 2));
  CHECK((a - b) == ExtRational(1, 6));
  CHECK((a * b) == ExtRational(1, 18));
  CHECK((a / b) == ExtRational(2));
  CHECK(ExtRational(4, 8).str() == "1/2");
  CHECK(ExtRational(-3, 6).str() == "-1/2");
  CHECK(ExtRational(7, 1).str() == "7");
  CHECK((ExtRational(3, 4) - ExtRational(3, 4)).is_zero());
}

TEST_CASE("infinity semantics") {
  const ExtRational inf = ExtRational::inf();
  CHECK(inf.is_inf());
  CHECK(inf.str() == "inf");
  CHECK(inf.reciprocal() == ExtRational(0));
  CHECK(ExtRational(0).reciprocal().is_inf());
  CHECK(inf.conjugate() == ExtRational(1));
  CHECK(ExtRational(1).conjugate().is_inf());
  CHECK(ExtRational(8).conjugate() == ExtRational(8, 7));
  CHECK(ExtRational(5) < inf);
  CHECK(!(inf < inf));
  CHECK(inf == ExtRational::inf());
  CHECK((ExtRational(3) / inf) == ExtRational(0));
  CHECK_THROWS_AS(inf + ExtRational(1), std::domain_error);
  CHECK_THROWS_AS(inf.to_double(), std::domain_error);
  CHECK_THROWS_AS(ExtRational(1) / ExtRational(0), std::domain_error);
  CHECK_THROWS_AS(ExtRational(1, 2).conjugate(), std::domain_error);
}

TEST_CASE("max/min and ordering") {
  CHECK(max(ExtRational(1, 4), ExtRational(1, 3)) == ExtRational(1, 3));
  CHECK(min(ExtRational(1, 4), ExtRational::inf()) == ExtRational(1, 4));
  CHECK(ExtRational(-1) < ExtRational(0));
  CHECK(ExtRational(2, 3) <= ExtRational(2, 3));
}
