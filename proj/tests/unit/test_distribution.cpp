#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chronoface/distribution.hpp"
#include "chronoface/errors.hpp"
#include "chronoface/logspace.hpp"

using namespace chronoface;

namespace {
DiscreteDistribution point(int start, int at, int len) {
  std::vector<double> w(static_cast<std::size_t>(len), 0.0);
  w[static_cast<std::size_t>(at - start)] = 1.0;
  return DiscreteDistribution::from_weights(start, w);
}
}  // namespace

TEST_CASE("factories normalize and reject bad input") {
  const DiscreteDistribution d =
      DiscreteDistribution::from_weights(10, std::vector<double>{1.0, 3.0});
  CHECK(d.support_start() == 10);
  CHECK(d.support_end() == 11);
  CHECK(d.size() == 2);
  CHECK(d.at(10) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d.at(11) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(d.is_normalized());

  CHECK_THROWS_AS(
      DiscreteDistribution::from_weights(0, std::vector<double>{}), Error);
  CHECK_THROWS_AS(
      DiscreteDistribution::from_weights(0, std::vector<double>{0.0, 0.0}),
      AllZeroMassError);
  CHECK_THROWS_AS(
      DiscreteDistribution::from_weights(0, std::vector<double>{-1.0, 2.0}),
      Error);
  CHECK_THROWS_AS(DiscreteDistribution::from_log_weights(
                      0, std::vector<double>{kNegInf, kNegInf}),
                  AllZeroMassError);
}

TEST_CASE("mass lookups outside the support") {
  const DiscreteDistribution d =
      DiscreteDistribution::from_weights(2000, std::vector<double>{1.0, 1.0});
  CHECK(d.at(1999) == 0.0);
  CHECK(d.at(2002) == 0.0);
  CHECK(d.log_at(1999) == kNegInf);
  CHECK(d.log_at(2000) == d.log_mass()[0]);
}

TEST_CASE("point age shifts to a point year") {
  // A certain age of 25 with birth year 1949 forces the capture year 1974.
  const YearSupport support{1890, 2030};
  const DiscreteDistribution age = point(0, 25, 100);
  const ShiftedDistribution s = shift_distribution(age, 1949, support);
  CHECK_FALSE(s.uninformative);
  CHECK(s.dist.at(1974) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.dist.argmax() == 1974);
  CHECK(s.dist.median() == 1974);
  CHECK(s.dist.log_at(1973) == kNegInf);
  CHECK(s.dist.log_at(1975) == kNegInf);
}

TEST_CASE("shift keeps relative masses over the overlap") {
  const YearSupport support{1890, 2030};
  const DiscreteDistribution age =
      DiscreteDistribution::from_weights(30, std::vector<double>{0.2, 0.5, 0.3});
  const ShiftedDistribution s = shift_distribution(age, 1940, support);
  CHECK_FALSE(s.uninformative);
  CHECK(s.dist.at(1970) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(s.dist.at(1971) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.dist.at(1972) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(s.dist.is_normalized());
}

TEST_CASE("shift renormalizes a partially clipped posterior") {
  // Support cuts off everything after 2030; only ages 88..90 of a
  // 1940-born subject land inside a 2028..2030 window.
  const YearSupport support{2028, 2030};
  const DiscreteDistribution age = DiscreteDistribution::from_weights(
      85, std::vector<double>{0.1, 0.1, 0.2, 0.2, 0.2, 0.2});
  // ages 85..90 -> years 2025..2030; overlap is 2028..2030 = ages 88,89,90.
  const ShiftedDistribution s = shift_distribution(age, 1940, support);
  CHECK_FALSE(s.uninformative);
  CHECK(s.dist.at(2028) == doctest::Approx(0.2 / 0.6).epsilon(1e-12));
  CHECK(s.dist.at(2029) == doctest::Approx(0.2 / 0.6).epsilon(1e-12));
  CHECK(s.dist.at(2030) == doctest::Approx(0.2 / 0.6).epsilon(1e-12));
}

TEST_CASE("shift with no overlap degrades to flagged uniform") {
  const YearSupport support{1890, 1970};
  const DiscreteDistribution age = point(0, 10, 20);
  // Born 2000, age <= 19: years 2000..2019 never touch 1890..1970.
  const ShiftedDistribution s = shift_distribution(age, 2000, support);
  CHECK(s.uninformative);
  CHECK(s.dist.size() == 81);
  CHECK(s.dist.at(1890) == doctest::Approx(1.0 / 81.0).epsilon(1e-12));
  CHECK(s.dist.at(1970) == doctest::Approx(1.0 / 81.0).epsilon(1e-12));
}

TEST_CASE("uniform_distribution spreads mass evenly") {
  const DiscreteDistribution u = uniform_distribution(YearSupport{1890, 1970});
  CHECK(u.size() == 81);
  for (int y = 1890; y <= 1970; ++y)
    CHECK(u.at(y) == doctest::Approx(1.0 / 81.0).epsilon(1e-13));
  CHECK(u.is_normalized());
}

TEST_CASE("median conventions") {
  // CDF reaches 0.5 exactly at 1995: {1990: .2, 1995: .3, 2000: .5}.
  const DiscreteDistribution d = DiscreteDistribution::from_weights(
      1990, std::vector<double>{0.2, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0,
                                0.0, 0.5});
  CHECK(d.median() == 1995);
  // Two-point uniform: the exact-tie slack selects the earlier point.
  const DiscreteDistribution two =
      DiscreteDistribution::from_weights(7, std::vector<double>{1.0, 1.0});
  CHECK(two.median() == 7);
  // Strictly increasing CDF crosses one half mid-support.
  const DiscreteDistribution tri =
      DiscreteDistribution::from_weights(0, std::vector<double>{0.4, 0.4, 0.2});
  CHECK(tri.median() == 1);
  const DiscreteDistribution skew =
      DiscreteDistribution::from_weights(0, std::vector<double>{0.9, 0.1});
  CHECK(skew.median() == 0);
}

TEST_CASE("argmax takes the earliest maximum") {
  const DiscreteDistribution d = DiscreteDistribution::from_weights(
      100, std::vector<double>{0.1, 0.3, 0.3, 0.2, 0.1});
  CHECK(d.argmax() == 101);
  const DiscreteDistribution u = uniform_distribution(YearSupport{5, 9});
  CHECK(u.argmax() == 5);
}

TEST_CASE("total variation distance") {
  const DiscreteDistribution a =
      DiscreteDistribution::from_weights(0, std::vector<double>{1.0, 0.0});
  const DiscreteDistribution b =
      DiscreteDistribution::from_weights(0, std::vector<double>{0.0, 1.0});
  CHECK(total_variation(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(total_variation(a, a) == 0.0);
  const DiscreteDistribution c =
      DiscreteDistribution::from_weights(0, std::vector<double>{0.75, 0.25});
  CHECK(total_variation(a, c) == doctest::Approx(0.25).epsilon(1e-12));
  const DiscreteDistribution other_support =
      DiscreteDistribution::from_weights(1, std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(total_variation(a, other_support), Error);
}

TEST_CASE("normalization survives extreme log weights") {
  std::vector<double> logw{-1000.0, -1001.0, -999.0};
  const DiscreteDistribution d = DiscreteDistribution::from_log_weights(0, logw);
  CHECK(d.is_normalized());
  // Shift invariance: the same weights moved near zero give the same masses.
  std::vector<double> logw2{-1.0, -2.0, 0.0};
  const DiscreteDistribution d2 =
      DiscreteDistribution::from_log_weights(0, logw2);
  for (int i = 0; i < 3; ++i)
    CHECK(d.at(i) == doctest::Approx(d2.at(i)).epsilon(1e-12));
}

TEST_CASE("round trip through log weights is the identity") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  std::vector<double> w(11);
  for (double& x : w) x = u(gen);
  const DiscreteDistribution d = DiscreteDistribution::from_weights(1900, w);
  const DiscreteDistribution again =
      DiscreteDistribution::from_log_weights(1900, d.log_mass());
  // Already-normalized input: renormalizing must not move anything.
  for (int y = 1900; y <= 1910; ++y)
    CHECK(d.at(y) == doctest::Approx(again.at(y)).epsilon(1e-14));
}
