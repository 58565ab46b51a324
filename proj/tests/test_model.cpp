#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "doctest.h"
#include "sfr/ieeeg1.hpp"
#include "sfr/model.hpp"
#include "sfr/rk4.hpp"
#include "test_util.hpp"

using namespace sfr;

namespace {

UnitRecord make_sg(const std::string& id, double rating, SgParams params) {
  UnitRecord u;
  u.id = id;
  u.kind = UnitKind::SynchronousGenerator;
  u.rating = rating;
  u.sg_params = params;
  return u;
}

UnitRecord make_ibr(const std::string& id, double rating, FfrPortfolio ffr) {
  UnitRecord u;
  u.id = id;
  u.kind = UnitKind::InverterResource;
  u.rating = rating;
  u.ffr = ffr;
  return u;
}

const SgParams kSg{4.0, 1.0, 0.05, 0.3, 10.0};

// Independent eigenvalue oracle for the 2x2 linear part.
std::complex<double> upper_eigenvalue(const std::array<double, 4>& m) {
  const double tr = m[0] + m[3];
  const double det = m[0] * m[3] - m[1] * m[2];
  const double disc = tr * tr - 4.0 * det;
  REQUIRE(disc < 0.0);  // underdamped cases only
  return {tr / 2.0, std::sqrt(-disc) / 2.0};
}

}  // namespace

TEST_CASE("aggregate_fleet identity and weighted sums") {
  SUBCASE("single SG on its own base") {
    std::vector<UnitRecord> fleet{make_sg("g", 1000.0, kSg)};
    const AggregateSfr agg = aggregate_fleet(fleet, 1000.0, 60.0);
    CHECK(agg.h_sigma == 4.0);
    CHECK(agg.d_sigma == 1.0);
    CHECK(agg.r_g == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(agg.t_1 == 0.3);
    CHECK(agg.t_g == 10.0);
  }

  SUBCASE("SG inertia plus emulated inertia") {
    std::vector<UnitRecord> fleet{
        make_sg("g", 1500.0, kSg),
        make_ibr("b", 1000.0, {.derivative = DerivativeFfr{4.0}})};
    const AggregateSfr agg = aggregate_fleet(fleet, 2500.0, 60.0);
    CHECK(agg.h_sigma == doctest::Approx(4.0).epsilon(1e-15));
  }

  SUBCASE("droop FFR absorbed into damping") {
    std::vector<UnitRecord> fleet{
        make_sg("g", 1000.0, kSg),
        make_ibr("b", 1000.0, {.proportional = ProportionalFfr{0.03}})};
    const AggregateSfr agg = aggregate_fleet(fleet, 1000.0, 60.0);
    CHECK(agg.d_sigma == 1.0 + 1.0 / 0.03);
  }
}

TEST_CASE("absorption identity is bit-exact") {
  std::vector<UnitRecord> sg_only{make_sg("g1", 800.0, kSg), make_sg("g2", 700.0, kSg)};
  std::vector<UnitRecord> with_ibr = sg_only;
  with_ibr.push_back(make_ibr("p", 500.0, {.proportional = ProportionalFfr{0.03}}));
  with_ibr.push_back(make_ibr("d", 700.0, {.derivative = DerivativeFfr{3.0}}));

  const double s_base = 2000.0;
  const AggregateSfr full = aggregate_fleet(with_ibr, s_base, 60.0);
  AggregateSfr manual = aggregate_fleet(sg_only, s_base, 60.0);
  manual.d_sigma += (500.0 / s_base) / 0.03;
  manual.h_sigma += 3.0 * (700.0 / s_base);

  CHECK(full.d_sigma == manual.d_sigma);
  CHECK(full.h_sigma == manual.h_sigma);
  CHECK(full.r_g == manual.r_g);
  CHECK(full.t_1 == manual.t_1);
  CHECK(full.t_g == manual.t_g);
}

TEST_CASE("per-unit fields are invariant under common rescaling") {
  std::vector<UnitRecord> fleet{
      make_sg("g1", 800.0, kSg), make_sg("g2", 1300.0, {5.0, 0.8, 0.04, 0.2, 8.0}),
      make_ibr("b", 500.0, {.proportional = ProportionalFfr{0.05},
                            .derivative = DerivativeFfr{2.0}})};
  const AggregateSfr base = aggregate_fleet(fleet, 2600.0, 60.0);
  for (UnitRecord& u : fleet) u.rating *= 7.0;
  const AggregateSfr scaled = aggregate_fleet(fleet, 7.0 * 2600.0, 60.0);
  CHECK(scaled.h_sigma == doctest::Approx(base.h_sigma).epsilon(1e-14));
  CHECK(scaled.d_sigma == doctest::Approx(base.d_sigma).epsilon(1e-14));
  CHECK(scaled.r_g == doctest::Approx(base.r_g).epsilon(1e-14));
  CHECK(scaled.t_1 == doctest::Approx(base.t_1).epsilon(1e-14));
  CHECK(scaled.t_g == doctest::Approx(base.t_g).epsilon(1e-14));
}

TEST_CASE("aggregate_fleet error paths") {
  std::vector<UnitRecord> no_sg{
      make_ibr("b", 500.0, {.proportional = ProportionalFfr{0.03}})};
  CHECK_THROWS_WITH_AS(static_cast<void>(aggregate_fleet(no_sg, 500.0, 60.0)),
                       doctest::Contains("NoSynchronousGeneration"), Error);

  std::vector<UnitRecord> bad_h{make_sg("g", 1000.0, {-1.0, 1.0, 0.05, 0.3, 10.0})};
  CHECK_THROWS_AS(static_cast<void>(aggregate_fleet(bad_h, 1000.0, 60.0)), Error);

  std::vector<UnitRecord> lead_dominant{
      make_sg("g", 1000.0, {4.0, 1.0, 0.05, 12.0, 10.0})};
  CHECK_THROWS_AS(static_cast<void>(aggregate_fleet(lead_dominant, 1000.0, 60.0)),
                  Error);

  std::vector<UnitRecord> ok{make_sg("g", 1000.0, kSg)};
  CHECK_THROWS_AS(static_cast<void>(aggregate_fleet(ok, -5.0, 60.0)), Error);
}

TEST_CASE("collect_step_ffr") {
  SUBCASE("no step members gives the zero StepFfr") {
    std::vector<UnitRecord> fleet{
        make_sg("g", 1000.0, kSg),
        make_ibr("b", 500.0, {.proportional = ProportionalFfr{0.03}})};
    const StepFfr total = collect_step_ffr(fleet, 1500.0);
    CHECK(total.p_sus == 0.0);
  }

  SUBCASE("100 MW on a 2500 MVA base is 0.04 p.u.") {
    // p_sus = 0.1 p.u. on the unit's 1000 MVA rating = 100 MW.
    std::vector<UnitRecord> fleet{
        make_ibr("b", 1000.0, {.step = StepFfr{0.1, 0.05, 0.35}})};
    const StepFfr total = collect_step_ffr(fleet, 2500.0);
    CHECK(total.p_sus == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(total.t_1 == 0.05);
    CHECK(total.t_2 == 0.35);
  }

  SUBCASE("step members add up") {
    std::vector<UnitRecord> fleet{
        make_ibr("b1", 1000.0, {.step = StepFfr{0.1, 0.05, 0.35}}),
        make_ibr("b2", 1000.0, {.step = StepFfr{0.1, 0.05, 0.35}})};
    CHECK(collect_step_ffr(fleet, 1000.0).p_sus ==
          doctest::Approx(0.2).epsilon(1e-15));
  }

  SUBCASE("heterogeneous timing is rejected") {
    std::vector<UnitRecord> fleet{
        make_ibr("b1", 1000.0, {.step = StepFfr{0.1, 0.05, 0.35}}),
        make_ibr("b2", 1000.0, {.step = StepFfr{0.1, 0.05, 0.40}})};
    CHECK_THROWS_WITH_AS(static_cast<void>(collect_step_ffr(fleet, 1000.0)),
                         doctest::Contains("HeterogeneousStepTiming"), Error);
  }
}

TEST_CASE("characteristics: direct substitution") {
  const AggregateSfr agg{4.0, 1.0, 0.05, 0.0, 10.0, 60.0, 1000.0};
  const SecondOrderCharacteristics c = characteristics(agg);
  CHECK(c.omega_n == doctest::Approx(std::sqrt(21.0 / 80.0)).epsilon(1e-14));
  CHECK(c.omega_d == doctest::Approx(c.omega_n * std::sqrt(1.0 - c.zeta * c.zeta))
                         .epsilon(1e-15));
  CHECK(c.phi == doctest::Approx(std::acos(c.zeta)).epsilon(1e-15));
  CHECK(c.phi > 0.0);
  CHECK(c.phi < M_PI / 2.0);
}

TEST_CASE("characteristics: 2 zeta w_n equals the expanded pole-polynomial trace") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const AggregateSfr agg = sfr_test::sample_underdamped_aggregate(rng);
    const SecondOrderCharacteristics c = characteristics(agg);
    const double expected = 1.0 / agg.t_g +
                            (agg.d_sigma + (agg.t_1 / agg.t_g) / agg.r_g) /
                                (2.0 * agg.h_sigma);
    CHECK(2.0 * c.zeta * c.omega_n == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("characteristics poles match the state-matrix eigenvalues") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const AggregateSfr agg = sfr_test::sample_underdamped_aggregate(rng);
    const SecondOrderCharacteristics c = characteristics(agg);
    const std::complex<double> eig = upper_eigenvalue(state_matrix(agg));
    const std::complex<double> pole{-c.zeta * c.omega_n, c.omega_d};
    CHECK(std::abs(eig - pole) <= 1e-10 * std::abs(pole));
  }
}

TEST_CASE("characteristics rejects the overdamped regime") {
  const AggregateSfr agg{2.0, 40.0, 0.03, 0.0, 2.0, 60.0, 1000.0};
  CHECK_THROWS_WITH_AS(static_cast<void>(characteristics(agg)),
                       doctest::Contains("Overdamped"), Error);
}

TEST_CASE("IEEEG1 reduction helper") {
  Ieeeg1Params p;
  p.k_1 = 0.2;
  p.k_2 = p.k_3 = 0.4;
  p.t_4 = 0.3;
  p.t_5 = 10.0;
  p.t_6 = 0.6;
  const LeadLag ll = approximate_lead_lag(p);
  CHECK(ll.t_1 == 0.3);
  CHECK(ll.t_g == 10.0);
  p.t_5 = 0.0;
  CHECK_THROWS_AS(static_cast<void>(approximate_lead_lag(p)), Error);
}
