#include "doctest.h"

#include "oracles.hpp"

#include <orbistab/synthesis.hpp>

#include <cmath>
#include <random>

using namespace orbistab;

namespace {

constexpr double kJ = 0.0012;
const double kA1 = 0.0679 * 0.14 * 0.235 / kJ;
constexpr double kC2 = 0.052 * 0.15 * 0.15 + 1.17e-3;
constexpr double kC3 = 0.052 * 0.2 * 0.15;

MechanicalSystem furuta() {
  return furuta_system(0.0679, 0.14, 0.235, kJ, 0.0024);
}

MechanicalSystem pendubot() {
  return pendubot_system(0.2, 0.052, 0.2, 0.28, 0.13, 0.15, 3.38e-1, 1.17e-3);
}

SynthesisProfile furuta_profile(double k1 = 5.0, double g1 = 5.0,
                                double g2 = 5.0) {
  return make_profile(furuta(), furuta_generator(kA1, k1), furuta_s(kJ, k1),
                      g1, g2, {-1.4, 1.4});
}

SynthesisProfile pendubot_profile(double k2 = -1.0) {
  return make_profile(pendubot(), pendubot_generator(k2),
                      pendubot_s(kC2, kC3, k2), 5.0, 10.0,
                      {-M_PI, 3.0 * M_PI});
}

double fd(const std::function<double(double)>& f, double x) {
  const double h = 1e-6 * (1.0 + std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("generators satisfy their defining identities") {
  const MechanicalSystem fs = furuta();
  const Generator fg = furuta_generator(kA1, 5.0);
  const Profile fsv = furuta_s(kJ, 5.0);
  CHECK(fg.K(0.0) == 0.0);
  for (double x1 = -1.35; x1 <= 1.35; x1 += 0.11) {
    // s = m_uu + m_au * K' is what makes the velocity mapping work
    CHECK(fs.m_uu(x1) + fs.m_au(x1) * fg.dK(x1) ==
          doctest::Approx(fsv(x1)).epsilon(1e-10));
    CHECK(fg.dK(x1) == doctest::Approx(fd(fg.K, x1)).epsilon(1e-7));
    CHECK(fg.d2K(x1) == doctest::Approx(fd(fg.dK, x1)).epsilon(1e-7).scale(1.0));
  }

  const MechanicalSystem ps = pendubot();
  const Generator pg = pendubot_generator(-1.0);
  const Profile psv = pendubot_s(kC2, kC3, -1.0);
  CHECK(pg.K(0.0) == 0.0);
  CHECK(pg.d2K(1.234) == 0.0);
  for (double x1 = -3.0; x1 <= 9.0; x1 += 0.71) {
    CHECK(ps.m_uu(x1) + ps.m_au(x1) * pg.dK(x1) ==
          doctest::Approx(psv(x1)).epsilon(1e-10));
    CHECK(pg.dK(x1) == doctest::Approx(fd(pg.K, x1)).epsilon(1e-7));
  }
}

TEST_CASE("profile construction rejects bad inputs") {
  CHECK_THROWS_AS(make_profile(furuta(), furuta_generator(kA1, 5.0),
                               furuta_s(kJ, 5.0), 0.0, 5.0, {-1.4, 1.4}),
                  SynthesisError);
  CHECK_THROWS_AS(make_profile(furuta(), furuta_generator(kA1, 5.0),
                               furuta_s(kJ, 5.0), 5.0, -1.0, {-1.4, 1.4}),
                  SynthesisError);
  CHECK_THROWS_AS(furuta_generator(kA1, -2.0), SynthesisError);
  CHECK_THROWS_AS(pendubot_generator(0.0), SynthesisError);

  // a generator whose slope disagrees with its antiderivative is caught
  Generator broken;
  broken.name = "broken";
  broken.K = [](double x1) { return std::sin(x1); };
  broken.dK = [](double x1) { return 1.1 * std::cos(x1); };
  broken.d2K = [](double x1) { return -1.1 * std::sin(x1); };
  const MechanicalSystem fs = furuta();
  const Profile s = [&fs, &broken](double x1) {
    return fs.m_uu(x1) + fs.m_au(x1) * broken.dK(x1);
  };
  CHECK_THROWS_AS(make_profile(fs, broken, s, 5.0, 5.0, {-1.0, 1.0}),
                  SynthesisError);

  // s must not vanish inside the operating range
  const MechanicalSystem fs2 = furuta();
  CHECK_THROWS_AS(
      make_profile(fs2, generator_from_s(fs2, [](double x1) { return 0.0012 * std::cos(2.0 * x1); },
                                        nullptr, {-0.8, 0.8}),
                   [](double x1) { return 0.0012 * std::cos(2.0 * x1); }, 5.0,
                   5.0, {-0.8, 0.8}),
      SynthesisError);
}

TEST_CASE("target mass and potential match independent quadrature") {
  const SynthesisProfile fp = furuta_profile();
  for (double x1 : {-1.2, -0.6, 0.35, 0.9, 1.3}) {
    CHECK(fp.mass(x1) ==
          doctest::Approx(oracles::target_mass(fp, x1)).epsilon(1e-7));
    CHECK(fp.potential(x1) ==
          doctest::Approx(oracles::target_potential(fp, x1)).epsilon(1e-6));
  }
  // x1 = 0 falls between table nodes, so the anchor is only exact up to
  // one interpolation residue
  CHECK(fp.mass(0.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(fp.potential(0.0)) < 1e-10);

  // slopes are consistent with the tabulated values
  for (double x1 : {-0.9, 0.2, 1.1}) {
    CHECK(fp.dmass(x1) ==
          doctest::Approx(fd([&fp](double y) { return fp.mass(y); }, x1))
              .epsilon(1e-6));
    CHECK(fp.dpotential(x1) ==
          doctest::Approx(fd([&fp](double y) { return fp.potential(y); }, x1))
              .epsilon(1e-6));
  }

  const SynthesisProfile pp = pendubot_profile();
  for (double x1 : {0.5, 2.0, M_PI, 5.0}) {
    CHECK(pp.mass(x1) ==
          doctest::Approx(oracles::target_mass(pp, x1)).epsilon(1e-7));
    CHECK(pp.potential(x1) ==
          doctest::Approx(oracles::target_potential(pp, x1)).epsilon(1e-6));
  }
}

TEST_CASE("two-link target mass has a closed form") {
  // with K' = 1 the mass integrand telescopes to a pure ratio of s values
  const SynthesisProfile pp = pendubot_profile();
  const double s0 = 2.0 * kC2 + kC3;
  for (double x1 : {-1.0, 0.7, 2.5, M_PI, 6.0}) {
    const double expect = (s0 * s0) / ((2.0 * kC2 + kC3 * std::cos(x1)) *
                                       (2.0 * kC2 + kC3 * std::cos(x1)));
    CHECK(pp.mass(x1) == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("control law agrees between its two computations") {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> ang(-1.2, 1.2), vel(-3.0, 3.0);
  const SynthesisProfile fp = furuta_profile();
  for (int i = 0; i < 200; ++i) {
    const State4 x{ang(rng), ang(rng), vel(rng), vel(rng)};
    const double direct = control_u(fp, x);
    const double two_step = v_control(fp, x, off_manifold(fp, x));
    CHECK(direct == doctest::Approx(two_step).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("immersion and off-manifold deviation are inverse") {
  const SynthesisProfile fp = furuta_profile();
  for (double xi1 : {-1.0, -0.3, 0.0, 0.8}) {
    for (double xi2 : {-2.0, 0.0, 1.5}) {
      const State4 x = immersion(fp, {xi1, xi2});
      CHECK(x.x1 == xi1);
      CHECK(x.x3 == xi2);
      CHECK(x.x2 == doctest::Approx(fp.generator().K(xi1)).scale(1.0));
      const Eigen::Vector2d z = off_manifold(fp, x);
      CHECK(std::abs(z[0]) < 1e-13);
      CHECK(std::abs(z[1]) < 1e-13);
    }
  }
}

TEST_CASE("the mapping guard refuses states where s vanishes") {
  const MechanicalSystem fs = furuta();
  const Profile s = [](double x1) { return 0.0012 * std::cos(2.0 * x1); };
  const SynthesisProfile p =
      make_profile(fs, generator_from_s(fs, s, nullptr, {-0.7, 0.7}), s, 5.0,
                   5.0, {-0.7, 0.7});
  CHECK_THROWS_AS(p.s_checked(M_PI / 4.0), SingularityError);
  CHECK_THROWS_AS(control_u(p, {M_PI / 4.0, 0.0, 0.0, 0.0}),
                  SingularityError);
  CHECK(p.s_checked(0.0) == doctest::Approx(0.0012));
}

TEST_CASE("generator from a mapping reproduces the rotary-arm closed form") {
  const MechanicalSystem fs = furuta();
  const double k1 = 5.0;
  const Generator direct = furuta_generator(kA1, k1);
  const Generator derived = generator_from_s(
      fs, [k1](double) { return -kJ * k1; }, [](double) { return 0.0; },
      {-1.4, 1.4});
  for (double x1 = -1.3; x1 <= 1.3; x1 += 0.173) {
    CHECK(derived.K(x1) == doctest::Approx(direct.K(x1)).epsilon(1e-9));
    CHECK(derived.dK(x1) == doctest::Approx(direct.dK(x1)).epsilon(1e-10));
    CHECK(derived.d2K(x1) ==
          doctest::Approx(direct.d2K(x1)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("potential minima organize the wells") {
  const SynthesisProfile fp = furuta_profile();
  const auto fmin = find_potential_minima(fp, {-1.4, 1.4});
  REQUIRE(fmin.size() == 1);
  CHECK(std::abs(fmin[0].x1) < 1e-8);
  CHECK(fmin[0].is_minimum());
  CHECK(std::abs(fmin[0].U) < 1e-10);

  const SynthesisProfile pp = pendubot_profile();
  const auto pmin = find_potential_minima(pp, {0.0, 2.0 * M_PI});
  REQUIRE(!pmin.empty());
  bool found_pi = false;
  for (const auto& m : pmin)
    if (std::abs(m.x1 - M_PI) < 1e-6 && m.is_minimum()) found_pi = true;
  CHECK(found_pi);
}
