#include <catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace hyperdyn;
using Catch::Approx;

namespace {

MobiusMap random_map(std::mt19937_64& rng) {
  for (;;) {
    const cplx a = testing::random_point(rng), b = testing::random_point(rng);
    const cplx c = testing::random_point(rng), d = testing::random_point(rng);
    if (std::abs(a * d - b * c) > 0.1) return MobiusMap::from_entries(a, b, c, d);
  }
}

double entry_distance_up_to_sign(const MobiusMap& f, const MobiusMap& g) {
  auto dist = [&](double s) {
    return std::max({std::abs(f.a() - s * g.a()), std::abs(f.b() - s * g.b()), std::abs(f.c() - s * g.c()),
                     std::abs(f.d() - s * g.d())});
  };
  return std::min(dist(1.0), dist(-1.0));
}

}  // namespace

TEST_CASE("composition with the inverse is the identity up to sign", "[moebius]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const MobiusMap g = random_map(rng);
    CHECK(entry_distance_up_to_sign(compose(g, g.inverse()), MobiusMap::identity()) < 1e-10);
  }
}

TEST_CASE("translations compose by adding", "[moebius]") {
  const MobiusMap t1 = MobiusMap::from_entries(1, 1, 0, 1);
  const MobiusMap t2 = compose(t1, t1);
  CHECK(t2.a() == cplx{1.0});
  CHECK(t2.b() == cplx{2.0});
  CHECK(t2.c() == cplx{0.0});
  CHECK(t2.d() == cplx{1.0});
}

TEST_CASE("identity fixes points and infinity", "[moebius]") {
  const MobiusMap id = MobiusMap::identity();
  CHECK(apply(id, ProjectivePoint(cplx{0.3, -2.0})) == ProjectivePoint(cplx{0.3, -2.0}));
  CHECK(apply(id, ProjectivePoint::infinity()).is_infinite());
}

TEST_CASE("pairing map sends infinity to the target center and 0 to the expected point", "[moebius]") {
  const MobiusMap g = pairing_map({{-2.0, 0.0}, 1.0}, {{2.0, 0.0}, 1.0}, 0.0);
  const ProjectivePoint at_inf = apply(g, ProjectivePoint::infinity());
  REQUIRE_FALSE(at_inf.is_infinite());
  CHECK(std::abs(at_inf.value() - cplx{2.0}) < 1e-14);
  CHECK(std::abs(apply(g, ProjectivePoint(cplx{0.0})).value() - cplx{2.5}) < 1e-14);
  CHECK(apply(g, ProjectivePoint(cplx{-2.0})).is_infinite());
}

TEST_CASE("derivative in log-polar form", "[moebius]") {
  const LogPolar id = derivative_log_polar(MobiusMap::identity(), cplx{0.4, 0.1});
  CHECK(id.logmod == 0.0);
  CHECK(id.arg == 0.0);

  // z -> 2 + i / (z + 2) at z = 0: derivative -i / 4.
  const MobiusMap g = pairing_map({{-2.0, 0.0}, 1.0}, {{2.0, 0.0}, 1.0}, kPi / 2);
  const LogPolar d = derivative_log_polar(g, 0.0);
  CHECK(d.logmod == Approx(-std::log(4.0)).margin(1e-12));
  CHECK(d.arg == Approx(-kPi / 2).margin(1e-12));

  // z -> 4 z.
  const MobiusMap dil = MobiusMap::from_entries(2.0, 0.0, 0.0, 0.5);
  for (cplx z : {cplx{0.0}, cplx{1.0, 1.0}, cplx{-7.0, 3.0}}) {
    const LogPolar e = derivative_log_polar(dil, z);
    CHECK(e.logmod == Approx(std::log(4.0)).margin(1e-14));
    CHECK(e.arg == 0.0);
  }
}

TEST_CASE("pairing maps boundary circles onto boundary circles", "[moebius][property]") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> rad(0.2, 1.5), tw(-kPi, kPi);
  for (int trial = 0; trial < 50; ++trial) {
    const Disk src{testing::random_point(rng, 5.0), rad(rng)};
    Disk tgt{testing::random_point(rng, 5.0), rad(rng)};
    if (src.gap(tgt) < 0.1) continue;
    const MobiusMap g = pairing_map(src, tgt, tw(rng));
    for (int t = 0; t < 64; ++t) {
      const cplx z = src.boundary_point(kTwoPi * t / 64);
      CHECK(std::abs(std::abs(apply_finite(g, z) - tgt.center) - tgt.radius) < 1e-9 * std::max(1.0, tgt.radius));
    }
    // Exterior points land inside the target.
    const cplx far = src.center + std::polar(src.radius * 3.0, 0.3);
    CHECK(tgt.contains(apply_finite(g, far)));
  }
}

TEST_CASE("pairing map contracts exterior points as r r' / |z - c|^2", "[moebius]") {
  const Disk src{{-2.0, 0.0}, 1.0}, tgt{{2.0, 0.0}, 1.0};
  const MobiusMap g = pairing_map(src, tgt, kPi / 2);
  for (cplx z : {cplx{2.0, 0.0}, cplx{1.5, 0.5}, cplx{0.0, 3.0}}) {
    const double oracle = src.radius * tgt.radius / std::norm(z - src.center);
    CHECK(std::abs(derivative(g, z)) == Approx(oracle).epsilon(1e-13));
    CHECK(derivative_log_polar(g, z).logmod < 0.0);
  }
}

TEST_CASE("loxodromic invariants from the trace", "[moebius]") {
  const LoxodromicData a = loxodromic_from_trace(2.0 * std::cosh(1.0));
  CHECK(a.length == Approx(2.0).margin(1e-12));
  CHECK(a.holonomy == Approx(0.0).margin(1e-12));

  // lambda = i e: trace = i e + 1/(i e) = 2 i sinh 1.
  const LoxodromicData b = loxodromic_from_trace(cplx{0.0, 2.0 * std::sinh(1.0)});
  CHECK(b.length == Approx(2.0).margin(1e-12));
  CHECK(std::abs(b.holonomy) == Approx(kPi).margin(1e-12));

  CHECK_THROWS_AS(loxodromic_from_trace(2.0), GeometryError);
  CHECK_THROWS_AS(loxodromic_from_trace(cplx{1.0, 0.0}), GeometryError);
}

TEST_CASE("normalized maps have unit determinant and a canonical sign", "[moebius][property]") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const MobiusMap g = random_map(rng);
    CHECK(std::abs(g.determinant() - cplx{1.0}) < 1e-12);
    cplx first{};
    for (cplx e : {g.a(), g.b(), g.c(), g.d()}) {
      if (e != cplx{}) {
        first = e;
        break;
      }
    }
    const double arg = std::arg(first);
    CHECK(arg > -kPi / 2);
    CHECK(arg <= kPi / 2);
  }
  CHECK_THROWS_AS(MobiusMap::from_entries(1, 2, 2, 4), GeometryError);
}

TEST_CASE("composition is associative up to sign", "[moebius][property]") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const MobiusMap f = random_map(rng), g = random_map(rng), h = random_map(rng);
    const MobiusMap left = compose(compose(f, g), h);
    const MobiusMap right = compose(f, compose(g, h));
    const double scale = std::max({std::abs(left.a()), std::abs(left.b()), std::abs(left.c()), std::abs(left.d())});
    CHECK(entry_distance_up_to_sign(left, right) < 1e-10 * std::max(1.0, scale));
  }
}

TEST_CASE("chain rule for log-polar derivatives", "[moebius][property]") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 300; ++i) {
    const MobiusMap f = random_map(rng), g = random_map(rng);
    const cplx z = testing::random_point(rng);
    const cplx gz = apply_finite(g, z);
    if (std::abs(g.c() * z + g.d()) < 1e-3 || std::abs(f.c() * gz + f.d()) < 1e-3) continue;
    const LogPolar whole = derivative_log_polar(compose(f, g), z);
    const LogPolar outer = derivative_log_polar(f, gz);
    const LogPolar inner = derivative_log_polar(g, z);
    CHECK(whole.logmod == Approx(outer.logmod + inner.logmod).margin(1e-9));
    CHECK(std::abs(fold_angle(whole.arg - outer.arg - inner.arg)) < 1e-9);
  }
}

TEST_CASE("trace invariants are conjugation invariant", "[moebius][property]") {
  std::mt19937_64 rng(17);
  int checked = 0;
  while (checked < 200) {
    const MobiusMap g = random_map(rng), h = random_map(rng);
    const cplx tr = g.trace();
    if (std::abs(tr * tr - 4.0) < 0.5) continue;
    const LoxodromicData a = loxodromic_data(g);
    const LoxodromicData b = loxodromic_data(compose(compose(h, g), h.inverse()));
    CHECK(a.length == Approx(b.length).margin(1e-9));
    CHECK(std::abs(fold_angle(a.holonomy - b.holonomy)) < 1e-9);
    ++checked;
  }
}

TEST_CASE("angles are folded into (-pi, pi]", "[moebius][property]") {
  CHECK(fold_angle(kPi) == Approx(kPi));
  CHECK(fold_angle(-kPi) == Approx(kPi));
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const double f = fold_angle(x);
    CHECK(f > -kPi);
    CHECK(f <= kPi);
    CHECK(std::abs(std::remainder(f - x, kTwoPi)) < 1e-12);
  }
  std::mt19937_64 rng2(23);
  for (int i = 0; i < 200; ++i) {
    const MobiusMap g = random_map(rng2);
    const LogPolar d = derivative_log_polar(g, testing::random_point(rng2));
    CHECK(d.arg > -kPi);
    CHECK(d.arg <= kPi);
  }
}
