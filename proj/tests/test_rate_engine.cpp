#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "csl/errors.hpp"
#include "csl/rate_engine.hpp"
#include "helpers.hpp"

using namespace csl;
using helpers::at;
using helpers::conf;
using helpers::nucleon_at;

namespace {

const CollapseParams unit_params(1.0, 1.0);

// lambda m^2 (1 - e^{-d^2 / 4 r_c^2}): closed form for one particle of mass
// m displaced by d.
double one_particle_rate(double m, double d, const CollapseParams& p) {
  double r = d / p.r_c();
  return p.lambda() * m * m * (1.0 - std::exp(-0.25 * r * r));
}

Superposition displaced_nucleon(double d) {
  return Superposition::equal_weights(conf({nucleon_at({0, 0, 0})}),
                                      conf({nucleon_at({d, 0, 0})}));
}

// N tightly packed nucleons around `center`, jitter well below r_c.
std::vector<Particle> tight_cluster(std::size_t n, Vec3 center, double jitter,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<Particle> ps;
  ps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ps.push_back(nucleon_at({center.x + u(rng), center.y + u(rng), center.z + u(rng)}));
  }
  return ps;
}

}  // namespace

TEST_CASE("identical components decohere at rate zero") {
  std::mt19937_64 rng(3);
  auto ps = helpers::random_cloud(30, 8.0, {0, 0, 0}, rng);
  auto sup = Superposition::equal_weights(conf(ps), conf(ps));
  auto r = gamma_exact(sup, unit_params);
  CHECK(r.method == RateMethod::exact_pairwise);
  CHECK(r.rate == 0.0);
  // Cancellation noise stays far below the natural scale lambda N^2.
  CHECK(std::abs(r.raw_rate) <= 1e-10 * unit_params.lambda() * 30.0 * 30.0);
}

TEST_CASE("empty components decohere at rate zero") {
  auto sup = Superposition::equal_weights(Configuration{}, Configuration{});
  CHECK(gamma_exact(sup, unit_params).rate == 0.0);
}

TEST_CASE("single displaced nucleon matches the closed form") {
  for (double d : {0.3, 1.0, 2.5, 10.0}) {
    auto r = gamma_exact(displaced_nucleon(d), unit_params);
    CHECK(r.rate == doctest::Approx(one_particle_rate(1.0, d, unit_params)).epsilon(1e-12));
  }
  // Far displacement saturates at lambda.
  auto far = gamma_exact(displaced_nucleon(10.0), unit_params);
  CHECK(far.rate == doctest::Approx(unit_params.lambda()).epsilon(1e-10));
}

TEST_CASE("rate scales with the squared mass ratio") {
  auto sup = Superposition::equal_weights(conf({at({0, 0, 0}, 23.0, "Na")}),
                                          conf({at({5, 0, 0}, 23.0, "Na")}));
  auto r = gamma_exact(sup, unit_params);
  CHECK(r.rate == doctest::Approx(one_particle_rate(23.0, 5.0, unit_params)).epsilon(1e-12));
  CHECK(r.rate == doctest::Approx(529.0 * gamma_exact(displaced_nucleon(5.0), unit_params).rate)
                      .epsilon(1e-12));
}

TEST_CASE("rate grows monotonically with separation") {
  double prev = -1.0;
  for (double d : {0.1, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    double rate = gamma_exact(displaced_nucleon(d), unit_params).rate;
    CHECK(rate > prev);
    prev = rate;
  }
}

TEST_CASE("rigid cluster displaced far picks up the N^2 enhancement") {
  std::mt19937_64 rng(17);
  auto cluster = tight_cluster(20, {0, 0, 0}, 0.01, rng);
  auto moved = cluster;
  for (auto& p : moved) p.pos.x += 10.0;
  auto sup = Superposition::equal_weights(conf(cluster), conf(moved));
  auto r = gamma_exact(sup, unit_params);
  CHECK(r.rate == doctest::Approx(400.0 * unit_params.lambda()).epsilon(0.01));
}

TEST_CASE("rate is symmetric and geometry invariant") {
  std::mt19937_64 rng(23);
  auto pa = helpers::random_cloud(12, 4.0, {0, 0, 0}, rng);
  auto pb = helpers::random_cloud(12, 4.0, {1.5, 0.5, -1.0}, rng);
  auto sup = Superposition::equal_weights(conf(pa), conf(pb));
  double base = gamma_exact(sup, unit_params).rate;

  SUBCASE("branch swap") {
    auto swapped = Superposition::equal_weights(conf(pb), conf(pa));
    CHECK(gamma_exact(swapped, unit_params).rate == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("particle order within a branch") {
    auto shuffled = pb;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto sup2 = Superposition::equal_weights(conf(pa), conf(shuffled));
    CHECK(gamma_exact(sup2, unit_params).rate == doctest::Approx(base).epsilon(1e-12));
  }

  SUBCASE("rigid translation of both branches") {
    Vec3 t{42.0, -17.0, 3.0};
    auto ta = pa;
    auto tb = pb;
    for (auto& p : ta) p.pos = p.pos + t;
    for (auto& p : tb) p.pos = p.pos + t;
    auto sup2 = Superposition::equal_weights(conf(ta), conf(tb));
    CHECK(gamma_exact(sup2, unit_params).rate == doctest::Approx(base).epsilon(1e-9));
  }

  SUBCASE("rigid rotation of both branches") {
    // Rotation by 0.7 rad about z.
    double c = std::cos(0.7), s = std::sin(0.7);
    auto rot = [&](Vec3 v) { return Vec3{c * v.x - s * v.y, s * v.x + c * v.y, v.z}; };
    auto ra = pa;
    auto rb = pb;
    for (auto& p : ra) p.pos = rot(p.pos);
    for (auto& p : rb) p.pos = rot(p.pos);
    auto sup2 = Superposition::equal_weights(conf(ra), conf(rb));
    CHECK(gamma_exact(sup2, unit_params).rate == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("branches with different particle content are rejected") {
  auto a = conf({nucleon_at({0, 0, 0}), nucleon_at({1, 0, 0}), at({2, 0, 0}, 23.0, "Na")});
  auto b = conf({nucleon_at({0, 0, 0}), nucleon_at({1, 0, 0}), nucleon_at({2, 0, 0})});
  auto sup = Superposition::equal_weights(a, b);
  CHECK_THROWS_AS(gamma_exact(sup, unit_params), SpeciesMismatch);

  try {
    gamma_exact(sup, unit_params);
  } catch (const SpeciesMismatch& e) {
    CHECK(e.masses_a() == std::vector<double>{1.0, 1.0, 23.0});
    CHECK(e.masses_b() == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(std::string(e.what()).find("mass") != std::string::npos);
  }

  // Same mass multiset under different labels and orderings is fine.
  auto c = conf({at({9, 0, 0}, 23.0, "heavy"), nucleon_at({0, 0, 0}), nucleon_at({1, 0, 0})});
  CHECK_NOTHROW(gamma_exact(Superposition::equal_weights(a, c), unit_params));
}

TEST_CASE("rates never go meaningfully negative") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> count(1, 40);
    std::size_t n = count(rng);
    auto pa = helpers::random_cloud(n, 6.0, {0, 0, 0}, rng);
    auto pb = pa;
    std::normal_distribution<double> kick(0.0, 0.01);
    for (auto& p : pb) p.pos = p.pos + Vec3{kick(rng), kick(rng), kick(rng)};
    auto sup = Superposition::equal_weights(conf(pa), conf(pb));
    auto r = gamma_exact(sup, unit_params);
    double scale = unit_params.lambda() * static_cast<double>(n) * static_cast<double>(n);
    CHECK(r.rate >= 0.0);
    CHECK(r.raw_rate >= -1e-10 * scale);
    CHECK(r.rate == (r.raw_rate < 0.0 ? 0.0 : r.raw_rate));
    CHECK(r.clamped == (r.raw_rate < 0.0));
  }
}

TEST_CASE("worker count does not change the exact rate") {
  std::mt19937_64 rng(37);
  auto pa = helpers::random_cloud(101, 10.0, {0, 0, 0}, rng);
  auto pb = helpers::random_cloud(101, 10.0, {2, 1, 0}, rng);
  auto sup = Superposition::equal_weights(conf(pa), conf(pb));
  double w1 = gamma_exact(sup, unit_params, 1).rate;
  for (int workers : {2, 3, 7}) {
    CHECK(gamma_exact(sup, unit_params, workers).rate == doctest::Approx(w1).epsilon(1e-12));
  }
}

TEST_CASE("cell-list rate equals the exact rate when nothing is pruned") {
  std::mt19937_64 rng(41);
  // Everything within 2.5 r_c of everything else: no pair reaches the
  // 6 r_c cutoff, so the two methods sum identical terms.
  auto pa = helpers::random_cloud(60, 1.4, {0, 0, 0}, rng);
  auto pb = helpers::random_cloud(60, 1.4, {0.8, 0, 0}, rng);
  auto sup = Superposition::equal_weights(conf(pa), conf(pb));
  auto exact = gamma_exact(sup, unit_params);
  auto fast = gamma_accelerated(sup, unit_params);
  CHECK(fast.method == RateMethod::accelerated);
  CHECK(fast.rate == doctest::Approx(exact.rate).epsilon(1e-12));
}

TEST_CASE("cell-list rate tracks the exact rate on a sparse gas") {
  std::mt19937_64 rng(43);
  auto pa = helpers::random_cloud(1000, 400.0, {0, 0, 0}, rng);
  auto pb = helpers::random_cloud(1000, 400.0, {0, 0, 0}, rng);
  auto sup = Superposition::equal_weights(conf(pa), conf(pb));
  auto exact = gamma_exact(sup, unit_params);
  auto fast = gamma_accelerated(sup, unit_params, 6.0);
  CHECK(std::abs(fast.rate - exact.rate) <= 1e-6 * exact.rate);
}

TEST_CASE("cell-list cutoff below three smearing lengths is rejected") {
  auto sup = displaced_nucleon(1.0);
  CHECK_THROWS_AS(gamma_accelerated(sup, unit_params, 2.0), InvalidParameter);
  CHECK_NOTHROW(gamma_accelerated(sup, unit_params, 3.0));
}

TEST_CASE("field-method rate agrees with closed forms") {
  auto sup = displaced_nucleon(5.0);
  auto field = gamma_field(sup, unit_params);
  CHECK(field.method == RateMethod::field_quadrature);
  CHECK(field.rate == doctest::Approx(one_particle_rate(1.0, 5.0, unit_params)).epsilon(1e-6));

  // Identical branches rasterize identically: the difference field vanishes.
  std::mt19937_64 rng(47);
  auto ps = helpers::random_cloud(10, 3.0, {0, 0, 0}, rng);
  auto same = Superposition::equal_weights(conf(ps), conf(ps));
  CHECK(gamma_field(same, unit_params).rate == 0.0);
}

TEST_CASE("field-method rate converges to the pairwise rate") {
  std::mt19937_64 rng(53);
  auto pa = helpers::random_cloud(50, 12.0, {0, 0, 0}, rng);
  auto pb = helpers::random_cloud(50, 12.0, {1, 2, 0}, rng);
  auto sup = Superposition::equal_weights(conf(pa), conf(pb));
  double exact = gamma_exact(sup, unit_params).rate;

  FieldGrid coarse;  // h = r_c / 4
  double err_coarse = std::abs(gamma_field(sup, unit_params, coarse).rate - exact) / exact;
  CHECK(err_coarse <= 1e-3);

  FieldGrid fine;
  fine.h_over_r_c = 0.125;
  double err_fine = std::abs(gamma_field(sup, unit_params, fine).rate - exact) / exact;
  CHECK(err_fine <= 1e-4);
}

TEST_CASE("field-method grid overloads agree") {
  auto sup = displaced_nucleon(3.0);
  FieldGrid spec;
  auto grid = make_grid(sup, unit_params.r_c(), 0.25, 6.0);
  CHECK(gamma_field(sup, unit_params, spec).rate == gamma_field(sup, unit_params, grid).rate);
}

TEST_CASE("grid construction rejects bad resolution and budget") {
  auto sup = displaced_nucleon(3.0);
  CHECK_THROWS_AS(make_grid(sup, 1.0, 0.6, 6.0), InvalidParameter);
  CHECK_THROWS_AS(make_grid(sup, 1.0, 0.25, 4.0), InvalidParameter);

  try {
    make_grid(sup, 1.0, 0.25, 6.0, 100);
    FAIL("expected GridError");
  } catch (const GridError& e) {
    CHECK(e.allowed_cells() == 100);
    CHECK(e.required_cells() > e.allowed_cells());
  }
}

TEST_CASE("cluster limit formulas") {
  CollapseParams params = CollapseParams::from_lambda(2.0, 1.0);

  CHECK(cluster_rate({{{1.0, 1.0, 1.0}}}, params) == doctest::Approx(2.0).epsilon(1e-12));
  // N * n^2 per cluster family, summed.
  ClusterSpec spec{{{1.0, 10.0, 3.0}, {1.0, 4.0, 5.0}}};
  CHECK(cluster_rate(spec, params) == doctest::Approx(2.0 * (300.0 + 80.0)).epsilon(1e-12));

  CHECK_THROWS_AS(cluster_rate({{}}, params), InvalidParameter);
  CHECK_THROWS_AS(cluster_rate({{{23.0, 10.0, 3.0}}}, params), InvalidParameter);
  try {
    cluster_rate({{{23.0, 10.0, 3.0}}}, params);
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("mass_cluster_rate") != std::string::npos);
  }
}

TEST_CASE("mass-weighted cluster limit") {
  CollapseParams params = CollapseParams::from_lambda(1.0, 1.0);
  // Reduces to the unit-mass form.
  ClusterSpec unit{{{1.0, 10.0, 3.0}, {1.0, 4.0, 5.0}}};
  CHECK(mass_cluster_rate(unit, params) == doctest::Approx(cluster_rate(unit, params)).epsilon(1e-12));

  // One sodium-mass cluster of 3 constituents: (23^2)(3^2) = 4761.
  CHECK(mass_cluster_rate({{{23.0, 3.0, 1.0}}}, params) == doctest::Approx(4761.0).epsilon(1e-12));

  // Channel-scale example: 60 clusters of 1.15e5 nucleon-equivalents.
  CHECK(mass_cluster_rate({{{1.0, 1.15e5, 60.0}}}, params) ==
        doctest::Approx(7.935e11).epsilon(1e-12));
}

TEST_CASE("well-separated clusters reach the cluster-limit rate") {
  std::mt19937_64 rng(59);
  std::vector<Particle> pa;
  std::vector<double> sizes{5, 7, 9};
  std::vector<Vec3> centers{{0, 0, 0}, {15, 0, 0}, {0, 15, 0}};
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    auto cl = tight_cluster(static_cast<std::size_t>(sizes[c]), centers[c], 0.02, rng);
    pa.insert(pa.end(), cl.begin(), cl.end());
  }
  auto pb = pa;
  for (auto& p : pb) p.pos.z += 20.0;
  auto sup = Superposition::equal_weights(conf(pa), conf(pb));

  ClusterSpec spec{{{1.0, 5.0, 1.0}, {1.0, 7.0, 1.0}, {1.0, 9.0, 1.0}}};
  double predicted = cluster_rate(spec, unit_params);
  CHECK(gamma_exact(sup, unit_params).rate == doctest::Approx(predicted).epsilon(0.005));
}

TEST_CASE("regime classification") {
  std::mt19937_64 rng(61);

  SUBCASE("all displacements well within the smearing length") {
    auto pa = helpers::random_cloud(4, 2.0, {0, 0, 0}, rng);
    auto pb = pa;
    for (auto& p : pb) p.pos.x += 0.05;
    auto rep = regime_classify(Superposition::equal_weights(conf(pa), conf(pb)), unit_params);
    CHECK(rep.regime == Regime::negligible);
    CHECK(rep.same_index_cross.max < 0.1);
  }

  SUBCASE("rigid tight cluster displaced far") {
    auto pa = tight_cluster(10, {0, 0, 0}, 0.02, rng);
    auto pb = pa;
    for (auto& p : pb) p.pos.x += 10.0;
    auto sup = Superposition::equal_weights(conf(pa), conf(pb));
    auto rep = regime_classify(sup, unit_params);
    CHECK(rep.regime == Regime::quadratic);
    CHECK(rep.cross.min >= 3.0);
    CHECK(rep.intra_a.max < 0.1);
    // Leading-order rate lambda N^2.
    CHECK(gamma_exact(sup, unit_params).rate ==
          doctest::Approx(100.0 * unit_params.lambda()).epsilon(0.05));
  }

  SUBCASE("single displaced particle counts as a rigid cluster of one") {
    auto rep = regime_classify(displaced_nucleon(10.0), unit_params);
    CHECK(rep.regime == Regime::quadratic);
  }

  SUBCASE("clustered against dispersed") {
    auto pa = tight_cluster(16, {0, 0, 0}, 0.02, rng);
    std::vector<Particle> pb;
    for (int i = 0; i < 16; ++i) {
      // Sparse lattice starting 10 r_c away from the cluster.
      pb.push_back(nucleon_at({10.0 + 6.0 * (i % 4), 6.0 * (i / 4), 0}));
    }
    auto sup = Superposition::equal_weights(conf(pa), conf(pb));
    auto rep = regime_classify(sup, unit_params);
    CHECK(rep.regime == Regime::half_quadratic);
    // Leading-order rate lambda (N^2 + N) / 2.
    CHECK(gamma_exact(sup, unit_params).rate ==
          doctest::Approx(0.5 * (256.0 + 16.0) * unit_params.lambda()).epsilon(0.05));
  }

  SUBCASE("independent far displacements of a dilute system") {
    std::vector<Particle> pa;
    for (int i = 0; i < 27; ++i) {
      pa.push_back(nucleon_at({6.0 * (i % 3), 6.0 * ((i / 3) % 3), 6.0 * (i / 9)}));
    }
    auto pb = pa;
    for (auto& p : pb) p.pos = p.pos + Vec3{3.1, 3.1, 3.1};
    auto sup = Superposition::equal_weights(conf(pa), conf(pb));
    auto rep = regime_classify(sup, unit_params);
    CHECK(rep.regime == Regime::linear);
    // Leading-order rate lambda N.
    CHECK(gamma_exact(sup, unit_params).rate ==
          doctest::Approx(27.0 * unit_params.lambda()).epsilon(0.05));
  }

  SUBCASE("intermediate separations fall through to general") {
    auto pa = conf({nucleon_at({0, 0, 0}), nucleon_at({1.5, 0, 0})});
    auto pb = conf({nucleon_at({0.5, 0, 0}), nucleon_at({2.0, 0, 0})});
    auto rep = regime_classify(Superposition::equal_weights(pa, pb), unit_params);
    CHECK(rep.regime == Regime::general);
  }

  SUBCASE("rejects empty or uneven components") {
    auto one = conf({nucleon_at({0, 0, 0})});
    CHECK_THROWS_AS(
        regime_classify(Superposition::equal_weights(Configuration{}, Configuration{}),
                        unit_params),
        InvalidParameter);
    auto two = conf({nucleon_at({0, 0, 0}), nucleon_at({6, 0, 0})});
    CHECK_THROWS_AS(regime_classify(Superposition::equal_weights(one, two), unit_params),
                    InvalidParameter);
  }
}

TEST_CASE("method names are stable") {
  CHECK(to_string(RateMethod::exact_pairwise) == "exact_pairwise");
  CHECK(to_string(RateMethod::accelerated) == "accelerated");
  CHECK(to_string(RateMethod::field_quadrature) == "field_quadrature");
  CHECK(to_string(RateMethod::cluster_limit) == "cluster_limit");
  CHECK(to_string(Regime::negligible) == "negligible");
  CHECK(to_string(Regime::quadratic) == "quadratic");
  CHECK(to_string(Regime::half_quadratic) == "half_quadratic");
  CHECK(to_string(Regime::linear) == "linear");
  CHECK(to_string(Regime::general) == "general");
}
