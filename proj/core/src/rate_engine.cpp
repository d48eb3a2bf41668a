#include "csl/rate_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "csl/errors.hpp"
#include "csl/numeric.hpp"

namespace csl {

namespace {

struct FlatConfig {
  std::vector<Vec3> pos;
  std::vector<double> mass;  // in units of m_N
};

FlatConfig flatten(const Configuration& conf) {
  FlatConfig f;
  f.pos.reserve(conf.size());
  f.mass.reserve(conf.size());
  for (const Particle& p : conf.particles()) {
    f.pos.push_back(p.pos);
    f.mass.push_back(p.species.mass / nucleon_mass);
  }
  return f;
}

std::string describe_multiset(const Configuration& conf) {
  std::ostringstream os;
  os << "{";
  auto m = conf.sorted_masses();
  for (std::size_t i = 0; i < m.size();) {
    std::size_t j = i;
    while (j < m.size() && m[j] == m[i]) ++j;
    if (i) os << ", ";
    os << m[i] << " x" << (j - i);
    i = j;
  }
  os << "}";
  return os.str();
}

void check_same_species_content(const Superposition& sup) {
  if (sup.comp_a().sorted_masses() != sup.comp_b().sorted_masses()) {
    throw SpeciesMismatch(
        "superposed components carry different species mass multisets: component_a " +
            describe_multiset(sup.comp_a()) + " vs component_b " + describe_multiset(sup.comp_b()),
        sup.comp_a().sorted_masses(), sup.comp_b().sorted_masses());
  }
}

DecayRate clamp_rate(double raw, RateMethod method) {
  DecayRate r;
  r.raw_rate = raw;
  r.method = method;
  r.clamped = raw < 0.0;
  r.rate = r.clamped ? 0.0 : raw;
  return r;
}

// Hash-grid cell list over integer cell coordinates.
class CellList {
 public:
  CellList(const std::vector<Vec3>& points, double cell_edge) : edge_(cell_edge) {
    for (std::uint32_t i = 0; i < points.size(); ++i) {
      cells_[key(points[i])].push_back(i);
    }
  }

  template <typename Fn>
  void for_neighbors(const Vec3& p, Fn&& fn) const {
    auto [cx, cy, cz] = coords(p);
    for (long dz = -1; dz <= 1; ++dz) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          auto it = cells_.find(pack(cx + dx, cy + dy, cz + dz));
          if (it == cells_.end()) continue;
          for (std::uint32_t j : it->second) fn(j);
        }
      }
    }
  }

 private:
  std::tuple<long, long, long> coords(const Vec3& p) const {
    long cx = static_cast<long>(std::floor(p.x / edge_));
    long cy = static_cast<long>(std::floor(p.y / edge_));
    long cz = static_cast<long>(std::floor(p.z / edge_));
    for (long v : {cx, cy, cz}) {
      if (v <= -(1L << 20) || v >= (1L << 20)) {
        throw InvalidParameter(
            "gamma_accelerated: configuration extent exceeds the cell index range; "
            "positions span more than 2^20 cutoff lengths");
      }
    }
    return {cx, cy, cz};
  }
  static std::uint64_t pack(long x, long y, long z) {
    auto enc = [](long v) {
      return static_cast<std::uint64_t>(v + (1L << 20)) & ((1ULL << 21) - 1);
    };
    return (enc(x) << 42) | (enc(y) << 21) | enc(z);
  }
  std::uint64_t key(const Vec3& p) const {
    auto [x, y, z] = coords(p);
    return pack(x, y, z);
  }

  double edge_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace

std::string to_string(RateMethod m) {
  switch (m) {
    case RateMethod::exact_pairwise: return "exact_pairwise";
    case RateMethod::accelerated: return "accelerated";
    case RateMethod::field_quadrature: return "field_quadrature";
    case RateMethod::cluster_limit: return "cluster_limit";
  }
  return "unknown";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::negligible: return "negligible";
    case Regime::quadratic: return "quadratic";
    case Regime::half_quadratic: return "half_quadratic";
    case Regime::linear: return "linear";
    case Regime::general: return "general";
  }
  return "unknown";
}

DecayRate gamma_exact(const Superposition& sup, const CollapseParams& params, int workers) {
  check_same_species_content(sup);
  const FlatConfig a = flatten(sup.comp_a());
  const FlatConfig b = flatten(sup.comp_b());
  const std::size_t n = a.pos.size();

  const double s2 = params.r_c() * params.r_c();
  const double inv4s2 = 1.0 / (4.0 * s2);
  const double g0 = std::pow(4.0 * std::numbers::pi * s2, -1.5);

  if (workers < 1) workers = 1;
  std::vector<double> partial(static_cast<std::size_t>(workers), 0.0);
  parallel_blocks(n, workers, [&](int block, std::size_t begin, std::size_t end) {
    KahanSum s;
    for (std::size_t i = begin; i < end; ++i) {
      const Vec3 ai = a.pos[i];
      const Vec3 bi = b.pos[i];
      const double mai = a.mass[i];
      const double mbi = b.mass[i];
      for (std::size_t j = 0; j < n; ++j) {
        s.add(mai * a.mass[j] * std::exp(-norm2(ai - a.pos[j]) * inv4s2));
        s.add(mbi * b.mass[j] * std::exp(-norm2(bi - b.pos[j]) * inv4s2));
        s.add(-2.0 * mai * b.mass[j] * std::exp(-norm2(ai - b.pos[j]) * inv4s2));
      }
    }
    partial[static_cast<std::size_t>(block)] = s.value();
  });

  KahanSum total;
  for (double p : partial) total.add(p);
  return clamp_rate(0.5 * params.gamma() * g0 * total.value(), RateMethod::exact_pairwise);
}

DecayRate gamma_accelerated(const Superposition& sup, const CollapseParams& params,
                            double cutoff_multiplier) {
  if (!(cutoff_multiplier >= 3.0)) {
    throw InvalidParameter("gamma_accelerated: cutoff_multiplier must be >= 3, got " +
                           std::to_string(cutoff_multiplier));
  }
  check_same_species_content(sup);
  const FlatConfig a = flatten(sup.comp_a());
  const FlatConfig b = flatten(sup.comp_b());

  const double s2 = params.r_c() * params.r_c();
  const double inv4s2 = 1.0 / (4.0 * s2);
  const double g0 = std::pow(4.0 * std::numbers::pi * s2, -1.5);
  const double cutoff = cutoff_multiplier * params.r_c();
  const double cutoff2 = cutoff * cutoff;

  const CellList cells_a(a.pos, cutoff);
  const CellList cells_b(b.pos, cutoff);

  KahanSum s;
  auto accumulate = [&](const FlatConfig& from, const FlatConfig& to, const CellList& list,
                        double weight) {
    for (std::size_t i = 0; i < from.pos.size(); ++i) {
      const Vec3 pi = from.pos[i];
      const double mi = from.mass[i];
      list.for_neighbors(pi, [&](std::uint32_t j) {
        const double d2 = norm2(pi - to.pos[j]);
        if (d2 <= cutoff2) s.add(weight * mi * to.mass[j] * std::exp(-d2 * inv4s2));
      });
    }
  };
  accumulate(a, a, cells_a, 1.0);
  accumulate(b, b, cells_b, 1.0);
  accumulate(a, b, cells_b, -2.0);

  return clamp_rate(0.5 * params.gamma() * g0 * s.value(), RateMethod::accelerated);
}

DecayRate gamma_field(const Superposition& sup, const CollapseParams& params,
                      const FieldGrid& grid) {
  GridGeometry geom = make_grid(sup, params.r_c(), grid.h_over_r_c * params.r_c(),
                                grid.padding_over_r_c * params.r_c(), grid.max_cells);
  return gamma_field(sup, params, geom);
}

DecayRate gamma_field(const Superposition& sup, const CollapseParams& params,
                      const GridGeometry& grid) {
  check_same_species_content(sup);
  std::vector<double> mu_a = rasterize_density(sup.comp_a(), grid, params.r_c());
  std::vector<double> mu_b = rasterize_density(sup.comp_b(), grid, params.r_c());
  double q = squared_difference_volume(mu_a, mu_b, grid.h);
  return clamp_rate(0.5 * params.gamma() * q, RateMethod::field_quadrature);
}

namespace {

void check_cluster(const Cluster& c, std::size_t i) {
  if (!(c.constituents > 0.0) || !std::isfinite(c.constituents) || !(c.copies > 0.0) ||
      !std::isfinite(c.copies) || !(c.unit_mass > 0.0) || !std::isfinite(c.unit_mass)) {
    throw InvalidParameter("cluster " + std::to_string(i) +
                           ": unit_mass, constituents and copies must be positive and finite");
  }
}

}  // namespace

double cluster_rate(const ClusterSpec& spec, const CollapseParams& params) {
  if (spec.clusters.empty()) throw InvalidParameter("cluster_rate: empty cluster list");
  KahanSum s;
  for (std::size_t i = 0; i < spec.clusters.size(); ++i) {
    const Cluster& c = spec.clusters[i];
    check_cluster(c, i);
    if (c.unit_mass != nucleon_mass) {
      throw InvalidParameter("cluster_rate: cluster " + std::to_string(i) +
                             " has unit_mass " + std::to_string(c.unit_mass) +
                             "; use mass_cluster_rate for non-nucleon constituents");
    }
    s.add(c.copies * c.constituents * c.constituents);
  }
  return params.lambda() * s.value();
}

double mass_cluster_rate(const ClusterSpec& spec, const CollapseParams& params) {
  if (spec.clusters.empty()) throw InvalidParameter("mass_cluster_rate: empty cluster list");
  KahanSum s;
  for (std::size_t i = 0; i < spec.clusters.size(); ++i) {
    const Cluster& c = spec.clusters[i];
    check_cluster(c, i);
    double m = c.unit_mass / nucleon_mass;
    s.add(m * m * c.constituents * c.constituents * c.copies);
  }
  return params.lambda() * s.value();
}

RegimeReport regime_classify(const Superposition& sup, const CollapseParams& params) {
  const auto& pa = sup.comp_a().particles();
  const auto& pb = sup.comp_b().particles();
  if (pa.empty() || pb.empty()) {
    throw InvalidParameter("regime_classify: components must be non-empty");
  }
  if (pa.size() != pb.size()) {
    throw InvalidParameter("regime_classify: components must have equal particle counts");
  }

  // Empty separation sets (single-particle components have no intra pairs)
  // report min = +inf, max = 0 so threshold conditions hold vacuously.
  auto empty_span = [] {
    return SeparationSpan{std::numeric_limits<double>::infinity(), 0.0};
  };
  auto update = [](SeparationSpan& s, double d) {
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
  };

  RegimeReport rep;
  rep.same_index_cross = empty_span();
  rep.cross = empty_span();
  rep.intra_a = empty_span();
  rep.intra_b = empty_span();

  const std::size_t n = pa.size();
  for (std::size_t i = 0; i < n; ++i) {
    update(rep.same_index_cross, norm(pa[i].pos - pb[i].pos));
    for (std::size_t j = 0; j < n; ++j) {
      update(rep.cross, norm(pa[i].pos - pb[j].pos));
      if (j > i) {
        update(rep.intra_a, norm(pa[i].pos - pa[j].pos));
        update(rep.intra_b, norm(pb[i].pos - pb[j].pos));
      }
    }
  }

  const double near = regime_near_factor * params.r_c();
  const double far = regime_far_factor * params.r_c();
  auto tight = [&](const SeparationSpan& s) { return s.max < near; };
  auto spread = [&](const SeparationSpan& s) { return s.min >= far; };

  if (rep.same_index_cross.max < near) {
    rep.regime = Regime::negligible;
  } else if (spread(rep.cross) && tight(rep.intra_a) && tight(rep.intra_b)) {
    rep.regime = Regime::quadratic;
  } else if ((tight(rep.intra_a) && spread(rep.intra_b)) ||
             (tight(rep.intra_b) && spread(rep.intra_a))) {
    rep.regime = Regime::half_quadratic;
  } else if (spread(rep.intra_a) && spread(rep.intra_b) && spread(rep.cross)) {
    rep.regime = Regime::linear;
  } else {
    rep.regime = Regime::general;
  }
  return rep;
}

}  // namespace csl
