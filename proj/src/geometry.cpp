#include "tmyag/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tmyag/error.hpp"

namespace tmyag {

namespace lab {
Vec3 dir_111() { return Vec3(1, 1, 1).normalized(); }
Vec3 dir_m1m12() { return Vec3(-1, -1, 2).normalized(); }
Vec3 dir_001() { return Vec3(0, 0, 1); }
Vec3 dir_1m10() { return Vec3(1, -1, 0).normalized(); }
}  // namespace lab

namespace {

SiteFrame make_frame(int index, const Vec3& dipole, const Vec3& cube_axis) {
  SiteFrame f;
  f.site_index = index;
  const Vec3 y = dipole.normalized();
  const Vec3 z = cube_axis.normalized();
  const Vec3 x = y.cross(z);
  f.rotation.col(0) = x;
  f.rotation.col(1) = y;
  f.rotation.col(2) = z;
  f.dipole_lab = y;
  return f;
}

std::array<SiteFrame, 6> build_sites() {
  // Dipoles along the six <110> directions. Sites 2, 4, 6 have dipoles normal
  // to [111]; site 2 is also normal to [-1-12].
  return {
      make_frame(1, Vec3(1, 1, 0), Vec3(0, 0, 1)),
      make_frame(2, Vec3(1, -1, 0), Vec3(0, 0, 1)),
      make_frame(3, Vec3(1, 0, 1), Vec3(0, 1, 0)),
      make_frame(4, Vec3(1, 0, -1), Vec3(0, 1, 0)),
      make_frame(5, Vec3(0, 1, 1), Vec3(1, 0, 0)),
      make_frame(6, Vec3(0, 1, -1), Vec3(1, 0, 0)),
  };
}

}  // namespace

const std::array<SiteFrame, 6>& all_sites() {
  static const std::array<SiteFrame, 6> sites = build_sites();
  return sites;
}

SiteFrame site_frame(int index) {
  if (index < 1 || index > 6) {
    throw IndexOutOfRange("site index " + std::to_string(index) + " outside 1..6");
  }
  return all_sites()[static_cast<std::size_t>(index - 1)];
}

Vec3 scan_direction(double theta) {
  return std::cos(theta) * lab::dir_111() + std::sin(theta) * lab::dir_m1m12();
}

Vec3 field_vector(const FieldConfig& cfg) { return cfg.magnitude * scan_direction(cfg.theta); }

Vec3 local_field(const SiteFrame& site, const Vec3& b_lab) {
  return site.rotation.transpose() * b_lab;
}

Vec3 to_lab(const SiteFrame& site, const Vec3& v_local) { return site.rotation * v_local; }

double dipole_projection(const SiteFrame& site, const Vec3& polarization) {
  const double n = polarization.norm();
  if (n == 0) return 0;
  return std::abs(site.dipole_lab.dot(polarization)) / n;
}

Partition equivalence_classes(const Vec3& b_lab) {
  const double magnitude = b_lab.norm();
  if (!(magnitude > 0)) throw ZeroField("equivalence classes need a nonzero field");
  const double tol = 1e-9 * magnitude;

  std::array<Vec3, 6> triples;
  for (const auto& s : all_sites()) {
    triples[static_cast<std::size_t>(s.site_index - 1)] = local_field(s, b_lab).cwiseAbs();
  }

  Partition classes;
  for (int i = 1; i <= 6; ++i) {
    const Vec3& t = triples[static_cast<std::size_t>(i - 1)];
    auto match = std::find_if(classes.begin(), classes.end(), [&](const SiteClass& c) {
      const Vec3& ref = triples[static_cast<std::size_t>(c.front() - 1)];
      return ((t - ref).cwiseAbs().array() <= tol).all();
    });
    if (match == classes.end()) {
      classes.push_back({i});
    } else {
      match->push_back(i);
    }
  }
  return classes;
}

std::size_t class_of(const Partition& partition, int site) {
  for (std::size_t k = 0; k < partition.size(); ++k) {
    if (std::find(partition[k].begin(), partition[k].end(), site) != partition[k].end()) return k;
  }
  throw IndexOutOfRange("site " + std::to_string(site) + " not present in partition");
}

std::string class_label(const SiteClass& sites) {
  std::string out;
  for (int s : sites) {
    if (!out.empty()) out += '+';
    out += std::to_string(s);
  }
  return out;
}

}  // namespace tmyag
