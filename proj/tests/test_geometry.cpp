#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "tmyag/error.hpp"
#include "tmyag/geometry.hpp"

using namespace tmyag;

namespace {

constexpr double kDeg = std::numbers::pi / 180;

bool same_partition(const Partition& a, const Partition& b) { return a == b; }

bool shares_class(const Partition& p, int a, int b) { return class_of(p, a) == class_of(p, b); }

}  // namespace

TEST_CASE("site frames are proper rotations") {
  for (int i = 1; i <= 6; ++i) {
    const auto f = site_frame(i);
    CHECK(f.site_index == i);
    CHECK((f.rotation.transpose() * f.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(f.rotation.determinant() - 1) < 1e-12);
    CHECK((f.dipole_lab - f.rotation * Vec3::UnitY()).norm() < 1e-15);
  }
  CHECK_THROWS_AS(site_frame(0), IndexOutOfRange);
  CHECK_THROWS_AS(site_frame(7), IndexOutOfRange);
}

TEST_CASE("dipoles lie along distinct <110> directions") {
  for (int i = 1; i <= 6; ++i) {
    const Vec3 d = site_frame(i).dipole_lab.cwiseAbs();
    std::array<double, 3> v{d[0], d[1], d[2]};
    std::sort(v.begin(), v.end());
    CHECK(v[0] < 1e-15);
    CHECK(std::abs(v[1] - std::sqrt(0.5)) < 1e-15);
    CHECK(std::abs(v[2] - std::sqrt(0.5)) < 1e-15);
    for (int j = i + 1; j <= 6; ++j) {
      CHECK(std::abs(std::abs(site_frame(i).dipole_lab.dot(site_frame(j).dipole_lab)) - 1) > 0.1);
    }
  }
}

TEST_CASE("dipole projections for E || [111]") {
  const Vec3 e = lab::dir_111();
  for (int s : {2, 4, 6}) CHECK(dipole_projection(site_frame(s), e) < 1e-12);
  const double p1 = dipole_projection(site_frame(1), e);
  CHECK(std::abs(dipole_projection(site_frame(3), e) - p1) < 1e-12);
  CHECK(std::abs(dipole_projection(site_frame(5), e) - p1) < 1e-12);
}

TEST_CASE("dipole projections for E || [-1-12]") {
  const Vec3 e = lab::dir_m1m12();
  CHECK(dipole_projection(site_frame(2), e) < 1e-12);
  CHECK(std::abs(dipole_projection(site_frame(1), e) - 1 / std::sqrt(3.0)) < 1e-12);
  for (int s : {4, 6}) CHECK(std::abs(dipole_projection(site_frame(s), e) - std::sqrt(3.0) / 2) < 1e-12);
  for (int s : {3, 5}) {
    CHECK(std::abs(dipole_projection(site_frame(s), e) - 1 / (2 * std::sqrt(3.0))) < 1e-12);
  }
  for (int s = 1; s <= 6; ++s) {
    CHECK(dipole_projection(site_frame(s), -e) == dipole_projection(site_frame(s), e));
  }
}

TEST_CASE("field vector in the scan plane") {
  const Vec3 b0 = field_vector({6, 0});
  CHECK((b0 - 6 * Vec3(1, 1, 1) / std::sqrt(3.0)).norm() < 1e-12);
  const Vec3 b90 = field_vector({2, 90 * kDeg});
  CHECK((b90.normalized() - lab::dir_m1m12()).norm() < 1e-12);

  // [001] lies in the plane at arccos(1/sqrt(3))
  const double magic = std::acos(1 / std::sqrt(3.0));
  CHECK(std::abs(magic / kDeg - 54.7356) < 1e-4);
  CHECK((scan_direction(54.7356 * kDeg) - lab::dir_001()).norm() < 1e-6);
  CHECK((scan_direction(magic) - lab::dir_001()).norm() < 1e-9);

  for (double deg = -180; deg <= 180; deg += 7.5) {
    const Vec3 v = field_vector({3.5, deg * kDeg});
    CHECK(std::abs(v.norm() - 3.5) < 1e-12);
    CHECK(std::abs(v.dot(lab::dir_1m10())) < 1e-12);  // normal of the scan plane
    const double angle = std::acos(std::clamp(v.normalized().dot(lab::dir_111()), -1.0, 1.0));
    CHECK(std::abs(angle - std::abs(deg) * kDeg) < 1e-7);
  }
}

TEST_CASE("local field is an isometry") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-6, 6);
  CHECK(local_field(site_frame(3), Vec3::Zero()).norm() == 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 b(u(rng), u(rng), u(rng));
    for (const auto& s : all_sites()) {
      const Vec3 l = local_field(s, b);
      CHECK(std::abs(l.squaredNorm() - b.squaredNorm()) < 1e-12 * std::max(1.0, b.squaredNorm()));
      CHECK((to_lab(s, l) - b).norm() < 1e-12 * std::max(1.0, b.norm()));
    }
  }
}

TEST_CASE("sites 1/3/5 see the same field triple for B || [111]") {
  auto sorted_abs = [](Vec3 v) {
    std::array<double, 3> a{std::abs(v[0]), std::abs(v[1]), std::abs(v[2])};
    std::sort(a.begin(), a.end());
    return a;
  };
  const Vec3 b = lab::dir_111();
  const auto ref = sorted_abs(local_field(site_frame(1), b));
  for (int s : {3, 5}) {
    const auto t = sorted_abs(local_field(site_frame(s), b));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(t[k] - ref[k]) < 1e-12);
  }
}

TEST_CASE("equivalence classes") {
  CHECK(same_partition(equivalence_classes(lab::dir_111()), {{1, 3, 5}, {2, 4, 6}}));
  const auto p112 = equivalence_classes(lab::dir_m1m12());
  CHECK(shares_class(p112, 4, 6));
  CHECK(shares_class(p112, 3, 5));
  CHECK_FALSE(shares_class(p112, 1, 3));

  // generic direction: brute force says nothing coincides
  const Vec3 generic(0.31, -0.77, 0.53);
  for (int i = 1; i <= 6; ++i) {
    for (int j = i + 1; j <= 6; ++j) {
      const Vec3 d = local_field(site_frame(i), generic).cwiseAbs() -
                     local_field(site_frame(j), generic).cwiseAbs();
      REQUIRE(d.cwiseAbs().maxCoeff() > 1e-6);
    }
  }
  CHECK(equivalence_classes(generic).size() == 6);
  CHECK_THROWS_AS(equivalence_classes(Vec3::Zero()), ZeroField);
}

TEST_CASE("3/5 and 4/6 stay equivalent across the scan plane") {
  for (int deg = -180; deg <= 180; ++deg) {
    const auto p = equivalence_classes(scan_direction(deg * kDeg));
    CHECK(shares_class(p, 3, 5));
    CHECK(shares_class(p, 4, 6));
  }
}

TEST_CASE("classification does not depend on field magnitude") {
  for (double deg : {0.0, 12.5, 30.0, 54.7356103172, 90.0, 133.0}) {
    const Vec3 d = scan_direction(deg * kDeg);
    const auto ref = equivalence_classes(d);
    for (double scale : {1e-6, 0.37, 6.0, 1e4}) CHECK(same_partition(equivalence_classes(scale * d), ref));
  }
}

TEST_CASE("class labels") {
  CHECK(class_label({1, 3, 5}) == "1+3+5");
  CHECK(class_label({2}) == "2");
}
