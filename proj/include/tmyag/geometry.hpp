#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tmyag {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace lab {
/// Unit vectors along the cubic directions used throughout.
Vec3 dir_111();
Vec3 dir_m1m12();  // [-1-12]
Vec3 dir_001();
Vec3 dir_1m10();  // [1-10], light propagation
}  // namespace lab

/// Local D2 frame of one of the six Tm sites.
///
/// Columns of `rotation` are the local x, y and z axes written in cubic lab
/// coordinates, so `rotation * v_local == v_lab`. Local y is the optical
/// transition dipole (a <110> direction), local z is the cube axis normal to
/// it and x = y cross z is the remaining <110> direction.
struct SiteFrame {
  int site_index = 0;
  Mat3 rotation = Mat3::Identity();
  Vec3 dipole_lab = Vec3::UnitY();
};

SiteFrame site_frame(int index);

/// Frames for sites 1..6 in order.
const std::array<SiteFrame, 6>& all_sites();

/// Field of magnitude `magnitude` (T) in the plane spanned by [111] and
/// [-1-12]; `theta` (rad) is measured from [111], positive toward [-1-12].
struct FieldConfig {
  double magnitude = 0;
  double theta = 0;
};

Vec3 scan_direction(double theta);
Vec3 field_vector(const FieldConfig& cfg);

/// Field components in the site's local frame.
Vec3 local_field(const SiteFrame& site, const Vec3& b_lab);
Vec3 to_lab(const SiteFrame& site, const Vec3& v_local);

/// |mu_hat . E_hat| for the site's transition dipole; zero for E = 0.
double dipole_projection(const SiteFrame& site, const Vec3& polarization);

using SiteClass = std::vector<int>;
using Partition = std::vector<SiteClass>;

/// Groups sites whose |local component| triples agree within 1e-9 |B|.
/// Classes are sorted internally and by their smallest member.
Partition equivalence_classes(const Vec3& b_lab);

/// Index of the class containing `site` in `partition`.
std::size_t class_of(const Partition& partition, int site);

/// "1+3+5" style label.
std::string class_label(const SiteClass& sites);

}  // namespace tmyag
