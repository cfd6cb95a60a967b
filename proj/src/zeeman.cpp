#include "tmyag/zeeman.hpp"

#include <algorithm>
#include <cmath>

#include "tmyag/error.hpp"

namespace tmyag {

namespace {

const Diagonal3& tensor(State state, const MaterialConstants& c) {
  return state == State::ground ? c.gamma_J_ground : c.gamma_J_excited;
}

}  // namespace

double hyperfine_splitting(const SiteFrame& site, const Vec3& b_lab, State state,
                           const MaterialConstants& c) {
  const Vec3 local = local_field(site, b_lab);
  const auto& g = tensor(state, c);
  return Vec3(g[0] * local[0], g[1] * local[1], g[2] * local[2]).norm();
}

double effective_gamma(const SiteFrame& site, const Vec3& direction, State state,
                       const MaterialConstants& c) {
  const double n = direction.norm();
  if (!(n > 0)) throw ZeroDirection("effective gamma needs a nonzero direction");
  return hyperfine_splitting(site, direction / n, state, c);
}

double quadratic_displacement(const SiteFrame& site, const Vec3& b_lab, State state,
                              const MaterialConstants& c) {
  const Vec3 local = local_field(site, b_lab);
  const auto& g = tensor(state, c);
  const double g_J = state == State::ground ? c.g_J_ground : c.g_J_excited;
  const double A_J = state == State::ground ? c.A_J_ground : c.A_J_excited;
  double sum = 0;
  for (int k = 0; k < 3; ++k) {
    sum += (g[static_cast<std::size_t>(k)] - c.gamma_n) * local[k] * local[k];
  }
  return g_J * c.mu_B / (2.0 * c.h * A_J) * sum;
}

ZeemanResult zeeman(const SiteFrame& site, const Vec3& b_lab, const MaterialConstants& c) {
  ZeemanResult r;
  r.site_index = site.site_index;
  r.splitting_ground = hyperfine_splitting(site, b_lab, State::ground, c);
  r.splitting_excited = hyperfine_splitting(site, b_lab, State::excited, c);
  r.D_ground = quadratic_displacement(site, b_lab, State::ground, c);
  r.D_excited = quadratic_displacement(site, b_lab, State::excited, c);
  r.optical_shift = r.D_ground - r.D_excited;
  r.beyond_perturbative = std::abs(r.optical_shift) > 0.1 * c.delta_CF0;
  return r;
}

double shift_coefficient(const SiteFrame& site, const Vec3& direction, const MaterialConstants& c) {
  const double n = direction.norm();
  if (!(n > 0)) throw ZeroDirection("shift coefficient needs a nonzero direction");
  return zeeman(site, direction / n, c).optical_shift;
}

std::vector<ShiftCurvePoint> shift_curve(std::span<const int> sites, std::span<const double> thetas,
                                         double b, const MaterialConstants& c) {
  for (int s : sites) site_frame(s);  // range check

  std::vector<ShiftCurvePoint> out;
  for (double theta : thetas) {
    if (b == 0) {
      SiteClass all(sites.begin(), sites.end());
      std::sort(all.begin(), all.end());
      out.push_back({theta, std::move(all), 0.0});
      continue;
    }
    const Vec3 field = field_vector({b, theta});
    for (const auto& cls : equivalence_classes(field)) {
      SiteClass picked;
      for (int s : cls) {
        if (std::find(sites.begin(), sites.end(), s) != sites.end()) picked.push_back(s);
      }
      if (picked.empty()) continue;
      const double shift = zeeman(site_frame(picked.front()), field, c).optical_shift;
      out.push_back({theta, std::move(picked), shift});
    }
  }
  return out;
}

double broadening(double b, double gamma_CF, double Gamma_CF, double delta_CF) {
  if (!(delta_CF > 0)) throw NonpositiveSplitting("crystal-field splitting must be positive");
  return gamma_CF * Gamma_CF / delta_CF * b * b;
}

double crystal_field_splitting(double b, const RelaxParams& p) {
  return p.delta_CF0 + p.gamma_CF * b * b;
}

Linestrength linestrength(double b, double k0, double c) {
  const double v = k0 + c * b * b;
  return {v, v < 0};
}

}  // namespace tmyag
