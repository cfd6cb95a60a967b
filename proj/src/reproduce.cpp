#include "tmyag/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "oracle_values.hpp"
#include "tmyag/csv.hpp"
#include "tmyag/error.hpp"
#include "tmyag/geometry.hpp"
#include "tmyag/relax_fit.hpp"
#include "tmyag/relaxation.hpp"
#include "tmyag/spectra.hpp"
#include "tmyag/zeeman.hpp"

namespace tmyag {

namespace {

constexpr double kDeg = std::numbers::pi / 180;
constexpr double kTableGamma = 4.0e8;  // Hz/T, ground state along [111]

using csv::Cell;

std::string fmt(double v) { return csv::format_number(v); }

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

CheckResult make(int id, std::string name, bool pass, std::string detail) {
  return {id, std::move(name), pass, std::move(detail)};
}

// Orientation table rows: label, probed site, field angle, polarization, published shift.
struct OrientationRow {
  const char* label;
  const char* sites;
  int site;
  double theta_deg;
  Vec3 (*polarization)();
  double reference;  // Hz
};

const OrientationRow kOrientationRows[] = {
    {"A", "1+3+5", 1, 0.0, lab::dir_111, 153e9},
    {"B", "3+5", 3, 30.0, lab::dir_111, 160e9},
    {"C", "3+5", 3, 54.7356103172453, lab::dir_001, 120e9},
    {"D", "4+6", 4, 90.0, lab::dir_m1m12, 165e9},
    {"E", "2", 2, 0.0, lab::dir_m1m12, 0.0},
};

RelaxParams fit_start() {
  auto a = RelaxParams::published().to_array();
  const double f[] = {1.3, 0.7, 1.5, 0.8, 1.1, 0.6};
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= f[k];
  return RelaxParams::from_array(a);
}

// ---------------------------------------------------------------- checks

CheckResult check_projections() {
  const Vec3 e = lab::dir_m1m12();
  const std::pair<int, double> want[] = {{2, 0.0},
                                         {4, std::sqrt(3.0) / 2},
                                         {6, std::sqrt(3.0) / 2},
                                         {1, 1 / std::sqrt(3.0)},
                                         {3, 1 / (2 * std::sqrt(3.0))},
                                         {5, 1 / (2 * std::sqrt(3.0))}};
  double worst = 0;
  for (const auto& [site, value] : want) {
    worst = std::max(worst, std::abs(dipole_projection(site_frame(site), e) - value));
  }
  return make(1, "dipole projections, E || [-1-12]", worst <= 1e-12, "max deviation " + fmt(worst));
}

CheckResult check_classes() {
  const bool at_111 = equivalence_classes(lab::dir_111()) == Partition{{1, 3, 5}, {2, 4, 6}};
  int broken = 0;
  for (int deg = -180; deg <= 180; ++deg) {
    const auto p = equivalence_classes(scan_direction(deg * kDeg));
    if (class_of(p, 3) != class_of(p, 5) || class_of(p, 4) != class_of(p, 6)) ++broken;
  }
  return make(2, "equivalence classes", at_111 && broken == 0,
              std::string("[111] partition ") + (at_111 ? "ok" : "wrong") + ", angles breaking 3/5 or 4/6: " +
                  std::to_string(broken));
}

CheckResult check_quadratic_shift(const MaterialConstants& c) {
  double g135 = 0;
  for (int s : {1, 3, 5}) g135 = std::max(g135, std::abs(shift_coefficient(site_frame(s), lab::dir_111(), c) - 4.2e9));
  const double g2 = shift_coefficient(site_frame(2), lab::dir_111(), c);
  const double s46 = zeeman(site_frame(4), field_vector({6, 90 * kDeg}), c).optical_shift;
  const double g1 = shift_coefficient(site_frame(1), lab::dir_111(), c);
  const bool pass = g135 <= 0.1 * 4.2e9 && std::abs(g2) < 0.15e9 && within(s46, 160e9, 0.10);
  return make(3, "quadratic shift coefficients", pass,
              "gamma2(1/3/5) " + fmt(g1) + " Hz/T^2, site 2 " + fmt(g2) + " Hz/T^2, sites 4/6 at 90 deg " +
                  fmt(s46) + " Hz");
}

CheckResult check_orientation_table(const MaterialConstants& c) {
  bool pass = true;
  std::string detail;
  for (const auto& row : kOrientationRows) {
    if (row.reference == 0) continue;
    const double s = zeeman(site_frame(row.site), field_vector({6, row.theta_deg * kDeg}), c).optical_shift;
    pass = pass && within(s, row.reference, 0.10);
    detail += std::string(detail.empty() ? "" : ", ") + row.label + " " + fmt(std::round(s / 1e7) / 100) + " GHz";
  }
  return make(4, "orientation table shifts at 6 T", pass, detail);
}

CheckResult check_broadening() {
  const double k = broadening(1, 8.0e9, 2.7e10, 8.3e11);
  const bool pass = within(k, 0.28e9, 0.10) && within(k, oracle::kBroadeningCoeff, 1e-12);
  return make(5, "field broadening coefficient", pass, fmt(k) + " Hz/T^2 vs observed 2.8e8");
}

CheckResult check_bleaney() {
  const double a = bleaney_alpha_d(kTableGamma, 4564, 8600, 5000);
  const bool pass = a >= 0.5e-26 && a <= 5e-26 && within(a, oracle::kBleaneyYag, 1e-9);
  return make(6, "direct-process estimate", pass, fmt(a) + " (Hz K T^2)^-1");
}

CheckResult check_rate_oracle() {
  const auto p = RelaxParams::published();
  double worst = 0;
  for (const auto& o : oracle::kRatePoints) {
    worst = std::max(worst, std::abs(rate(o.b, o.temp, kTableGamma, p) / o.total - 1));
  }
  return make(7, "rate law vs arithmetic oracle", worst <= 1e-9, "max relative deviation " + fmt(worst));
}

CheckResult check_b4_and_dominance() {
  const auto p = RelaxParams::published();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (double b : arange(3, 6, 0.1)) {
    const double x = std::log(b), y = std::log(rate_terms(b, 1.6, kTableGamma, p).direct);
    sx += x, sy += y, sxx += x * x, sxy += x * y, n += 1;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const auto cold = dominant_process(rate_terms(6, 1.6, kTableGamma, p));
  const auto warm = dominant_process(rate_terms(3, 4, kTableGamma, p));
  const bool pass = std::abs(slope - 4) <= 1e-6 && cold == Process::direct && warm == Process::orbach;
  return make(8, "B^4 law and dominant processes", pass,
              "slope " + fmt(slope) + ", (6 T, 1.6 K) " + to_string(cold) + ", (3 T, 4 K) " + to_string(warm));
}

CheckResult check_orbach_shape() {
  const auto p = RelaxParams::published();
  std::vector<double> o;
  for (double b : arange(0, 6, 0.1)) o.push_back(rate_terms(b, 4, kTableGamma, p).orbach);
  const auto peak = std::max_element(o.begin(), o.end());
  const double b_peak = 0.1 * static_cast<double>(peak - o.begin());
  const bool pass = *peak > o.front() && o.back() < *peak;
  return make(9, "Orbach term rises then falls at 4 K", pass,
              "maximum at " + fmt(b_peak) + " T, 6 T / max = " + fmt(o.back() / *peak));
}

CheckResult check_spectrum_round_trip(const MaterialConstants& c, std::uint64_t seed) {
  const SpectrumSettings settings;
  const auto grid = uniform_grid(0, 200e9, 250e6);
  const auto clean = synthesize_spectrum({0, 0}, lab::dir_111(), grid, c, settings).spectrum;
  const auto fit = fit_lorentzian(clean, 1);
  const auto& l = fit.lines.front();
  const auto& z = settings.zero_field;
  const double dev = std::max({std::abs(l.center - z.center) / z.fwhm, std::abs(l.fwhm / z.fwhm - 1),
                               std::abs(l.peak_alpha / z.peak_alpha - 1)});
  int good = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    auto s = clean;
    add_multiplicative_noise(s, 0.01, seed + k);
    if (within(fit_lorentzian(s, 1).lines.front().fwhm, z.fwhm, 0.02)) ++good;
  }
  return make(11, "spectrum synthesis and refit", dev <= 1e-6 && good == 100,
              "noiseless deviation " + fmt(dev) + ", noisy FWHM within 2%: " + std::to_string(good) + "/100");
}

CheckResult check_hole_decay(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(1e-5), 0);
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const double r = std::exp(u(rng));
    const auto est = extract_T1(simulate_hole_decay(r, decay_times(r, 12, 3), 1.0, 0, 0));
    worst = std::max(worst, std::abs(est.T1 * r - 1));
  }
  const double r = rate(6, 1.6, kTableGamma, RelaxParams::published());
  const auto times = decay_times(r, 12, 3);
  int good = 0;
  for (std::uint64_t k = 0; k < 200; ++k) {
    if (within(extract_T1(simulate_hole_decay(r, times, 1.0, 0.05, seed + k)).T1, 1 / r, 0.10)) ++good;
  }
  return make(12, "hole-decay simulation and T1 extraction", worst <= 1e-9 && good >= 190,
              "noiseless deviation " + fmt(worst) + ", noisy T1 within 10%: " + std::to_string(good) + "/200");
}

// ---------------------------------------------------------------- payloads

std::string spectrum_csv(const Spectrum& s, const std::vector<LineShape>& fit) {
  csv::Writer w({"detuning_Hz", "alpha_per_cm", "fit_alpha_per_cm"});
  for (std::size_t i = 0; i < s.detuning.size(); ++i) {
    double model = 0;
    for (const auto& l : fit) model += l(s.detuning[i]);
    w.row({s.detuning[i], s.alpha[i], model});
  }
  return w.str();
}

class Reproduction {
 public:
  Reproduction(const MaterialConstants& c, const ReproduceOptions& opts)
      : c_(c), opts_(opts), gamma_(effective_gamma(site_frame(1), lab::dir_111(), State::ground, c)) {}

  ReproduceReport run() {
    item("fig3_lines", [&] { line_shapes(); });
    item("fig4_field_dependence.csv", [&] { field_dependence(); });
    item("fig5_transmission", [&] { transmission_spectra(); });
    item("fig6_shift_vs_angle.csv", [&] { shift_vs_angle(); });
    item("table1_shifts.csv", [&] { orientation_table(); });
    item("fig7-9_relaxation", [&] { relaxation_figures(); });
    item("dominance_map.csv", [&] { dominance(); });

    check(1, "dipole projections, E || [-1-12]", [] { return check_projections(); });
    check(2, "equivalence classes", [] { return check_classes(); });
    check(3, "quadratic shift coefficients", [&] { return check_quadratic_shift(c_); });
    check(4, "orientation table shifts at 6 T", [&] { return check_orientation_table(c_); });
    check(5, "field broadening coefficient", [] { return check_broadening(); });
    check(6, "direct-process estimate", [] { return check_bleaney(); });
    check(7, "rate law vs arithmetic oracle", [] { return check_rate_oracle(); });
    check(8, "B^4 law and dominant processes", [] { return check_b4_and_dominance(); });
    check(9, "Orbach term rises then falls at 4 K", [] { return check_orbach_shape(); });
    check(10, "joint relaxation fit recovery", [&] { return joint_fit(); });
    check(11, "spectrum synthesis and refit", [&] { return check_spectrum_round_trip(c_, opts_.seed); });
    check(12, "hole-decay simulation and T1 extraction", [&] { return check_hole_decay(opts_.seed); });
    return std::move(report_);
  }

 private:
  void item(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error& e) {
      report_.errors[name] = std::string(e.name()) + ": " + e.what();
    }
  }

  void check(int id, const std::string& name, const std::function<CheckResult()>& body) {
    try {
      report_.checks.push_back(body());
    } catch (const Error& e) {
      report_.checks.push_back(make(id, name, false, std::string(e.name()) + ": " + e.what()));
    }
  }

  void line_shapes() {
    const auto grid = uniform_grid(0, 200e9, 250e6);
    csv::Writer fits({"panel", "B_T", "center_Hz", "fwhm_Hz", "peak_alpha_per_cm"});
    const std::pair<const char*, double> panels[] = {{"a", 0.0}, {"b", 3.0}};
    for (const auto& [panel, b] : panels) {
      const auto syn = synthesize_spectrum({b, 0}, lab::dir_111(), grid, c_);
      const auto fit = fit_lorentzian(syn.spectrum, 1);
      report_.files[std::string("fig3") + panel + "_spectrum.csv"] = spectrum_csv(syn.spectrum, fit.lines);
      const auto& l = fit.lines.front();
      fits.row({std::string(panel), b, l.center, l.fwhm, l.peak_alpha});
    }
    report_.files["fig3_fits.csv"] = fits.str();
  }

  void field_dependence() {
    const SpectrumSettings settings;
    const auto grid = uniform_grid(80e9, 400e9, 500e6);
    const double k0 = settings.zero_field.area() / 1e9;
    const double g2 = shift_coefficient(site_frame(1), lab::dir_111(), c_);

    csv::Writer w({"B_T", "shift_Hz", "fwhm_Hz", "linestrength_GHz_per_cm", "fit_shift_Hz", "fit_fwhm_Hz",
                   "fit_shift_sigma_Hz"});
    std::vector<double> bs, shifts, widths, sigmas;
    std::uint64_t k = 0;
    for (double b : arange(0, 6, 0.5)) {
      auto syn = synthesize_spectrum({b, 0}, lab::dir_111(), grid, c_, settings);
      add_multiplicative_noise(syn.spectrum, 0.01, opts_.seed + k++);
      const auto fit = fit_lorentzian(syn.spectrum, 1);
      const auto& l = fit.lines.front();
      const double fwhm = settings.zero_field.fwhm + broadening(b, settings.gamma_CF, settings.Gamma_CF, c_.delta_CF0);
      w.row({b, g2 * b * b, fwhm, linestrength(b, k0, settings.linestrength_coeff).value, l.center, l.fwhm,
             fit.std_errors.front().center});
      bs.push_back(b);
      shifts.push_back(l.center);
      widths.push_back(l.fwhm);
      sigmas.push_back(std::max(fit.std_errors.front().center, 1e6));
    }
    report_.files["fig4_field_dependence.csv"] = w.str();

    // shift = gamma2 B^2 and fwhm = Gamma0 + kappa B^2, fitted to the line fits
    fitting::FitProblem quad;
    quad.parameters = {{"gamma2", -1e12, 1e12, 1e9}};
    quad.residual_count = bs.size();
    quad.residuals = [&](const fitting::Vector& p) {
      fitting::Vector r(static_cast<Eigen::Index>(bs.size()));
      for (std::size_t i = 0; i < bs.size(); ++i) {
        r[static_cast<Eigen::Index>(i)] = (p[0] * bs[i] * bs[i] - shifts[i]) / sigmas[i];
      }
      return r;
    };
    const auto shift_fit = fitting::least_squares(quad, fitting::Vector::Constant(1, 1e9));

    fitting::FitProblem width;
    width.parameters = {{"Gamma0", 0, 1e12, 1e10}, {"kappa", -1e11, 1e11, 1e8}};
    width.residual_count = bs.size();
    width.residuals = [&](const fitting::Vector& p) {
      fitting::Vector r(static_cast<Eigen::Index>(bs.size()));
      for (std::size_t i = 0; i < bs.size(); ++i) {
        r[static_cast<Eigen::Index>(i)] = (p[0] + p[1] * bs[i] * bs[i] - widths[i]) / 1e8;
      }
      return r;
    };
    fitting::Vector w0(2);
    w0 << 1e10, 1e8;
    fitting::FitOptions scaled;
    scaled.scale_covariance = true;
    const auto width_fit = fitting::least_squares(width, w0, scaled);

    csv::Writer coeffs({"quantity", "model", "fit", "fit_std_error"});
    coeffs.row({std::string("gamma2_Hz_per_T2"), g2, shift_fit.params[0], shift_fit.std_errors[0]});
    coeffs.row({std::string("broadening_Hz_per_T2"),
                broadening(1, settings.gamma_CF, settings.Gamma_CF, c_.delta_CF0), width_fit.params[1],
                width_fit.std_errors[1]});
    report_.files["fig4_coefficients.csv"] = coeffs.str();
  }

  void transmission_spectra() {
    const auto grid = uniform_grid(150e9, 500e9, 1e9);
    const double length_cm = opts_.length_mm / 10;
    const std::pair<const char*, Vec3> pols[] = {{"fig5a_transmission_pol111.csv", lab::dir_111()},
                                                 {"fig5b_transmission_pol-1-12.csv", lab::dir_m1m12()}};
    for (const auto& [name, pol] : pols) {
      csv::Writer w({"theta_deg", "detuning_Hz", "transmission"});
      for (double deg : arange(0, 90, 15)) {
        const auto syn = synthesize_spectrum({6, deg * kDeg}, pol, grid, c_);
        const auto t = to_transmission(syn.spectrum.alpha, length_cm);
        for (std::size_t i = 0; i < grid.size(); ++i) w.row({deg, grid[i], t[i]});
      }
      report_.files[name] = w.str();
    }
  }

  void shift_vs_angle() {
    std::vector<double> thetas;
    for (double deg : arange(0, 90, 1)) thetas.push_back(deg * kDeg);
    const std::vector<int> sites{1, 3, 4, 5, 6};
    csv::Writer w({"theta_deg", "site_class", "shift_Hz"});
    for (const auto& pt : shift_curve(sites, thetas, 6, c_)) {
      w.row({std::round(pt.theta / kDeg * 1e9) / 1e9, class_label(pt.sites), pt.shift});
    }
    report_.files["fig6_shift_vs_angle.csv"] = w.str();
  }

  void orientation_table() {
    csv::Writer w({"label", "sites", "theta_deg", "shift_model_Hz", "shift_reference_Hz", "relative_deviation",
                   "polarization_weight", "rate_model_Hz", "relaxation_modeled"});
    const auto p = RelaxParams::published();
    for (const auto& row : kOrientationRows) {
      const Vec3 b = field_vector({6, row.theta_deg * kDeg});
      const auto& site = site_frame(row.site);
      const double s = zeeman(site, b, c_).optical_shift;
      const double proj = dipole_projection(site, row.polarization());
      const bool modeled = relaxation_modeled(site, b, c_);
      const double g = effective_gamma(site, b, State::ground, c_);
      Cell rel = row.reference != 0 ? Cell(s / row.reference - 1) : Cell(std::string());
      Cell r = modeled ? Cell(rate(6, 1.6, g, p)) : Cell(std::string());
      w.row({std::string(row.label), std::string(row.sites), row.theta_deg, s, row.reference, rel, proj * proj, r,
             std::string(modeled ? "yes" : "no")});
    }
    report_.files["table1_shifts.csv"] = w.str();
  }

  void relaxation_figures() {
    const auto p = RelaxParams::published();
    const auto datasets = synthesize_relaxation_datasets(p, gamma_, 0.1, opts_.seed);
    const char* data_names[] = {"fig7_data_T-sweep_3T.csv", "fig8_data_B-sweep_1.6K.csv",
                                "fig9_data_B-sweep_4K.csv"};
    for (std::size_t i = 0; i < datasets.size(); ++i) report_.files[data_names[i]] = write_rate_csv(datasets[i]);

    const auto fit = fitting::joint_relax_fit(datasets, gamma_, fit_start());
    auto model = [&](const std::string& name, const std::vector<double>& bs, const std::vector<double>& ts) {
      csv::Writer w({"B_T", "T_K", "rate_Hz", "residual_Hz", "direct_Hz", "orbach_Hz", "fit_rate_Hz"});
      for (double b : bs) {
        for (double t : ts) {
          const auto terms = rate_terms(b, t, gamma_, p);
          w.row({b, t, terms.total(), terms.residual, terms.direct, terms.orbach, rate(b, t, gamma_, fit.params)});
        }
      }
      report_.files[name] = w.str();
    };
    model("fig7_model_T-sweep_3T.csv", {3.0}, arange(1.5, 4.6, 0.05));
    model("fig8_model_B-sweep_1.6K.csv", arange(0, 6, 0.1), {1.6});
    model("fig9_model_B-sweep_4K.csv", arange(0, 6, 0.1), {4.0});
  }

  void dominance() {
    const auto fields = arange(0, 6, 0.5);
    const auto temps = arange(1.3, 5.0, 0.1);
    csv::Writer w({"B_T", "T_K", "residual_Hz", "direct_Hz", "orbach_Hz", "dominant"});
    for (const auto& cell : dominance_map(fields, temps, gamma_, RelaxParams::published())) {
      w.row({cell.b, cell.temp, cell.terms.residual, cell.terms.direct, cell.terms.orbach,
             std::string(to_string(cell.process))});
    }
    report_.files["dominance_map.csv"] = w.str();
  }

  CheckResult joint_fit() {
    const auto truth = RelaxParams::published();
    const auto want = truth.to_array();

    const auto clean = synthesize_relaxation_datasets(truth, gamma_, 0, 0);
    const auto exact = fitting::joint_relax_fit(clean, gamma_, fit_start());
    double exact_dev = 0;
    for (std::size_t k = 0; k < want.size(); ++k) {
      exact_dev = std::max(exact_dev, std::abs(exact.params.to_array()[k] / want[k] - 1));
    }

    std::array<std::vector<double>, RelaxParams::kCount> samples;
    RelaxFitResultSummary first;
    int failures = 0;
    for (int k = 0; k < opts_.mc_seeds; ++k) {
      const auto ds = synthesize_relaxation_datasets(truth, gamma_, 0.1, opts_.seed + static_cast<std::uint64_t>(k));
      try {
        const auto fit = fitting::joint_relax_fit(ds, gamma_, fit_start());
        const auto got = fit.params.to_array();
        for (std::size_t j = 0; j < got.size(); ++j) samples[j].push_back(got[j]);
        if (k == 0) first = {fit.params, fit.std_errors, true};
      } catch (const Error&) {
        ++failures;
      }
    }

    csv::Writer w({"parameter", "unit", "generating_value", "noiseless_fit", "median_fit", "median_relative_error",
                   "seed0_fit", "seed0_std_error"});
    double worst = 0;
    for (std::size_t j = 0; j < want.size(); ++j) {
      const double med = samples[j].empty() ? std::nan("") : median(samples[j]);
      const double rel = std::abs(med / want[j] - 1);
      worst = std::max(worst, std::isnan(rel) ? 1.0 : rel);
      w.row({std::string(RelaxParams::kNames[j]), std::string(kRelaxParamUnits[j]), want[j],
             exact.params.to_array()[j], med, rel, first.ok ? Cell(first.params.to_array()[j]) : Cell(std::string()),
             first.ok ? Cell(first.std_errors.to_array()[j]) : Cell(std::string())});
    }
    report_.files["table2_recovery.csv"] = w.str();

    const bool pass = exact_dev <= 1e-6 && worst <= 0.15 && failures == 0;
    return make(10, "joint relaxation fit recovery", pass,
                "noiseless deviation " + fmt(exact_dev) + ", worst median deviation " + fmt(worst) + " over " +
                    std::to_string(opts_.mc_seeds) + " seeds, failed fits " + std::to_string(failures));
  }

  struct RelaxFitResultSummary {
    RelaxParams params;
    RelaxParams std_errors;
    bool ok = false;
  };

  const MaterialConstants& c_;
  ReproduceOptions opts_;
  double gamma_;
  ReproduceReport report_;
};

}  // namespace

bool ReproduceReport::all_pass() const {
  return errors.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string ReproduceReport::summary_csv() const {
  csv::Writer w({"criterion", "name", "status", "detail"});
  for (const auto& c : checks) {
    w.row({static_cast<double>(c.id), c.name, std::string(c.pass ? "PASS" : "FAIL"), c.detail});
  }
  for (const auto& [item, what] : errors) w.row({0.0, item, std::string("ERROR"), what});
  return w.str();
}

ReproduceReport compute_reproduction(const MaterialConstants& c, const ReproduceOptions& opts) {
  return Reproduction(c, opts).run();
}

ReproduceReport reproduce_paper(const std::filesystem::path& dir, const MaterialConstants& c,
                                const ReproduceOptions& opts) {
  if (!std::filesystem::is_directory(dir)) throw FileNotFound("output directory " + dir.string() + " does not exist");

  auto report = compute_reproduction(c, opts);
  const auto again = compute_reproduction(c, opts);
  std::size_t differing = 0;
  for (const auto& [name, payload] : report.files) {
    auto it = again.files.find(name);
    if (it == again.files.end() || it->second != payload) ++differing;
  }
  differing += again.files.size() > report.files.size() ? again.files.size() - report.files.size() : 0;
  report.checks.push_back(make(13, "deterministic output", differing == 0,
                               std::to_string(report.files.size()) + " files, " + std::to_string(differing) +
                                   " differing between two runs"));

  report.files["summary.csv"] = report.summary_csv();
  for (const auto& [name, payload] : report.files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw FileNotFound("cannot write " + (dir / name).string());
    out << payload;
  }
  return report;
}

}  // namespace tmyag
