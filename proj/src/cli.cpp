#include "tmyag/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tmyag/constants.hpp"
#include "tmyag/csv.hpp"
#include "tmyag/error.hpp"
#include "tmyag/geometry.hpp"
#include "tmyag/relax_fit.hpp"
#include "tmyag/relaxation.hpp"
#include "tmyag/reproduce.hpp"
#include "tmyag/spectra.hpp"
#include "tmyag/zeeman.hpp"

namespace tmyag::cli {

namespace {

constexpr double kDeg = std::numbers::pi / 180;

using csv::Cell;
using nlohmann::ordered_json;

/// Usage problems detected after CLI11 parsing; exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Globals {
  std::string constants = "default";
  std::string output;
  bool version = false;
};

struct Context {
  MaterialConstants constants;
  std::string constants_hash;
  std::ostream& err;
};

struct Result {
  std::string payload;
  /// Files written by the command itself (reproduce-paper).
  std::vector<std::string> written;
};

using Handler = std::function<Result(Context&)>;

std::vector<double> arange(double lo, double hi, double step, const char* flag) {
  if (!(step > 0) || !(hi >= lo)) {
    throw UsageError("ConflictingFlags", std::string("empty or invalid range for ") + flag);
  }
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

// Angles like 0.1 * 3 print as 0.30000000000000004; grid labels are rounded.
double tidy(double v) { return std::round(v * 1e9) / 1e9; }

Vec3 parse_polarization(const std::string& s) {
  if (s == "111") return lab::dir_111();
  if (s == "-1-12") return lab::dir_m1m12();
  if (s == "001") return lab::dir_001();
  std::vector<double> xyz;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      xyz.push_back(std::stod(part, &used));
      if (used != part.size()) xyz.clear();
    } catch (const std::exception&) {
      xyz.clear();
      break;
    }
  }
  if (xyz.size() != 3) {
    throw UsageError("InvalidPolarization", "--pol must be 111, -1-12, 001 or x,y,z; got '" + s + "'");
  }
  const Vec3 v(xyz[0], xyz[1], xyz[2]);
  if (v.norm() == 0) throw ZeroDirection("polarization vector is zero");
  return v.normalized();
}

struct GammaFlags {
  int site = 1;
  double theta_deg = 0;
  std::optional<double> gamma;
};

void add_gamma_flags(CLI::App* sub, GammaFlags& g) {
  sub->add_option("--site", g.site, "Site whose ground-state splitting sets gamma")
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  sub->add_option("--theta-deg", g.theta_deg, "Field angle from [111] toward [-1-12], degrees")
      ->capture_default_str();
  sub->add_option("--gamma-Hz-per-T", g.gamma, "Override the effective gyromagnetic ratio (Hz/T)");
}

double resolve_gamma(const GammaFlags& g, const Context& ctx) {
  if (g.gamma) return *g.gamma;
  const auto& site = site_frame(g.site);
  const Vec3 dir = scan_direction(g.theta_deg * kDeg);
  if (!relaxation_modeled(site, dir, ctx.constants)) {
    ctx.err << "warning: site " << g.site << " relaxation is unmodeled at theta = " << g.theta_deg
            << " deg; the phonon rate law does not apply\n";
  }
  return effective_gamma(site, dir, State::ground, ctx.constants);
}

RelaxParams resolve_params(const std::string& path) {
  return path.empty() ? RelaxParams::published() : load_relax_params(path);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ordered_json resolved_flags(const CLI::App& app, const CLI::App* sub) {
  ordered_json flags = ordered_json::object();
  auto collect = [&flags](const CLI::App& a) {
    for (const CLI::Option* o : a.get_options()) {
      const std::string name = o->get_name();
      if (name == "--help" || name == "--version") continue;
      if (o->get_type_size_max() == 0) {
        flags[name] = o->count() > 0;
      } else if (o->count() > 0) {
        const auto& res = o->results();
        std::string joined;
        for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? "," : "") + res[i];
        flags[name] = joined;
      } else {
        flags[name] = o->get_default_str();
      }
    }
  };
  collect(app);
  if (sub) collect(*sub);
  return flags;
}

// ------------------------------------------------------------- subcommands

struct FieldFlags {
  double b = 6;
  double theta_deg = 0;
  std::string pol = "111";
};

void add_field_flags(CLI::App* sub, FieldFlags& f, double default_b) {
  f.b = default_b;
  sub->add_option("--B", f.b, "Field magnitude, T")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--theta-deg", f.theta_deg, "Field angle from [111] toward [-1-12], degrees")
      ->capture_default_str();
  sub->add_option("--pol", f.pol, "Light polarization: 111, -1-12, 001 or x,y,z")->capture_default_str();
}

Handler site_table(CLI::App& app) {
  auto* sub = app.add_subcommand("site-table", "Local field, dipole projection and class of each site");
  auto f = std::make_shared<FieldFlags>();
  add_field_flags(sub, *f, 6);
  return [f](Context&) {
    const Vec3 b = field_vector({f->b, f->theta_deg * kDeg});
    const Vec3 e = parse_polarization(f->pol);
    const Partition classes = f->b > 0 ? equivalence_classes(b) : Partition{{1, 2, 3, 4, 5, 6}};
    csv::Writer w({"site", "local_Bx_T", "local_By_T", "local_Bz_T", "dipole_projection", "site_class"});
    for (const auto& s : all_sites()) {
      const Vec3 l = local_field(s, b);
      w.row({static_cast<double>(s.site_index), l[0], l[1], l[2], dipole_projection(s, e),
             class_label(classes[class_of(classes, s.site_index)])});
    }
    return Result{w.str(), {}};
  };
}

Handler shift_curve_cmd(CLI::App& app) {
  auto* sub = app.add_subcommand("shift-curve", "Optical shift of each site class versus field angle");
  struct Flags {
    double b = 6, lo = 0, hi = 90, step = 1;
    std::vector<int> sites{1, 2, 3, 4, 5, 6};
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--B", f->b, "Field magnitude, T")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--theta-min-deg", f->lo, "First angle, degrees")->capture_default_str();
  sub->add_option("--theta-max-deg", f->hi, "Last angle, degrees")->capture_default_str();
  sub->add_option("--theta-step-deg", f->step, "Angle step, degrees")->capture_default_str();
  sub->add_option("--sites", f->sites, "Sites to include, comma separated")
      ->delimiter(',')
      ->check(CLI::Range(1, 6))
      ->capture_default_str();
  return [f](Context& ctx) {
    csv::Writer w({"theta_deg", "site_class", "shift_Hz"});
    for (double deg : arange(f->lo, f->hi, f->step, "--theta-*-deg")) {
      const double theta = deg * kDeg;
      for (const auto& pt : shift_curve(f->sites, std::span(&theta, 1), f->b, ctx.constants)) {
        w.row({tidy(deg), class_label(pt.sites), pt.shift});
      }
    }
    return Result{w.str(), {}};
  };
}

Handler shift_vs_b(CLI::App& app) {
  auto* sub = app.add_subcommand("shift-vs-B", "Shift, width and linestrength of the most strongly probed class");
  struct Flags {
    double theta_deg = 0, b_max = 6, b_step = 0.5;
    std::string pol = "111";
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--theta-deg", f->theta_deg, "Field angle from [111] toward [-1-12], degrees")
      ->capture_default_str();
  sub->add_option("--pol", f->pol, "Light polarization: 111, -1-12, 001 or x,y,z")->capture_default_str();
  sub->add_option("--B-max", f->b_max, "Largest field, T")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--B-step", f->b_step, "Field step, T")->capture_default_str();
  return [f](Context& ctx) {
    const SpectrumSettings settings;
    const Vec3 dir = scan_direction(f->theta_deg * kDeg);
    const Vec3 e = parse_polarization(f->pol);

    // the class with the largest total |mu . E|^2 dominates the spectrum
    const Partition classes = equivalence_classes(dir);
    const SiteClass* probed = &classes.front();
    double best = -1;
    for (const auto& cls : classes) {
      double weight = 0;
      for (int s : cls) weight += std::pow(dipole_projection(site_frame(s), e), 2);
      if (weight > best + 1e-12) best = weight, probed = &cls;
    }
    const double g2 = shift_coefficient(site_frame(probed->front()), dir, ctx.constants);
    const double k0 = settings.zero_field.area() / 1e9;
    ctx.err << "sites " << class_label(*probed) << "\n";

    csv::Writer w({"B_T", "shift_Hz", "fwhm_Hz", "linestrength_GHz_per_cm"});
    for (double b : arange(0, f->b_max, f->b_step, "--B-step")) {
      const double fwhm = settings.zero_field.fwhm + broadening(b, settings.gamma_CF, settings.Gamma_CF,
                                                                ctx.constants.delta_CF0);
      const auto k = linestrength(b, k0, settings.linestrength_coeff);
      if (k.negative) ctx.err << "warning: linestrength is negative at " << b << " T\n";
      w.row({tidy(b), g2 * b * b, fwhm, k.value});
    }
    return Result{w.str(), {}};
  };
}

Handler spectrum_cmd(CLI::App& app) {
  auto* sub = app.add_subcommand("spectrum", "Synthesize an absorption or transmission spectrum");
  struct Flags {
    FieldFlags field;
    double center = 0, span = 200, step = 250;
    std::optional<double> length_mm;
    bool transmission = false;
    double noise = 0;
    std::uint64_t seed = 0;
  };
  auto f = std::make_shared<Flags>();
  add_field_flags(sub, f->field, 0);
  sub->add_option("--grid-center-GHz", f->center, "Grid center detuning, GHz")->capture_default_str();
  sub->add_option("--grid-span-GHz", f->span, "Grid span, GHz")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--grid-step-MHz", f->step, "Grid step, MHz")->check(CLI::PositiveNumber)->capture_default_str();
  sub->add_option("--length-mm", f->length_mm, "Crystal length, mm")->check(CLI::PositiveNumber);
  sub->add_flag("--transmission", f->transmission, "Emit exp(-alpha L) instead of alpha");
  sub->add_option("--noise", f->noise, "Relative multiplicative noise")->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sub->add_option("--seed", f->seed, "Noise seed")->capture_default_str();
  return [f](Context& ctx) {
    if (f->transmission && !f->length_mm) {
      throw UsageError("ConflictingFlags", "--transmission needs --length-mm");
    }
    const auto grid = uniform_grid(f->center * 1e9, f->span * 1e9, f->step * 1e6);
    auto syn = synthesize_spectrum({f->field.b, f->field.theta_deg * kDeg}, parse_polarization(f->field.pol), grid,
                                   ctx.constants);
    if (syn.negative_linestrength) ctx.err << "warning: linestrength is negative at this field\n";
    if (syn.beyond_perturbative) ctx.err << "warning: shift exceeds the perturbative range\n";
    if (f->noise > 0) add_multiplicative_noise(syn.spectrum, f->noise, f->seed);

    const auto& s = syn.spectrum;
    csv::Writer w({"detuning_Hz", f->transmission ? "transmission" : "alpha_per_cm"});
    const auto values = f->transmission ? to_transmission(s.alpha, *f->length_mm / 10) : s.alpha;
    for (std::size_t i = 0; i < s.detuning.size(); ++i) w.row({s.detuning[i], values[i]});
    return Result{w.str(), {}};
  };
}

Handler fit_spectrum(CLI::App& app) {
  auto* sub = app.add_subcommand("fit-spectrum", "Fit Lorentzian lines to a spectrum CSV");
  struct Flags {
    std::string input;
    int lines = 1;
    std::optional<double> length_mm;
    std::vector<double> centers_ghz;
    double init_fwhm_ghz = 17;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("input", f->input, "CSV with detuning_Hz and alpha_per_cm or transmission")->required();
  sub->add_option("--lines", f->lines, "Number of lines")->check(CLI::Range(1, 6))->capture_default_str();
  sub->add_option("--length-mm", f->length_mm, "Crystal length for transmission input, mm")
      ->check(CLI::PositiveNumber);
  sub->add_option("--centers-GHz", f->centers_ghz, "Initial line centers, GHz, comma separated")->delimiter(',');
  sub->add_option("--init-fwhm-GHz", f->init_fwhm_ghz, "Initial width used with --centers-GHz")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  return [f](Context& ctx) {
    const auto table = csv::read_file(f->input);
    const std::size_t x = table.column("detuning_Hz");
    const bool is_transmission =
        std::find(table.header.begin(), table.header.end(), "transmission") != table.header.end();
    if (is_transmission && !f->length_mm) {
      throw UsageError("ConflictingFlags", "transmission input needs --length-mm");
    }
    const std::size_t y = table.column(is_transmission ? "transmission" : "alpha_per_cm");
    Spectrum s;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      s.detuning.push_back(table.number(r, x));
      s.alpha.push_back(table.number(r, y));
    }
    if (is_transmission) s.alpha = from_transmission(s.alpha, *f->length_mm / 10);

    std::optional<std::vector<LineShape>> init;
    if (!f->centers_ghz.empty()) {
      if (static_cast<int>(f->centers_ghz.size()) != f->lines) {
        throw UsageError("ConflictingFlags", "--centers-GHz must list one center per line");
      }
      init.emplace();
      for (double c : f->centers_ghz) {
        const auto nearest = std::min_element(s.detuning.begin(), s.detuning.end(), [&](double a, double b) {
          return std::abs(a - c * 1e9) < std::abs(b - c * 1e9);
        });
        const double peak = s.alpha[static_cast<std::size_t>(nearest - s.detuning.begin())];
        init->push_back({c * 1e9, f->init_fwhm_ghz * 1e9, peak});
      }
    }
    const auto fit = fit_lorentzian(s, f->lines, init);
    if (fit.ambiguous) ctx.err << "warning: lines are not resolvable; the decomposition is ambiguous\n";

    csv::Writer w({"line", "center_Hz", "fwhm_Hz", "peak_alpha_per_cm", "center_sigma_Hz", "fwhm_sigma_Hz",
                   "peak_sigma_per_cm", "ambiguous"});
    for (std::size_t i = 0; i < fit.lines.size(); ++i) {
      const auto& l = fit.lines[i];
      const auto& e = fit.std_errors[i];
      w.row({static_cast<double>(i + 1), l.center, l.fwhm, l.peak_alpha, e.center, e.fwhm, e.peak_alpha,
             std::string(fit.ambiguous ? "yes" : "no")});
    }
    return Result{w.str(), {}};
  };
}

Handler relax_rate(CLI::App& app) {
  auto* sub = app.add_subcommand("relax-rate", "Spin-lattice rate and its three terms");
  struct Flags {
    double b = 6, temp = 1.6;
    std::string params;
    GammaFlags gamma;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--B", f->b, "Field magnitude, T")->check(CLI::NonNegativeNumber)->capture_default_str();
  sub->add_option("--T", f->temp, "Temperature, K")->capture_default_str();
  sub->add_option("--params-file", f->params, "Rate-law parameters JSON (default: published fit)");
  add_gamma_flags(sub, f->gamma);
  return [f](Context& ctx) {
    const double gamma = resolve_gamma(f->gamma, ctx);
    const auto t = rate_terms(f->b, f->temp, gamma, resolve_params(f->params));
    if (t.direct_validity_warning) ctx.err << "warning: h gamma B exceeds 0.1 k_B T; direct term outside its range\n";
    csv::Writer w({"B_T", "T_K", "gamma_Hz_per_T", "residual_Hz", "direct_Hz", "orbach_Hz", "rate_Hz", "T1_s",
                   "dominant"});
    w.row({f->b, f->temp, gamma, t.residual, t.direct, t.orbach, t.total(), 1 / t.total(),
           std::string(to_string(dominant_process(t)))});
    return Result{w.str(), {}};
  };
}

Handler dominance(CLI::App& app) {
  auto* sub = app.add_subcommand("dominance-map", "Dominant relaxation process over a (B, T) grid");
  struct Flags {
    double b_min = 0, b_max = 6, b_step = 0.5, t_min = 1.3, t_max = 5, t_step = 0.1;
    std::string params;
    GammaFlags gamma;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--B-min", f->b_min, "T")->capture_default_str();
  sub->add_option("--B-max", f->b_max, "T")->capture_default_str();
  sub->add_option("--B-step", f->b_step, "T")->capture_default_str();
  sub->add_option("--T-min", f->t_min, "K")->capture_default_str();
  sub->add_option("--T-max", f->t_max, "K")->capture_default_str();
  sub->add_option("--T-step", f->t_step, "K")->capture_default_str();
  sub->add_option("--params-file", f->params, "Rate-law parameters JSON (default: published fit)");
  add_gamma_flags(sub, f->gamma);
  return [f](Context& ctx) {
    const auto fields = arange(f->b_min, f->b_max, f->b_step, "--B-*");
    const auto temps = arange(f->t_min, f->t_max, f->t_step, "--T-*");
    csv::Writer w({"B_T", "T_K", "residual_Hz", "direct_Hz", "orbach_Hz", "dominant"});
    for (const auto& c : dominance_map(fields, temps, resolve_gamma(f->gamma, ctx), resolve_params(f->params))) {
      w.row({tidy(c.b), tidy(c.temp), c.terms.residual, c.terms.direct, c.terms.orbach,
             std::string(to_string(c.process))});
    }
    return Result{w.str(), {}};
  };
}

Handler hole_decay(CLI::App& app) {
  auto* sub = app.add_subcommand("hole-decay", "Simulate a hole-area decay, or extract T1 from one");
  struct Flags {
    std::optional<double> rate;
    double b = 6, temp = 1.6;
    std::string params;
    GammaFlags gamma;
    std::size_t points = 12;
    double half_lives = 3, amplitude = 1, noise = 0;
    std::uint64_t seed = 0;
    std::string extract;
  };
  auto f = std::make_shared<Flags>();
  auto* rate_opt = sub->add_option("--rate-Hz", f->rate, "Decay rate (default: rate law at --B, --T)");
  auto* b_opt = sub->add_option("--B", f->b, "Field magnitude, T")->capture_default_str();
  auto* t_opt = sub->add_option("--T", f->temp, "Temperature, K")->capture_default_str();
  sub->add_option("--params-file", f->params, "Rate-law parameters JSON (default: published fit)");
  add_gamma_flags(sub, f->gamma);
  auto* points = sub->add_option("--points", f->points, "Number of samples")->capture_default_str();
  sub->add_option("--half-lives", f->half_lives, "Span in half-lives")->capture_default_str();
  sub->add_option("--amplitude", f->amplitude, "Initial hole area")->capture_default_str();
  auto* noise = sub->add_option("--noise", f->noise, "Relative noise")->capture_default_str();
  sub->add_option("--seed", f->seed, "Noise seed")->capture_default_str();
  sub->add_option("--extract", f->extract, "CSV with time_s,area: fit T1 instead of simulating")
      ->excludes(rate_opt)
      ->excludes(b_opt)
      ->excludes(t_opt)
      ->excludes(points)
      ->excludes(noise);
  return [f](Context& ctx) {
    if (!f->extract.empty()) {
      const auto table = csv::read_file(f->extract);
      const std::size_t tc = table.column("time_s"), ac = table.column("area");
      HoleDecay series;
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        series.times.push_back(table.number(r, tc));
        series.areas.push_back(table.number(r, ac));
      }
      const auto est = extract_T1(series);
      csv::Writer w({"T1_s", "sigma_T1_s", "rate_Hz", "amplitude", "relative_residual_rms"});
      w.row({est.T1, est.sigma_T1, est.rate, est.amplitude, est.relative_residual_rms});
      return Result{w.str(), {}};
    }
    const double r = f->rate ? *f->rate : rate(f->b, f->temp, resolve_gamma(f->gamma, ctx), resolve_params(f->params));
    if (!(r > 0)) throw NonpositiveInput("decay rate must be positive");
    const auto series = simulate_hole_decay(r, decay_times(r, f->points, f->half_lives), f->amplitude, f->noise,
                                            f->seed);
    csv::Writer w({"time_s", "area"});
    for (std::size_t i = 0; i < series.times.size(); ++i) w.row({series.times[i], series.areas[i]});
    return Result{w.str(), {}};
  };
}

Handler fit_relax(CLI::App& app) {
  auto* sub = app.add_subcommand("fit-relax", "Joint fit of the rate law to relaxation datasets");
  struct Flags {
    std::vector<std::string> files;
    std::string init;
    GammaFlags gamma;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("files", f->files, "CSV files with B_T,T_K,rate_Hz,sigma_Hz")->required();
  sub->add_option("--init", f->init, "Starting parameters JSON (default: published fit)");
  add_gamma_flags(sub, f->gamma);
  return [f](Context& ctx) {
    std::vector<RateDataset> datasets;
    for (const auto& path : f->files) {
      datasets.push_back(read_rate_csv(path, std::filesystem::path(path).filename().string()));
    }
    const auto res = fitting::joint_relax_fit(datasets, resolve_gamma(f->gamma, ctx), resolve_params(f->init));
    auto doc = ordered_json::parse(write_relax_params(res.params, &res.std_errors));
    doc["residual_norm"] = res.fit.residual_norm;
    doc["points"] = res.points;
    doc["iterations"] = res.fit.iterations;
    doc["converged"] = res.fit.converged;
    return Result{doc.dump(2) + "\n", {}};
  };
}

Handler bleaney(CLI::App& app) {
  auto* sub = app.add_subcommand("bleaney", "Order-of-magnitude direct-process coefficient");
  struct Flags {
    double gamma = 4e8;
    std::optional<double> rho, v_l, v_t;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--gamma-Hz-per-T", f->gamma, "Effective gyromagnetic ratio, Hz/T")->capture_default_str();
  sub->add_option("--rho", f->rho, "Density, kg/m^3 (default: constants)");
  sub->add_option("--v-l", f->v_l, "Longitudinal sound velocity, m/s (default: constants)");
  sub->add_option("--v-t", f->v_t, "Transverse sound velocity, m/s (default: constants)");
  return [f](Context& ctx) {
    const double rho = f->rho.value_or(ctx.constants.rho);
    const double v_l = f->v_l.value_or(ctx.constants.v_l);
    const double v_t = f->v_t.value_or(ctx.constants.v_t);
    csv::Writer w({"gamma_Hz_per_T", "rho_kg_per_m3", "v_l_m_per_s", "v_t_m_per_s", "v_mean_m_per_s",
                   "alpha_D_per_Hz_K_T2"});
    w.row({f->gamma, rho, v_l, v_t, (v_l + 2 * v_t) / 3, bleaney_alpha_d(f->gamma, rho, v_l, v_t)});
    return Result{w.str(), {}};
  };
}

Handler reproduce(CLI::App& app, std::ostream& out) {
  auto* sub = app.add_subcommand("reproduce-paper", "Regenerate every figure and table CSV with a PASS/FAIL summary");
  struct Flags {
    std::string dir;
    ReproduceOptions opts;
  };
  auto f = std::make_shared<Flags>();
  sub->add_option("--output-dir", f->dir, "Existing directory for the CSVs")->required();
  sub->add_option("--seed", f->opts.seed, "Base noise seed")->capture_default_str();
  sub->add_option("--mc-seeds", f->opts.mc_seeds, "Noise realisations for the joint-fit study")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--length-mm", f->opts.length_mm, "Crystal length for transmission spectra, mm")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  return [f, &out](Context& ctx) {
    const auto report = reproduce_paper(f->dir, ctx.constants, f->opts);
    for (const auto& c : report.checks) {
      out << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name << " (" << c.detail << ")\n";
    }
    for (const auto& [item, what] : report.errors) out << "ERROR " << item << ": " << what << "\n";
    Result r;
    for (const auto& [name, payload] : report.files) r.written.push_back(name);
    return r;
  };
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileNotFound("cannot write " + path.string());
  out << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratic Zeeman effect and spin-lattice relaxation of Tm:YAG", "tmyag"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  Globals g;
  app.add_option("--constants", g.constants, "Constants JSON file, or 'default'")->capture_default_str();
  app.add_option("-o,--output", g.output, "Write the result here, with a .manifest.json sidecar");
  app.add_flag("--version", g.version, "Print the version and constants hash");

  std::map<std::string, Handler> handlers;
  handlers["site-table"] = site_table(app);
  handlers["shift-curve"] = shift_curve_cmd(app);
  handlers["shift-vs-B"] = shift_vs_b(app);
  handlers["spectrum"] = spectrum_cmd(app);
  handlers["fit-spectrum"] = fit_spectrum(app);
  handlers["relax-rate"] = relax_rate(app);
  handlers["dominance-map"] = dominance(app);
  handlers["hole-decay"] = hole_decay(app);
  handlers["fit-relax"] = fit_relax(app);
  handlers["bleaney"] = bleaney(app);
  handlers["reproduce-paper"] = reproduce(app, out);

  std::vector<const char*> argv{"tmyag"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ExtrasError& e) {
    if (app.get_subcommands().empty()) {
      err << "UnknownSubcommand: " << e.what() << "\n";
    } else {
      err << e.get_name() << ": " << e.what() << "\n";
    }
    return 2;
  } catch (const CLI::ParseError& e) {
    err << e.get_name() << ": " << e.what() << "\n";
    return 2;
  }

  const auto subs = app.get_subcommands();
  try {
    const bool reproducing = !subs.empty() && subs.front()->get_name() == "reproduce-paper";
    Context ctx{load_constants(g.constants, reproducing ? Validation::structural : Validation::full), "", err};
    ctx.constants_hash = constants_hash(ctx.constants);

    if (g.version) {
      out << "tmyag " << kVersion << " constants " << ctx.constants_hash << "\n";
      return 0;
    }
    if (subs.empty()) {
      err << "UsageError: a subcommand is required\n" << app.help();
      return 2;
    }
    const CLI::App* sub = subs.front();
    if (reproducing && !g.output.empty()) {
      throw UsageError("ConflictingFlags", "reproduce-paper writes into --output-dir; -o does not apply");
    }

    const Result result = handlers.at(sub->get_name())(ctx);

    ordered_json manifest;
    manifest["tool"] = "tmyag";
    manifest["version"] = kVersion;
    manifest["subcommand"] = sub->get_name();
    manifest["flags"] = resolved_flags(app, sub);
    manifest["constants_source"] = g.constants;
    manifest["constants_hash"] = ctx.constants_hash;
    manifest["timestamp"] = utc_timestamp();

    if (reproducing) {
      manifest["outputs"] = result.written;
      const auto dir = std::filesystem::path(sub->get_option("--output-dir")->as<std::string>());
      write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    } else if (!g.output.empty()) {
      write_file(g.output, result.payload);
      manifest["outputs"] = {std::filesystem::path(g.output).filename().string()};
      write_file(g.output + ".manifest.json", manifest.dump(2) + "\n");
    } else {
      out << result.payload;
    }
    return 0;
  } catch (const UsageError& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << e.name() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "Error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tmyag::cli
