#include "tmyag/relax_fit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

#include "tmyag/csv.hpp"
#include "tmyag/error.hpp"
#include "tmyag/relaxation.hpp"

namespace tmyag {

namespace {

constexpr double kFieldMax = 6.0;
constexpr double kTempMin = 1.3;
constexpr double kTempMax = 5.0;

struct PooledRecord {
  std::string_view label;
  RateRecord rec;
};

std::vector<RateRecord> canonical_records(std::span<const RateDataset> datasets) {
  std::vector<PooledRecord> pooled;
  for (const auto& ds : datasets) {
    for (const auto& r : ds.records) pooled.push_back({ds.label, r});
  }
  std::stable_sort(pooled.begin(), pooled.end(), [](const PooledRecord& a, const PooledRecord& b) {
    return std::tie(a.label, a.rec.b, a.rec.temp, a.rec.rate, a.rec.sigma) <
           std::tie(b.label, b.rec.b, b.rec.temp, b.rec.rate, b.rec.sigma);
  });
  std::vector<RateRecord> out;
  out.reserve(pooled.size());
  for (const auto& p : pooled) out.push_back(p.rec);
  return out;
}

}  // namespace

void validate(const RateDataset& ds) {
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& r = ds.records[i];
    const std::string where = "dataset '" + ds.label + "' record " + std::to_string(i);
    if (!(r.rate > 0)) throw InvalidDataset(where + ": rate must be positive");
    if (!(r.sigma > 0)) throw InvalidDataset(where + ": sigma must be positive");
    if (!(r.b >= 0 && r.b <= kFieldMax)) throw InvalidDataset(where + ": B outside [0, 6] T");
    if (!(r.temp >= kTempMin && r.temp <= kTempMax)) {
      throw InvalidDataset(where + ": T outside [1.3, 5] K");
    }
  }
}

RateDataset read_rate_csv(const std::filesystem::path& path, const std::string& label) {
  const auto table = csv::read_file(path);
  const auto cb = table.column("B_T");
  const auto ct = table.column("T_K");
  const auto cr = table.column("rate_Hz");
  const auto cs = table.column("sigma_Hz");
  RateDataset ds;
  ds.label = label;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    ds.records.push_back({table.number(i, cb), table.number(i, ct), table.number(i, cr),
                          table.number(i, cs)});
  }
  validate(ds);
  return ds;
}

std::string write_rate_csv(const RateDataset& ds) {
  csv::Writer w({"B_T", "T_K", "rate_Hz", "sigma_Hz"});
  for (const auto& r : ds.records) w.row({r.b, r.temp, r.rate, r.sigma});
  return w.str();
}

std::vector<RateDataset> synthesize_relaxation_datasets(const RelaxParams& truth, double gamma,
                                                        double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma_rel = std::max(noise, 0.1);

  auto observe = [&](double b, double temp) {
    const double clean = rate(b, temp, gamma, truth);
    double observed = clean;
    if (noise > 0) {
      do {
        observed = clean * (1 + noise * gauss(rng));
      } while (!(observed > 0));
    }
    return RateRecord{b, temp, observed, sigma_rel * observed};
  };

  std::vector<RateDataset> out(3);
  out[0].label = "T-sweep@3T";
  for (int i = 0; i < 12; ++i) out[0].records.push_back(observe(3.0, 1.6 + (4.5 - 1.6) * i / 11.0));
  out[1].label = "B-sweep@1.6K";
  for (int i = 0; i < 10; ++i) out[1].records.push_back(observe(6.0 * i / 9.0, 1.6));
  out[2].label = "B-sweep@4K";
  for (int i = 0; i < 10; ++i) out[2].records.push_back(observe(6.0 * i / 9.0, 4.0));
  return out;
}

namespace fitting {

RelaxFitResult joint_relax_fit(std::span<const RateDataset> datasets, double gamma,
                               const RelaxParams& init, const FitOptions& opts) {
  for (const auto& ds : datasets) validate(ds);
  const auto records = canonical_records(datasets);
  if (records.empty()) throw InsufficientCoverage("no relaxation data");

  const auto [bmin, bmax] = std::minmax_element(records.begin(), records.end(),
                                                [](auto& a, auto& b) { return a.b < b.b; });
  const auto [tmin, tmax] = std::minmax_element(records.begin(), records.end(),
                                                [](auto& a, auto& b) { return a.temp < b.temp; });
  if (bmin->b == bmax->b) throw InsufficientCoverage("all points share one magnetic field");
  if (tmin->temp == tmax->temp) throw InsufficientCoverage("all points share one temperature");

  const auto inf = std::numeric_limits<double>::infinity();
  const auto init_values = init.to_array();
  auto scale_of = [&](std::size_t i, double fallback) {
    return init_values[i] > 0 ? init_values[i] : fallback;
  };
  FitProblem problem;
  problem.description = "joint spin-lattice rate fit";
  problem.parameters = {
      {"R0", 0.0, inf, scale_of(0, 1e-4)},
      {"alpha_D", 0.0, inf, scale_of(1, 1e-24)},
      {"alpha", 0.0, inf, scale_of(2, 1e4)},
      {"beta", 0.0, inf, scale_of(3, 1e4)},
      {"delta_CF0", 0.5e12 / 2, 2e12, scale_of(4, 8e11)},
      {"gamma_CF", 0.0, inf, scale_of(5, 1e10)},
  };
  problem.residual_count = records.size();

  auto to_params = [](const Vector& p) {
    return RelaxParams{p[0], p[1], p[2], p[3], p[4], p[5]};
  };
  problem.residuals = [&records, gamma, to_params](const Vector& p) {
    const RelaxParams rp = to_params(p);
    Vector r(static_cast<Eigen::Index>(records.size()));
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      const double model = rate(rec.b, rec.temp, gamma, rp);
      r[static_cast<Eigen::Index>(i)] = std::log(model / rec.rate) / (rec.sigma / rec.rate);
    }
    return r;
  };
  problem.jacobian = [&records, gamma, to_params](const Vector& p) {
    const RelaxParams rp = to_params(p);
    Matrix j(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(RelaxParams::kCount));
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& rec = records[i];
      const double model = rate(rec.b, rec.temp, gamma, rp);
      const auto grad = rate_gradient(rec.b, rec.temp, gamma, rp);
      const double w = rec.rate / rec.sigma / model;
      for (std::size_t k = 0; k < RelaxParams::kCount; ++k) {
        j(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = w * grad[k];
      }
    }
    return j;
  };

  Vector start(static_cast<Eigen::Index>(RelaxParams::kCount));
  for (std::size_t k = 0; k < RelaxParams::kCount; ++k) {
    start[static_cast<Eigen::Index>(k)] = init_values[k];
  }

  RelaxFitResult out;
  out.fit = least_squares(problem, start, opts);
  out.params = to_params(out.fit.params);
  out.std_errors = to_params(out.fit.std_errors);
  out.points = records.size();
  return out;
}

}  // namespace fitting

}  // namespace tmyag
