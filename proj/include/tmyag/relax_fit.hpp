#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tmyag/fitting.hpp"
#include "tmyag/relax_params.hpp"

namespace tmyag {

struct RateRecord {
  double b = 0;      // T
  double temp = 0;   // K
  double rate = 0;   // Hz
  double sigma = 0;  // Hz
};

struct RateDataset {
  std::string label;
  std::vector<RateRecord> records;
};

/// Throws InvalidDataset unless rates and sigmas are positive and every
/// (B, T) lies in [0, 6] T x [1.3, 5] K.
void validate(const RateDataset& ds);

/// CSV with header B_T,T_K,rate_Hz,sigma_Hz.
RateDataset read_rate_csv(const std::filesystem::path& path, const std::string& label);
std::string write_rate_csv(const RateDataset& ds);

/// Synthetic analogues of the three relaxation experiments: a temperature
/// sweep at 3 T (12 points over 1.6-4.5 K) and field sweeps at 1.6 K and 4 K
/// (10 points each over 0-6 T). Rates carry multiplicative Gaussian noise of
/// relative size `noise`; sigma is `max(noise, 0.1)` times the observed rate.
std::vector<RateDataset> synthesize_relaxation_datasets(const RelaxParams& truth, double gamma,
                                                        double noise, std::uint64_t seed);

namespace fitting {

struct RelaxFitResult {
  RelaxParams params;
  RelaxParams std_errors;
  FitResult fit;
  std::size_t points = 0;
};

/// Pooled fit of every dataset with residuals ln(R_model / R_data) / (sigma / R_data).
/// Records are accumulated in a canonical order (label, B, T, rate, sigma)
/// so any permutation of the input gives the same result. Throws
/// InsufficientCoverage when all points share one field or one temperature.
RelaxFitResult joint_relax_fit(std::span<const RateDataset> datasets, double gamma,
                               const RelaxParams& init, const FitOptions& opts = {});

}  // namespace fitting

}  // namespace tmyag
