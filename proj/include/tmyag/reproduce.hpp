#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tmyag/constants.hpp"

namespace tmyag {

struct ReproduceOptions {
  std::uint64_t seed = 0;
  /// Noise realisations for the joint-fit Monte Carlo.
  int mc_seeds = 50;
  /// Crystal length for the transmission spectra, mm.
  double length_mm = 1.0;
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ReproduceReport {
  /// File name -> CSV payload. Items that failed to compute are absent and
  /// their error is recorded in `errors`.
  std::map<std::string, std::string> files;
  std::map<std::string, std::string> errors;
  std::vector<CheckResult> checks;

  bool all_pass() const;
  std::string summary_csv() const;
};

/// Desk-scale analogues of the spectra, orientation and relaxation figures,
/// the orientation and fit tables, and one check per acceptance criterion.
/// Pure: nothing is written.
ReproduceReport compute_reproduction(const MaterialConstants& c, const ReproduceOptions& opts = {});

/// compute_reproduction, repeated once to confirm the payloads are
/// deterministic, then written into `dir` together with summary.csv.
/// Throws FileNotFound if `dir` does not exist.
ReproduceReport reproduce_paper(const std::filesystem::path& dir, const MaterialConstants& c,
                                const ReproduceOptions& opts = {});

}  // namespace tmyag
