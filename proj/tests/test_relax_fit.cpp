#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "tmyag/error.hpp"
#include "tmyag/relax_fit.hpp"
#include "tmyag/relax_params.hpp"
#include "tmyag/relaxation.hpp"

using namespace tmyag;

namespace {

constexpr double kGamma = 4.0e8;

RelaxParams perturbed_init() {
  auto a = RelaxParams::published().to_array();
  const double f[] = {1.3, 0.7, 1.5, 0.8, 1.1, 0.6};
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= f[k];
  return RelaxParams::from_array(a);
}

}  // namespace

TEST_CASE("synthetic datasets mirror the experiments") {
  const auto ds = synthesize_relaxation_datasets(RelaxParams::published(), kGamma, 0.1, 0);
  REQUIRE(ds.size() == 3);
  CHECK(ds[0].records.size() == 12);
  CHECK(ds[1].records.size() == 10);
  CHECK(ds[2].records.size() == 10);
  for (const auto& d : ds) CHECK_NOTHROW(validate(d));
  CHECK(ds[0].records.front().temp == 1.6);
  CHECK(ds[0].records.back().temp == 4.5);
  CHECK(ds[1].records.back().b == 6);
}

TEST_CASE("noiseless joint fit recovers the generating parameters") {
  const auto truth = RelaxParams::published();
  const auto ds = synthesize_relaxation_datasets(truth, kGamma, 0, 0);
  const auto res = fitting::joint_relax_fit(ds, kGamma, perturbed_init());
  CHECK(res.fit.converged);
  CHECK(res.points == 32);
  const auto got = res.params.to_array();
  const auto want = truth.to_array();
  for (std::size_t k = 0; k < got.size(); ++k) {
    CAPTURE(RelaxParams::kNames[k]);
    CHECK(std::abs(got[k] / want[k] - 1) < 1e-6);
  }
}

TEST_CASE("joint fit is invariant to record and dataset order") {
  auto ds = synthesize_relaxation_datasets(RelaxParams::published(), kGamma, 0.1, 7);
  const auto ref = fitting::joint_relax_fit(ds, kGamma, perturbed_init());

  std::mt19937_64 rng(1);
  for (auto& d : ds) std::shuffle(d.records.begin(), d.records.end(), rng);
  std::reverse(ds.begin(), ds.end());
  const auto shuffled = fitting::joint_relax_fit(ds, kGamma, perturbed_init());
  CHECK(shuffled.params == ref.params);
  CHECK(shuffled.fit.residual_norm == ref.fit.residual_norm);
}

TEST_CASE("single-temperature data lacks coverage") {
  RateDataset d{"4K", {}};
  for (int i = 0; i <= 6; ++i) {
    d.records.push_back({1.0 * i, 4.0, rate(i, 4.0, kGamma, RelaxParams::published()), 0.1});
  }
  std::vector<RateDataset> ds{d};
  CHECK_THROWS_AS(fitting::joint_relax_fit(ds, kGamma, RelaxParams::published()), InsufficientCoverage);
}

TEST_CASE("dataset validation") {
  RateDataset bad{"x", {{7.0, 2.0, 1e-3, 1e-4}}};
  CHECK_THROWS_AS(validate(bad), InvalidDataset);
  bad.records = {{1.0, 1.0, 1e-3, 1e-4}};
  CHECK_THROWS_AS(validate(bad), InvalidDataset);
  bad.records = {{1.0, 2.0, -1e-3, 1e-4}};
  CHECK_THROWS_AS(validate(bad), InvalidDataset);
  bad.records = {{1.0, 2.0, 1e-3, 0}};
  CHECK_THROWS_AS(validate(bad), InvalidDataset);
}

TEST_CASE("rate CSV round trip") {
  const auto ds = synthesize_relaxation_datasets(RelaxParams::published(), kGamma, 0.1, 3);
  const auto path = std::filesystem::temp_directory_path() / "tmyag_rates_roundtrip.csv";
  {
    std::ofstream out(path);
    out << write_rate_csv(ds[1]);
  }
  const auto back = read_rate_csv(path, ds[1].label);
  REQUIRE(back.records.size() == ds[1].records.size());
  for (std::size_t i = 0; i < back.records.size(); ++i) {
    CHECK(back.records[i].b == ds[1].records[i].b);
    CHECK(back.records[i].temp == ds[1].records[i].temp);
    CHECK(back.records[i].rate == ds[1].records[i].rate);
    CHECK(back.records[i].sigma == ds[1].records[i].sigma);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_rate_csv(path, "gone"), FileNotFound);
}

TEST_CASE("malformed rate CSV reports the line") {
  const auto path = std::filesystem::temp_directory_path() / "tmyag_rates_bad.csv";
  {
    std::ofstream out(path);
    out << "B_T,T_K,rate_Hz,sigma_Hz\n1,2,1e-3,1e-4\n2,abc,1e-3,1e-4\n";
  }
  try {
    read_rate_csv(path, "bad");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  {
    std::ofstream out(path);
    out << "B_T,T_K,rate_Hz\n1,2,1e-3\n";
  }
  CHECK_THROWS_AS(read_rate_csv(path, "bad"), MissingField);
  std::filesystem::remove(path);
}

TEST_CASE("published params file matches the built-in values") {
  const auto p = load_relax_params(std::filesystem::path(TMYAG_SOURCE_DIR) / "data" / "relax_params_published.json");
  CHECK(p == RelaxParams::published());
  CHECK_THROWS_AS(load_relax_params("/nonexistent/params.json"), FileNotFound);
}
