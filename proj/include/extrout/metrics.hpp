#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "extrout/variant.hpp"

namespace extrout {

// 1 - 1/G: the real node hides among G indistinguishable nodes.
double anonymity_single(int set_size);
// Source-destination pair form, 1 - (1/Gs)(1/Gd).
double anonymity_pair(int gs, int gd);
// 1 - 1/(Ks + L + Kd + extra_hops); extra_hops sums duplicate or fake path hops.
double anonymity_extrout(int ks, int L, int kd, int extra_hops = 0);
// 1 - 1/(n + 1).
double anonymity_nfake(int n);
// Chance of picking the real path among n + 1 and then the real node on it.
double pair_success_probability(int n_duplicates, int ks, int L, int kd);

// Hop bookkeeping of one scenario, enough to evaluate every closed form.
struct PathAccounting {
  VariantKind kind = VariantKind::kExtroutBaseline;
  int L = 0;
  int ks = 0;
  int kd = 0;
  std::vector<int> duplicate_hops;
  std::vector<int> fake_hops;          // fake extended paths
  std::vector<int> fake_pair_lengths;  // N-fake shortest paths

  int main_hops() const;   // Ks + L + Kd, or L without extrapolation
  int extra_hops() const;  // sum over duplicates, fake paths and fake pairs
  int total_hops() const { return main_hops() + extra_hops(); }
  int chain_count() const;
};

double tof(const PathAccounting& acc);
// Anonymity the way the summary table states it for each variant.
double single_anonymity(const PathAccounting& acc);
// Product form with Gs = Gd = the single-node set size.
double pair_anonymity(const PathAccounting& acc);
// Success of an attacker that picks a chain uniformly, then a node on it.
double predicted_source_success(const PathAccounting& acc);
int anonymity_set_size(const PathAccounting& acc);

struct EmpiricalRate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;

  double rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
  // Wilson score interval at 95%.
  double wilson_lo() const;
  double wilson_hi() const;
};

// |rate - p| <= k * sqrt(p (1 - p) / n).
bool within_binomial_sigma(const EmpiricalRate& r, double p, double k = 3.0);

// Published numbers a computed report is compared against.
struct ReportedValues {
  std::string label;
  double anonymity = 0.0;
  double tof = 0.0;
  std::string interpretation;
};

inline constexpr double kReportedAnonymityTolerance = 1e-3;
inline constexpr double kReportedTofTolerance = 1e-2;

struct PrivacyReport {
  std::string variant;
  PathAccounting accounting;
  double anonymity_single = 0.0;
  double anonymity_pair = 0.0;
  double tof_analytical = 0.0;
  std::optional<double> tof_measured;
  std::optional<double> unlinkability;
  std::optional<EmpiricalRate> empirical_source;
  double predicted_source_success = 0.0;
  std::optional<ReportedValues> reported;
  std::vector<std::string> notes;

  std::optional<double> anonymity_empirical() const;
};

// Fills every analytical field from the accounting.
PrivacyReport make_report(std::string variant, const PathAccounting& acc);

struct Reconciliation {
  bool passed = true;
  std::vector<std::string> failures;       // measured vs analytical
  bool discrepancy = false;
  std::vector<std::string> discrepancies;  // computed vs reported
  std::vector<std::string> notes;
};

// TOF must match exactly; the empirical source rate must sit within 3 sigma of
// the prediction; reported values are compared within rounding and flagged,
// never failed.
Reconciliation reconcile(const PrivacyReport& report);

std::string to_text(const PrivacyReport& report);
std::string to_text(const Reconciliation& rec);
std::string report_csv_header();
std::string to_csv_row(const PrivacyReport& report);

}  // namespace extrout
