#include "extrout/metrics.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace extrout {

double anonymity_single(int set_size) {
  if (set_size < 1) throw std::invalid_argument("anonymity set size must be >= 1");
  return 1.0 - 1.0 / set_size;
}

double anonymity_pair(int gs, int gd) {
  if (gs < 1 || gd < 1) throw std::invalid_argument("anonymity set sizes must be >= 1");
  return 1.0 - (1.0 / gs) * (1.0 / gd);
}

double anonymity_extrout(int ks, int L, int kd, int extra_hops) {
  if (ks < 0 || kd < 0 || L < 0 || extra_hops < 0)
    throw std::invalid_argument("hop counts must be non-negative");
  if (ks + L + kd < 1) throw std::invalid_argument("Ks + L + Kd must be >= 1");
  return 1.0 - 1.0 / (ks + L + kd + extra_hops);
}

double anonymity_nfake(int n) {
  if (n < 0) throw std::invalid_argument("fake pair count must be >= 0");
  return 1.0 - 1.0 / (n + 1);
}

double pair_success_probability(int n_duplicates, int ks, int L, int kd) {
  if (n_duplicates < 0 || ks + L + kd < 1) throw std::invalid_argument("bad path counts");
  return (1.0 / (n_duplicates + 1)) * (1.0 / (ks + L + kd));
}

namespace {

bool is_extrout(VariantKind k) {
  return k == VariantKind::kExtroutBaseline || k == VariantKind::kExtroutDuplicates ||
         k == VariantKind::kExtroutFake;
}

int sum(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string opt(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

}  // namespace

int PathAccounting::main_hops() const { return is_extrout(kind) ? ks + L + kd : L; }

int PathAccounting::extra_hops() const {
  return sum(duplicate_hops) + sum(fake_hops) + sum(fake_pair_lengths);
}

int PathAccounting::chain_count() const {
  return 1 + static_cast<int>(duplicate_hops.size() + fake_hops.size() +
                              fake_pair_lengths.size());
}

double tof(const PathAccounting& acc) {
  if (acc.L < 1) throw std::invalid_argument("TOF needs L >= 1");
  return static_cast<double>(acc.total_hops()) / acc.L;
}

int anonymity_set_size(const PathAccounting& acc) {
  switch (acc.kind) {
    case VariantKind::kNoPrivacy: return 1;
    case VariantKind::kNFakePairs: return static_cast<int>(acc.fake_pair_lengths.size()) + 1;
    default: return acc.total_hops();
  }
}

double single_anonymity(const PathAccounting& acc) {
  return anonymity_single(anonymity_set_size(acc));
}

double pair_anonymity(const PathAccounting& acc) {
  const int g = anonymity_set_size(acc);
  return anonymity_pair(g, g);
}

double predicted_source_success(const PathAccounting& acc) {
  const double per_chain = 1.0 / acc.chain_count();
  if (!is_extrout(acc.kind)) return per_chain;
  double p = per_chain / acc.main_hops();
  // With Ks = 0 the source is the shared anchor and heads every duplicate.
  if (acc.ks == 0)
    for (int h : acc.duplicate_hops) p += per_chain / h;
  return p;
}

double EmpiricalRate::wilson_lo() const {
  if (trials == 0) return 0.0;
  constexpr double z = 1.96;
  const double n = static_cast<double>(trials);
  const double p = rate();
  const double denom = 1.0 + z * z / n;
  const double centre = p + z * z / (2 * n);
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return (centre - half) / denom;
}

double EmpiricalRate::wilson_hi() const {
  if (trials == 0) return 1.0;
  constexpr double z = 1.96;
  const double n = static_cast<double>(trials);
  const double p = rate();
  const double denom = 1.0 + z * z / n;
  const double centre = p + z * z / (2 * n);
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return (centre + half) / denom;
}

bool within_binomial_sigma(const EmpiricalRate& r, double p, double k) {
  if (r.trials == 0) return false;
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(r.trials));
  return std::fabs(r.rate() - p) <= k * sigma;
}

std::optional<double> PrivacyReport::anonymity_empirical() const {
  if (!empirical_source) return std::nullopt;
  return 1.0 - empirical_source->rate();
}

PrivacyReport make_report(std::string variant, const PathAccounting& acc) {
  PrivacyReport r;
  r.variant = std::move(variant);
  r.accounting = acc;
  r.anonymity_single = single_anonymity(acc);
  r.anonymity_pair = pair_anonymity(acc);
  r.tof_analytical = tof(acc);
  r.predicted_source_success = predicted_source_success(acc);
  return r;
}

Reconciliation reconcile(const PrivacyReport& report) {
  Reconciliation rec;
  if (report.tof_measured) {
    // Both sides are ratios of small integers; equal rationals give equal doubles.
    if (*report.tof_measured != report.tof_analytical) {
      rec.passed = false;
      rec.failures.push_back(fmt::format("tof: measured {} != analytical {}",
                                         *report.tof_measured, report.tof_analytical));
    }
  } else {
    rec.notes.push_back("tof: no measurement to reconcile");
  }
  if (report.empirical_source) {
    const auto& e = *report.empirical_source;
    if (!within_binomial_sigma(e, report.predicted_source_success)) {
      rec.passed = false;
      rec.failures.push_back(fmt::format(
          "anonymity_empirical: source success {} ({}/{}) outside 3 sigma of {}", e.rate(),
          e.successes, e.trials, report.predicted_source_success));
    }
  }
  if (report.reported) {
    const auto& ref = *report.reported;
    if (!ref.interpretation.empty()) rec.notes.push_back("interpretation: " + ref.interpretation);
    if (std::fabs(report.anonymity_single - ref.anonymity) > kReportedAnonymityTolerance) {
      rec.discrepancy = true;
      rec.discrepancies.push_back(fmt::format("{}: anonymity computed {:.4f} vs reported {}",
                                              ref.label, report.anonymity_single, ref.anonymity));
    }
    if (std::fabs(report.tof_analytical - ref.tof) > kReportedTofTolerance) {
      rec.discrepancy = true;
      rec.discrepancies.push_back(fmt::format("{}: tof computed {:.4f} vs reported {}", ref.label,
                                              report.tof_analytical, ref.tof));
    }
  }
  return rec;
}

std::string to_text(const PrivacyReport& r) {
  const auto& a = r.accounting;
  std::string out;
  out += fmt::format("variant = {}\n", r.variant);
  out += fmt::format("L = {}\nks = {}\nkd = {}\n", a.L, a.ks, a.kd);
  out += fmt::format("duplicate_hops = {}\n", join(a.duplicate_hops));
  out += fmt::format("fake_hops = {}\n", join(a.fake_hops));
  out += fmt::format("fake_pair_lengths = {}\n", join(a.fake_pair_lengths));
  out += fmt::format("total_hops = {}\n", a.total_hops());
  out += fmt::format("anonymity_single = {}\n", r.anonymity_single);
  out += fmt::format("anonymity_pair = {}\n", r.anonymity_pair);
  out += fmt::format("tof_analytical = {}\n", r.tof_analytical);
  if (r.tof_measured) out += fmt::format("tof_measured = {}\n", *r.tof_measured);
  if (r.unlinkability) out += fmt::format("unlinkability = {}\n", *r.unlinkability);
  out += fmt::format("predicted_source_success = {}\n", r.predicted_source_success);
  if (r.empirical_source) {
    const auto& e = *r.empirical_source;
    out += fmt::format("empirical_source_success = {} ({}/{}), wilson95 = [{}, {}]\n", e.rate(),
                       e.successes, e.trials, e.wilson_lo(), e.wilson_hi());
    out += fmt::format("anonymity_empirical = {}\n", *r.anonymity_empirical());
  }
  if (r.reported) {
    out += fmt::format("reported_label = {}\n", r.reported->label);
    out += fmt::format("reported_anonymity = {}\n", r.reported->anonymity);
    out += fmt::format("reported_tof = {}\n", r.reported->tof);
  }
  for (const auto& n : r.notes) out += fmt::format("note = {}\n", n);
  return out;
}

std::string to_text(const Reconciliation& rec) {
  std::string out = fmt::format("reconciliation = {}\n", rec.passed ? "pass" : "FAIL");
  for (const auto& f : rec.failures) out += fmt::format("failure = {}\n", f);
  out += fmt::format("discrepancy = {}\n", rec.discrepancy ? "flagged" : "none");
  for (const auto& d : rec.discrepancies) out += fmt::format("discrepancy_detail = {}\n", d);
  for (const auto& n : rec.notes) out += fmt::format("note = {}\n", n);
  return out;
}

std::string report_csv_header() {
  return "variant,L,ks,kd,duplicate_hops,fake_hops,fake_pair_lengths,total_hops,"
         "anonymity_single,anonymity_pair,tof_analytical,tof_measured,unlinkability,"
         "predicted_source_success,empirical_source_success,empirical_lo,empirical_hi,"
         "reported_anonymity,reported_tof";
}

std::string to_csv_row(const PrivacyReport& r) {
  const auto& a = r.accounting;
  std::string emp = ",,";
  if (r.empirical_source)
    emp = fmt::format("{},{},{}", r.empirical_source->rate(), r.empirical_source->wilson_lo(),
                      r.empirical_source->wilson_hi());
  std::string rep = ",";
  if (r.reported) rep = fmt::format("{},{}", r.reported->anonymity, r.reported->tof);
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", r.variant, a.L, a.ks,
                     a.kd, join(a.duplicate_hops), join(a.fake_hops),
                     join(a.fake_pair_lengths), a.total_hops(), r.anonymity_single,
                     r.anonymity_pair, r.tof_analytical, opt(r.tof_measured),
                     opt(r.unlinkability), r.predicted_source_success, emp, rep);
}

}  // namespace extrout
