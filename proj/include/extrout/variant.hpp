#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace extrout {

enum class VariantKind {
  kNoPrivacy,
  kExtroutBaseline,
  kExtroutDuplicates,  // count = duplicate anchor-to-anchor paths
  kExtroutFake,        // count = fake extended paths
  kNFakePairs,         // count = fake source/destination pairs
};

// Config-file spelling: no_privacy, baseline, duplicates, fake, nfake.
const char* variant_key(VariantKind kind);
VariantKind parse_variant_kind(std::string_view key);

struct ProtocolVariant {
  VariantKind kind = VariantKind::kExtroutBaseline;
  int count = 0;
  // Network-wide background dummies, packets per interval per node.
  double residual_cover_rate = 0.0;

  static ProtocolVariant no_privacy() { return {VariantKind::kNoPrivacy, 0}; }
  static ProtocolVariant baseline() { return {VariantKind::kExtroutBaseline, 0}; }
  static ProtocolVariant duplicates(int n) { return {VariantKind::kExtroutDuplicates, n}; }
  static ProtocolVariant fake(int f) { return {VariantKind::kExtroutFake, f}; }
  static ProtocolVariant nfake(int n) { return {VariantKind::kNFakePairs, n}; }

  // Route extrapolation in use; the endpoints of a chain are then not exposed.
  bool extrapolated() const {
    return kind == VariantKind::kExtroutBaseline || kind == VariantKind::kExtroutDuplicates ||
           kind == VariantKind::kExtroutFake;
  }
  bool counted() const {
    return kind == VariantKind::kExtroutDuplicates || kind == VariantKind::kExtroutFake ||
           kind == VariantKind::kNFakePairs;
  }
  void validate() const;
  // e.g. "baseline", "duplicates(2)".
  std::string name() const;
};

}  // namespace extrout
