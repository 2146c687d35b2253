#include "extrout/variant.hpp"

#include <fmt/format.h>

namespace extrout {

const char* variant_key(VariantKind kind) {
  switch (kind) {
    case VariantKind::kNoPrivacy: return "no_privacy";
    case VariantKind::kExtroutBaseline: return "baseline";
    case VariantKind::kExtroutDuplicates: return "duplicates";
    case VariantKind::kExtroutFake: return "fake";
    case VariantKind::kNFakePairs: return "nfake";
  }
  return "?";
}

VariantKind parse_variant_kind(std::string_view key) {
  for (auto k : {VariantKind::kNoPrivacy, VariantKind::kExtroutBaseline,
                 VariantKind::kExtroutDuplicates, VariantKind::kExtroutFake,
                 VariantKind::kNFakePairs}) {
    if (key == variant_key(k)) return k;
  }
  throw std::invalid_argument(fmt::format(
      "unknown variant '{}' (expected no_privacy|baseline|duplicates|fake|nfake)", key));
}

void ProtocolVariant::validate() const {
  if (counted() && count < 1)
    throw std::invalid_argument(fmt::format("variant {} needs count >= 1", variant_key(kind)));
  if (!(residual_cover_rate >= 0.0))
    throw std::invalid_argument("residual cover rate must be >= 0");
}

std::string ProtocolVariant::name() const {
  if (counted()) return fmt::format("{}({})", variant_key(kind), count);
  return variant_key(kind);
}

}  // namespace extrout
