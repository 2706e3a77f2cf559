#include "mwsched/rng.hpp"

namespace mwsched {

namespace {

std::uint64_t derive_key(std::uint64_t seed, StreamLabel label) noexcept {
  std::uint64_t k = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  k = mix64(k ^ (static_cast<std::uint64_t>(label.purpose) * 0xbb67ae8584caa73bULL));
  k = mix64(k ^ (label.index * 0x3c6ef372fe94f82bULL + 0xa54ff53a5f1d36f1ULL));
  return k;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, StreamLabel label) noexcept
    : seed_(master_seed), label_(label), key_(derive_key(master_seed, label)) {}

std::vector<RngStream> link_streams(std::uint64_t master_seed,
                                    StreamPurpose purpose, std::size_t links) {
  std::vector<RngStream> out;
  out.reserve(links);
  for (std::size_t i = 0; i < links; ++i) {
    out.emplace_back(master_seed, StreamLabel{purpose, i});
  }
  return out;
}

}  // namespace mwsched
