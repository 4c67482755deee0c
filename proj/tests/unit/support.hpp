#pragma once

#include <array>
#include <cstdint>

#include "sedna/bytes.hpp"
#include "sedna/crypto.hpp"
#include "sedna/protocol.hpp"
#include "sedna/rng.hpp"

namespace sedna::test {

inline Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

inline crypto::KeyPair key_from(std::uint64_t seed) {
  std::array<std::uint8_t, 32> s{};
  Rng rng(seed);
  for (auto& x : s) x = static_cast<std::uint8_t>(rng());
  return crypto::KeyPair::from_seed(s);
}

// Honest sender with fees that cover any bundle.
inline protocol::SenderState honest_sender(std::size_t payload_len, std::uint64_t seed) {
  Rng rng(seed);
  const auto payload = random_bytes(rng, payload_len);
  protocol::FeeFields fees;
  fees.fee_per_byte = 2;
  fees.max_fee = 1'000'000'000;
  fees.nonce = seed;
  return protocol::build_transaction(payload, fees, key_from(seed ^ 0x5eed), rng);
}

}  // namespace sedna::test
