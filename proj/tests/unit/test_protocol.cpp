#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "sedna/error.hpp"
#include "sedna/protocol.hpp"
#include "support.hpp"

using namespace sedna;
using namespace sedna::protocol;

namespace {

StrategyConfig rateless(std::uint32_t m, std::uint32_t s, std::uint32_t ell = 256) {
  StrategyConfig c;
  c.variant = Variant::kRateless;
  c.lanes = m;
  c.symbols_per_bundle = s;
  c.symbol_len = ell;
  return c;
}

StrategyConfig mds(std::uint32_t m, std::uint32_t k) {
  StrategyConfig c;
  c.variant = Variant::kMds;
  c.lanes = m;
  c.shares_needed = k;
  return c;
}

StrategyConfig naive(std::uint32_t m) {
  StrategyConfig c;
  c.variant = Variant::kNaive;
  c.lanes = m;
  return c;
}

}  // namespace

TEST(Transaction, HeaderBindsCommitmentAndSender) {
  auto st = test::honest_sender(500, 1);
  const auto& tx = st.tx;
  EXPECT_EQ(tx.message.size(), 532u);
  EXPECT_EQ(tx.header.pre.declared_message_len, 532u);
  EXPECT_TRUE(crypto::verify_opening(tx.header.commitment, tx.sigma(), tx.payload()));
  EXPECT_EQ(tx.txid, crypto::derive_txid(tx.header.pre.serialize(), tx.header.commitment));
  EXPECT_TRUE(verify_header(tx.header, tx.txid));
  Rng rng(1);
  EXPECT_THROW(build_transaction({}, FeeFields{}, test::key_from(1), rng), Error);
}

TEST(Transaction, FreshRandomnessGivesDistinctTxids) {
  Rng rng(3);
  const Bytes payload(64, 1);
  const auto key = test::key_from(2);
  const auto a = build_transaction(payload, FeeFields{}, key, rng);
  const auto b = build_transaction(payload, FeeFields{}, key, rng);
  EXPECT_NE(a.tx.txid, b.tx.txid);
}

TEST(Header, SerializationRoundTrip) {
  const auto st = test::honest_sender(40, 2);
  const Bytes wire = st.tx.header.serialize();
  ByteReader in(wire);
  EXPECT_EQ(PublicHeader::parse(in), st.tx.header);
  EXPECT_TRUE(in.done());
}

TEST(SampleLanes, BasicContract) {
  Rng rng(1);
  const auto all = sample_lanes(9, 9, rng);
  EXPECT_EQ(all, (std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6, 7, 8, 9}));
  for (int i = 0; i < 200; ++i) {
    const auto u = sample_lanes(20, 7, rng);
    EXPECT_EQ(u.size(), 7u);
    EXPECT_EQ(std::set<std::uint32_t>(u.begin(), u.end()).size(), 7u);
    EXPECT_GE(u.front(), 1u);
    EXPECT_LE(u.back(), 20u);
  }
  EXPECT_THROW(sample_lanes(4, 5, rng), Error);
  EXPECT_THROW(sample_lanes(4, 0, rng), Error);
  Rng r1(77), r2(77);
  EXPECT_EQ(sample_lanes(100, 10, r1), sample_lanes(100, 10, r2));
}

TEST(SampleLanes, UniformPerLaneFrequency) {
  Rng rng(2024);
  std::vector<std::uint64_t> hits(17, 0);
  const int samples = 100000;
  for (int i = 0; i < samples; ++i)
    for (auto lane : sample_lanes(16, 4, rng)) ++hits[lane];
  for (std::uint32_t lane = 1; lane <= 16; ++lane) EXPECT_NEAR(double(hits[lane]) / samples, 0.25, 0.01) << lane;
}

TEST(BuildBundles, RatelessIndexSetsFollowTheCursor) {
  auto st = test::honest_sender(1000, 3);
  const std::vector<std::uint32_t> lanes{2, 5, 9};
  const auto first = build_bundles(st, lanes, rateless(3, 2));
  ASSERT_EQ(first.size(), 3u);
  EXPECT_EQ(first[0].indices, (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(first[1].indices, (std::vector<std::uint64_t>{2, 3}));
  EXPECT_EQ(first[2].indices, (std::vector<std::uint64_t>{4, 5}));
  EXPECT_EQ(first[1].lane, 5u);
  const auto second = build_bundles(st, lanes, rateless(3, 2));
  EXPECT_EQ(second[0].indices.front(), 6u);
  for (const auto& b : first) EXPECT_TRUE(verify_bundle(b));
  for (const auto& b : second) EXPECT_TRUE(verify_bundle(b));
}

TEST(BuildBundles, MdsAndNaiveShapes) {
  auto st = test::honest_sender(1000, 4);
  const std::vector<std::uint32_t> lanes{1, 2, 3, 4};
  const auto shares = build_bundles(st, lanes, mds(4, 3));
  for (std::uint32_t r = 0; r < 4; ++r) {
    EXPECT_EQ(shares[r].indices, (std::vector<std::uint64_t>{r}));
    EXPECT_EQ(shares[r].symbols[0].size(), codec::ceil_div(1032, 3));
    EXPECT_TRUE(verify_bundle(shares[r]));
  }
  auto st2 = test::honest_sender(1000, 5);
  const auto copies = build_bundles(st2, lanes, naive(4));
  for (const auto& b : copies) {
    EXPECT_EQ(b.indices, (std::vector<std::uint64_t>{0}));
    EXPECT_EQ(b.symbols[0], st2.tx.message);
    EXPECT_TRUE(verify_bundle(b));
  }
}

TEST(BuildBundles, IndexSetsStayDisjointAcrossCalls) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto st = test::honest_sender(300, 100 + trial);
    const bool use_mds = trial % 2 == 0;
    std::set<std::uint64_t> used;
    std::uint64_t handed_out = 0;
    for (int call = 0; call < 5; ++call) {
      const std::uint32_t m = 1 + rng() % 8;
      const auto lanes = sample_lanes(16, m, rng);
      const auto cfg = use_mds ? mds(m, 1 + std::uint32_t(rng() % m)) : rateless(m, 1 + std::uint32_t(rng() % 4), 64);
      for (const auto& b : build_bundles(st, lanes, cfg))
        for (auto j : b.indices) {
          used.insert(j);
          ++handed_out;
        }
    }
    EXPECT_EQ(used.size(), handed_out);
  }
}

TEST(BuildBundles, MdsIndicesCycleAfterTheFieldIsSpent) {
  auto st = test::honest_sender(100, 6);
  std::vector<std::uint32_t> lanes(200);
  std::iota(lanes.begin(), lanes.end(), 1u);
  (void)build_bundles(st, lanes, mds(200, 10));
  const auto again = build_bundles(st, lanes, mds(200, 10));
  EXPECT_EQ(again[0].indices[0], 200u);
  EXPECT_EQ(again[54].indices[0], 254u);
  EXPECT_EQ(again[55].indices[0], 0u);
  EXPECT_TRUE(verify_bundle(again[55]));
}

TEST(Bundle, WireFormatRoundTripAndSize) {
  auto st = test::honest_sender(900, 7);
  const std::vector<std::uint32_t> lanes{3};
  const auto b = build_bundles(st, lanes, rateless(1, 3, 128)).front();
  const Bytes wire = b.serialize();
  EXPECT_EQ(wire.size(), b.wire_size());
  EXPECT_EQ(Bundle::parse(wire, 128), b);
  EXPECT_THROW(Bundle::parse(ByteView(wire).first(wire.size() - 1), 128), Error);
  const auto meta = wire_metadata(Variant::kRateless);
  EXPECT_EQ(meta.per_bundle, 264u);
  EXPECT_EQ(meta.per_symbol, 8u);
  EXPECT_EQ(b.wire_size(), meta.per_bundle + 3 * (meta.per_symbol + 128));
  const auto flat = wire_metadata(Variant::kNaive);
  EXPECT_EQ(flat.per_bundle, 272u);
  EXPECT_EQ(flat.per_symbol, 0u);
}

TEST(VerifyBundle, EverySingleFieldMutationIsRejected) {
  auto st = test::honest_sender(700, 8);
  const std::vector<std::uint32_t> lanes{4, 11};
  const auto good = build_bundles(st, lanes, rateless(2, 3, 128))[1];
  ASSERT_TRUE(verify_bundle(good));

  std::vector<std::pair<std::string, std::function<void(Bundle&)>>> mutations = {
      {"txid", [](Bundle& b) { b.txid.bytes[7] ^= 1; }},
      {"lane", [](Bundle& b) { b.lane = 5; }},
      {"lane zero", [](Bundle& b) { b.lane = 0; }},
      {"sender_pubkey", [](Bundle& b) { b.header.pre.sender_pubkey[0] ^= 1; }},
      {"fee_per_byte", [](Bundle& b) { b.header.pre.fee_per_byte += 1; }},
      {"max_fee", [](Bundle& b) { b.header.pre.max_fee -= 1; }},
      {"nonce", [](Bundle& b) { b.header.pre.nonce ^= 1; }},
      {"declared_message_len", [](Bundle& b) { b.header.pre.declared_message_len += 1; }},
      {"commitment", [](Bundle& b) { b.header.commitment.value.bytes[31] ^= 1; }},
      {"header_sig", [](Bundle& b) { b.header.header_sig.bytes[0] ^= 1; }},
      {"bundle_sig", [](Bundle& b) { b.bundle_sig.bytes[63] ^= 1; }},
      {"drop symbol", [](Bundle& b) { b.indices.pop_back(); b.symbols.pop_back(); }},
      {"misaligned", [](Bundle& b) { b.symbols.pop_back(); }},
  };
  for (std::size_t r = 0; r < good.indices.size(); ++r) {
    mutations.push_back({"index " + std::to_string(r), [r](Bundle& b) { b.indices[r] += 100; }});
    for (std::size_t at : {std::size_t{0}, std::size_t{64}, std::size_t{127}})
      mutations.push_back({"symbol " + std::to_string(r) + "@" + std::to_string(at),
                           [r, at](Bundle& b) { b.symbols[r][at] ^= 0x40; }});
  }
  for (const auto& [name, mutate] : mutations) {
    Bundle b = good;
    mutate(b);
    EXPECT_FALSE(verify_bundle(b)) << name;
  }
}

TEST(VerifyBundle, SubstitutedHeaderUnderOriginalTxidFails) {
  auto a = test::honest_sender(300, 9);
  auto b = test::honest_sender(300, 10);
  const std::vector<std::uint32_t> lanes{1};
  auto bundle = build_bundles(a, lanes, rateless(1, 1, 64)).front();
  bundle.header = b.tx.header;  // valid header of another tx
  EXPECT_FALSE(verify_header(bundle.header, bundle.txid));
  EXPECT_FALSE(verify_bundle(bundle));
}

TEST(VerifyBundle, AccountingPredicate) {
  Rng rng(12);
  const Bytes payload(200, 3);
  const std::vector<std::uint32_t> lanes{1};
  auto build = [&](std::uint64_t per_byte, std::uint64_t max_fee) {
    FeeFields f{per_byte, max_fee, 0};
    auto st = build_transaction(payload, f, test::key_from(12), rng);
    return build_bundles(st, lanes, naive(1)).front();
  };
  const auto probe = build(1, 1'000'000);
  const std::uint64_t bytes = probe.wire_size();
  EXPECT_TRUE(verify_bundle(build(3, 3 * bytes)));
  EXPECT_FALSE(verify_bundle(build(3, 3 * bytes - 1)));
  EXPECT_FALSE(verify_bundle(build(1, bytes), VerifyPolicy{2}));
  EXPECT_TRUE(verify_bundle(build(2, 2 * bytes), VerifyPolicy{2}));
  EXPECT_FALSE(verify_bundle(build(0, bytes)));
  // Overflowing products are rejected, not wrapped.
  EXPECT_FALSE(verify_bundle(build(std::uint64_t(1) << 62, ~std::uint64_t(0))));
}

TEST(VerifyBundle, EquivocatingBundlesBothVerify) {
  auto st = test::honest_sender(400, 13);
  const std::vector<std::uint32_t> lanes{1};
  const auto honest = build_bundles(st, lanes, rateless(1, 1, 64)).front();
  Bundle twin = honest;
  twin.lane = 2;
  twin.symbols[0][0] ^= 0xff;
  twin.bundle_sig = crypto::sign(st.key, bundle_signing_message(twin.txid, twin.lane, twin.indices, twin.symbols));
  EXPECT_TRUE(verify_bundle(honest));
  EXPECT_TRUE(verify_bundle(twin));
}

TEST(VerifyBundle, NeverThrowsOnGarbage) {
  Bundle b;
  EXPECT_FALSE(verify_bundle(b));
  b.lane = 1;
  b.indices = {0};
  b.symbols = {Bytes(5, 0)};
  b.header.pre.sender_pubkey = Bytes(3, 1);
  EXPECT_FALSE(verify_bundle(b));
}

TEST(EffectiveCensors, ThreeRegimes) {
  EXPECT_EQ(effective_censors(16, 5, 0), 0u);
  EXPECT_EQ(effective_censors(16, 5, 5), 5u);
  EXPECT_EQ(effective_censors(16, 5, 7), 12u);
  EXPECT_EQ(effective_censors(16, 5, 10), 15u);
  EXPECT_EQ(effective_censors(16, 5, 11), 16u);
  EXPECT_THROW(effective_censors(16, 5, 16), Error);
}

TEST(StrategyConfig, Validation) {
  EXPECT_NO_THROW(rateless(4, 2).validate(10));
  EXPECT_THROW(rateless(11, 2).validate(10), Error);
  EXPECT_THROW(rateless(4, 0).validate(10), Error);
  EXPECT_THROW(mds(4, 5).validate(10), Error);
  EXPECT_THROW(mds(256, 5).validate(300), Error);
  EXPECT_EQ(parse_variant("mds"), Variant::kMds);
  EXPECT_THROW(parse_variant("raptor"), Error);
}
