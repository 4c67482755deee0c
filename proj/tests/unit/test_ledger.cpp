#include <gtest/gtest.h>

#include <map>
#include <numeric>

#include "sedna/error.hpp"
#include "sedna/ledger.hpp"
#include "support.hpp"

using namespace sedna;
using namespace sedna::ledger;
using protocol::Bundle;
using protocol::StrategyConfig;
using protocol::Variant;

namespace {

StrategyConfig rateless(std::uint32_t m, std::uint32_t s, std::uint32_t ell) {
  StrategyConfig c;
  c.variant = Variant::kRateless;
  c.lanes = m;
  c.symbols_per_bundle = s;
  c.symbol_len = ell;
  return c;
}

// Slot vector for `n` lanes with the given per-lane contents.
std::vector<Block> slot(std::uint32_t n, std::uint64_t t, const std::map<std::uint32_t, std::vector<Bundle>>& by_lane) {
  std::vector<Block> blocks(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    blocks[i].lane = i + 1;
    blocks[i].slot = t;
    if (auto it = by_lane.find(i + 1); it != by_lane.end()) blocks[i].bundles = it->second;
  }
  return blocks;
}

Bundle resign(Bundle b, const crypto::KeyPair& key) {
  b.bundle_sig = crypto::sign(key, protocol::bundle_signing_message(b.txid, b.lane, b.indices, b.symbols));
  return b;
}

std::vector<std::uint32_t> lanes_1_to(std::uint32_t m) {
  std::vector<std::uint32_t> v(m);
  std::iota(v.begin(), v.end(), 1u);
  return v;
}

}  // namespace

TEST(Ledger, AppendValidatesShapeAndBundles) {
  FinalizedLedger chain(4);
  BundleVerifier verifier;
  chain.append(slot(4, 1, {}), verifier);
  EXPECT_EQ(chain.height(), 1u);
  EXPECT_THROW(chain.append(slot(3, 2, {}), verifier), Error);
  EXPECT_THROW(chain.append(slot(4, 5, {}), verifier), Error);

  auto st = test::honest_sender(100, 1);
  auto b = protocol::build_bundles(st, std::vector<std::uint32_t>{2}, rateless(1, 1, 64)).front();
  auto bad = b;
  bad.symbols[0][0] ^= 1;
  EXPECT_THROW(chain.append(slot(4, 2, {{2, {bad}}}), verifier), Error);
  EXPECT_THROW(chain.append(slot(4, 2, {{3, {b}}}), verifier), Error);  // wrong lane
  EXPECT_EQ(chain.height(), 1u);
  chain.append(slot(4, 2, {{2, {b}}}), verifier);
  EXPECT_EQ(chain.slot(2)[1].bundles.size(), 1u);
}

TEST(Ledger, MempoolRejectsInvalidBundles) {
  Mempool pool(3);
  BundleVerifier verifier;
  auto st = test::honest_sender(100, 2);
  auto b = protocol::build_bundles(st, std::vector<std::uint32_t>{3}, rateless(1, 1, 64)).front();
  EXPECT_TRUE(pool.enqueue(b, verifier));
  auto bad = b;
  bad.header.pre.nonce += 1;
  EXPECT_FALSE(pool.enqueue(bad, verifier));
  auto far = b;
  far.lane = 9;
  EXPECT_FALSE(pool.enqueue(far, verifier));
  EXPECT_EQ(pool.queue(3).size(), 1u);
}

TEST(Ledger, RunSlotPublishesHonestLanesAndDrainsCensored) {
  FinalizedLedger chain(5);
  Mempool pool(5);
  BundleVerifier verifier;
  auto st = test::honest_sender(200, 3);
  for (auto& b : protocol::build_bundles(st, lanes_1_to(5), rateless(5, 1, 64))) ASSERT_TRUE(pool.enqueue(b, verifier));
  AdversaryModel adv;
  adv.censored_lanes = {2, 4};
  EXPECT_EQ(run_slot(chain, pool, adv, verifier), 1u);
  const auto& blocks = chain.slot(1);
  for (std::uint32_t lane = 1; lane <= 5; ++lane) {
    const bool censored = adv.censored_lanes.contains(lane);
    EXPECT_EQ(blocks[lane - 1].bundles.size(), censored ? 0u : 1u) << lane;
    EXPECT_TRUE(pool.queue(lane).empty());
  }
}

TEST(Ledger, DedupKeepsFirstOccurrenceByHeightLaneAndPosition) {
  auto st = test::honest_sender(300, 4);
  const auto cfg = rateless(1, 2, 64);
  auto base = protocol::build_bundles(st, std::vector<std::uint32_t>{3}, cfg).front();  // indices 0,1
  auto on_lane = [&](Bundle b, std::uint32_t lane, std::uint8_t flip) {
    b.lane = lane;
    b.symbols[0][0] ^= flip;
    return resign(b, st.key);
  };
  FinalizedLedger chain(4);
  BundleVerifier verifier;
  chain.append(slot(4, 1, {}), verifier);
  // Slot 2: lane 3 carries the honest copy, lane 1 an equivocating one, and
  // lane 1 holds a second equivocation later in the same block.
  chain.append(slot(4, 2, {{1, {on_lane(base, 1, 0x11), on_lane(base, 1, 0x22)}}, {3, {base}}}), verifier);
  chain.append(slot(4, 3, {{2, {on_lane(base, 2, 0x33)}}}), verifier);

  const auto x = scan_dedup(chain, st.tx.txid, 3);
  ASSERT_EQ(x.size(), 2u);
  EXPECT_EQ(x.at(0).first, (Occurrence{2, 1, 0}));
  EXPECT_EQ(x.at(0).value[0], base.symbols[0][0] ^ 0x11);
  EXPECT_EQ(x.at(1).value, base.symbols[1]);
  EXPECT_TRUE(scan_dedup(chain, st.tx.txid, 1).empty());
}

TEST(Ledger, InclusionAtFirstHeightWithEnoughSymbols) {
  auto st = test::honest_sender(4064, 5);  // S = 4096, K = 17 at 256-byte symbols
  const auto cfg = rateless(5, 4, 256);
  const auto params = protocol::coding_params(cfg, st.tx.message.size());
  ASSERT_EQ(protocol::decode_threshold(params), 17u);
  const auto bundles = protocol::build_bundles(st, lanes_1_to(5), cfg);  // 20 symbols

  FinalizedLedger chain(6);
  BundleVerifier verifier;
  chain.append(slot(6, 1, {}), verifier);
  chain.append(slot(6, 2, {{1, {bundles[0]}}, {2, {bundles[1]}}, {3, {bundles[2]}}, {4, {bundles[3]}}, {5, {bundles[4]}}}),
               verifier);
  const auto rec = inclusion_height(chain, st.tx.txid, st.tx.header, params);
  EXPECT_EQ(rec.kind, InclusionKind::kIncluded);
  EXPECT_EQ(rec.height, 2u);
  EXPECT_EQ(rec.payload, Bytes(st.tx.payload().begin(), st.tx.payload().end()));
}

TEST(Ledger, InclusionWaitsForSymbolsSpreadOverSlots) {
  auto st = test::honest_sender(4064, 6);
  const auto cfg = rateless(5, 4, 256);
  const auto params = protocol::coding_params(cfg, st.tx.message.size());
  const auto bundles = protocol::build_bundles(st, lanes_1_to(5), cfg);
  FinalizedLedger chain(6);
  BundleVerifier verifier;
  chain.append(slot(6, 1, {{1, {bundles[0]}}, {2, {bundles[1]}}, {3, {bundles[2]}}}), verifier);  // 12 < 17
  chain.append(slot(6, 2, {{4, {bundles[3]}}, {5, {bundles[4]}}}), verifier);
  const auto rec = inclusion_height(chain, st.tx.txid, std::nullopt, params);
  EXPECT_EQ(rec.kind, InclusionKind::kIncluded);
  EXPECT_EQ(rec.height, 2u);

  // Replaying slot 1 alone leaves the tx pending.
  InclusionTracker partial(st.tx.txid, params);
  partial.observe(chain.slot(1), 1);
  EXPECT_FALSE(partial.done());
  EXPECT_EQ(partial.decode_attempts(), 0u);
}

TEST(Ledger, GarbageSymbolsAreDiscarded) {
  auto st = test::honest_sender(4064, 7);
  const auto cfg = rateless(5, 4, 256);
  const auto params = protocol::coding_params(cfg, st.tx.message.size());
  auto bundles = protocol::build_bundles(st, lanes_1_to(5), cfg);
  Rng rng(7);
  for (auto& b : bundles) {
    for (auto& v : b.symbols) v = test::random_bytes(rng, v.size());
    b = resign(b, st.key);  // the sender signs garbage, so every bundle verifies
  }
  FinalizedLedger chain(5);
  BundleVerifier verifier;
  std::map<std::uint32_t, std::vector<Bundle>> contents;
  for (auto& b : bundles) contents[b.lane] = {b};
  chain.append(slot(5, 1, contents), verifier);
  const auto rec = inclusion_height(chain, st.tx.txid, std::nullopt, params);
  EXPECT_EQ(rec.kind, InclusionKind::kDiscardedInvalid);
  EXPECT_EQ(rec.height, 1u);

  // Exactly K garbage symbols: either inconsistent or a failed opening.
  FinalizedLedger exact(5);
  std::map<std::uint32_t, std::vector<Bundle>> few;
  for (std::size_t i = 0; i < 4; ++i) few[bundles[i].lane] = {bundles[i]};
  auto one = bundles[4];
  one.indices.resize(1);
  one.symbols.resize(1);
  few[one.lane] = {resign(one, st.key)};
  exact.append(slot(5, 1, few), verifier);
  EXPECT_EQ(inclusion_height(exact, st.tx.txid, std::nullopt, params).kind, InclusionKind::kDiscardedInvalid);
}

TEST(Ledger, NaiveAndMdsInclusion) {
  auto st = test::honest_sender(500, 8);
  StrategyConfig nv;
  nv.variant = Variant::kNaive;
  nv.lanes = 2;
  const auto copies = protocol::build_bundles(st, std::vector<std::uint32_t>{1, 2}, nv);
  FinalizedLedger chain(3);
  BundleVerifier verifier;
  chain.append(slot(3, 1, {{2, {copies[1]}}}), verifier);
  const auto rec = inclusion_height(chain, st.tx.txid, std::nullopt,
                                    protocol::coding_params(nv, st.tx.message.size()));
  EXPECT_EQ(rec.kind, InclusionKind::kIncluded);
  EXPECT_EQ(rec.height, 1u);

  auto st2 = test::honest_sender(500, 9);
  StrategyConfig md;
  md.variant = Variant::kMds;
  md.lanes = 3;
  md.shares_needed = 2;
  const auto shares = protocol::build_bundles(st2, std::vector<std::uint32_t>{1, 2, 3}, md);
  FinalizedLedger chain2(3);
  chain2.append(slot(3, 1, {{3, {shares[2]}}}), verifier);
  chain2.append(slot(3, 2, {{1, {shares[0]}}}), verifier);
  const auto rec2 = inclusion_height(chain2, st2.tx.txid, std::nullopt,
                                     protocol::coding_params(md, st2.tx.message.size()));
  EXPECT_EQ(rec2.kind, InclusionKind::kIncluded);
  EXPECT_EQ(rec2.height, 2u);
  EXPECT_EQ(rec2.payload, Bytes(st2.tx.payload().begin(), st2.tx.payload().end()));
}

TEST(Ledger, EquivocationAfterFirstOccurrenceChangesNothing) {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    auto st = test::honest_sender(2000, 100 + trial);
    const auto cfg = rateless(4, 3, 128);
    const auto params = protocol::coding_params(cfg, st.tx.message.size());
    const auto bundles = protocol::build_bundles(st, lanes_1_to(4), cfg);  // 12 symbols, K = 17
    const auto more = protocol::build_bundles(st, lanes_1_to(4), cfg);
    std::map<std::uint32_t, std::vector<Bundle>> s1, s2;
    for (auto& b : bundles) s1[b.lane] = {b};
    for (auto& b : more) s2[b.lane] = {b};

    FinalizedLedger clean(6);
    BundleVerifier verifier;
    clean.append(slot(6, 1, s1), verifier);
    clean.append(slot(6, 2, s2), verifier);
    const auto base = inclusion_height(clean, st.tx.txid, std::nullopt, params);
    ASSERT_EQ(base.kind, InclusionKind::kIncluded);

    // Same history with conflicting re-signed copies appended on later lanes
    // and in later positions; they never precede the originals.
    auto evil = [&](const Bundle& b, std::uint32_t lane) {
      Bundle e = b;
      e.lane = lane;
      for (auto& v : e.symbols) v = test::random_bytes(rng, v.size());
      return resign(e, st.key);
    };
    auto s1x = s1, s2x = s2;
    s1x[5] = {evil(bundles[0], 5), evil(bundles[2], 5)};
    s2x[4].push_back(evil(more[1], 4));
    s2x[6] = {evil(bundles[1], 6)};
    FinalizedLedger dirty(6);
    dirty.append(slot(6, 1, s1x), verifier);
    dirty.append(slot(6, 2, s2x), verifier);
    dirty.append(slot(6, 3, {{1, {evil(bundles[3], 1)}}}), verifier);

    const auto rec = inclusion_height(dirty, st.tx.txid, std::nullopt, params);
    EXPECT_EQ(rec.kind, InclusionKind::kIncluded);
    EXPECT_EQ(rec.height, base.height);
    EXPECT_EQ(rec.payload, base.payload);
    const auto xc = scan_dedup(clean, st.tx.txid, 2);
    const auto xd = scan_dedup(dirty, st.tx.txid, 3);
    ASSERT_EQ(xc.size(), xd.size());
    for (const auto& [j, e] : xc) EXPECT_EQ(xd.at(j).value, e.value);
  }
}

TEST(Ledger, DedupViewIsMonotone) {
  auto st = test::honest_sender(3000, 11);
  const auto cfg = rateless(2, 2, 128);
  Rng rng(11);
  FinalizedLedger chain(4);
  BundleVerifier verifier;
  for (std::uint64_t t = 1; t <= 6; ++t) {
    const auto lanes = protocol::sample_lanes(4, 2, rng);
    std::map<std::uint32_t, std::vector<Bundle>> c;
    for (auto& b : protocol::build_bundles(st, lanes, cfg)) c[b.lane] = {b};
    chain.append(slot(4, t, c), verifier);
  }
  for (std::uint64_t h = 0; h < 6; ++h) {
    const auto a = scan_dedup(chain, st.tx.txid, h);
    const auto b = scan_dedup(chain, st.tx.txid, h + 1);
    for (const auto& [j, e] : a) {
      ASSERT_TRUE(b.contains(j));
      EXPECT_EQ(b.at(j).value, e.value);
      EXPECT_EQ(b.at(j).first, e.first);
    }
    EXPECT_GE(b.size(), a.size());
  }
}

TEST(Ledger, ExecutionOrderByHeightThenTxid) {
  const auto cfg = rateless(3, 6, 256);
  std::vector<protocol::SenderState> txs;
  for (int i = 0; i < 4; ++i) txs.push_back(test::honest_sender(4064, 200 + i));
  std::map<crypto::Digest, protocol::CodingParams> known;
  std::vector<std::vector<Bundle>> built;
  for (auto& st : txs) {
    known.emplace(st.tx.txid, protocol::coding_params(cfg, st.tx.message.size()));
    built.push_back(protocol::build_bundles(st, lanes_1_to(3), cfg));  // 18 >= 17 symbols
  }
  // tx0, tx1 complete at height 3; tx2 at height 2; tx3 never.
  FinalizedLedger chain(3);
  BundleVerifier verifier;
  chain.append(slot(3, 1, {{1, {built[0][0], built[1][0]}}, {2, {built[3][1]}}}), verifier);
  chain.append(slot(3, 2, {{1, {built[2][0]}}, {2, {built[2][1], built[0][1]}}, {3, {built[2][2]}}}), verifier);
  chain.append(slot(3, 3, {{2, {built[1][1]}}, {3, {built[0][2], built[1][2]}}}), verifier);

  const auto order = execution_order(chain, known);
  ASSERT_EQ(order.size(), 3u);
  EXPECT_EQ(order[0].txid, txs[2].tx.txid);
  EXPECT_EQ(order[0].height, 2u);
  EXPECT_EQ(order[1].height, 3u);
  EXPECT_EQ(order[2].height, 3u);
  EXPECT_LT(order[1].txid, order[2].txid);

  // Pure function of the ledger bytes.
  BundleVerifier fresh;
  const auto copy = FinalizedLedger::parse(chain.serialize(), fresh);
  EXPECT_EQ(copy, chain);
  EXPECT_EQ(execution_order(copy, known), order);
  const FinalizedLedger deep = chain;
  EXPECT_EQ(execution_order(deep, known), order);
}

TEST(Ledger, ParseRejectsCorruptedBytes) {
  auto st = test::honest_sender(100, 12);
  FinalizedLedger chain(2);
  BundleVerifier verifier;
  const auto b = protocol::build_bundles(st, std::vector<std::uint32_t>{2}, rateless(1, 1, 64)).front();
  chain.append(slot(2, 1, {{2, {b}}}), verifier);
  Bytes wire = chain.serialize();
  BundleVerifier v2;
  EXPECT_EQ(FinalizedLedger::parse(wire, v2), chain);
  Bytes flipped = wire;
  flipped[wire.size() - 100] ^= 1;
  EXPECT_THROW(FinalizedLedger::parse(flipped, v2), Error);
  Bytes truncated(wire.begin(), wire.end() - 1);
  EXPECT_THROW(FinalizedLedger::parse(truncated, v2), Error);
  Bytes magic = wire;
  magic[0] = 'X';
  EXPECT_THROW(FinalizedLedger::parse(magic, v2), Error);
}
