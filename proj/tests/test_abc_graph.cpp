#include <random>

#include <gtest/gtest.h>

#include "dyncon/abc_graph.hpp"
#include "dyncon/errors.hpp"
#include "support.hpp"

using namespace dyncon;
using namespace dyncon::testing;

namespace {

struct Recorder : StepObserver {
  std::vector<BaseStepRecord> records;
  std::int64_t on_step(BaseStepRecord r) override {
    records.push_back(std::move(r));
    return static_cast<std::int64_t>(records.size()) - 1;
  }
};

TEST(BValue, InfinityAboveEveryInteger) {
  EXPECT_LT(BValue(1), BValue(2));
  EXPECT_LT(BValue(1000000), BValue::infinity());
  EXPECT_EQ(BValue::infinity(), BValue::infinity());
  EXPECT_TRUE(BValue::infinity().is_infinite());
  EXPECT_FALSE(BValue(0).is_infinite());
}

TEST(AbcGraph, EmptyRead) {
  AbcGraph g(2);
  auto v = g.read(0);
  EXPECT_TRUE(v.A.empty());
  EXPECT_TRUE(v.B.empty());
  EXPECT_TRUE(v.C.empty());
}

TEST(AbcGraph, AnnouncedButUnbookedIsInfinite) {
  AbcGraph g(2);
  auto op = mk(0, 0, "inc");
  g.add_A(0, op);
  auto v = g.read(1);
  EXPECT_TRUE(v.A.contains(op));
  EXPECT_TRUE(v.b_value(op).is_infinite());
  EXPECT_TRUE(v.booked().empty());
}

TEST(AbcGraph, BMergesByMinimum) {
  AbcGraph g(3);
  auto op = mk(0, 0, "inc");
  g.add_A(0, op);
  g.add_B(1, op, 5);
  g.add_B(2, op, 3);
  EXPECT_EQ(g.read(0).b_value(op), BValue(3));
}

TEST(AbcGraph, CMergesByUnion) {
  AbcGraph g(2);
  auto x = mk(0, 0, "inc"), y = mk(1, 0, "inc"), z = mk(1, 1, "read");
  g.add_C(0, z, {x});
  g.add_C(1, z, {y});
  auto v = g.read(0);
  EXPECT_EQ(v.C.at(z), (OpSet{x, y}));
  EXPECT_EQ(v.committed(), (OpSet{x, y, z}));
}

TEST(AbcGraph, EachCallIsOneSharedAccess) {
  AbcGraph g(2);
  Recorder rec;
  auto op = mk(1, 0, "inc");
  g.add_A(1, op, &rec);
  g.add_B(1, op, 1, &rec);
  g.read(0, &rec);
  g.add_C(1, op, {}, &rec);
  ASSERT_EQ(rec.records.size(), 4u);
  EXPECT_EQ(rec.records[0].op, "write_A");
  EXPECT_EQ(rec.records[1].op, "write_B");
  EXPECT_EQ(rec.records[2].op, "scan");
  EXPECT_EQ(rec.records[3].op, "write_C");
  for (const auto& r : rec.records) EXPECT_EQ(r.object, "G");
  EXPECT_EQ(rec.records[2].process, 0);
}

TEST(SnapshotObject, OnlyOwnerWritesComponent) {
  SnapshotObject<int> k("K", 3);
  k.write(1, 1, 4);
  EXPECT_EQ(k.scan(), (std::vector<int>{0, 4, 0}));
  EXPECT_THROW(k.write(0, 1, 9), InvariantViolation);
}

TEST(ConsensusObject, FirstProposalWins) {
  ConsensusObject c(3);
  EXPECT_EQ(c.object_id(), "CONS_3");
  EXPECT_EQ(c.propose({1, 0}), (OpId{1, 0}));
  EXPECT_EQ(c.propose({2, 0}), (OpId{1, 0}));
  EXPECT_EQ(c.propose({1, 0}), (OpId{1, 0}));
}

// Oracle: the union of every add issued so far, in global step order, with
// minimum B-values and unioned C sources.
TEST(AbcGraph, RandomSequencesMatchNaiveMergeOracle) {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  for (int iter = 0; iter < 2000; ++iter) {
    const int n = 1 + static_cast<int>(rng() % 4);
    AbcGraph g(static_cast<std::size_t>(n));
    Recorder rec;
    std::vector<OpInstance> pool;
    for (int p = 0; p < n; ++p)
      for (int s = 0; s < 3; ++s) pool.push_back(mk(p, s, "inc"));
    OpSet A;
    std::map<OpInstance, int> B;
    DependencyGraph C;
    const int steps = 1 + static_cast<int>(rng() % 25);
    for (int k = 0; k < steps; ++k) {
      const int p = static_cast<int>(rng() % static_cast<unsigned>(n));
      const auto& op = pool[rng() % pool.size()];
      switch (rng() % 4) {
        case 0:
          g.add_A(p, op, &rec);
          A.insert(op);
          break;
        case 1: {
          int b = static_cast<int>(rng() % 10);
          g.add_B(p, op, b, &rec);
          auto [it, fresh] = B.emplace(op, b);
          if (!fresh) it->second = std::min(it->second, b);
          break;
        }
        case 2: {
          OpSet deps;
          for (const auto& x : pool)
            if (x != op && rng() % 4 == 0) deps.insert(x);
          g.add_C(p, op, deps, &rec);
          C[op].insert(deps.begin(), deps.end());
          break;
        }
        default: {
          auto v = g.read(p, &rec);
          if (v.A != A || v.B != B || v.C != C) ++mismatches;
        }
      }
    }
    auto v = g.read(0, &rec);
    if (v.A != A || v.B != B || v.C != C) ++mismatches;
    ASSERT_EQ(static_cast<int>(rec.records.size()), steps + 1);
  }
  EXPECT_EQ(mismatches, 0);
}

TEST(AbcGraph, ViewJsonUsesIdsAndNullForUnbooked) {
  AbcGraph g(2);
  auto x = mk(0, 0, "inc"), y = mk(1, 0, "inc");
  g.add_A(0, x);
  g.add_A(1, y);
  g.add_B(0, x, 1);
  g.add_C(0, x, {});
  auto j = to_json(g.read(0));
  EXPECT_EQ(j.at("A"), Value::array({"p0.0", "p1.0"}));
  EXPECT_EQ(j.at("B").at("p0.0"), 1);
  EXPECT_TRUE(j.at("B").at("p1.0").is_null());
  EXPECT_EQ(j.at("C").at("p0.0"), Value::array());
}

TEST(AbcGraph, MergeComponentsOfLocals) {
  auto x = mk(0, 0, "inc"), y = mk(1, 0, "inc");
  AbcLocal l0, l1;
  l0.announced = {x};
  l0.booked = {{x, 4}};
  l1.announced = {y};
  l1.booked = {{x, 2}, {y, 3}};
  l1.committed = {{y, {x}}};
  auto v = merge_components({l0, l1});
  EXPECT_EQ(v.A, (OpSet{x, y}));
  EXPECT_EQ(v.B.at(x), 2);
  EXPECT_EQ(v.B.at(y), 3);
  EXPECT_EQ(v.C.at(y), OpSet{x});
}

}  // namespace
