#include <gtest/gtest.h>

#include "dyncon/errors.hpp"
#include "support.hpp"

using namespace dyncon;
using namespace dyncon::testing;

namespace {

std::pair<Value, Value> apply(const SeqObjectSpec& spec, const Value& state, const OpInstance& op) {
  auto [r, s] = spec.apply(state, op);
  return {r, s};
}

TEST(ListSpec, AppendAndReads) {
  auto spec = list_spec();
  EXPECT_EQ(spec.initial_state, Value::array());
  auto [r, s] = apply(spec, spec.initial_state, mk(0, 0, "append", {"a"}));
  EXPECT_EQ(r, "ok");
  EXPECT_EQ(s, Value::array({"a"}));
  EXPECT_EQ(apply(spec, s, mk(0, 1, "readLast")).first, "a");
  EXPECT_EQ(apply(spec, s, mk(0, 1, "readAll")).first, Value::array({"a"}));
}

TEST(ListSpec, ReadLastOnEmptyIsBottom) {
  auto spec = list_spec();
  auto [r, s] = apply(spec, spec.initial_state, mk(0, 0, "readLast"));
  EXPECT_TRUE(r.is_null());
  EXPECT_EQ(render_response(r), "⊥");
  EXPECT_EQ(s, Value::array());
}

TEST(ListSpec, SwapEqualEndsLeavesAbaUnchanged) {
  auto spec = list_spec();
  auto [r, s] = apply(spec, Value::array({"a", "b", "a"}), mk(3, 1, "swap", {0, 2}));
  EXPECT_EQ(r, "ok");
  EXPECT_EQ(s, Value::array({"a", "b", "a"}));
}

TEST(ListSpec, SwapMovesValues) {
  auto [r, s] = apply(list_spec(), Value::array({"a", "a", "b"}), mk(3, 1, "swap", {0, 2}));
  EXPECT_EQ(r, "ok");
  EXPECT_EQ(s, Value::array({"b", "a", "a"}));
}

TEST(ListSpec, SwapNeedsIndexJToExist) {
  auto spec = list_spec();
  // j = 2 needs three elements.
  auto [r, s] = apply(spec, Value::array({"a", "b"}), mk(0, 0, "swap", {0, 2}));
  EXPECT_TRUE(r.is_null());
  EXPECT_EQ(s, Value::array({"a", "b"}));
  auto [r2, s2] = apply(spec, Value::array({"a", "b"}), mk(0, 0, "swap", {0, 1}));
  EXPECT_EQ(r2, "ok");
  EXPECT_EQ(s2, Value::array({"b", "a"}));
}

TEST(ListSpec, SwapIndicesOutsideDomainAreMalformed) {
  auto spec = list_spec();
  EXPECT_THROW(spec.apply(Value::array({"a", "b", "c"}), mk(0, 0, "swap", {2, 0})), MalformedInput);
  EXPECT_THROW(spec.apply(Value::array({"a", "b", "c"}), mk(0, 0, "swap", {-1, 0})), MalformedInput);
}

TEST(ListSpec, MalformedOperations) {
  auto spec = list_spec();
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "append", {"z"})), MalformedInput);
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "append")), MalformedInput);
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "swap", {0})), MalformedInput);
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "swap", {"x", 1})), MalformedInput);
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "prepend", {"a"})), MalformedInput);
}

TEST(AssetTransfer, FirstAcceptedSecondRejectedAtBalance100) {
  auto spec = asset_transfer_spec({{"a", 100}, {"b", 0}});
  auto [r1, s1] = apply(spec, spec.initial_state, mk(0, 0, "transfer", {"a", "b", 100}));
  auto [r2, s2] = apply(spec, s1, mk(1, 0, "transfer", {"a", "b", 50}));
  EXPECT_EQ(r1, "accepted");
  EXPECT_EQ(r2, "rejected");
  EXPECT_EQ(apply(spec, s2, mk(2, 0, "readBalance", {"b"})).first, 100);
}

TEST(AssetTransfer, BothAcceptedAtBalance150) {
  auto spec = asset_transfer_spec({{"a", 150}, {"b", 0}});
  auto [r1, s1] = apply(spec, spec.initial_state, mk(1, 0, "transfer", {"a", "b", 50}));
  auto [r2, s2] = apply(spec, s1, mk(0, 0, "transfer", {"a", "b", 100}));
  EXPECT_EQ(r1, "accepted");
  EXPECT_EQ(r2, "accepted");
  EXPECT_EQ(apply(spec, s2, mk(2, 0, "readBalance", {"a"})).first, 0);
}

TEST(AssetTransfer, DefaultBalances) {
  auto spec = asset_transfer_spec();
  EXPECT_EQ(apply(spec, spec.initial_state, mk(0, 0, "readBalance", {"a"})).first, 100);
  EXPECT_EQ(apply(spec, spec.initial_state, mk(0, 0, "readBalance", {"b"})).first, 0);
}

TEST(AssetTransfer, MalformedOperations) {
  auto spec = asset_transfer_spec();
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "transfer", {"a", "zz", 1})), MalformedInput);
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "transfer", {"a", "b", -5})), MalformedInput);
  EXPECT_THROW(spec.apply(spec.initial_state, mk(0, 0, "readBalance", {"q"})), MalformedInput);
  EXPECT_THROW(asset_transfer_spec(Value::array()), MalformedInput);
}

TEST(CounterAndRegister, Basics) {
  auto counter = counter_spec();
  auto [r, s] = apply(counter, counter.initial_state, mk(0, 0, "inc"));
  EXPECT_EQ(r, "ok");
  EXPECT_EQ(apply(counter, s, mk(0, 1, "read")).first, 1);

  auto reg = register_spec();
  EXPECT_TRUE(apply(reg, reg.initial_state, mk(0, 0, "read")).first.is_null());
  auto [w, s2] = apply(reg, reg.initial_state, mk(0, 0, "write", {7}));
  EXPECT_EQ(w, "ok");
  EXPECT_EQ(apply(reg, s2, mk(0, 1, "read")).first, 7);
}

TEST(Registry, AllNamesResolve) {
  for (const auto& name : {"list", "asset-transfer", "counter", "register"}) EXPECT_EQ(make_spec(name).name, name);
  EXPECT_THROW(make_spec("queue"), MalformedInput);
  auto spec = make_spec("asset-transfer", {{"balances", {{"x", 5}}}});
  EXPECT_EQ(apply(spec, spec.initial_state, mk(0, 0, "readBalance", {"x"})).first, 5);
}

}  // namespace
