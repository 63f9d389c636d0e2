#include "vshape/values.hpp"

#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace vshape {
namespace {

Config with(Mode mode, std::uint64_t threshold = 17, std::size_t max_size = 7) {
  Config c;
  c.mode = mode;
  c.threshold = threshold;
  c.max_size = max_size;
  return c;
}

Value I(std::int64_t v) { return Value::integer(v); }

// Adds one rule by driving recognition with threshold 1.
void add_rule(Runtime& rt, const Shape& s, std::size_t pos, const Shape& sub) {
  ASSERT_EQ(rt.config().threshold, 1u);
  rt.record_history(s, pos, sub);
  ASSERT_TRUE(rt.maybe_create_rule(s, pos, sub));
}

Value list(Runtime& rt, std::int64_t from, std::int64_t to) {
  const ClassDescriptor& cons = rt.intern_class("Node", 2);
  Value tail = construct(rt, rt.intern_class("Nil", 0), {});
  for (std::int64_t i = to; i >= from; --i) {
    Value f[] = {I(i), tail};
    tail = construct(rt, cons, f);
  }
  return tail;
}

TEST(ValuesTest, WorkedExampleGolden) {
  Runtime rt(with(Mode::Manual, 1));
  const ClassDescriptor& node = rt.intern_class("Node", 2);
  const Shape& s1 = node.default_shape();
  Value donor = list(rt, 2, 4);
  ASSERT_EQ(&donor.object().shape(), &s1);
  std::vector<Value> donor_before(donor.object().storage().begin(), donor.object().storage().end());

  add_rule(rt, s1, 1, s1);
  Value f[] = {I(1), donor};
  Value v = construct(rt, node, f);

  const Shape& s2 = rt.merge_shape(s1, 1, s1);
  EXPECT_EQ(&v.object().shape(), &s2);
  auto st = v.object().storage();
  ASSERT_EQ(st.size(), 3u);
  EXPECT_EQ(st[0].as_int(), 1);
  EXPECT_EQ(st[1].as_int(), 2);
  ASSERT_TRUE(st[2].is_boxed());
  EXPECT_EQ(&st[2].object(), &donor.object().storage()[1].object());
  EXPECT_EQ(print_value(st[2]), "Node[3, Node[4, Nil[]]]");

  // Donor untouched.
  EXPECT_EQ(&donor.object().shape(), &s1);
  ASSERT_EQ(donor.object().storage().size(), donor_before.size());
  EXPECT_EQ(donor.object().storage()[0].as_int(), 2);
  EXPECT_EQ(&donor.object().storage()[1].object(), &donor_before[1].object());
  EXPECT_EQ(print_value(v), "Node[1, Node[2, Node[3, Node[4, Nil[]]]]]");
}

TEST(ValuesTest, TwoRulesOnFourNodeList) {
  Runtime rt(with(Mode::Manual, 1));
  const ClassDescriptor& node = rt.intern_class("Node", 2);
  const Shape& s1 = node.default_shape();
  const Shape& s2 = rt.merge_shape(s1, 1, s1);
  const Shape& s3 = rt.merge_shape(s2, 2, s1);
  Value rest = list(rt, 2, 4);
  add_rule(rt, s1, 1, s1);
  add_rule(rt, s2, 2, s1);

  Value f[] = {I(1), rest};
  InlineResult r = inline_fields(rt, s1, f);
  EXPECT_EQ(r.shape, &s3);
  ASSERT_EQ(r.fields.size(), 4u);
  EXPECT_EQ(r.fields[0].as_int(), 1);
  EXPECT_EQ(r.fields[1].as_int(), 2);
  EXPECT_EQ(r.fields[2].as_int(), 3);
  EXPECT_EQ(print_value(r.fields[3]), "Node[4, Nil[]]");
  EXPECT_EQ(r.restarts, 2u);
}

TEST(ValuesTest, EmptyRuleTableLeavesFieldsAlone) {
  Runtime rt(with(Mode::Manual));
  const Shape& s1 = rt.intern_class("Node", 2).default_shape();
  Value rest = list(rt, 2, 3);
  Value f[] = {I(1), rest};
  InlineResult r = inline_fields(rt, s1, f);
  EXPECT_EQ(r.shape, &s1);
  EXPECT_EQ(r.restarts, 0u);
  EXPECT_EQ(&r.fields[1].object(), &rest.object());
  EXPECT_THROW(inline_fields(rt, s1, std::span<const Value>(f, 1)), std::logic_error);
}

TEST(ValuesTest, ConstructBasics) {
  Runtime rt;
  const ClassDescriptor& nil = rt.intern_class("Nil", 0);
  const ClassDescriptor& node = rt.intern_class("Node", 2);
  Value n = construct(rt, nil, {});
  EXPECT_TRUE(n.is_boxed());
  EXPECT_EQ(n.object().storage().size(), 0u);
  Value f[] = {I(1), n};
  Value v = construct(rt, node, f);
  EXPECT_EQ(&v.object().shape(), &node.default_shape());
  EXPECT_EQ(&v.object().storage()[1].object(), &n.object());
  EXPECT_EQ(rt.counters().objects_allocated, 2u);
  EXPECT_EQ(rt.counters().slots_allocated, 2u);
  EXPECT_THROW(construct(rt, node, std::span<const Value>(f, 1)), std::invalid_argument);
}

TEST(ValuesTest, ModeNoneKeepsDefaultShapes) {
  Runtime rt(with(Mode::None, 1));
  Value l = list(rt, 1, 200);
  for (Value cur = l; cur.object().cls().arity() == 2; cur = get_field(rt, cur, 1)) {
    EXPECT_TRUE(cur.object().shape().is_default());
  }
  EXPECT_EQ(rt.rules().size(), 0u);
  EXPECT_EQ(rt.history().size(), 0u);
  EXPECT_EQ(rt.counters().reifications, 0u);
}

TEST(ValuesTest, ReificationOnFieldAccess) {
  Runtime rt(with(Mode::Manual));
  const ClassDescriptor& node = rt.intern_class("Node", 2);
  rt.seed_linear_rules(node, 1, 7);
  Value l = list(rt, 1, 4);
  ASSERT_EQ(l.object().shape().width(), 5u);  // [1, 2, 3, 4, Nil]

  Counters before = rt.counters();
  EXPECT_EQ(get_field(rt, l, 0).as_int(), 1);
  EXPECT_EQ(rt.counters().objects_allocated, before.objects_allocated);

  Value t1 = get_field(rt, l, 1);
  Value t2 = get_field(rt, t1, 1);
  EXPECT_EQ(t1.object().storage()[0].as_int(), 2);
  EXPECT_EQ(t2.object().storage()[0].as_int(), 3);
  EXPECT_EQ(t1.object().storage().size(), t1.object().shape().width());
  EXPECT_EQ(rt.counters().reifications, before.reifications + 2);
  EXPECT_EQ(rt.counters().objects_allocated, before.objects_allocated + 2);
  EXPECT_EQ(rt.counters().field_reads, before.field_reads + 3);

  EXPECT_THROW(get_field(rt, I(3), 0), std::logic_error);
  EXPECT_THROW(get_field(rt, l, 2), std::out_of_range);
}

TEST(ValuesTest, DefaultShapeFieldIsReturnedAsIs) {
  Runtime rt(with(Mode::None));
  Value l = list(rt, 1, 2);
  Counters before = rt.counters();
  Value t = get_field(rt, l, 1);
  EXPECT_EQ(&t.object(), &l.object().storage()[1].object());
  EXPECT_EQ(rt.counters().objects_allocated, before.objects_allocated);
}

TEST(ValuesTest, StructuralEquality) {
  Runtime a(with(Mode::None));
  Runtime b(with(Mode::Manual));
  b.seed_linear_rules(b.intern_class("Node", 2), 1, 7);
  EXPECT_TRUE(structural_eq(I(3), I(3)));
  EXPECT_FALSE(structural_eq(I(3), I(4)));
  Value la = list(a, 1, 20);
  Value lb = list(b, 1, 20);
  EXPECT_NE(&la.object().shape(), &b.intern_class("Node", 2).default_shape());
  EXPECT_TRUE(structural_eq(la, lb));
  EXPECT_FALSE(structural_eq(la, list(b, 1, 19)));

  Value nil = construct(a, a.intern_class("Nil", 0), {});
  Value f2[] = {I(1), nil};
  Value f3[] = {I(1), nil, nil};
  EXPECT_FALSE(structural_eq(construct(a, a.intern_class("Node", 2), f2),
                             construct(a, a.intern_class("Node", 3), f3)));
  EXPECT_FALSE(structural_eq(I(1), nil));
}

TEST(ValuesTest, MeasureCellModel) {
  EXPECT_EQ(measure(I(5)), MemoryStats{});

  Runtime naive(with(Mode::None));
  MemoryStats m = measure(list(naive, 1, 6));
  EXPECT_EQ(m.boxed_objects, 7u);
  EXPECT_EQ(m.storage_slots, 12u);
  EXPECT_EQ(m.shape_refs, 7u);
  EXPECT_EQ(m.total_cells, 19u);

  Runtime packed(with(Mode::Manual));
  packed.seed_linear_rules(packed.intern_class("Node", 2), 1, 7);
  Value chunk = list(packed, 1, 6);
  ASSERT_EQ(chunk.object().shape().width(), 7u);
  m = measure(chunk);
  EXPECT_EQ(m.boxed_objects, 2u);
  EXPECT_EQ(m.storage_slots, 7u);
  EXPECT_EQ(m.total_cells, 9u);
}

TEST(ValuesTest, MeasureCountsSharedObjectsOnce) {
  Runtime rt(with(Mode::None));
  Value leaf = list(rt, 1, 3);
  Value f[] = {leaf, leaf};
  MemoryStats m = measure(construct(rt, rt.intern_class("Pair", 2), f));
  EXPECT_EQ(m.boxed_objects, 1u + 4u);
  EXPECT_EQ(m.storage_slots, 2u + 6u);
}

TEST(ValuesTest, Printing) {
  Runtime rt;
  EXPECT_EQ(print_value(I(-12)), "-12");
  EXPECT_EQ(print_value(list(rt, 1, 2)), "Node[1, Node[2, Nil[]]]");
}

// Independent model of a value for differential checks.
struct Spec {
  int cls = -1;  // -1 = integer
  std::int64_t n = 0;
  std::vector<Spec> kids;
};

struct ClassInfo {
  const char* name;
  std::size_t arity;
};
constexpr ClassInfo kClasses[] = {{"Node", 2}, {"Leaf", 0}, {"Tri", 3}, {"Box", 1}, {"Node", 3}};

Spec random_spec(std::mt19937_64& rng, int budget) {
  Spec s;
  if (budget <= 0 || rng() % 5 == 0) {
    s.n = static_cast<std::int64_t>(rng() % 2001) - 1000;
    return s;
  }
  // Bias toward right-leaning Node/2 chains so rules actually fire.
  s.cls = rng() % 3 == 0 ? static_cast<int>(rng() % 5) : 0;
  for (std::size_t i = 0; i < kClasses[s.cls].arity; ++i) {
    s.kids.push_back(random_spec(rng, i + 1 == kClasses[s.cls].arity ? budget - 1 : budget / 3));
  }
  return s;
}

Value build(Runtime& rt, const Spec& s) {
  if (s.cls < 0) return I(s.n);
  std::vector<Value> f;
  for (const Spec& k : s.kids) f.push_back(build(rt, k));
  Value v = construct(rt, rt.intern_class(kClasses[s.cls].name, kClasses[s.cls].arity), f);
  EXPECT_EQ(v.object().storage().size(), v.object().shape().width());
  return v;
}

std::string spec_print(const Spec& s) {
  if (s.cls < 0) return std::to_string(s.n);
  std::string out = std::string(kClasses[s.cls].name) + "[";
  for (std::size_t i = 0; i < s.kids.size(); ++i) out += (i ? ", " : "") + spec_print(s.kids[i]);
  return out + "]";
}

void spec_checksum(const Spec& s, unsigned __int128& h) {
  if (s.cls < 0) {
    std::int64_t r = s.n % static_cast<std::int64_t>(kChecksumModulus);
    if (r < 0) r += static_cast<std::int64_t>(kChecksumModulus);
    h = (h * 1000003 + static_cast<std::uint64_t>(r)) % kChecksumModulus;
    return;
  }
  for (const Spec& k : s.kids) spec_checksum(k, h);
}

void spec_cells(const Spec& s, std::uint64_t& objects, std::uint64_t& slots) {
  if (s.cls < 0) return;
  ++objects;
  slots += s.kids.size();
  for (const Spec& k : s.kids) spec_cells(k, objects, slots);
}

// Follows a random field path in both the model and the runtime value.
void check_paths(Runtime& rt, Value v, const Spec& s, std::mt19937_64& rng) {
  for (int walk = 0; walk < 4; ++walk) {
    Value cur = v;
    const Spec* sp = &s;
    while (sp->cls >= 0 && !sp->kids.empty()) {
      std::size_t f = rng() % sp->kids.size();
      cur = get_field(rt, cur, f);
      sp = &sp->kids[f];
      ASSERT_EQ(cur.is_int(), sp->cls < 0);
      if (cur.is_boxed()) {
        ASSERT_EQ(cur.object().cls().name(), kClasses[sp->cls].name);
        ASSERT_EQ(cur.object().storage().size(), cur.object().shape().width());
      } else {
        ASSERT_EQ(cur.as_int(), sp->n);
      }
    }
  }
}

TEST(ValuesTest, RandomValuesAgreeAcrossModes) {
  std::mt19937_64 rng(2024);
  Runtime none(with(Mode::None));
  Runtime manual(with(Mode::Manual));
  manual.seed_linear_rules(manual.intern_class("Node", 2), 1, 7);
  manual.seed_linear_rules(manual.intern_class("Tri", 3), 2, 7);
  Runtime aut(with(Mode::Auto, 3));
  Runtime tight(with(Mode::Auto, 1, 3));

  for (int i = 0; i < 400; ++i) {
    Spec s = random_spec(rng, 12);
    Value vn = build(none, s);
    Value vm = build(manual, s);
    Value va = build(aut, s);
    Value vt = build(tight, s);

    std::string expected = spec_print(s);
    ASSERT_EQ(print_value(vn), expected);
    ASSERT_EQ(print_value(vm), expected);
    ASSERT_EQ(print_value(va), expected);
    ASSERT_EQ(print_value(vt), expected);
    ASSERT_TRUE(structural_eq(vn, va));
    ASSERT_TRUE(structural_eq(vm, vt));

    unsigned __int128 h = 0;
    spec_checksum(s, h);
    ASSERT_EQ(checksum(vn), static_cast<std::uint64_t>(h));
    ASSERT_EQ(checksum(va), static_cast<std::uint64_t>(h));

    std::uint64_t objects = 0, slots = 0;
    spec_cells(s, objects, slots);
    MemoryStats mn = measure(vn);
    ASSERT_EQ(mn.boxed_objects, objects);
    ASSERT_EQ(mn.storage_slots, slots);
    ASSERT_LE(measure(va).total_cells, mn.total_cells);
    ASSERT_LE(measure(vm).total_cells, mn.total_cells);

    check_paths(aut, va, s, rng);
    check_paths(tight, vt, s, rng);
  }
  EXPECT_GT(aut.rules().size(), 0u);
  EXPECT_GT(tight.rules().size(), 0u);
  for (const Shape* sh : tight.shapes().shapes()) {
    if (sh->is_compound() && !sh->is_default()) EXPECT_LE(sh->width(), 3u);
  }
}

TEST(ValuesTest, ConstructDoesNotMutateArguments) {
  Runtime rt(with(Mode::Auto, 1));
  const ClassDescriptor& node = rt.intern_class("Node", 2);
  Value rest = list(rt, 2, 30);
  std::string printed = print_value(rest);
  const Shape* shape = &rest.object().shape();
  std::vector<Value> slots(rest.object().storage().begin(), rest.object().storage().end());
  for (int i = 0; i < 50; ++i) {
    Value f[] = {I(i), rest};
    construct(rt, node, f);
    ASSERT_TRUE(f[1].is_boxed());
    ASSERT_EQ(&f[1].object(), &rest.object());
  }
  EXPECT_EQ(&rest.object().shape(), shape);
  ASSERT_EQ(rest.object().storage().size(), slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    EXPECT_EQ(rest.object().storage()[i].is_int(), slots[i].is_int());
    if (slots[i].is_int()) {
      EXPECT_EQ(rest.object().storage()[i].as_int(), slots[i].as_int());
    } else {
      EXPECT_EQ(&rest.object().storage()[i].object(), &slots[i].object());
    }
  }
  EXPECT_EQ(print_value(rest), printed);
}

}  // namespace
}  // namespace vshape
