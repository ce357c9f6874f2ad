#include <gtest/gtest.h>

#include <random>

#include "plancomm/error.hpp"
#include "plancomm/strategies.hpp"
#include "support.hpp"

using namespace plancomm;
namespace t = plancomm::testing;

namespace {

MirrorModel five_step() {
  return t::make_synthetic({"a1", "a2", "a3", "a4", "a5"},
                           {{0.5, {{"a1", "a2", "a3", "a4", "a5"}}, {}},
                            {0.3, {{"a1", "a2", "a3"}}, {}},
                            {0.2, {{"a4", "a5", "a1"}}, {}}});
}

std::vector<std::string> pick(Strategy s, const MirrorModel& m, std::size_t n) {
  return t::action_names(m, select(s, m, n).actions);
}

}  // namespace

TEST(Select, IncreasingAndDecreasing) {
  MirrorModel m = five_step();
  EXPECT_EQ(pick(Strategy::Increasing, m, 2), (std::vector<std::string>{"(a1)", "(a2)"}));
  EXPECT_EQ(pick(Strategy::Decreasing, m, 2), (std::vector<std::string>{"(a5)", "(a4)"}));
  Verbalization dec = select(Strategy::Decreasing, m, 2);
  EXPECT_EQ(dec.positions, (std::vector<std::size_t>{4, 3}));
  EXPECT_THROW(select(Strategy::Increasing, m, 0), RangeError);
  EXPECT_THROW(select(Strategy::Informative, m, 6), RangeError);
}

TEST(Select, DuplicatesSkipped) {
  MirrorModel m = t::make_synthetic({"a", "b"}, {{0.5, {{"a", "b", "a"}}, {}}, {0.5, {{"b"}}, {}}});
  EXPECT_EQ(pick(Strategy::Decreasing, m, 2), (std::vector<std::string>{"(a)", "(b)"}));
  EXPECT_EQ(pick(Strategy::Increasing, m, 2), (std::vector<std::string>{"(a)", "(b)"}));
}

TEST(Select, StrategyNames) {
  for (Strategy s : {Strategy::Increasing, Strategy::Decreasing, Strategy::Informative,
                     Strategy::InformativeNested})
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_FALSE(parse_strategy("random"));
}

TEST(Select, DominanceAndPrefixConsistency) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    MirrorModel m = t::random_synthetic(rng);
    std::size_t d = m.distinct_actions().size();
    std::vector<ActionId> prev_inc, prev_dec;
    for (std::size_t n = 1; n <= std::min<std::size_t>(d, 6); ++n) {
      auto ig = [&](Strategy s) { return information_gain(m, select(s, m, n)); };
      ExtendedReal inf = ig(Strategy::Informative);
      EXPECT_TRUE(inf >= ig(Strategy::Increasing));
      EXPECT_TRUE(inf >= ig(Strategy::Decreasing));
      EXPECT_TRUE(inf >= ig(Strategy::InformativeNested));
      auto inc = select(Strategy::Increasing, m, n).actions;
      auto dec = select(Strategy::Decreasing, m, n).actions;
      EXPECT_TRUE(std::equal(prev_inc.begin(), prev_inc.end(), inc.begin()));
      EXPECT_TRUE(std::equal(prev_dec.begin(), prev_dec.end(), dec.begin()));
      prev_inc = inc;
      prev_dec = dec;
    }
  }
}

TEST(Render, TemplatesAndAttributes) {
  TemplateTable table = TemplateTable::parse(
      "# warehouse phrasing\n"
      "grab: I will grab a {color} {shape}.\n"
      "move: I will go to {arg2.dest}.\n"
      "recharge: I will recharge at {arg1}.\n"
      "@circle1.color: red\n"
      "@circle1.shape: circle\n"
      "@c3.dest: the corridor\n"
      "@c9.name: the recharge station\n");
  GroundAction grab{"grab", {"circle1", "c1"}, {}, {}, {}, {}};
  EXPECT_EQ(table.render(grab), "I will grab a red circle.");
  GroundAction move{"move", {"c2", "c3"}, {}, {}, {}, {}};
  EXPECT_EQ(table.render(move), "I will go to the corridor.");
  GroundAction recharge{"recharge", {"c9"}, {}, {}, {}, {}};
  EXPECT_EQ(table.render(recharge), "I will recharge at the recharge station.");
  // missing attribute and unknown operator both fall back
  GroundAction move_bad{"move", {"c3", "c4"}, {}, {}, {}, {}};
  EXPECT_EQ(table.render(move_bad), "(move c3 c4)");
  GroundAction other{"exit", {"door"}, {}, {}, {}, {}};
  EXPECT_EQ(table.render(other), "(exit door)");
  EXPECT_THROW(TemplateTable::parse("no colon here\n"), ParseError);
}

TEST(Render, PreservesLengthAndOrder) {
  MirrorModel m = five_step();
  TemplateTable table = TemplateTable::parse("a4: fourth\na5: fifth\n");
  EXPECT_TRUE(render(Verbalization{}, m.ground(), table).empty());
  Verbalization dec = select(Strategy::Decreasing, m, 3);
  EXPECT_EQ(render(dec, m.ground(), table),
            (std::vector<std::string>{"fifth", "fourth", "(a3)"}));
}
