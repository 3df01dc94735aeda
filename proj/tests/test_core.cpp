#include <gtest/gtest.h>

#include <random>

#include "logplag/core.hpp"

using namespace logplag;

namespace {

EventLog make_log(std::string id, std::initializer_list<const char*> cmds) {
    EventLog log{std::move(id), {}};
    for (const char* c : cmds) log.records.push_back(make_record(c));
    return log;
}

}  // namespace

TEST(Histogram, CountsRecordsPerType) {
    const auto h = histogram(make_log("L", {"A", "A", "B"}));
    EXPECT_EQ(h.counts(), (CommandHistogram::Map{{"A", 2}, {"B", 1}}));
    EXPECT_EQ(h.total(), 3);
    EXPECT_EQ(h.log_id(), "L");
}

TEST(Histogram, EmptyLogGivesEmptyHistogram) {
    const auto h = histogram(EventLog{"E", {}});
    EXPECT_TRUE(h.empty());
    EXPECT_EQ(h.total(), 0);
}

TEST(Histogram, LargeLogMatchesIndependentTally) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> pick(0, 11);
    EventLog log{"big", {}};
    int tally[12] = {};
    for (int i = 0; i < 1000; ++i) {
        const int t = pick(rng);
        ++tally[t];
        log.records.push_back(make_record("cmd" + std::to_string(t)));
    }
    const auto h = histogram(log);
    EXPECT_EQ(h.total(), 1000);
    for (int t = 0; t < 12; ++t) EXPECT_EQ(h.count("cmd" + std::to_string(t)), tally[t]);
}

TEST(Histogram, PermutationInvariant) {
    auto log = make_log("L", {"A", "B", "C", "A", "C", "C", "D"});
    const auto h = histogram(log);
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(log.records.begin(), log.records.end(), rng);
        EXPECT_EQ(histogram(log), h);
    }
}

TEST(Record, CommandIsTrimmedAndNonEmpty) {
    EXPECT_EQ(make_record("  Save\t").command_type, "Save");
    EXPECT_THROW(make_record("   "), Error);
    EXPECT_THROW(make_record(""), Error);
}

TEST(CommandHistogram, StoresOnlyPositiveCounts) {
    const CommandHistogram h("x", {{"A", 0}, {"B", 2}});
    EXPECT_FALSE(h.contains("A"));
    EXPECT_EQ(h.count("A"), 0);
    EXPECT_EQ(h.num_types(), 1u);
    EXPECT_THROW(CommandHistogram("x", {{"A", -1}}), Error);
}

TEST(Restrict, KeepsMatchingRecordsInOrder) {
    EventLog log{"L", {make_record("A", 1), make_record("B", 2), make_record("A", 3)}};
    const auto r = restrict(log, {"A"});
    ASSERT_EQ(r.records.size(), 2u);
    EXPECT_EQ(*r.records[0].timestamp, 1);
    EXPECT_EQ(*r.records[1].timestamp, 3);
    EXPECT_NE(r.id, log.id);
    EXPECT_EQ(r.id, restrict(log, {"A"}).id);
}

TEST(Restrict, FullTypeSetIsIdentityAndEmptySetIsEmpty) {
    const auto log = make_log("L", {"A", "B", "A", "C"});
    EXPECT_EQ(restrict(log, {"A", "B", "C"}).records, log.records);
    EXPECT_TRUE(restrict(log, {}).records.empty());
}

TEST(Restrict, HistogramOfRestrictionIsRestrictedHistogram) {
    std::mt19937 rng(11);
    const std::vector<std::string> names{"A", "B", "C", "D", "E", "F"};
    std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
    EventLog log{"L", {}};
    for (int i = 0; i < 300; ++i) log.records.push_back(make_record(names[pick(rng)]));
    const auto full = histogram(log);
    for (int trial = 0; trial < 50; ++trial) {
        std::set<CommandType> u;
        for (const auto& n : names)
            if (rng() % 2) u.insert(n);
        CommandHistogram::Map expected;
        for (const auto& [c, k] : full.counts())
            if (u.contains(c)) expected[c] = k;
        EXPECT_EQ(histogram(restrict(log, u)).counts(), expected);
    }
}

TEST(Corpus, SortedByIdAndRejectsDuplicates) {
    Corpus c({CommandHistogram("b", {{"X", 1}}), CommandHistogram("a", {{"Y", 2}})});
    EXPECT_EQ(c.ids(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(c.universe(), (std::vector<CommandType>{"X", "Y"}));
    EXPECT_THROW(c.with(CommandHistogram("a", {{"Z", 1}})), Error);
    EXPECT_THROW(Corpus({CommandHistogram("", {{"Z", 1}})}), Error);
    EXPECT_EQ(c.at("b").count("X"), 1);
    EXPECT_THROW(c.at("zz"), Error);
}

TEST(Corpus, UniverseIsUnionOfTypes) {
    Corpus c({CommandHistogram("a", {{"A", 1}, {"B", 1}}), CommandHistogram("b", {{"B", 3}, {"C", 1}}),
              CommandHistogram("c", {})});
    EXPECT_EQ(c.universe(), (std::vector<CommandType>{"A", "B", "C"}));
}
