#include <gtest/gtest.h>

#include <set>

#include "cohort/error.hpp"
#include "cohort/visit_aggregation.hpp"
#include "support/oracles.hpp"

using namespace cohort;

namespace {

VisitMap map_of(const oracle::VisitRankingInstance& inst)
{
    VisitMap map;
    for (const auto& [report, visit] : inst.visit_of) {
        map.add(report, visit);
    }
    return map;
}

}  // namespace

TEST(VisitMap, FromCorpus)
{
    Corpus corpus({{"r1", "v1", ReportType::ProgressNote, "a"}, {"r2", "v1", ReportType::ProgressNote, "b"},
                   {"r3", "v2", ReportType::Radiology, "c"}});
    VisitMap map(corpus);
    EXPECT_EQ(map.size(), 3U);
    ASSERT_NE(map.visit_of("r2"), nullptr);
    EXPECT_EQ(*map.visit_of("r2"), "v1");
    EXPECT_EQ(map.visit_of("r9"), nullptr);
}

TEST(MapToVisits, FirstReportCarriesTheScore)
{
    VisitMap map;
    map.add("r1", "v1");
    map.add("r2", "v2");
    map.add("r3", "v1");
    map.add("r4", "v3");
    RankedList reports{"T1", RankLevel::Report, {{"r3", 9}, {"r2", 7}, {"r1", 5}, {"r4", 1}}, "bm25"};
    auto visits = map_to_visits(reports, map, 10);
    EXPECT_EQ(visits.level, RankLevel::Visit);
    EXPECT_EQ(visits.topic_id, "T1");
    EXPECT_EQ(visits.run_tag, "bm25");
    EXPECT_EQ(visits.items, (std::vector<RankedItem>{{"v1", 9}, {"v2", 7}, {"v3", 1}}));
    EXPECT_EQ(map_to_visits(reports, map, 2).items, (std::vector<RankedItem>{{"v1", 9}, {"v2", 7}}));
}

TEST(MapToVisits, Errors)
{
    VisitMap map;
    map.add("r1", "v1");
    RankedList reports{"T1", RankLevel::Report, {{"r1", 2}, {"r2", 1}}, "bm25"};
    EXPECT_THROW((void)map_to_visits(reports, map, 10), DataError);
    EXPECT_THROW((void)map_to_visits(reports, map, 1), DataError);
    EXPECT_THROW((void)map_to_visits(reports, map, 0), ConfigError);
    EXPECT_TRUE(map_to_visits(RankedList{"T1", RankLevel::Report, {}, "t"}, map, 5).items.empty());
}

TEST(MapToVisits, MatchesBruteForceOverRandomRankings)
{
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto inst = oracle::random_visit_ranking(seed);
        auto got = map_to_visits(inst.reports, map_of(inst), inst.max_visits);
        EXPECT_EQ(got.items, oracle::brute_visit_ranking(inst)) << "seed " << seed;

        std::set<std::string> distinct;
        for (const auto& item : inst.reports.items) {
            distinct.insert(inst.visit_of.at(item.id));
        }
        std::set<std::string> seen;
        for (const auto& item : got.items) {
            EXPECT_TRUE(seen.insert(item.id).second) << "visit " << item.id << " repeated";
        }
        EXPECT_EQ(got.items.size(), std::min(inst.max_visits, distinct.size()));
        EXPECT_NO_THROW(validate(got));
    }
}
