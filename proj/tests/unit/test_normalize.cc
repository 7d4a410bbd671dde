/*
 * Copyright 2026 The Sector Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <set>

#include "json.hpp"
#include "sector/common.h"
#include "sector/normalize.h"

namespace sector {
namespace {

// Adjacency-matrix modularity, independent of the library's edge-map version.
double OracleModularity(const SynsetGraph& g, const std::vector<size_t>& community) {
  const size_t n = g.nodes.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [key, w] : g.edges) {
    a[key.first][key.second] += static_cast<double>(w);
    a[key.second][key.first] += static_cast<double>(w);
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (community[i] == community[j]) q += a[i][j] - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

// Two planted groups of six synsets; four lemmas per group make each group
// dense, one lemma bridges them.
SynsetLexicon PlantedLexicon() {
  SynsetLexicon lex;
  auto add = [&](const std::string& lemma, std::initializer_list<std::string> ids) {
    for (const auto& id : ids) lex.Add(lemma, id, "");
  };
  add("therapy", {"bn:a1", "bn:a2", "bn:a3"});
  add("treatment", {"bn:a3", "bn:a4", "bn:a5"});
  add("management", {"bn:a5", "bn:a6", "bn:a1"});
  add("cure", {"bn:a2", "bn:a4", "bn:a6"});
  add("symptoms", {"bn:b1", "bn:b2", "bn:b3"});
  add("signs", {"bn:b3", "bn:b4", "bn:b5"});
  add("presentation", {"bn:b5", "bn:b6", "bn:b1"});
  add("features", {"bn:b2", "bn:b4", "bn:b6"});
  add("care", {"bn:a6", "bn:b1"});
  return lex;
}

std::vector<HeadingRecord> PlantedHeadings() {
  return {{"Therapy", 9}, {"Treatment", 5}, {"Management", 3}, {"Cure", 1},
          {"Symptoms", 8}, {"Signs", 4},    {"Presentation", 2}, {"Features", 1},
          {"Care", 1},     {"Unknown heading", 2}};
}

TEST(Lexicon, ParseTsvAndLookup) {
  const auto lex = SynsetLexicon::Parse(
      "# comment\n"
      "Therapy\tbn:1\ttherapy\n"
      "therapy\tbn:2\ttreatment\n"
      "\n"
      "cure\tbn:3\n");
  ASSERT_NE(lex.Find("therapy"), nullptr);
  EXPECT_EQ(*lex.Find("therapy"), (std::set<std::string>{"bn:1", "bn:2"}));
  EXPECT_EQ(lex.PrimaryLemma("bn:2"), "treatment");
  EXPECT_EQ(lex.PrimaryLemma("bn:3"), "cure");
  EXPECT_EQ(lex.Find("nothing"), nullptr);
}

TEST(Lexicon, MalformedLineNamesLine) {
  try {
    SynsetLexicon::Parse("ok\tbn:1\tok\nbroken line\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(HeadingLemma, NormalizesCaseAndSpace) {
  EXPECT_EQ(HeadingLemma("  Gene   Therapy "), "gene therapy");
}

TEST(SynsetGraph, LemmaWithTwoSynsetsMakesOneEdge) {
  SynsetLexicon lex;
  lex.Add("therapy", "s1", "therapy");
  lex.Add("therapy", "s2", "therapy");
  const auto g = BuildSynsetGraph({{"Therapy", 3}}, lex);
  ASSERT_EQ(g.nodes.size(), 2u);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges.begin()->first, std::make_pair(size_t{0}, size_t{1}));
}

TEST(SynsetGraph, DisjointLemmasGiveTwoComponents) {
  SynsetLexicon lex;
  lex.Add("a", "s1", "");
  lex.Add("a", "s2", "");
  lex.Add("b", "s3", "");
  lex.Add("b", "s4", "");
  const auto g = BuildSynsetGraph({{"a", 1}, {"b", 1}}, lex);
  EXPECT_EQ(g.edges.size(), 2u);
  const auto clusters = DetectCommunities(g);
  EXPECT_EQ(clusters.size(), 2u);
}

TEST(SynsetGraph, ThreeSynsetsFormTriangle) {
  SynsetLexicon lex;
  for (const char* s : {"s1", "s2", "s3"}) lex.Add("x", s, "");
  const auto g = BuildSynsetGraph({{"x", 1}}, lex);
  EXPECT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.TotalWeight(), 3u);
}

TEST(SynsetGraph, UnmatchedHeadingsRecorded) {
  const auto g = BuildSynsetGraph(PlantedHeadings(), PlantedLexicon());
  EXPECT_EQ(g.unmatched_headings, (std::vector<std::string>{"Unknown heading"}));
  EXPECT_EQ(g.nodes.size(), 12u);
  EXPECT_EQ(g.TotalWeight(), 25u);
}

TEST(SynsetGraph, RepeatedLemmaSpellingsCountOnce) {
  SynsetLexicon lex;
  lex.Add("x", "s1", "");
  lex.Add("x", "s2", "");
  const auto g = BuildSynsetGraph({{"X", 1}, {"x", 4}}, lex);
  EXPECT_EQ(g.TotalWeight(), 1u);
}

TEST(Communities, ModularityMatchesOracle) {
  const auto g = BuildSynsetGraph(PlantedHeadings(), PlantedLexicon());
  std::vector<size_t> assignment(12);
  for (size_t i = 0; i < 12; ++i) assignment[i] = (i * 7) % 3;
  EXPECT_NEAR(Modularity(g, assignment), OracleModularity(g, assignment), 1e-12);
}

TEST(Communities, PlantedPartitionIsBestTwoPartition) {
  const auto g = BuildSynsetGraph(PlantedHeadings(), PlantedLexicon());
  const size_t n = g.nodes.size();
  double best_q = -1.0;
  std::vector<size_t> best;
  // Node 0 fixed to side 0; enumerate the other 2^(n-1) assignments.
  for (uint32_t mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<size_t> side(n, 0);
    for (size_t i = 1; i < n; ++i) side[i] = (mask >> (i - 1)) & 1u;
    const double q = OracleModularity(g, side);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = side;
    }
  }
  // Nodes are sorted ids: bn:a1..a6 then bn:b1..b6.
  const std::vector<size_t> planted = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  EXPECT_EQ(best, planted);

  const auto clusters = DetectCommunities(g);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].members, (std::vector<size_t>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(clusters[1].members, (std::vector<size_t>{6, 7, 8, 9, 10, 11}));
  std::vector<size_t> found(n);
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (size_t node : clusters[c].members) found[node] = c;
  }
  EXPECT_NEAR(OracleModularity(g, found), best_q, 1e-12);
}

TEST(Communities, TwoCliquesJoinedByOneEdge) {
  SynsetLexicon lex;
  for (const char* s : {"c1", "c2", "c3"}) lex.Add("left", s, "");
  for (const char* s : {"c4", "c5", "c6"}) lex.Add("right", s, "");
  lex.Add("bridge", "c3", "");
  lex.Add("bridge", "c4", "");
  const auto g = BuildSynsetGraph({{"left", 1}, {"right", 1}, {"bridge", 1}}, lex);
  const auto clusters = DetectCommunities(g);
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].members, (std::vector<size_t>{0, 1, 2}));
}

TEST(Communities, SingleNode) {
  SynsetLexicon lex;
  lex.Add("only", "s1", "only");
  const auto g = BuildSynsetGraph({{"only", 2}}, lex);
  const auto clusters = DetectCommunities(g);
  ASSERT_EQ(clusters.size(), 1u);
  EXPECT_EQ(clusters[0].members, (std::vector<size_t>{0}));
  EXPECT_EQ(clusters[0].representative, "s1");
}

TEST(Communities, DeterministicAcrossRuns) {
  const auto g = BuildSynsetGraph(PlantedHeadings(), PlantedLexicon());
  const auto a = DetectCommunities(g);
  const auto b = DetectCommunities(g);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].members, b[i].members);
}

TEST(Representative, StarHub) {
  SynsetLexicon lex;
  lex.Add("l1", "hub", "hub");
  lex.Add("l1", "x1", "");
  lex.Add("l2", "hub", "hub");
  lex.Add("l2", "x2", "");
  lex.Add("l3", "hub", "hub");
  lex.Add("l3", "x3", "");
  const auto g = BuildSynsetGraph({{"l1", 1}, {"l2", 1}, {"l3", 1}}, lex);
  TopicCluster all;
  for (size_t i = 0; i < g.nodes.size(); ++i) all.members.push_back(i);
  EXPECT_EQ(RepresentativeSynset(all, g), "hub");
}

TEST(Representative, TieGoesToSmallerId) {
  SynsetLexicon lex;
  lex.Add("pair", "s9", "");
  lex.Add("pair", "s2", "");
  const auto g = BuildSynsetGraph({{"pair", 1}}, lex);
  TopicCluster all{{0, 1}, "", "", 0};
  EXPECT_EQ(RepresentativeSynset(all, g), "s2");
}

TEST(Representative, TherapyClusterLabel) {
  SynsetLexicon lex;
  lex.Add("therapy", "bn:therapy", "therapy");
  lex.Add("therapy", "bn:treatment", "treatment");
  lex.Add("treatment", "bn:treatment", "treatment");
  lex.Add("treatment", "bn:therapy", "therapy");
  lex.Add("gene therapy", "bn:therapy", "therapy");
  lex.Add("gene therapy", "bn:genetherapy", "gene therapy");
  const auto result = NormalizeHeadings(
      {{"Therapy", 10}, {"Treatment", 6}, {"Gene therapy", 2}}, lex);
  ASSERT_EQ(result.clusters.size(), 1u);
  EXPECT_EQ(result.clusters[0].representative_label, "therapy");
  for (const auto& [heading, label] : result.label_map) EXPECT_EQ(label, "therapy") << heading;
}

std::vector<TopicCluster> WithCounts(std::initializer_list<uint64_t> counts) {
  std::vector<TopicCluster> clusters;
  size_t node = 0;
  for (uint64_t c : counts) clusters.push_back({{node++}, "", "", c});
  return clusters;
}

TEST(Prune, KeepsOnlyHead) {
  EXPECT_EQ(PruneClusters(WithCounts({5, 1, 1, 1})),
            (std::vector<bool>{true, false, false, false}));
}

TEST(Prune, EqualCountsAllKept) {
  EXPECT_EQ(PruneClusters(WithCounts({3, 3, 3})), (std::vector<bool>{true, true, true}));
}

TEST(Prune, TwoTensKept) {
  EXPECT_EQ(PruneClusters(WithCounts({10, 10, 1})), (std::vector<bool>{true, true, false}));
}

TEST(Prune, MonotoneInOwnCount) {
  for (uint64_t boost = 0; boost < 20; ++boost) {
    auto clusters = WithCounts({4, 2, 6, 3});
    const bool before = PruneClusters(clusters)[2];
    clusters[2].total_count += boost;
    EXPECT_TRUE(!before || PruneClusters(clusters)[2]);
  }
}

TEST(Coverage, AllAndNone) {
  SynsetLexicon lex;
  lex.Add("a", "s1", "a");
  const std::vector<HeadingRecord> headings = {{"a", 3}};
  const auto g = BuildSynsetGraph(headings, lex);
  const auto clusters = DetectCommunities(g);
  EXPECT_DOUBLE_EQ(Coverage(headings, lex, g, clusters, {true}), 1.0);
  const std::vector<HeadingRecord> unknown = {{"zzz", 3}};
  EXPECT_DOUBLE_EQ(Coverage(unknown, lex, g, clusters, {true}), 0.0);
}

TEST(Coverage, WeightedFraction) {
  SynsetLexicon lex;
  lex.Add("kept", "s1", "kept");
  lex.Add("dropped", "s2", "dropped");
  const std::vector<HeadingRecord> headings = {{"kept", 189}, {"dropped", 11}};
  const auto g = BuildSynsetGraph(headings, lex);
  auto clusters = DetectCommunities(g);
  ASSERT_EQ(clusters.size(), 2u);
  AssignClusterCounts(headings, lex, g, clusters);
  const auto kept = PruneClusters(clusters);
  EXPECT_EQ(kept, (std::vector<bool>{true, false}));  // sorted by synset id: s1, s2
  EXPECT_DOUBLE_EQ(Coverage(headings, lex, g, clusters, kept), 0.945);
}

TEST(Normalize, PlantedPipeline) {
  const auto result = NormalizeHeadings(PlantedHeadings(), PlantedLexicon());
  ASSERT_EQ(result.clusters.size(), 2u);
  uint64_t total = 0;
  for (const auto& c : result.clusters) total += c.total_count;
  EXPECT_EQ(total, 34u);  // all matched heading counts
  EXPECT_NEAR(result.unmatched_rate, 2.0 / 36.0, 1e-12);
  std::map<std::string, std::string> labels(result.label_map.begin(), result.label_map.end());
  EXPECT_EQ(labels["Unknown heading"], "other");
  EXPECT_NE(labels["Therapy"], labels["Symptoms"]);

  const auto report = nlohmann::json::parse(ClusterReportJson(result));
  EXPECT_EQ(report["clusters"].size(), 2u);
  EXPECT_TRUE(report["clusters"][0].contains("kept"));
  EXPECT_EQ(LabelMapTsv(result).find("Unknown heading\tother\n") != std::string::npos, true);
}

TEST(HeadingCounts, ParseAndErrors) {
  const auto records = ParseHeadingCounts("Therapy\t4\nSymptoms\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].count, 4u);
  EXPECT_EQ(records[1].count, 1u);
  EXPECT_THROW(ParseHeadingCounts("x\t0\n"), DataError);
  EXPECT_THROW(ParseHeadingCounts("x\tmany\n"), DataError);
}

}  // namespace
}  // namespace sector
