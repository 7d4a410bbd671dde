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

#ifndef SECTOR_NORMALIZE_H_
#define SECTOR_NORMALIZE_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sector {

// Heading normalization: headings are matched to synsets through an offline
// lexicon, synsets that share a heading lemma are linked, the graph is
// clustered by greedy modularity, and clusters below the mean occurrence
// count are folded into `other`.

struct HeadingRecord {
  std::string heading;
  uint64_t count = 1;
};

class SynsetLexicon {
 public:
  // `lemma` is lowercased on insert.
  void Add(std::string_view lemma, std::string_view synset,
           std::string_view primary_lemma);

  // TSV rows: lemma \t synset_id \t primary_lemma. Blank lines and lines
  // starting with '#' are ignored.
  static SynsetLexicon Parse(std::string_view tsv);
  static SynsetLexicon Load(const std::string& path);

  const std::set<std::string>* Find(std::string_view lemma) const;
  std::string PrimaryLemma(const std::string& synset) const;

  const std::map<std::string, std::set<std::string>, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::set<std::string>, std::less<>> entries_;
  std::map<std::string, std::string> primary_;
};

// Lowercased, trimmed heading with internal whitespace collapsed.
std::string HeadingLemma(std::string_view heading);

// Undirected multigraph over synset ids. Node indices follow the sorted order
// of synset ids.
struct SynsetGraph {
  std::vector<std::string> nodes;
  // Keyed by (a, b) with a < b; value is the edge multiplicity.
  std::map<std::pair<size_t, size_t>, uint64_t> edges;
  std::vector<std::string> unmatched_headings;

  size_t NodeIndex(const std::string& synset) const;
  void AddEdge(size_t a, size_t b, uint64_t weight = 1);
  uint64_t WeightedDegree(size_t node) const;
  uint64_t TotalWeight() const;
};

SynsetGraph BuildSynsetGraph(const std::vector<HeadingRecord>& headings,
                             const SynsetLexicon& lexicon);

struct TopicCluster {
  std::vector<size_t> members;  // node indices, ascending
  std::string representative;   // synset id
  std::string representative_label;
  uint64_t total_count = 0;
};

// Greedy agglomerative modularity maximization. Each step merges the pair of
// connected communities with the largest positive modularity gain; ties go
// to the lexicographically smallest pair of community keys, where a key is
// the smallest member synset id. Clusters are returned sorted by key.
std::vector<TopicCluster> DetectCommunities(const SynsetGraph& graph);

// Newman modularity of a node -> community assignment.
double Modularity(const SynsetGraph& graph,
                  const std::vector<size_t>& community_of);

// Member with the largest weighted degree inside the cluster; ties go to the
// smaller synset id. Returns the synset id.
std::string RepresentativeSynset(const TopicCluster& cluster,
                                 const SynsetGraph& graph);

// Cluster index a heading maps to: the cluster holding most of its synsets,
// ties to the cluster of the smallest such synset id. -1 when unmatched.
int64_t ClusterOfHeading(std::string_view heading, const SynsetLexicon& lexicon,
                         const SynsetGraph& graph,
                         const std::vector<TopicCluster>& clusters);

// Fills total_count from the heading counts.
void AssignClusterCounts(const std::vector<HeadingRecord>& headings,
                         const SynsetLexicon& lexicon, const SynsetGraph& graph,
                         std::vector<TopicCluster>& clusters);

// Keeps cluster i iff count_i >= mean count. Returns the kept flags.
std::vector<bool> PruneClusters(const std::vector<TopicCluster>& clusters);

// Weighted fraction of headings that map to a kept cluster.
double Coverage(const std::vector<HeadingRecord>& headings,
                const SynsetLexicon& lexicon, const SynsetGraph& graph,
                const std::vector<TopicCluster>& clusters,
                const std::vector<bool>& kept);

struct NormalizationResult {
  SynsetGraph graph;
  std::vector<TopicCluster> clusters;
  std::vector<bool> kept;
  // Heading -> normalized label (`other` for pruned or unmatched headings).
  std::vector<std::pair<std::string, std::string>> label_map;
  double coverage = 0.0;
  double unmatched_rate = 0.0;
};

NormalizationResult NormalizeHeadings(const std::vector<HeadingRecord>& headings,
                                      const SynsetLexicon& lexicon);

// heading \t count per line.
std::vector<HeadingRecord> ParseHeadingCounts(std::string_view tsv);

std::string LabelMapTsv(const NormalizationResult& result);
std::string ClusterReportJson(const NormalizationResult& result);

}  // namespace sector

#endif  // SECTOR_NORMALIZE_H_
