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

#include "sector/normalize.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sector/common.h"
#include "sector/corpus.h"

namespace sector {
namespace {

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab == std::string_view::npos
                                               ? std::string_view::npos
                                               : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::vector<size_t> CommunityOf(const SynsetGraph& graph,
                                const std::vector<TopicCluster>& clusters) {
  std::vector<size_t> community(graph.nodes.size(), SIZE_MAX);
  for (size_t c = 0; c < clusters.size(); ++c) {
    for (size_t node : clusters[c].members) community[node] = c;
  }
  return community;
}

int64_t ClusterOfLemma(const std::set<std::string>& synsets,
                       const SynsetGraph& graph,
                       const std::vector<size_t>& community) {
  std::map<size_t, size_t> votes;
  std::map<size_t, size_t> first_node;
  for (const auto& synset : synsets) {
    const size_t node = graph.NodeIndex(synset);
    if (node == SIZE_MAX || community[node] == SIZE_MAX) continue;
    const size_t c = community[node];
    ++votes[c];
    if (!first_node.count(c)) first_node[c] = node;
  }
  int64_t best = -1;
  size_t best_votes = 0;
  size_t best_node = SIZE_MAX;
  for (const auto& [c, v] : votes) {
    const size_t node = first_node[c];
    if (v > best_votes || (v == best_votes && node < best_node)) {
      best = static_cast<int64_t>(c);
      best_votes = v;
      best_node = node;
    }
  }
  return best;
}

// Headings merged by lemma, first spelling kept.
std::vector<HeadingRecord> MergeByLemma(const std::vector<HeadingRecord>& headings) {
  std::vector<HeadingRecord> merged;
  std::map<std::string, size_t> index;
  for (const auto& record : headings) {
    const auto lemma = HeadingLemma(record.heading);
    const auto it = index.find(lemma);
    if (it == index.end()) {
      index[lemma] = merged.size();
      merged.push_back(record);
    } else {
      merged[it->second].count += record.count;
    }
  }
  return merged;
}

}  // namespace

void SynsetLexicon::Add(std::string_view lemma, std::string_view synset,
                        std::string_view primary_lemma) {
  if (synset.empty()) throw DataError("lexicon entry with empty synset id");
  entries_[HeadingLemma(lemma)].insert(std::string(synset));
  auto& primary = primary_[std::string(synset)];
  if (primary.empty()) primary = std::string(primary_lemma);
}

SynsetLexicon SynsetLexicon::Parse(std::string_view tsv) {
  SynsetLexicon lexicon;
  std::istringstream in{std::string(tsv)};
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 2 || fields.size() > 3 || Trim(fields[1]).empty()) {
      throw DataError("lexicon line " + std::to_string(line_number) +
                      ": expected lemma<TAB>synset_id<TAB>primary_lemma");
    }
    const std::string primary =
        fields.size() == 3 ? Trim(fields[2]) : Trim(fields[0]);
    lexicon.Add(fields[0], Trim(fields[1]), primary);
  }
  return lexicon;
}

SynsetLexicon SynsetLexicon::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return Parse(buffer.str());
}

const std::set<std::string>* SynsetLexicon::Find(std::string_view lemma) const {
  const auto it = entries_.find(lemma);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string SynsetLexicon::PrimaryLemma(const std::string& synset) const {
  const auto it = primary_.find(synset);
  return it == primary_.end() || it->second.empty() ? synset : it->second;
}

std::string HeadingLemma(std::string_view heading) {
  std::string out;
  bool pending_space = false;
  for (char ch : heading) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

size_t SynsetGraph::NodeIndex(const std::string& synset) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), synset);
  if (it == nodes.end() || *it != synset) return SIZE_MAX;
  return static_cast<size_t>(it - nodes.begin());
}

void SynsetGraph::AddEdge(size_t a, size_t b, uint64_t weight) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  edges[{a, b}] += weight;
}

uint64_t SynsetGraph::WeightedDegree(size_t node) const {
  uint64_t degree = 0;
  for (const auto& [key, w] : edges) {
    if (key.first == node || key.second == node) degree += w;
  }
  return degree;
}

uint64_t SynsetGraph::TotalWeight() const {
  uint64_t total = 0;
  for (const auto& [key, w] : edges) total += w;
  return total;
}

SynsetGraph BuildSynsetGraph(const std::vector<HeadingRecord>& headings,
                             const SynsetLexicon& lexicon) {
  SynsetGraph graph;
  std::set<std::string> lemmas;
  std::set<std::string> synsets;
  for (const auto& record : headings) {
    const auto lemma = HeadingLemma(record.heading);
    const auto* matched = lexicon.Find(lemma);
    if (matched == nullptr) {
      graph.unmatched_headings.push_back(record.heading);
      continue;
    }
    lemmas.insert(lemma);
    synsets.insert(matched->begin(), matched->end());
  }
  graph.nodes.assign(synsets.begin(), synsets.end());
  for (const auto& lemma : lemmas) {
    const auto* matched = lexicon.Find(lemma);
    std::vector<size_t> ids;
    for (const auto& s : *matched) ids.push_back(graph.NodeIndex(s));
    for (size_t i = 0; i < ids.size(); ++i) {
      for (size_t j = i + 1; j < ids.size(); ++j) graph.AddEdge(ids[i], ids[j]);
    }
  }
  return graph;
}

std::vector<TopicCluster> DetectCommunities(const SynsetGraph& graph) {
  const size_t n = graph.nodes.size();
  if (n == 0) throw DataError("community detection on an empty graph");

  // Community c is identified by its smallest node index, which is also its
  // key since node indices follow synset id order.
  std::vector<std::vector<size_t>> members(n);
  std::vector<__int128> degree(n, 0);
  std::vector<bool> alive(n, true);
  std::map<std::pair<size_t, size_t>, __int128> between;
  for (size_t i = 0; i < n; ++i) members[i] = {i};
  for (const auto& [key, w] : graph.edges) {
    degree[key.first] += w;
    degree[key.second] += w;
    between[key] += w;
  }
  const __int128 m = graph.TotalWeight();

  while (m > 0) {
    // Gain (scaled by 2 m^2): 2 m w_cd - D_c D_d. The map iterates pairs in
    // ascending key order, so strict improvement keeps the smallest pair.
    bool found = false;
    __int128 best_gain = 0;
    std::pair<size_t, size_t> best_pair;
    for (const auto& [key, w] : between) {
      const __int128 gain = 2 * m * w - degree[key.first] * degree[key.second];
      if (gain > best_gain) {
        best_gain = gain;
        best_pair = key;
        found = true;
      }
    }
    if (!found) break;

    const auto [keep, drop] = best_pair;  // keep < drop
    members[keep].insert(members[keep].end(), members[drop].begin(),
                         members[drop].end());
    std::sort(members[keep].begin(), members[keep].end());
    members[drop].clear();
    degree[keep] += degree[drop];
    degree[drop] = 0;
    alive[drop] = false;

    std::map<std::pair<size_t, size_t>, __int128> updated;
    for (const auto& [key, w] : between) {
      size_t a = key.first == drop ? keep : key.first;
      size_t b = key.second == drop ? keep : key.second;
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      updated[{a, b}] += w;
    }
    between = std::move(updated);
  }

  std::vector<TopicCluster> clusters;
  for (size_t c = 0; c < n; ++c) {
    if (!alive[c]) continue;
    TopicCluster cluster;
    cluster.members = members[c];
    clusters.push_back(std::move(cluster));
  }
  for (auto& cluster : clusters) {
    cluster.representative = RepresentativeSynset(cluster, graph);
  }
  return clusters;
}

double Modularity(const SynsetGraph& graph,
                  const std::vector<size_t>& community_of) {
  const double m = static_cast<double>(graph.TotalWeight());
  if (m == 0.0) return 0.0;
  std::map<size_t, double> internal;
  std::map<size_t, double> degree;
  for (const auto& [key, w] : graph.edges) {
    const size_t ca = community_of[key.first];
    const size_t cb = community_of[key.second];
    degree[ca] += static_cast<double>(w);
    degree[cb] += static_cast<double>(w);
    if (ca == cb) internal[ca] += static_cast<double>(w);
  }
  double q = 0.0;
  for (const auto& [c, d] : degree) {
    const double fraction = d / (2.0 * m);
    q += internal[c] / m - fraction * fraction;
  }
  return q;
}

std::string RepresentativeSynset(const TopicCluster& cluster,
                                 const SynsetGraph& graph) {
  if (cluster.members.empty()) throw DataError("empty cluster");
  const std::set<size_t> inside(cluster.members.begin(), cluster.members.end());
  std::map<size_t, uint64_t> degree;
  for (const auto& [key, w] : graph.edges) {
    if (inside.count(key.first) && inside.count(key.second)) {
      degree[key.first] += w;
      degree[key.second] += w;
    }
  }
  size_t best = cluster.members.front();
  uint64_t best_degree = degree[best];
  for (size_t node : cluster.members) {
    // Members are ascending, so strict > keeps the smaller id on ties.
    if (degree[node] > best_degree) {
      best = node;
      best_degree = degree[node];
    }
  }
  return graph.nodes[best];
}

int64_t ClusterOfHeading(std::string_view heading, const SynsetLexicon& lexicon,
                         const SynsetGraph& graph,
                         const std::vector<TopicCluster>& clusters) {
  const auto* synsets = lexicon.Find(HeadingLemma(heading));
  if (synsets == nullptr) return -1;
  return ClusterOfLemma(*synsets, graph, CommunityOf(graph, clusters));
}

void AssignClusterCounts(const std::vector<HeadingRecord>& headings,
                         const SynsetLexicon& lexicon, const SynsetGraph& graph,
                         std::vector<TopicCluster>& clusters) {
  const auto community = CommunityOf(graph, clusters);
  for (auto& cluster : clusters) cluster.total_count = 0;
  for (const auto& record : headings) {
    const auto* synsets = lexicon.Find(HeadingLemma(record.heading));
    if (synsets == nullptr) continue;
    const int64_t c = ClusterOfLemma(*synsets, graph, community);
    if (c >= 0) clusters[static_cast<size_t>(c)].total_count += record.count;
  }
}

std::vector<bool> PruneClusters(const std::vector<TopicCluster>& clusters) {
  std::vector<bool> kept(clusters.size(), false);
  if (clusters.empty()) return kept;
  // count >= mean, compared as count * |S| >= sum to stay exact.
  unsigned __int128 sum = 0;
  for (const auto& cluster : clusters) sum += cluster.total_count;
  for (size_t i = 0; i < clusters.size(); ++i) {
    kept[i] = static_cast<unsigned __int128>(clusters[i].total_count) *
                  clusters.size() >= sum;
  }
  return kept;
}

double Coverage(const std::vector<HeadingRecord>& headings,
                const SynsetLexicon& lexicon, const SynsetGraph& graph,
                const std::vector<TopicCluster>& clusters,
                const std::vector<bool>& kept) {
  const auto community = CommunityOf(graph, clusters);
  uint64_t total = 0;
  uint64_t covered = 0;
  for (const auto& record : headings) {
    total += record.count;
    const auto* synsets = lexicon.Find(HeadingLemma(record.heading));
    if (synsets == nullptr) continue;
    const int64_t c = ClusterOfLemma(*synsets, graph, community);
    if (c >= 0 && kept[static_cast<size_t>(c)]) covered += record.count;
  }
  return total == 0 ? 0.0
                    : static_cast<double>(covered) / static_cast<double>(total);
}

NormalizationResult NormalizeHeadings(const std::vector<HeadingRecord>& input,
                                      const SynsetLexicon& lexicon) {
  const auto headings = MergeByLemma(input);
  NormalizationResult result;
  result.graph = BuildSynsetGraph(headings, lexicon);

  uint64_t total = 0;
  uint64_t unmatched = 0;
  for (const auto& record : headings) {
    total += record.count;
    if (lexicon.Find(HeadingLemma(record.heading)) == nullptr) {
      unmatched += record.count;
    }
  }
  result.unmatched_rate =
      total == 0 ? 0.0 : static_cast<double>(unmatched) / static_cast<double>(total);

  if (!result.graph.nodes.empty()) {
    result.clusters = DetectCommunities(result.graph);
    AssignClusterCounts(headings, lexicon, result.graph, result.clusters);
    for (auto& cluster : result.clusters) {
      cluster.representative_label = lexicon.PrimaryLemma(cluster.representative);
    }
    result.kept = PruneClusters(result.clusters);
    result.coverage =
        Coverage(headings, lexicon, result.graph, result.clusters, result.kept);
  }

  const auto community = CommunityOf(result.graph, result.clusters);
  for (const auto& record : input) {
    std::string label(kOtherLabel);
    if (const auto* synsets = lexicon.Find(HeadingLemma(record.heading))) {
      const int64_t c = ClusterOfLemma(*synsets, result.graph, community);
      if (c >= 0 && result.kept[static_cast<size_t>(c)]) {
        label = result.clusters[static_cast<size_t>(c)].representative_label;
      }
    }
    result.label_map.emplace_back(record.heading, std::move(label));
  }
  return result;
}

std::vector<HeadingRecord> ParseHeadingCounts(std::string_view tsv) {
  std::vector<HeadingRecord> records;
  std::istringstream in{std::string(tsv)};
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const auto fields = SplitTabs(line);
    HeadingRecord record;
    record.heading = Trim(fields[0]);
    if (fields.size() >= 2) {
      try {
        size_t used = 0;
        const long long count = std::stoll(fields[1], &used);
        if (count < 1 || Trim(fields[1].substr(used)) != "") throw std::invalid_argument("");
        record.count = static_cast<uint64_t>(count);
      } catch (const std::exception&) {
        throw DataError("headings line " + std::to_string(line_number) +
                        ": count must be a positive integer");
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::string LabelMapTsv(const NormalizationResult& result) {
  std::string out;
  for (const auto& [heading, label] : result.label_map) {
    out += heading;
    out += '\t';
    out += label;
    out += '\n';
  }
  return out;
}

std::string ClusterReportJson(const NormalizationResult& result) {
  nlohmann::json report;
  report["coverage"] = result.coverage;
  report["unmatched_rate"] = result.unmatched_rate;
  report["unmatched_headings"] = result.graph.unmatched_headings;
  nlohmann::json clusters = nlohmann::json::array();
  for (size_t c = 0; c < result.clusters.size(); ++c) {
    const auto& cluster = result.clusters[c];
    nlohmann::json entry;
    std::vector<std::string> members;
    for (size_t node : cluster.members) members.push_back(result.graph.nodes[node]);
    entry["members"] = members;
    entry["representative"] = cluster.representative;
    entry["label"] = cluster.representative_label;
    entry["count"] = cluster.total_count;
    entry["kept"] = static_cast<bool>(result.kept[c]);
    clusters.push_back(std::move(entry));
  }
  report["clusters"] = std::move(clusters);
  return report.dump(2) + "\n";
}

}  // namespace sector
