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

#include "sector/pipeline.h"

#include <atomic>
#include <exception>
#include <thread>

namespace sector {

SegmentationInput MakeSegmentationInput(const Document& doc,
                                        const DocumentOutput& output) {
  SegmentationInput input;
  for (const auto& sentence : doc.sentences) {
    input.followed_by_newline.push_back(sentence.followed_by_newline);
  }
  input.distributions = output.scores;
  input.embedding_forward = output.embedding_forward;
  input.embedding_backward = output.embedding_backward;
  return input;
}

DocumentRun PredictDocument(const SectorModel& model, const Document& doc,
                            const SegConfig& config) {
  DocumentRun run;
  run.output = model.Predict(doc);
  run.segmentation = SegmentDocument(MakeSegmentationInput(doc, run.output), config);
  run.prediction.id = doc.id;
  run.prediction.sentence_count = doc.size();
  for (const auto& section : run.segmentation.sections) {
    PredictedSection predicted;
    predicted.span = section.span;
    for (size_t index : section.ranked) {
      predicted.ranked.push_back({model.labels[index], section.distribution[index]});
    }
    run.prediction.sections.push_back(std::move(predicted));
  }
  return run;
}

PredictionSet PredictAll(const SectorModel& model, const std::vector<Document>& docs,
                         const SegConfig& config, const std::string& model_name,
                         size_t threads) {
  config.Validate();
  PredictionSet set;
  set.model = model_name;
  set.strategy = std::string(StrategyName(config.strategy));
  set.task = TaskName(model.task);
  set.documents.resize(docs.size());

  const size_t workers = std::max<size_t>(1, std::min(threads, docs.size()));
  if (workers == 1) {
    for (size_t i = 0; i < docs.size(); ++i) {
      set.documents[i] = PredictDocument(model, docs[i], config).prediction;
    }
    return set;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next++; i < docs.size(); i = next++) {
          set.documents[i] = PredictDocument(model, docs[i], config).prediction;
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return set;
}

}  // namespace sector
