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

#ifndef SECTOR_PIPELINE_H_
#define SECTOR_PIPELINE_H_

#include <string>
#include <vector>

#include "sector/corpus.h"
#include "sector/eval.h"
#include "sector/model.h"
#include "sector/segment.h"

namespace sector {

SegmentationInput MakeSegmentationInput(const Document& doc,
                                        const DocumentOutput& output);

struct DocumentRun {
  DocumentOutput output;
  SegmentationResult segmentation;
  DocumentPrediction prediction;
};

// Network pass, segmentation and label ranking for one document.
DocumentRun PredictDocument(const SectorModel& model, const Document& doc,
                            const SegConfig& config);

// Documents are processed by up to `threads` workers; the output order is the
// input order.
PredictionSet PredictAll(const SectorModel& model, const std::vector<Document>& docs,
                         const SegConfig& config, const std::string& model_name,
                         size_t threads = 1);

}  // namespace sector

#endif  // SECTOR_PIPELINE_H_
