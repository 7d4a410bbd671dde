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

#include "sector/common.h"

#include <iostream>
#include <mutex>
#include <utility>

namespace sector {
namespace {

std::mutex& HandlerMutex() {
  static std::mutex mutex;
  return mutex;
}

WarningHandler& CurrentHandler() {
  static WarningHandler handler;
  return handler;
}

}  // namespace

void Warn(std::string_view message) {
  std::lock_guard<std::mutex> lock(HandlerMutex());
  const WarningHandler& handler = CurrentHandler();
  if (handler) {
    handler(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

WarningHandler SetWarningHandler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(HandlerMutex());
  return std::exchange(CurrentHandler(), std::move(handler));
}

ScopedWarningCapture::ScopedWarningCapture() {
  previous_ = SetWarningHandler(
      [this](std::string_view message) { messages_.emplace_back(message); });
}

ScopedWarningCapture::~ScopedWarningCapture() {
  SetWarningHandler(std::move(previous_));
}

bool ScopedWarningCapture::Contains(std::string_view needle) const {
  for (const auto& message : messages_) {
    if (message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace sector
