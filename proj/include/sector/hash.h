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

#ifndef SECTOR_HASH_H_
#define SECTOR_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace sector {

// MurmurHash3 x64 128-bit. Output is independent of host endianness.
std::pair<uint64_t, uint64_t> Murmur3_128(std::string_view bytes,
                                          uint32_t seed);

// 64-bit FNV-1a, used for golden-value fingerprints.
uint64_t Fnv1a64(std::string_view bytes);

// Git blob object id: SHA-1 over "blob <size>\0<content>", hex encoded.
std::string GitBlobHash(std::string_view content);

}  // namespace sector

#endif  // SECTOR_HASH_H_
