// Copyright 2026 The slsctl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "slsctl/exact_dp.hpp"

namespace slsctl {

/// FNV-1a over the dimensions and raw entries of (system, spec).
[[nodiscard]] std::uint64_t content_hash(const SwitchedSystem& system, const CostSpec& spec);

/// Binary layout, native little-endian:
///   "SLSH" | u32 version | u64 n | u64 q | u64 N | f64 dedupe_tol | u64 hash
///   then for k = 0..N: u64 count | count·n·n f64 (row-major) |
///                      u64 prov_count | prov_count·(u64 mode, u64 parent)
void write_value_sets(std::ostream& out, const RiccatiSet& sets, std::size_t n, std::size_t q,
                      std::uint64_t hash);

struct CachedValueSets {
  RiccatiSet sets;
  std::size_t n = 0;
  std::size_t q = 0;
  std::uint64_t hash = 0;
};

/// Throws InvalidArgument on a truncated or malformed stream.
[[nodiscard]] CachedValueSets read_value_sets(std::istream& in);

void save_value_sets(const std::filesystem::path& path, const RiccatiSet& sets, const SwitchedSystem& system,
                     const CostSpec& spec);

/// Returns the cached sets when the file exists and its hash, shape and
/// dedupe tolerance match; std::nullopt otherwise.
[[nodiscard]] std::optional<RiccatiSet> load_value_sets(const std::filesystem::path& path,
                                                        const SwitchedSystem& system, const CostSpec& spec,
                                                        double dedupe_tol);

}  // namespace slsctl
