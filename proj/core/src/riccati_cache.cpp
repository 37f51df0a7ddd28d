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

#include "slsctl/riccati_cache.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "slsctl/errors.hpp"

namespace slsctl {
namespace {

constexpr std::array<char, 4> kMagic{'S', 'L', 'S', 'H'};
constexpr std::uint32_t kVersion = 1;

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void word(std::uint64_t v) { bytes(&v, sizeof v); }
  void matrix(const Matrix& m) {
    word(static_cast<std::uint64_t>(m.rows()));
    word(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double v = m(r, c);
        bytes(&v, sizeof v);
      }
    }
  }
  [[nodiscard]] std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

template <typename T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidArgument("value-set cache is truncated");
  return v;
}

}  // namespace

std::uint64_t content_hash(const SwitchedSystem& system, const CostSpec& spec) {
  Fnv1a h;
  h.word(system.mode_count());
  for (const auto& mode : system.modes()) {
    h.matrix(mode.A);
    h.matrix(mode.B);
  }
  h.word(spec.horizon());
  for (std::size_t k = 0; k <= spec.horizon(); ++k) h.matrix(spec.Q(k));
  for (std::size_t k = 0; k < spec.horizon(); ++k) h.matrix(spec.R(k));
  return h.value();
}

void write_value_sets(std::ostream& out, const RiccatiSet& sets, std::size_t n, std::size_t q,
                      std::uint64_t hash) {
  out.write(kMagic.data(), kMagic.size());
  put(out, kVersion);
  put<std::uint64_t>(out, n);
  put<std::uint64_t>(out, q);
  put<std::uint64_t>(out, sets.horizon());
  put(out, sets.dedupe_tol);
  put(out, hash);
  for (const auto& level : sets.levels) {
    put<std::uint64_t>(out, level.matrices.size());
    for (const auto& m : level.matrices) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) put(out, m(r, c));
      }
    }
    put<std::uint64_t>(out, level.provenance.size());
    for (const auto& p : level.provenance) {
      put<std::uint64_t>(out, p.mode);
      put<std::uint64_t>(out, p.parent);
    }
  }
  if (!out) throw InvalidArgument("failed to write value-set cache");
}

CachedValueSets read_value_sets(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw InvalidArgument("not a value-set cache file");
  }
  if (get<std::uint32_t>(in) != kVersion) throw InvalidArgument("unsupported value-set cache version");
  CachedValueSets cached;
  cached.n = get<std::uint64_t>(in);
  cached.q = get<std::uint64_t>(in);
  const auto N = get<std::uint64_t>(in);
  cached.sets.dedupe_tol = get<double>(in);
  cached.hash = get<std::uint64_t>(in);
  if (cached.n == 0 || cached.q == 0 || cached.n > 4096 || N > (1u << 20)) {
    throw InvalidArgument("value-set cache header is corrupt");
  }
  const auto n = static_cast<Eigen::Index>(cached.n);
  cached.sets.levels.resize(N + 1);
  for (std::uint64_t k = 0; k <= N; ++k) {
    auto& level = cached.sets.levels[k];
    const auto count = get<std::uint64_t>(in);
    if (count > (std::uint64_t{1} << 32)) throw InvalidArgument("value-set cache level is corrupt");
    level.matrices.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) {
      Matrix m(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = get<double>(in);
      }
      level.matrices.push_back(std::move(m));
    }
    const auto prov = get<std::uint64_t>(in);
    if (prov != (k == N ? 0 : count)) throw InvalidArgument("value-set cache provenance is corrupt");
    level.provenance.reserve(prov);
    for (std::uint64_t j = 0; j < prov; ++j) {
      Provenance p;
      p.mode = get<std::uint64_t>(in);
      p.parent = get<std::uint64_t>(in);
      if (p.mode >= cached.q) throw InvalidArgument("value-set cache provenance is corrupt");
      level.provenance.push_back(p);
    }
  }
  for (std::uint64_t k = 0; k < N; ++k) {
    const std::size_t parents = cached.sets.levels[k + 1].matrices.size();
    for (const auto& p : cached.sets.levels[k].provenance) {
      if (p.parent >= parents) throw InvalidArgument("value-set cache provenance is corrupt");
    }
  }
  return cached;
}

void save_value_sets(const std::filesystem::path& path, const RiccatiSet& sets, const SwitchedSystem& system,
                     const CostSpec& spec) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  write_value_sets(out, sets, system.state_dim(), system.mode_count(), content_hash(system, spec));
}

std::optional<RiccatiSet> load_value_sets(const std::filesystem::path& path, const SwitchedSystem& system,
                                          const CostSpec& spec, double dedupe_tol) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  CachedValueSets cached = read_value_sets(in);
  if (cached.hash != content_hash(system, spec) || cached.n != system.state_dim() ||
      cached.q != system.mode_count() || cached.sets.horizon() != spec.horizon() ||
      cached.sets.dedupe_tol != dedupe_tol) {
    return std::nullopt;
  }
  return std::move(cached.sets);
}

}  // namespace slsctl
