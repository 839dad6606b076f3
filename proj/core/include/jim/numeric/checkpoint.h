// Copyright 2026 The jim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef JIM_NUMERIC_CHECKPOINT_H_
#define JIM_NUMERIC_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jim/numeric/tensor.h"

namespace jim::numeric {

struct ParamBlock {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

// Versioned little-endian binary container of named parameter blocks plus
// string metadata. Serialize(Deserialize(b)) == b for every valid b.
//
//   "JIMCKPT\0" u32 version
//   u32 n_meta   { u32 len, key, u32 len, value }*
//   u32 n_blocks { u32 len, name, u32 rank, u64 dims[rank], f64 values[] }*
class Checkpoint {
 public:
  static constexpr std::uint32_t kVersion = 1;

  std::map<std::string, std::string> metadata;
  std::vector<ParamBlock> blocks;

  static Checkpoint FromParams(std::span<const ConstNamedTensor> params);
  // Copies blocks into params. Names, order and shapes must match.
  void ApplyTo(std::span<const NamedTensor> params) const;

  std::string Serialize() const;
  static Checkpoint Deserialize(std::string_view bytes);

  void Save(const std::filesystem::path& path) const;
  static Checkpoint Load(const std::filesystem::path& path);
};

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_CHECKPOINT_H_
