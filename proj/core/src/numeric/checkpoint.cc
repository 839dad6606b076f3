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

#include "jim/numeric/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "jim/errors.h"

namespace jim::numeric {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[8] = {'J', 'I', 'M', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void Put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void PutString(std::string& out, std::string_view s) {
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string GetString() {
    const auto n = Get<std::uint32_t>();
    Need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }

  std::string_view Take(std::size_t n) {
    Need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint truncated");
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Checkpoint Checkpoint::FromParams(std::span<const ConstNamedTensor> params) {
  Checkpoint ckpt;
  for (const auto& p : params) {
    ckpt.blocks.push_back(
        {p.name, p.tensor->shape(),
         std::vector<double>(p.tensor->values().begin(),
                             p.tensor->values().end())});
  }
  return ckpt;
}

void Checkpoint::ApplyTo(std::span<const NamedTensor> params) const {
  if (params.size() != blocks.size()) {
    throw FormatError("checkpoint has " + std::to_string(blocks.size()) +
                      " blocks, model expects " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].name != params[i].name) {
      throw FormatError("checkpoint block " + blocks[i].name +
                        " does not match expected " + params[i].name);
    }
    if (blocks[i].shape != params[i].tensor->shape()) {
      throw FormatError("checkpoint block " + blocks[i].name + " has shape " +
                        ShapeString(blocks[i].shape) + ", model expects " +
                        ShapeString(params[i].tensor->shape()));
    }
    *params[i].tensor = Tensor(blocks[i].shape, blocks[i].values);
  }
}

std::string Checkpoint::Serialize() const {
  std::string out(kMagic, sizeof(kMagic));
  Put<std::uint32_t>(out, kVersion);
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(metadata.size()));
  for (const auto& [k, v] : metadata) {
    PutString(out, k);
    PutString(out, v);
  }
  Put<std::uint32_t>(out, static_cast<std::uint32_t>(blocks.size()));
  for (const auto& b : blocks) {
    PutString(out, b.name);
    Put<std::uint32_t>(out, static_cast<std::uint32_t>(b.shape.size()));
    for (std::size_t d : b.shape) Put<std::uint64_t>(out, d);
    out.append(reinterpret_cast<const char*>(b.values.data()),
               b.values.size() * sizeof(double));
  }
  return out;
}

Checkpoint Checkpoint::Deserialize(std::string_view bytes) {
  Reader in(bytes);
  if (in.Take(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw FormatError("not a checkpoint file (bad magic)");
  }
  const auto version = in.Get<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("unsupported checkpoint version " +
                      std::to_string(version));
  }
  Checkpoint ckpt;
  const auto n_meta = in.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string key = in.GetString();
    ckpt.metadata[key] = in.GetString();
  }
  const auto n_blocks = in.Get<std::uint32_t>();
  for (std::uint32_t i = 0; i < n_blocks; ++i) {
    ParamBlock b;
    b.name = in.GetString();
    const auto rank = in.Get<std::uint32_t>();
    std::size_t count = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      b.shape.push_back(static_cast<std::size_t>(in.Get<std::uint64_t>()));
      count *= b.shape.back();
    }
    const auto raw = in.Take(count * sizeof(double));
    b.values.resize(count);
    std::memcpy(b.values.data(), raw.data(), raw.size());
    ckpt.blocks.push_back(std::move(b));
  }
  if (!in.done()) throw FormatError("trailing bytes after checkpoint");
  return ckpt;
}

void Checkpoint::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

Checkpoint Checkpoint::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return Deserialize(ss.str());
}

}  // namespace jim::numeric
