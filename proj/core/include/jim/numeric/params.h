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

#ifndef JIM_NUMERIC_PARAMS_H_
#define JIM_NUMERIC_PARAMS_H_

#include <string>
#include <string_view>
#include <vector>

#include "jim/numeric/tensor.h"

namespace jim::numeric {

// Parameter-owning types expose
//   template <typename Fn> void Visit(Fn&& fn);        // fn(name, Tensor&)
//   template <typename Fn> void Visit(Fn&& fn) const;  // fn(name, const Tensor&)
// Visiting order is fixed, so two instances of one type (parameters and
// their gradients) enumerate aligned blocks.

template <typename Fn>
auto Prefixed(std::string prefix, Fn& fn) {
  return [prefix = std::move(prefix), &fn](std::string_view name, auto& t) {
    fn(prefix + std::string(name), t);
  };
}

template <typename T>
std::vector<NamedTensor> ParamsOf(T& obj, const std::string& prefix = "") {
  std::vector<NamedTensor> out;
  obj.Visit([&](std::string_view name, Tensor& t) {
    out.push_back({prefix + std::string(name), &t});
  });
  return out;
}

template <typename T>
std::vector<ConstNamedTensor> ConstParamsOf(const T& obj,
                                            const std::string& prefix = "") {
  std::vector<ConstNamedTensor> out;
  obj.Visit([&](std::string_view name, const Tensor& t) {
    out.push_back({prefix + std::string(name), &t});
  });
  return out;
}

template <typename T>
void ZeroParams(T& obj) {
  obj.Visit([](std::string_view, Tensor& t) { t.Fill(0.0); });
}

template <typename T>
std::size_t ParamCount(const T& obj) {
  std::size_t n = 0;
  obj.Visit([&](std::string_view, const Tensor& t) { n += t.size(); });
  return n;
}

// Copies every block of src into dst; both must share a type and shapes.
template <typename T>
void CopyParams(const T& src, T& dst) {
  auto from = ConstParamsOf(src);
  auto to = ParamsOf(dst);
  for (std::size_t i = 0; i < from.size(); ++i) *to[i].tensor = *from[i].tensor;
}

}  // namespace jim::numeric

#endif  // JIM_NUMERIC_PARAMS_H_
