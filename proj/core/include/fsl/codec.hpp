// Copyright 2026 The fslsim Authors
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fsl/params.hpp"
#include "fsl/tensor.hpp"

namespace fsl {

/// On-the-wire encoding. Frames are bare little-endian payloads: the shapes are
/// fixed by the protocol, so no header bytes are sent.
struct WireFormat {
  std::size_t scalar_width = 4;  // 4 -> float32, 8 -> float64
  std::size_t label_width = 1;   // unsigned integer width: 1, 2, or 4

  void validate() const;
};

using Frame = std::vector<std::uint8_t>;

Frame encode_scalars(std::span<const double> values, const WireFormat& fmt);
std::vector<double> decode_scalars(std::span<const std::uint8_t> frame, const WireFormat& fmt);

Frame encode_tensor(const Tensor& t, const WireFormat& fmt);
Tensor decode_tensor(std::span<const std::uint8_t> frame, const Shape& shape, const WireFormat& fmt);

Frame encode_labels(std::span<const int> labels, const WireFormat& fmt);
std::vector<int> decode_labels(std::span<const std::uint8_t> frame, const WireFormat& fmt);

Frame encode_params(const Params& p, const WireFormat& fmt);
/// Decodes into a copy of `like` (which supplies the shapes).
Params decode_params(std::span<const std::uint8_t> frame, const Params& like, const WireFormat& fmt);

}  // namespace fsl
