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

#include "fsl/codec.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "fsl/error.hpp"

namespace fsl {

static_assert(std::endian::native == std::endian::little, "codec assumes a little-endian host");

void WireFormat::validate() const {
  if (scalar_width != 4 && scalar_width != 8) {
    throw ConfigError("net.scalar_width must be 4 or 8, got " + std::to_string(scalar_width));
  }
  if (label_width != 1 && label_width != 2 && label_width != 4) {
    throw ConfigError("net.label_width must be 1, 2 or 4, got " + std::to_string(label_width));
  }
}

Frame encode_scalars(std::span<const double> values, const WireFormat& fmt) {
  fmt.validate();
  Frame out(values.size() * fmt.scalar_width);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (fmt.scalar_width == 4) {
      const float f = static_cast<float>(values[i]);
      std::memcpy(out.data() + i * 4, &f, 4);
    } else {
      std::memcpy(out.data() + i * 8, &values[i], 8);
    }
  }
  return out;
}

std::vector<double> decode_scalars(std::span<const std::uint8_t> frame, const WireFormat& fmt) {
  fmt.validate();
  if (frame.size() % fmt.scalar_width != 0) throw ProtocolError("scalar frame length is not a multiple of width");
  std::vector<double> out(frame.size() / fmt.scalar_width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (fmt.scalar_width == 4) {
      float f;
      std::memcpy(&f, frame.data() + i * 4, 4);
      out[i] = f;
    } else {
      std::memcpy(&out[i], frame.data() + i * 8, 8);
    }
  }
  return out;
}

Frame encode_tensor(const Tensor& t, const WireFormat& fmt) { return encode_scalars(t.data(), fmt); }

Tensor decode_tensor(std::span<const std::uint8_t> frame, const Shape& shape, const WireFormat& fmt) {
  return Tensor(shape, decode_scalars(frame, fmt));
}

Frame encode_labels(std::span<const int> labels, const WireFormat& fmt) {
  fmt.validate();
  const std::uint64_t max = fmt.label_width == 4 ? std::numeric_limits<std::uint32_t>::max()
                                                 : (std::uint64_t{1} << (8 * fmt.label_width)) - 1;
  Frame out(labels.size() * fmt.label_width);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::uint64_t>(labels[i]) > max) {
      throw ProtocolError("label " + std::to_string(labels[i]) + " does not fit the wire label width");
    }
    auto v = static_cast<std::uint32_t>(labels[i]);
    std::memcpy(out.data() + i * fmt.label_width, &v, fmt.label_width);
  }
  return out;
}

std::vector<int> decode_labels(std::span<const std::uint8_t> frame, const WireFormat& fmt) {
  fmt.validate();
  if (frame.size() % fmt.label_width != 0) throw ProtocolError("label frame length is not a multiple of width");
  std::vector<int> out(frame.size() / fmt.label_width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t v = 0;
    std::memcpy(&v, frame.data() + i * fmt.label_width, fmt.label_width);
    out[i] = static_cast<int>(v);
  }
  return out;
}

Frame encode_params(const Params& p, const WireFormat& fmt) { return encode_scalars(p.flatten(), fmt); }

Params decode_params(std::span<const std::uint8_t> frame, const Params& like, const WireFormat& fmt) {
  Params out = like;
  out.unflatten(decode_scalars(frame, fmt));
  return out;
}

}  // namespace fsl
