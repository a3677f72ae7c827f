// Copyright 2026 The BNF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "bnf/errors.hpp"
#include "bnf/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bnf {

// BNFT v1 layout:
//   bytes 0-3   "BNFT"
//   byte  4     version (1)
//   bytes 5-16  height, width, channels as little-endian u32
//   payload     height*width*channels little-endian f32, channel-planar, row-major
inline constexpr std::uint8_t kBnftVersion = 1;
inline constexpr std::size_t kBnftHeaderSize = 17;

enum class TensorIoErrc {
    bad_magic,
    unsupported_version,
    dimension_overflow,
    truncated_payload,
    trailing_data,
    non_finite_value,
    io_failure,
};

const char* to_string(TensorIoErrc code);

class TensorIoError : public IoError {
public:
    TensorIoError(TensorIoErrc code, const std::string& detail);
    TensorIoErrc code() const { return code_; }

private:
    TensorIoErrc code_;
};

std::vector<std::uint8_t> encode_tensor(const Tensor3& t);
Tensor3 decode_tensor(const std::vector<std::uint8_t>& bytes);

/// Values are narrowed to f32 on disk; a value outside the f32 range is rejected.
void tensor_write(const Tensor3& t, const std::filesystem::path& path);
Tensor3 tensor_read(const std::filesystem::path& path);

/// Binary P5, maxval 255. Labels are spread evenly over [0,255]
/// (label k -> round(255*k/(K-1))); boundary probabilities are scaled by 255.
void export_pgm(const LabelMap& labels, const std::filesystem::path& path);
void export_pgm(const BoundaryMap& boundary, const std::filesystem::path& path);

} // namespace bnf
