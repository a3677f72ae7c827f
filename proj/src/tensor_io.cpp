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

#include "bnf/tensor_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace bnf {
namespace {

constexpr char kMagic[4] = {'B', 'N', 'F', 'T'};
// Payloads beyond 2^32 values are treated as corrupt headers.
constexpr std::uint64_t kMaxValues = std::uint64_t{1} << 32;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | std::uint32_t{p[1]} << 8 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[3]} << 24;
}

std::uint32_t checked_dim(std::size_t d) {
    if (d > std::numeric_limits<std::uint32_t>::max())
        throw TensorIoError(TensorIoErrc::dimension_overflow, "dimension " + std::to_string(d) + " exceeds u32");
    return static_cast<std::uint32_t>(d);
}

void write_bytes(const std::filesystem::path& path, const char* data, std::size_t size) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw TensorIoError(TensorIoErrc::io_failure, "cannot open '" + path.string() + "' for writing");
    os.write(data, static_cast<std::streamsize>(size));
    if (!os)
        throw TensorIoError(TensorIoErrc::io_failure, "write to '" + path.string() + "' failed");
}

} // namespace

const char* to_string(TensorIoErrc code) {
    switch (code) {
    case TensorIoErrc::bad_magic: return "bad magic";
    case TensorIoErrc::unsupported_version: return "unsupported version";
    case TensorIoErrc::dimension_overflow: return "dimension overflow";
    case TensorIoErrc::truncated_payload: return "truncated payload";
    case TensorIoErrc::trailing_data: return "trailing data";
    case TensorIoErrc::non_finite_value: return "non-finite value";
    case TensorIoErrc::io_failure: return "io failure";
    }
    return "unknown";
}

TensorIoError::TensorIoError(TensorIoErrc code, const std::string& detail)
    : IoError(std::string(to_string(code)) + ": " + detail), code_(code) {}

std::vector<std::uint8_t> encode_tensor(const Tensor3& t) {
    std::vector<std::uint8_t> out;
    out.reserve(kBnftHeaderSize + 4 * t.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    out.push_back(kBnftVersion);
    put_u32(out, checked_dim(t.height()));
    put_u32(out, checked_dim(t.width()));
    put_u32(out, checked_dim(t.channels()));
    for (double v : t.data()) {
        const auto f = static_cast<float>(v);
        if (!std::isfinite(f))
            throw ValidationError("value " + std::to_string(v) + " is not representable as f32");
        put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

Tensor3 decode_tensor(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw TensorIoError(TensorIoErrc::bad_magic, "expected \"BNFT\"");
    if (bytes.size() < kBnftHeaderSize)
        throw TensorIoError(TensorIoErrc::truncated_payload, "header is " + std::to_string(bytes.size()) + " bytes");
    if (bytes[4] != kBnftVersion)
        throw TensorIoError(TensorIoErrc::unsupported_version, "version " + std::to_string(bytes[4]));

    const std::uint64_t h = get_u32(bytes.data() + 5);
    const std::uint64_t w = get_u32(bytes.data() + 9);
    const std::uint64_t c = get_u32(bytes.data() + 13);
    // Each factor is < 2^32, so the first product cannot wrap.
    const std::uint64_t hw = h * w;
    if ((c != 0 && hw > kMaxValues / c) || hw * c > kMaxValues)
        throw TensorIoError(TensorIoErrc::dimension_overflow,
                            std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c));
    const std::uint64_t count = hw * c;
    const std::uint64_t payload = bytes.size() - kBnftHeaderSize;
    if (payload < 4 * count)
        throw TensorIoError(TensorIoErrc::truncated_payload, "header declares " + std::to_string(count) +
                                                                 " values, payload holds " +
                                                                 std::to_string(payload / 4));
    if (payload > 4 * count)
        throw TensorIoError(TensorIoErrc::trailing_data,
                            std::to_string(payload - 4 * count) + " bytes after the payload");

    std::vector<double> data(count);
    const std::uint8_t* p = bytes.data() + kBnftHeaderSize;
    for (std::uint64_t i = 0; i < count; ++i, p += 4) {
        const auto f = std::bit_cast<float>(get_u32(p));
        if (!std::isfinite(f))
            throw TensorIoError(TensorIoErrc::non_finite_value, "at value index " + std::to_string(i));
        data[i] = f;
    }
    return Tensor3(h, w, c, std::move(data));
}

void tensor_write(const Tensor3& t, const std::filesystem::path& path) {
    const auto bytes = encode_tensor(t);
    write_bytes(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

Tensor3 tensor_read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw TensorIoError(TensorIoErrc::io_failure, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (is.bad())
        throw TensorIoError(TensorIoErrc::io_failure, "read of '" + path.string() + "' failed");
    return decode_tensor(bytes);
}

namespace {

void write_pgm(std::size_t height, std::size_t width, const std::vector<std::uint8_t>& pixels,
               const std::filesystem::path& path) {
    std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    out.append(pixels.begin(), pixels.end());
    write_bytes(path, out.data(), out.size());
}

} // namespace

void export_pgm(const LabelMap& labels, const std::filesystem::path& path) {
    const std::size_t k = labels.class_count();
    std::vector<std::uint8_t> pixels(labels.pixel_count());
    for (std::size_t p = 0; p < pixels.size(); ++p) {
        const double level = k > 1 ? 255.0 * labels[p] / static_cast<double>(k - 1) : 0.0;
        pixels[p] = static_cast<std::uint8_t>(std::lround(level));
    }
    write_pgm(labels.height(), labels.width(), pixels, path);
}

void export_pgm(const BoundaryMap& boundary, const std::filesystem::path& path) {
    std::vector<std::uint8_t> pixels(boundary.pixel_count());
    for (std::size_t p = 0; p < pixels.size(); ++p)
        pixels[p] = static_cast<std::uint8_t>(std::lround(255.0 * boundary[p]));
    write_pgm(boundary.height(), boundary.width(), pixels, path);
}

} // namespace bnf
