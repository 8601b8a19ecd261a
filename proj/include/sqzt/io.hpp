// Copyright 2026 The sqzt Authors
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

#ifndef SQZT_IO_HPP_
#define SQZT_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sqzt/fock.hpp"
#include "sqzt/homodyne.hpp"

// Bit-exact readers/writers for the on-disk formats. Byte-level layout is
// documented in FORMATS.md; the golden fixtures under tests/fixtures are
// generated from that document and byte-compared in tests.

namespace sqzt::io {

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr char kMagic[4] = {'S', 'Q', 'Z', 'T'};

enum class PayloadKind : std::uint32_t {
  kRecord = 1,
  kDensityMatrix = 2,
  kModel = 3,
};

/// FNV-1a 64-bit hash; the container checksum.
std::uint64_t fnv1a64(const std::uint8_t *data, std::size_t n);

/// Generic container:
///   magic "SQZT" | u32 version | u32 kind | u32 header_len | header JSON |
///   u64 payload_len | payload | u64 fnv1a64(header JSON || payload)
/// All integers and doubles little-endian.
struct Container {
  std::uint32_t version = kContainerVersion;
  PayloadKind kind = PayloadKind::kRecord;
  std::string header_json;
  std::vector<std::uint8_t> payload;
};

void write_container(const std::string &path, const Container &box);
Container read_container(const std::string &path, PayloadKind expected);

/// Little-endian scalar append/read helpers shared by the format writers.
void append_u32(std::vector<std::uint8_t> &buf, std::uint32_t v);
void append_u64(std::vector<std::uint8_t> &buf, std::uint64_t v);
void append_f64(std::vector<std::uint8_t> &buf, double v);

/// Density matrix: header {"dim": N}, payload u64 dim then row-major
/// interleaved (re, im) float64.
void write_density_matrix(const fock::DensityMatrix &rho, const std::string &path);
fock::DensityMatrix read_density_matrix(const std::string &path);

/// Record, binary: header {"length": n}, payload u64 length then
/// interleaved (phase, value) float64 pairs.
void write_record_binary(const homodyne::QuadratureRecord &record,
                         const std::string &path);
homodyne::QuadratureRecord read_record_binary(const std::string &path);

/// Record, CSV with header "phase_rad,quadrature" and %.17g decimal text.
void write_record_csv(const homodyne::QuadratureRecord &record,
                      const std::string &path);
homodyne::QuadratureRecord read_record_csv(const std::string &path);

/// Reads either record format, sniffing the container magic.
homodyne::QuadratureRecord read_record_auto(const std::string &path);

/// Whole-file helpers.
std::vector<std::uint8_t> read_file_bytes(const std::string &path);
void write_file_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes);
std::string read_file_text(const std::string &path);
void write_file_text(const std::string &path, const std::string &text);

}  // namespace sqzt::io

#endif  // SQZT_IO_HPP_
