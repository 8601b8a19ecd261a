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

#include "sqzt/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace sqzt::io {

namespace {

// Sanity caps: readers must fail cleanly on hostile inputs, never allocate
// absurd amounts or crash.
constexpr std::uint32_t kMaxHeaderLen = 1u << 20;
constexpr std::uint64_t kMaxPayloadLen = 1ull << 31;
constexpr std::uint64_t kMaxRecordLen = 1ull << 28;
constexpr std::uint64_t kMaxDim = 4096;

std::uint32_t load_u32(const std::uint8_t *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64(const std::uint8_t *p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

double load_f64(const std::uint8_t *p) { return std::bit_cast<double>(load_u64(p)); }

// Bounds-checked cursor over a byte buffer.
struct Reader {
  const std::vector<std::uint8_t> &buf;
  std::size_t pos = 0;
  const std::string &path;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) {
      throw MalformedFileError(path + ": truncated at byte offset " +
                               std::to_string(pos) + " (need " + std::to_string(n) +
                               " more bytes)");
    }
  }
  std::uint32_t u32() {
    need(4);
    const std::uint32_t v = load_u32(buf.data() + pos);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    const std::uint64_t v = load_u64(buf.data() + pos);
    pos += 8;
    return v;
  }
  double f64() {
    need(8);
    const double v = load_f64(buf.data() + pos);
    pos += 8;
    return v;
  }
};

}  // namespace

std::uint64_t fnv1a64(const std::uint8_t *data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

void append_u32(std::vector<std::uint8_t> &buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_u64(std::vector<std::uint8_t> &buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void append_f64(std::vector<std::uint8_t> &buf, double v) {
  append_u64(buf, std::bit_cast<std::uint64_t>(v));
}

std::vector<std::uint8_t> read_file_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw MalformedFileError(path + ": cannot open file");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::string &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw MalformedFileError(path + ": cannot open file for writing");
  }
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw MalformedFileError(path + ": write failed");
  }
}

std::string read_file_text(const std::string &path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_file_text(const std::string &path, const std::string &text) {
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  write_file_bytes(path, bytes);
}

void write_container(const std::string &path, const Container &box) {
  std::vector<std::uint8_t> buf;
  buf.reserve(24 + box.header_json.size() + box.payload.size() + 8);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  append_u32(buf, box.version);
  append_u32(buf, static_cast<std::uint32_t>(box.kind));
  append_u32(buf, static_cast<std::uint32_t>(box.header_json.size()));
  buf.insert(buf.end(), box.header_json.begin(), box.header_json.end());
  append_u64(buf, box.payload.size());
  buf.insert(buf.end(), box.payload.begin(), box.payload.end());

  std::vector<std::uint8_t> hashed(box.header_json.begin(), box.header_json.end());
  hashed.insert(hashed.end(), box.payload.begin(), box.payload.end());
  append_u64(buf, fnv1a64(hashed.data(), hashed.size()));
  write_file_bytes(path, buf);
}

Container read_container(const std::string &path, PayloadKind expected) {
  const std::vector<std::uint8_t> buf = read_file_bytes(path);
  Reader r{buf, 0, path};
  r.need(4);
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw MalformedFileError(path + ": bad magic bytes (not a sqzt container)");
  }
  r.pos = 4;
  Container box;
  box.version = r.u32();
  if (box.version != kContainerVersion) {
    throw VersionMismatchError(path + ": container version " +
                               std::to_string(box.version) + " not supported");
  }
  const std::uint32_t kind = r.u32();
  box.kind = static_cast<PayloadKind>(kind);
  if (box.kind != expected) {
    throw MalformedFileError(path + ": payload kind " + std::to_string(kind) +
                             " does not match expected " +
                             std::to_string(static_cast<std::uint32_t>(expected)));
  }
  const std::uint32_t header_len = r.u32();
  if (header_len > kMaxHeaderLen) {
    throw MalformedFileError(path + ": header length " + std::to_string(header_len) +
                             " exceeds cap");
  }
  r.need(header_len);
  box.header_json.assign(buf.begin() + r.pos, buf.begin() + r.pos + header_len);
  r.pos += header_len;
  const std::uint64_t payload_len = r.u64();
  if (payload_len > kMaxPayloadLen) {
    throw MalformedFileError(path + ": payload length exceeds cap");
  }
  r.need(payload_len);
  box.payload.assign(buf.begin() + r.pos, buf.begin() + r.pos + payload_len);
  r.pos += payload_len;
  const std::uint64_t stored = r.u64();

  std::vector<std::uint8_t> hashed(box.header_json.begin(), box.header_json.end());
  hashed.insert(hashed.end(), box.payload.begin(), box.payload.end());
  if (stored != fnv1a64(hashed.data(), hashed.size())) {
    throw MalformedFileError(path + ": checksum mismatch (corrupted payload)");
  }
  if (r.pos != buf.size()) {
    throw MalformedFileError(path + ": trailing bytes after checksum");
  }
  return box;
}

void write_density_matrix(const fock::DensityMatrix &rho, const std::string &path) {
  const int dim = rho.dim();
  Container box;
  box.kind = PayloadKind::kDensityMatrix;
  box.header_json = nlohmann::json{{"dim", dim}}.dump();
  box.payload.reserve(8 + static_cast<std::size_t>(dim) * dim * 16);
  append_u64(box.payload, static_cast<std::uint64_t>(dim));
  for (int m = 0; m < dim; ++m) {
    for (int n = 0; n < dim; ++n) {
      append_f64(box.payload, rho.matrix()(m, n).real());
      append_f64(box.payload, rho.matrix()(m, n).imag());
    }
  }
  write_container(path, box);
}

fock::DensityMatrix read_density_matrix(const std::string &path) {
  const Container box = read_container(path, PayloadKind::kDensityMatrix);
  Reader r{box.payload, 0, path};
  const std::uint64_t dim = r.u64();
  if (dim < 1 || dim > kMaxDim) {
    throw MalformedFileError(path + ": density matrix dim out of range");
  }
  if (box.payload.size() != 8 + dim * dim * 16) {
    throw MalformedFileError(path + ": density matrix payload size mismatch");
  }
  fock::Matrix m(dim, dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    for (std::uint64_t j = 0; j < dim; ++j) {
      const double re = r.f64();
      const double im = r.f64();
      m(i, j) = fock::Complex(re, im);
    }
  }
  try {
    return fock::DensityMatrix::from_matrix(std::move(m));
  } catch (const Error &e) {
    throw MalformedFileError(path + ": payload is not a valid density matrix (" +
                             e.what() + ")");
  }
}

void write_record_binary(const homodyne::QuadratureRecord &record,
                         const std::string &path) {
  record.validate();
  Container box;
  box.kind = PayloadKind::kRecord;
  box.header_json = nlohmann::json{{"length", record.size()}}.dump();
  box.payload.reserve(8 + record.size() * 16);
  append_u64(box.payload, record.size());
  for (std::size_t i = 0; i < record.size(); ++i) {
    append_f64(box.payload, record.phase[i]);
    append_f64(box.payload, record.value[i]);
  }
  write_container(path, box);
}

homodyne::QuadratureRecord read_record_binary(const std::string &path) {
  const Container box = read_container(path, PayloadKind::kRecord);
  Reader r{box.payload, 0, path};
  const std::uint64_t n = r.u64();
  if (n < 1 || n > kMaxRecordLen) {
    throw MalformedFileError(path + ": record length out of range");
  }
  if (box.payload.size() != 8 + n * 16) {
    throw MalformedFileError(path + ": record payload size mismatch");
  }
  homodyne::QuadratureRecord record;
  record.phase.resize(n);
  record.value.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    record.phase[i] = r.f64();
    record.value[i] = r.f64();
  }
  try {
    record.validate();
  } catch (const Error &e) {
    throw MalformedFileError(path + ": invalid record payload (" + e.what() + ")");
  }
  return record;
}

void write_record_csv(const homodyne::QuadratureRecord &record,
                      const std::string &path) {
  record.validate();
  std::string text = "phase_rad,quadrature\n";
  char line[80];
  for (std::size_t i = 0; i < record.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", record.phase[i],
                  record.value[i]);
    text += line;
  }
  write_file_text(path, text);
}

namespace {

double parse_double_field(const std::string &field, const std::string &path,
                          std::size_t line_no) {
  const char *begin = field.c_str();
  char *end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || end != begin + field.size()) {
    throw MalformedFileError(path + ":" + std::to_string(line_no) +
                             ": cannot parse number '" + field + "'");
  }
  return v;
}

}  // namespace

homodyne::QuadratureRecord read_record_csv(const std::string &path) {
  const std::string text = read_file_text(path);
  if (text.empty()) {
    throw MalformedFileError(path + ": empty file");
  }
  homodyne::QuadratureRecord record;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    pos = eol + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != "phase_rad,quadrature") {
        throw MalformedFileError(path + ":1: expected header 'phase_rad,quadrature'");
      }
      continue;
    }
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw MalformedFileError(path + ":" + std::to_string(line_no) +
                               ": expected exactly two comma-separated fields");
    }
    record.phase.push_back(parse_double_field(line.substr(0, comma), path, line_no));
    record.value.push_back(parse_double_field(line.substr(comma + 1), path, line_no));
  }
  if (record.size() == 0) {
    throw MalformedFileError(path + ": no data rows");
  }
  try {
    record.validate();
  } catch (const Error &e) {
    throw MalformedFileError(path + ": invalid record data (" + e.what() + ")");
  }
  return record;
}

homodyne::QuadratureRecord read_record_auto(const std::string &path) {
  const std::vector<std::uint8_t> head = read_file_bytes(path);
  if (head.size() >= 4 && std::memcmp(head.data(), kMagic, 4) == 0) {
    return read_record_binary(path);
  }
  return read_record_csv(path);
}

}  // namespace sqzt::io
