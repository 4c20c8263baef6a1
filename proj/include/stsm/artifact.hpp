#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "stsm/constants.hpp"
#include "stsm/errors.hpp"

namespace stsm {

/// One named array of binary64 values. Complex arrays carry a trailing dim of 2 (re, im).
struct ArrayRecord {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> data;

  std::uint64_t element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims) n *= d;
    return n;
  }
};

/// "STSM" container: magic, u32 version, then records of
/// {u32 name length, name, u32 rank, u64 dims, f64 payload}, all little endian.
struct Container {
  static constexpr std::uint32_t format_version = 1;
  std::uint32_t version = format_version;
  std::vector<ArrayRecord> arrays;

  void add(std::string name, std::vector<std::uint64_t> dims, std::vector<double> data) {
    ArrayRecord rec{std::move(name), std::move(dims), std::move(data)};
    if (rec.element_count() != rec.data.size())
      throw ConfigError("container: array '" + rec.name + "' has " + std::to_string(rec.data.size()) +
                        " values but its dims hold " + std::to_string(rec.element_count()));
    arrays.push_back(std::move(rec));
  }

  void add_complex(std::string name, std::vector<std::uint64_t> dims, const std::vector<cplx>& data) {
    std::vector<double> flat;
    flat.reserve(2 * data.size());
    for (const auto& z : data) {
      flat.push_back(z.real());
      flat.push_back(z.imag());
    }
    dims.push_back(2);
    add(std::move(name), std::move(dims), std::move(flat));
  }

  void add_scalar(std::string name, double value) { add(std::move(name), {1}, {value}); }

  /// The hex digest stored as one value per byte.
  void add_hash(const std::string& hex) {
    std::vector<double> bytes;
    for (std::size_t k = 0; k + 1 < hex.size(); k += 2) bytes.push_back(std::stoi(hex.substr(k, 2), nullptr, 16));
    const std::uint64_t count = bytes.size();
    add("config_sha256", {count}, std::move(bytes));
  }

  bool has(const std::string& name) const {
    for (const auto& a : arrays)
      if (a.name == name) return true;
    return false;
  }

  const ArrayRecord& get(const std::string& name) const {
    for (const auto& a : arrays)
      if (a.name == name) return a;
    throw ConfigError("container has no array '" + name + "'");
  }

  std::vector<cplx> get_complex(const std::string& name) const {
    const auto& a = get(name);
    if (a.dims.empty() || a.dims.back() != 2) throw ConfigError("array '" + name + "' is not complex");
    std::vector<cplx> out(a.data.size() / 2);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = {a.data[2 * k], a.data[2 * k + 1]};
    return out;
  }

  std::string hash() const {
    std::string hex;
    char buf[3];
    for (double b : get("config_sha256").data) {
      std::snprintf(buf, sizeof buf, "%02x", static_cast<unsigned>(b));
      hex += buf;
    }
    return hex;
  }
};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

class ByteReader {
public:
  ByteReader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  std::uint64_t uint(int width) {
    need(width);
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) v |= std::uint64_t(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
    pos_ += width;
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ConfigError("container '" + source_ + "' is truncated");
  }
  const std::string& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

} // namespace detail

inline std::string serialize(const Container& c) {
  std::string out = "STSM";
  detail::put_u32(out, c.version);
  for (const auto& a : c.arrays) {
    detail::put_u32(out, static_cast<std::uint32_t>(a.name.size()));
    out += a.name;
    detail::put_u32(out, static_cast<std::uint32_t>(a.dims.size()));
    for (auto d : a.dims) detail::put_u64(out, d);
    for (double v : a.data) detail::put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

inline Container deserialize(const std::string& bytes, const std::string& source = "<memory>") {
  detail::ByteReader in(bytes, source);
  if (in.text(4) != "STSM") throw ConfigError("'" + source + "' is not an STSM container");
  Container c;
  c.version = static_cast<std::uint32_t>(in.uint(4));
  if (c.version != Container::format_version)
    throw ConfigError("'" + source + "' has unsupported container version " + std::to_string(c.version));
  c.arrays.clear();
  while (!in.done()) {
    ArrayRecord a;
    a.name = in.text(in.uint(4));
    const auto rank = in.uint(4);
    std::uint64_t count = 1;
    for (std::uint64_t r = 0; r < rank; ++r) {
      a.dims.push_back(in.uint(8));
      // Reject dims that claim more values than the remaining bytes hold.
      if (a.dims.back() != 0 && count > in.remaining() / 8 / a.dims.back())
        throw ConfigError("container '" + source + "' is truncated");
      count *= a.dims.back();
    }
    a.data.resize(count);
    for (auto& v : a.data) v = std::bit_cast<double>(in.uint(8));
    c.arrays.push_back(std::move(a));
  }
  return c;
}

inline void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_container(const std::string& path, const Container& c) { write_file(path, serialize(c)); }
inline Container read_container(const std::string& path) { return deserialize(read_file(path), path); }

/// 17 significant digits, locale independent; reads back as the same binary64.
inline std::string format_number(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

/// Comma separated table whose first line records the configuration hash.
class CsvTable {
public:
  CsvTable(std::string hash, std::vector<std::string> header) : hash_(std::move(hash)), header_(std::move(header)) {}

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw ConfigError("csv row width does not match its header");
    rows_.push_back(cells);
  }

  std::string str() const {
    std::string out = "# config_sha256: " + hash_ + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
      out += "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

  void save(const std::string& path) const { write_file(path, str()); }
  std::size_t size() const { return rows_.size(); }

private:
  std::string hash_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

} // namespace stsm
