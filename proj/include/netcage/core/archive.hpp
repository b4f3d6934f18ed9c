#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

#include "netcage/core/error.hpp"
#include "netcage/core/types.hpp"

namespace netcage {

std::uint32_t crc32_of(const void* data, std::size_t size);
std::uint32_t crc32_of(std::string_view bytes);

/// Append-only little-endian byte sink.
class ByteWriter {
 public:
  template <typename T>
  void put(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_string(std::string_view s);
  void put_vector(const Vector& v);
  void put_matrix(const Matrix& m);
  void put_indices(const std::vector<Index>& idx);
  void put_bytes(std::string_view bytes);

  const std::string& bytes() const { return buf_; }

 private:
  std::string buf_;
};

/// Bounds-checked reader over a byte range; any overrun raises CorruptBundle.
class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : data_(bytes) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string();
  Vector get_vector();
  Matrix get_matrix();
  std::vector<Index> get_indices();
  std::string_view get_bytes(std::size_t n);

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;
  std::string_view data_;
  std::size_t pos_ = 0;
};

/// Versioned container of tagged sections, each followed by a CRC-32 of its
/// payload. Layout: magic(8) version(u32) count(u32) then per section
/// tag(4) length(u64) payload crc(u32).
struct Container {
  std::array<char, 8> magic{};
  std::uint32_t version = 0;
  std::vector<std::pair<std::string, std::string>> sections;  // tag, payload

  void add(std::string tag, std::string payload);
  const std::string& section(std::string_view tag) const;  // throws CorruptBundle
  bool has(std::string_view tag) const;
};

std::string serialize(const Container& c);
/// Throws CorruptBundle on bad magic/length/checksum and VersionUnsupported
/// when the stored version exceeds `max_version`.
Container deserialize(std::string_view bytes, const std::array<char, 8>& magic,
                      std::uint32_t max_version);

std::string read_file(const std::string& path);
void write_file_atomic(const std::string& path, std::string_view bytes);

}  // namespace netcage
