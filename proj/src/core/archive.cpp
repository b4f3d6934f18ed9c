#include "netcage/core/archive.hpp"

#include <zlib.h>

#include <bit>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace netcage {

static_assert(std::endian::native == std::endian::little,
              "binary containers assume a little-endian host");

std::uint32_t crc32_of(const void* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = static_cast<const Bytef*>(data);
  // zlib takes uInt lengths; feed in chunks.
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint32_t crc32_of(std::string_view bytes) { return crc32_of(bytes.data(), bytes.size()); }

void ByteWriter::put_string(std::string_view s) {
  put<std::uint64_t>(s.size());
  buf_.append(s);
}

void ByteWriter::put_vector(const Vector& v) {
  put<std::uint64_t>(static_cast<std::uint64_t>(v.size()));
  buf_.append(reinterpret_cast<const char*>(v.data()), sizeof(double) * v.size());
}

void ByteWriter::put_matrix(const Matrix& m) {
  put<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
  put<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
  buf_.append(reinterpret_cast<const char*>(m.data()), sizeof(double) * m.size());
}

void ByteWriter::put_indices(const std::vector<Index>& idx) {
  put<std::uint64_t>(idx.size());
  for (Index i : idx) put<std::int64_t>(i);
}

void ByteWriter::put_bytes(std::string_view bytes) { buf_.append(bytes); }

void ByteReader::need(std::size_t n) const {
  if (n > data_.size() - pos_) raise(ErrorCode::CorruptBundle, "unexpected end of data");
}

std::string ByteReader::get_string() {
  const auto n = get<std::uint64_t>();
  return std::string(get_bytes(n));
}

std::string_view ByteReader::get_bytes(std::size_t n) {
  need(n);
  auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

Vector ByteReader::get_vector() {
  const auto n = get<std::uint64_t>();
  if (n > data_.size() / sizeof(double)) raise(ErrorCode::CorruptBundle, "vector length out of range");
  Vector v(static_cast<Index>(n));
  auto raw = get_bytes(n * sizeof(double));
  std::memcpy(v.data(), raw.data(), raw.size());
  return v;
}

Matrix ByteReader::get_matrix() {
  const auto r = get<std::uint64_t>();
  const auto c = get<std::uint64_t>();
  const auto cap = data_.size() / sizeof(double);
  if (r > cap || c > cap || (c != 0 && r > cap / c)) raise(ErrorCode::CorruptBundle, "matrix shape out of range");
  Matrix m(static_cast<Index>(r), static_cast<Index>(c));
  auto raw = get_bytes(r * c * sizeof(double));
  std::memcpy(m.data(), raw.data(), raw.size());
  return m;
}

std::vector<Index> ByteReader::get_indices() {
  const auto n = get<std::uint64_t>();
  if (n > data_.size() / sizeof(std::int64_t)) raise(ErrorCode::CorruptBundle, "index list out of range");
  std::vector<Index> out(n);
  for (auto& i : out) i = static_cast<Index>(get<std::int64_t>());
  return out;
}

void Container::add(std::string tag, std::string payload) {
  if (tag.size() != 4) raise(ErrorCode::InvalidArgument, "section tags are four characters");
  sections.emplace_back(std::move(tag), std::move(payload));
}

bool Container::has(std::string_view tag) const {
  for (const auto& [t, p] : sections)
    if (t == tag) return true;
  return false;
}

const std::string& Container::section(std::string_view tag) const {
  for (const auto& [t, p] : sections)
    if (t == tag) return p;
  raise(ErrorCode::CorruptBundle, "missing section " + std::string(tag));
}

std::string serialize(const Container& c) {
  ByteWriter w;
  w.put_bytes(std::string_view(c.magic.data(), c.magic.size()));
  w.put<std::uint32_t>(c.version);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.sections.size()));
  for (const auto& [tag, payload] : c.sections) {
    w.put_bytes(tag);
    w.put<std::uint64_t>(payload.size());
    w.put_bytes(payload);
    w.put<std::uint32_t>(crc32_of(payload));
  }
  return w.bytes();
}

Container deserialize(std::string_view bytes, const std::array<char, 8>& magic,
                      std::uint32_t max_version) {
  ByteReader r(bytes);
  Container c;
  auto m = r.get_bytes(8);
  if (std::memcmp(m.data(), magic.data(), 8) != 0) raise(ErrorCode::CorruptBundle, "bad magic");
  c.magic = magic;
  c.version = r.get<std::uint32_t>();
  if (c.version == 0) raise(ErrorCode::CorruptBundle, "zero version");
  if (c.version > max_version)
    raise(ErrorCode::VersionUnsupported,
          "file version " + std::to_string(c.version) + " > supported " + std::to_string(max_version));
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string tag(r.get_bytes(4));
    const auto len = r.get<std::uint64_t>();
    std::string payload(r.get_bytes(len));
    const auto crc = r.get<std::uint32_t>();
    if (crc != crc32_of(payload)) raise(ErrorCode::CorruptBundle, "checksum mismatch in section " + tag);
    c.sections.emplace_back(std::move(tag), std::move(payload));
  }
  if (!r.done()) raise(ErrorCode::CorruptBundle, "trailing bytes after last section");
  return c;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::UnreadableSource, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::UnreadableSource, "cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) raise(ErrorCode::UnreadableSource, "write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace netcage
