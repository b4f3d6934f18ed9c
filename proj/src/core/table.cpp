#include "netcage/core/table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "netcage/core/archive.hpp"
#include "netcage/core/error.hpp"

namespace netcage {
namespace {

constexpr std::array<char, 8> kTableMagic{'N', 'C', 'T', 'A', 'B', 'L', 'E', '\0'};
constexpr std::uint32_t kTableVersion = 1;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool is_binary_path(const std::filesystem::path& p) { return p.extension() == ".ncb"; }

}  // namespace

std::optional<Index> Table::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Index>(i);
  return std::nullopt;
}

Index Table::column_index(const std::string& name) const {
  auto i = find(name);
  if (!i) raise(ErrorCode::SchemaViolation, "missing column '" + name + "'");
  return *i;
}

Vector Table::column(const std::string& name) const { return values.col(column_index(name)); }

void Table::add_column(std::string name, std::string unit) {
  names.push_back(std::move(name));
  units.push_back(std::move(unit));
}

Table parse_table_text(const std::string& text) {
  Table t;
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view v = trim(line);
    if (v.empty()) continue;
    if (v.front() == '#') {
      if (!have_header) t.comments.emplace_back(trim(v.substr(1)));
      continue;
    }
    auto cells = split(v, ',');
    if (!have_header) {
      for (auto c : cells) {
        auto lb = c.find('[');
        if (lb != std::string_view::npos && c.back() == ']') {
          t.add_column(std::string(c.substr(0, lb)), std::string(c.substr(lb + 1, c.size() - lb - 2)));
        } else {
          t.add_column(std::string(c), "");
        }
      }
      have_header = true;
      continue;
    }
    if (cells.size() != t.names.size())
      raise(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(t.names.size()) + " cells");
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      auto c = cells[j];
      auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), row[j]);
      if (ec != std::errc() || p != c.data() + c.size())
        raise(ErrorCode::SchemaViolation, "line " + std::to_string(line_no) + ": bad number '" +
                                              std::string(c) + "'");
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) raise(ErrorCode::SchemaViolation, "missing header row");
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

std::string format_table_text(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t j = 0; j < t.names.size(); ++j) {
    if (j) out += ',';
    out += t.names[j];
    if (j < t.units.size() && !t.units[j].empty()) out += "[" + t.units[j] + "]";
  }
  out += '\n';
  char buf[64];
  for (Index i = 0; i < t.values.rows(); ++i) {
    for (Index j = 0; j < t.values.cols(); ++j) {
      if (j) out += ',';
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), t.values(i, j));
      out.append(buf, p);
    }
    out += '\n';
  }
  return out;
}

Table read_table(const std::filesystem::path& path) {
  const std::string bytes = read_file(path.string());
  if (!is_binary_path(path)) return parse_table_text(bytes);
  Container c = deserialize(bytes, kTableMagic, kTableVersion);
  Table t;
  ByteReader head(c.section("HEAD"));
  const auto ncols = head.get<std::uint64_t>();
  for (std::uint64_t j = 0; j < ncols; ++j) {
    auto name = head.get_string();
    auto unit = head.get_string();
    t.add_column(std::move(name), std::move(unit));
  }
  const auto ncom = head.get<std::uint64_t>();
  for (std::uint64_t j = 0; j < ncom; ++j) t.comments.push_back(head.get_string());
  ByteReader data(c.section("DATA"));
  t.values = data.get_matrix();
  if (t.values.cols() != static_cast<Index>(t.names.size()))
    raise(ErrorCode::SchemaViolation, "column count does not match header");
  return t;
}

void write_table(const Table& t, const std::filesystem::path& path) {
  if (!is_binary_path(path)) {
    write_file_atomic(path.string(), format_table_text(t));
    return;
  }
  Container c;
  c.magic = kTableMagic;
  c.version = kTableVersion;
  ByteWriter head;
  head.put<std::uint64_t>(t.names.size());
  for (std::size_t j = 0; j < t.names.size(); ++j) {
    head.put_string(t.names[j]);
    head.put_string(j < t.units.size() ? t.units[j] : "");
  }
  head.put<std::uint64_t>(t.comments.size());
  for (const auto& s : t.comments) head.put_string(s);
  ByteWriter data;
  data.put_matrix(t.values);
  c.add("HEAD", head.bytes());
  c.add("DATA", data.bytes());
  write_file_atomic(path.string(), serialize(c));
}

}  // namespace netcage
