#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netcage/core/types.hpp"

namespace netcage {

/// A numeric table with a header of named, unit-annotated columns.
///
/// Text form: optional leading `#` comment lines, then one header row of
/// `name[unit]` cells, then comma-separated numeric rows. Binary form
/// (`.ncb`): the same schema as a length-prefixed little-endian container.
struct Table {
  std::vector<std::string> names;
  std::vector<std::string> units;
  Matrix values;  // rows x names.size()
  std::vector<std::string> comments;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  std::optional<Index> find(const std::string& name) const;
  Index column_index(const std::string& name) const;  // throws SchemaViolation
  Vector column(const std::string& name) const;

  void add_column(std::string name, std::string unit);
};

Table read_table(const std::filesystem::path& path);
void write_table(const Table& table, const std::filesystem::path& path);

Table parse_table_text(const std::string& text);
std::string format_table_text(const Table& table);

}  // namespace netcage
