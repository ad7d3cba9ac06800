#pragma once

#include "roughbsde/decorated.hpp"
#include "roughbsde/grid_path.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace roughbsde {

/// Version written into every schema header; bumped when columns change.
inline constexpr int kSchemaVersion = 1;

/// CSV table with a header comment block:
///
///   # schema=<name> version=<n>
///   # <key>=<value>        (zero or more metadata lines)
///   col_a,col_b,...
struct Table {
    std::string schema;
    int version = kSchemaVersion;
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    std::string meta_value(const std::string& key, const std::string& fallback = "") const;
    std::size_t column(const std::string& name) const;  ///< throws if absent
};

/// Shortest text that parses back to the same double.
std::string format_double(double v);

void write_table(std::ostream& os, const Table& table);
/// Throws std::runtime_error on a missing schema line or ragged rows.
Table read_table(std::istream& is);

/// Path CSV: schema roughbsde.path, meta mode/dim, columns t,value_k...,right_k...
Table path_table(const GridPath& path);
GridPath path_from_table(const Table& table);

/// Decorated bundle: schema roughbsde.decorated, columns record,t,u,x_k...;
/// records are `value` and `right` rows of the base path and `excursion` rows
/// (t in Π, u the excursion parameter).
Table decorated_table(const DecoratedPath& path);
DecoratedPath decorated_from_table(const Table& table);

void save_table(const std::string& file, const Table& table);
Table load_table(const std::string& file);
GridPath load_path(const std::string& file);
DecoratedPath load_decorated(const std::string& file);

}  // namespace roughbsde
