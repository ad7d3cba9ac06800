#include "roughbsde/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace roughbsde {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("csv: not a number: '" + s + "'");
    }
    return v;
}

Vec row_vector(const std::vector<std::string>& row, std::size_t from, int dim) {
    Vec v(dim);
    for (int k = 0; k < dim; ++k) v(k) = parse_double(row[from + static_cast<std::size_t>(k)]);
    return v;
}

void expect_schema(const Table& t, const std::string& name) {
    if (t.schema != name) throw std::runtime_error("csv: expected schema " + name + ", found " + t.schema);
    if (t.version != kSchemaVersion)
        throw std::runtime_error("csv: unsupported " + name + " version " + std::to_string(t.version));
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void Table::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

std::string Table::meta_value(const std::string& key, const std::string& fallback) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    return fallback;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw std::runtime_error("csv: missing column " + name);
}

void write_table(std::ostream& os, const Table& table) {
    os << "# schema=" << table.schema << " version=" << table.version << '\n';
    for (const auto& [k, v] : table.meta) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
}

Table read_table(std::istream& is) {
    Table t;
    std::string line;
    bool have_schema = false, have_columns = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream in(line.substr(1));
            std::string word;
            while (in >> word) {
                const auto eq = word.find('=');
                if (eq == std::string::npos) continue;
                const std::string k = word.substr(0, eq), v = word.substr(eq + 1);
                if (!have_schema && k == "schema") {
                    t.schema = v;
                    have_schema = true;
                } else if (k == "version" && !have_columns && t.meta.empty()) {
                    t.version = std::stoi(v);
                } else {
                    t.meta.emplace_back(k, v);
                }
            }
            continue;
        }
        if (!have_columns) {
            t.columns = split(line, ',');
            have_columns = true;
            continue;
        }
        auto row = split(line, ',');
        if (row.size() != t.columns.size())
            throw std::runtime_error("csv: row has " + std::to_string(row.size()) + " fields, expected " +
                                     std::to_string(t.columns.size()));
        t.rows.push_back(std::move(row));
    }
    if (!have_schema) throw std::runtime_error("csv: missing '# schema=' header");
    if (!have_columns) throw std::runtime_error("csv: missing column line");
    return t;
}

Table path_table(const GridPath& path) {
    Table t;
    t.schema = "roughbsde.path";
    t.meta = {{"mode", std::string(to_string(path.mode()))}, {"dim", std::to_string(path.dim())}};
    t.columns.push_back("t");
    for (int k = 0; k < path.dim(); ++k) t.columns.push_back("value_" + std::to_string(k));
    for (int k = 0; k < path.dim(); ++k) t.columns.push_back("right_" + std::to_string(k));
    for (std::size_t i = 0; i < path.size(); ++i) {
        std::vector<double> row{path.time(i)};
        for (int k = 0; k < path.dim(); ++k) row.push_back(path.values()[i](k));
        for (int k = 0; k < path.dim(); ++k) row.push_back(path.right(i)(k));
        t.add_row(row);
    }
    return t;
}

GridPath path_from_table(const Table& t) {
    expect_schema(t, "roughbsde.path");
    const PathMode mode = parse_path_mode(t.meta_value("mode", "continuous-piecewise-linear"));
    const int dim = static_cast<int>((t.columns.size() - 1) / 2);
    if (dim < 1 || t.columns.size() != static_cast<std::size_t>(2 * dim + 1))
        throw std::runtime_error("csv: path table needs t plus value/right columns");
    std::vector<double> times;
    std::vector<Vec> values, right;
    for (const auto& row : t.rows) {
        times.push_back(parse_double(row[0]));
        values.push_back(row_vector(row, 1, dim));
        right.push_back(row_vector(row, 1 + static_cast<std::size_t>(dim), dim));
    }
    return GridPath(std::move(times), std::move(values), std::move(right), mode);
}

Table decorated_table(const DecoratedPath& path) {
    Table t;
    t.schema = "roughbsde.decorated";
    t.meta = {{"mode", std::string(to_string(path.base.mode()))}, {"dim", std::to_string(path.dim())}};
    t.columns = {"record", "t", "u"};
    for (int k = 0; k < path.dim(); ++k) t.columns.push_back("x_" + std::to_string(k));
    auto push = [&](const std::string& rec, double time, double u, const Vec& x) {
        std::vector<std::string> row{rec, format_double(time), format_double(u)};
        for (int k = 0; k < x.size(); ++k) row.push_back(format_double(x(k)));
        t.rows.push_back(std::move(row));
    };
    for (std::size_t i = 0; i < path.base.size(); ++i) {
        push("value", path.base.time(i), 0.0, path.base.values()[i]);
        push("right", path.base.time(i), 0.0, path.base.right(i));
    }
    for (std::size_t k = 0; k < path.jumps(); ++k) {
        const auto& exc = path.excursions[k];
        for (std::size_t m = 0; m < exc.size(); ++m)
            push("excursion", path.jump_set[k], static_cast<double>(m) / static_cast<double>(exc.size() - 1), exc[m]);
    }
    return t;
}

DecoratedPath decorated_from_table(const Table& t) {
    expect_schema(t, "roughbsde.decorated");
    const PathMode mode = parse_path_mode(t.meta_value("mode", "caglad-piecewise-linear"));
    const int dim = static_cast<int>(t.columns.size()) - 3;
    if (dim < 1) throw std::runtime_error("csv: decorated table needs record,t,u,x_k columns");
    std::vector<double> times;
    std::vector<Vec> values, right;
    DecoratedPath out;
    for (const auto& row : t.rows) {
        const double time = parse_double(row[1]);
        const Vec x = row_vector(row, 3, dim);
        if (row[0] == "value") {
            times.push_back(time);
            values.push_back(x);
        } else if (row[0] == "right") {
            right.push_back(x);
        } else if (row[0] == "excursion") {
            if (out.jump_set.empty() || out.jump_set.back() != time) {
                out.jump_set.push_back(time);
                out.excursions.emplace_back();
            }
            out.excursions.back().push_back(x);
        } else {
            throw std::runtime_error("csv: unknown record " + row[0]);
        }
    }
    if (right.size() != values.size()) throw std::runtime_error("csv: every value row needs a right row");
    out.base = GridPath(std::move(times), std::move(values), std::move(right), mode);
    out.validate();
    return out;
}

void save_table(const std::string& file, const Table& table) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot write " + file);
    write_table(os, table);
}

Table load_table(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot read " + file);
    return read_table(is);
}

GridPath load_path(const std::string& file) { return path_from_table(load_table(file)); }

DecoratedPath load_decorated(const std::string& file) { return decorated_from_table(load_table(file)); }

}  // namespace roughbsde
