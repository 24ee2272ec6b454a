#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "cufair/io.hpp"

namespace cufair {

namespace {

struct Field {
  std::string text;
  std::size_t column;  // 1-based start column
};

double parse_number(const Field& f, std::size_t line) {
  std::string_view s = f.text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError(fmt::format("'{}' is not a number", f.text), line,
                     f.column);
  }
  return value;
}

int parse_binary(const Field& f, std::size_t line, std::string_view name) {
  const double v = parse_number(f, line);
  if (v != 0.0 && v != 1.0) {
    throw ParseError(fmt::format("{} must be 0 or 1, got '{}'", name, f.text),
                     line, f.column);
  }
  return static_cast<int>(v);
}

std::size_t require_column(const CsvTable& table, std::string_view name) {
  const auto c = table.column(name);
  if (!c) {
    throw SchemaError(std::string(name),
                      fmt::format("CSV has no '{}' column", name));
  }
  return *c;
}

// Column numbers are only approximate once quoting is involved, so fields
// keep the column where they started.
std::vector<std::vector<Field>> split_records(std::string_view text,
                                              std::vector<std::size_t>& lines) {
  std::vector<std::vector<Field>> records;
  std::vector<Field> record;
  Field field{"", 1};
  bool quoted = false;
  bool any = false;  // current record has content
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t record_line = 1;
  std::size_t quote_line = 0;
  std::size_t quote_column = 0;

  auto end_record = [&] {
    record.push_back(std::move(field));
    const bool blank = record.size() == 1 && record.front().text.empty() && !any;
    if (!blank) {
      records.push_back(std::move(record));
      lines.push_back(record_line);
    }
    record.clear();
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.text.push_back('"');
          ++i;
          ++column;
        } else {
          quoted = false;
        }
      } else {
        field.text.push_back(c);
        if (c == '\n') {
          ++line;
          column = 0;
        }
      }
      ++column;
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        quote_line = line;
        quote_column = column;
        break;
      case ',':
        record.push_back(std::move(field));
        field = Field{"", column + 1};
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        column = 0;
        field = Field{"", 1};
        record_line = line;
        break;
      default:
        field.text.push_back(c);
        any = true;
    }
    ++column;
  }
  if (quoted) {
    throw ParseError("unterminated quoted field", quote_line, quote_column);
  }
  if (any || !field.text.empty()) end_record();
  return records;
}

}  // namespace

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  return std::nullopt;
}

CsvTable parse_csv(std::string_view text) {
  std::vector<std::size_t> lines;
  auto records = split_records(text, lines);
  if (records.empty()) throw ParseError("CSV input is empty", 1, 1);

  CsvTable table;
  std::set<std::string> seen;
  for (auto& f : records.front()) {
    std::string name = f.text;
    while (!name.empty() && name.front() == ' ') name.erase(name.begin());
    while (!name.empty() && name.back() == ' ') name.pop_back();
    if (!seen.insert(name).second) {
      throw ParseError(fmt::format("duplicate column '{}'", name), lines[0],
                       f.column);
    }
    table.header.push_back(std::move(name));
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.size() != table.header.size()) {
      const std::size_t col = rec.size() > table.header.size()
                                  ? rec[table.header.size()].column
                                  : rec.back().column + rec.back().text.size();
      throw ParseError(fmt::format("expected {} fields, found {}",
                                   table.header.size(), rec.size()),
                       lines[r], col);
    }
    std::vector<std::string> row;
    row.reserve(rec.size());
    for (auto& f : rec) row.push_back(std::move(f.text));
    table.rows.push_back(std::move(row));
    table.lines.push_back(lines[r]);
  }
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidArgument(fmt::format("cannot read '{}'", path.string()));
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

namespace {

// Re-derives a cell's column for error messages.
Field cell(const CsvTable& table, std::size_t r, std::size_t c) {
  std::size_t column = 1;
  for (std::size_t k = 0; k < c; ++k) column += table.rows[r][k].size() + 1;
  return Field{table.rows[r][c], column};
}

}  // namespace

StrataPopulation strata_from_csv(const CsvTable& table) {
  const std::size_t stratum_col = require_column(table, "stratum");
  const std::size_t group_col = require_column(table, "group");
  const std::size_t decision_col = require_column(table, "decision");
  const std::size_t count_col = require_column(table, "count");

  std::map<StrataCell, double> counts;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = table.lines[r];
    const Field s = cell(table, r, stratum_col);
    const Field d = cell(table, r, decision_col);
    Stratum stratum;
    Detention decision;
    try {
      stratum = parse_stratum(s.text);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line, s.column);
    }
    try {
      decision = parse_detention(d.text);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line, d.column);
    }
    const Field g = cell(table, r, group_col);
    const double group = parse_number(g, line);
    if (group < 0 || group != static_cast<double>(static_cast<std::uint32_t>(group))) {
      throw ParseError("group must be a non-negative integer", line, g.column);
    }
    const Field n = cell(table, r, count_col);
    const double count = parse_number(n, line);
    if (!(count >= 0.0)) {
      throw ParseError("count must be non-negative", line, n.column);
    }
    counts[StrataCell{stratum, GroupId{static_cast<std::uint32_t>(group)},
                      decision}] += count;
  }
  return StrataPopulation(std::move(counts));
}

std::vector<PredictionRow> predictions_from_csv(const CsvTable& table) {
  const std::size_t y_col = require_column(table, "y");
  const std::size_t z_col = require_column(table, "z");
  const std::size_t yhat_col = require_column(table, "yhat");
  const auto weight_col = table.column("weight");
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != y_col && c != z_col && c != yhat_col && c != weight_col) {
      feature_cols.push_back(c);
    }
  }

  std::vector<PredictionRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::size_t line = table.lines[r];
    PredictionRow row;
    for (std::size_t c : feature_cols) {
      row.features.push_back(parse_number(cell(table, r, c), line));
    }
    row.y = parse_binary(cell(table, r, y_col), line, "y");
    row.yhat = parse_binary(cell(table, r, yhat_col), line, "yhat");
    const Field z = cell(table, r, z_col);
    const double group = parse_number(z, line);
    if (group < 0 || group != static_cast<double>(static_cast<std::uint32_t>(group))) {
      throw ParseError("z must be a non-negative integer", line, z.column);
    }
    row.group = static_cast<std::uint32_t>(group);
    if (weight_col) {
      const Field w = cell(table, r, *weight_col);
      row.weight = parse_number(w, line);
      if (!(row.weight >= 0.0)) {
        throw ParseError("weight must be non-negative", line, w.column);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cufair
