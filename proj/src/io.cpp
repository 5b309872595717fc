// Copyright 2026 The qbath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qbath/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace qbath {
namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const std::string& field, const std::string& path, long line_no) {
  if (field == "nan" || field == "-nan") return std::nan("");
  if (field == "inf") return INFINITY;
  if (field == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw ParseError(path + ": line " + std::to_string(line_no) + ": not a number: '" + field + "'");
  }
  return v;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw DomainError("CSV row width does not match header for '" + path + "'");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_columns(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<const std::vector<double>*>& columns) {
  if (header.size() != columns.size()) throw DomainError("header and column count differ for '" + path + "'");
  const std::size_t n = columns.empty() ? 0 : columns.front()->size();
  for (const auto* c : columns) {
    if (c->size() != n) throw DomainError("columns differ in length for '" + path + "'");
  }
  CsvTable t;
  t.header = header;
  t.rows.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    t.rows[r].reserve(columns.size());
    for (const auto* c : columns) t.rows[r].push_back((*c)[r]);
  }
  write_csv(path, t);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    const std::vector<std::string> fields = split(line);
    if (fields.size() != t.header.size()) {
      throw ParseError(path + ": line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                       " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields) row.push_back(parse_number(f, path, line_no));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ParseError(path + ": empty file");
  return t;
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory '" + path + "': " + ec.message());
}

RealMatrix load_features(const std::string& features_csv, std::vector<long>* run_ids) {
  const CsvTable t = read_csv(features_csv);
  if (t.header.empty() || t.header[0] != "run_id") throw ParseError(features_csv + ": first column must be run_id");
  const Eigen::Index cols = static_cast<Eigen::Index>(t.header.size()) - 1;
  RealMatrix x(static_cast<Eigen::Index>(t.rows.size()), cols);
  if (run_ids) run_ids->clear();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (run_ids) run_ids->push_back(static_cast<long>(t.rows[r][0]));
    for (Eigen::Index c = 0; c < cols; ++c) x(static_cast<Eigen::Index>(r), c) = t.rows[r][c + 1];
  }
  return x;
}

ml::Dataset load_dataset(const std::string& features_csv, const std::string& targets_csv) {
  std::vector<long> ids;
  const RealMatrix x = load_features(features_csv, &ids);
  const CsvTable t = read_csv(targets_csv);
  if (t.header.empty() || t.header[0] != "run_id") throw ParseError(targets_csv + ": first column must be run_id");

  std::map<long, std::size_t> target_row;
  for (std::size_t r = 0; r < t.rows.size(); ++r) target_row[static_cast<long>(t.rows[r][0])] = r;

  ml::Dataset ds;
  ds.target_names.assign(t.header.begin() + 1, t.header.end());
  ds.features = x;
  ds.targets.resize(x.rows(), static_cast<Eigen::Index>(ds.target_names.size()));
  ds.run_ids = ids;
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const auto it = target_row.find(ids[r]);
    if (it == target_row.end()) {
      throw ParseError(targets_csv + ": no targets for run_id " + std::to_string(ids[r]));
    }
    for (std::size_t c = 0; c < ds.target_names.size(); ++c) {
      ds.targets(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[it->second][c + 1];
    }
  }
  return ds;
}

}  // namespace qbath
