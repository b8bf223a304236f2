// Copyright 2026 The Fedpriv Authors
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

#include "fedpriv/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fedpriv {

std::string to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::integer: return "integer";
    case ColumnKind::real: return "real";
  }
  return "?";
}

std::string to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::identifier: return "identifier";
    case ColumnRole::quasi_identifier: return "quasi_identifier";
    case ColumnRole::sensitive: return "sensitive";
    case ColumnRole::feature: return "feature";
    case ColumnRole::target: return "target";
    case ColumnRole::partition_key: return "partition_key";
    case ColumnRole::ignored: return "ignored";
  }
  return "?";
}

ColumnKind column_kind_from_string(std::string_view s) {
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "integer") return ColumnKind::integer;
  if (s == "real") return ColumnKind::real;
  throw ConfigError("unknown column kind: " + std::string(s));
}

ColumnRole column_role_from_string(std::string_view s) {
  if (s == "identifier") return ColumnRole::identifier;
  if (s == "quasi_identifier") return ColumnRole::quasi_identifier;
  if (s == "sensitive") return ColumnRole::sensitive;
  if (s == "feature") return ColumnRole::feature;
  if (s == "target") return ColumnRole::target;
  if (s == "partition_key") return ColumnRole::partition_key;
  if (s == "ignored") return ColumnRole::ignored;
  throw ConfigError("unknown column role: " + std::string(s));
}

std::string value_to_string(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    return std::to_string(*i);
  }
  if (const auto* d = std::get_if<double>(&v)) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), *d);
    return std::string(buf, res.ptr);
  }
  return std::get<std::string>(v);
}

double value_to_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    return static_cast<double>(*i);
  }
  if (const auto* d = std::get_if<double>(&v)) {
    return *d;
  }
  throw ValidationError("value_to_double: categorical cell has no numeric view");
}

void validate_schema(const std::vector<ColumnSchema>& schema) {
  std::set<std::string> names;
  std::size_t targets = 0;
  std::size_t partition_keys = 0;
  for (const auto& col : schema) {
    if (col.name.empty()) throw ValidationError("schema: empty column name");
    if (!names.insert(col.name).second) {
      throw ValidationError("schema: duplicate column name '" + col.name + "'");
    }
    if (col.role == ColumnRole::target) ++targets;
    if (col.role == ColumnRole::partition_key) ++partition_keys;
  }
  if (targets > 1) throw ValidationError("schema: more than one target column");
  if (partition_keys > 1) throw ValidationError("schema: more than one partition key");
}

namespace {

void check_cell(const ColumnSchema& col, const Value& v, std::size_t row) {
  auto fail = [&](const std::string& why) {
    throw DataError("row " + std::to_string(row + 1) + ", column '" + col.name +
                    "': " + why);
  };
  switch (col.kind) {
    case ColumnKind::categorical:
      if (!std::holds_alternative<std::string>(v)) fail("expected a text token");
      if (std::get<std::string>(v).empty()) fail("missing value");
      break;
    case ColumnKind::integer:
      if (!std::holds_alternative<std::int64_t>(v)) fail("expected an integer");
      break;
    case ColumnKind::real: {
      if (!std::holds_alternative<double>(v)) fail("expected a real number");
      if (!std::isfinite(std::get<double>(v))) fail("non-finite value");
      break;
    }
  }
}

}  // namespace

Dataset::Dataset(std::vector<ColumnSchema> schema, std::vector<Row> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  validate_schema(schema_);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != schema_.size()) {
      throw DataError("row " + std::to_string(r + 1) + ": expected " +
                      std::to_string(schema_.size()) + " cells, got " +
                      std::to_string(rows_[r].size()));
    }
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      check_cell(schema_[c], rows_[r][c], r);
    }
  }
}

bool Dataset::has_column(std::string_view name) const {
  for (const auto& col : schema_) {
    if (col.name == name) return true;
  }
  return false;
}

std::size_t Dataset::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  throw ValidationError("no such column: " + std::string(name));
}

std::vector<std::size_t> Dataset::columns_with_role(ColumnRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].role == role) out.push_back(i);
  }
  return out;
}

std::size_t Dataset::target_index() const {
  auto targets = columns_with_role(ColumnRole::target);
  if (targets.size() != 1) {
    throw ValidationError("dataset has " + std::to_string(targets.size()) +
                          " target columns, expected exactly 1");
  }
  return targets[0];
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == delimiter) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

Value parse_cell(const std::string& text, const ColumnSchema& col, std::size_t row) {
  auto fail = [&](const std::string& why) {
    throw DataError("row " + std::to_string(row + 1) + ", column '" + col.name +
                    "': " + why + " ('" + text + "')");
  };
  if (text.empty()) fail("missing value");
  switch (col.kind) {
    case ColumnKind::categorical:
      return text;
    case ColumnKind::integer: {
      std::int64_t v = 0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        fail("not an integer");
      }
      return v;
    }
    case ColumnKind::real: {
      double v = 0.0;
      auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        fail("not a real number");
      }
      if (!std::isfinite(v)) fail("non-finite value");
      return v;
    }
  }
  fail("unreachable");
  return {};
}

}  // namespace

Dataset load_dataset(const std::string& path, const std::vector<ColumnSchema>& schema,
                     char delimiter) {
  validate_schema(schema);
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  auto header = split_line(line, delimiter);
  if (header.size() != schema.size()) {
    throw DataError("header has " + std::to_string(header.size()) +
                    " columns, schema expects " + std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (header[i] != schema[i].name) {
      throw DataError("header column " + std::to_string(i + 1) + " is '" + header[i] +
                      "', schema expects '" + schema[i].name + "'");
    }
  }

  std::vector<Row> rows;
  std::size_t row_idx = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    auto cells = split_line(line, delimiter);
    if (cells.size() != schema.size()) {
      throw DataError("row " + std::to_string(row_idx + 1) + ": expected " +
                      std::to_string(schema.size()) + " cells, got " +
                      std::to_string(cells.size()));
    }
    Row row;
    row.reserve(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) {
      row.push_back(parse_cell(cells[c], schema[c], row_idx));
    }
    rows.push_back(std::move(row));
    ++row_idx;
  }
  return Dataset(schema, std::move(rows));
}

void save_dataset(const Dataset& d, const std::string& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  auto check_token = [&](const std::string& s) {
    if (s.find(delimiter) != std::string::npos || s.find('\n') != std::string::npos ||
        s.find('\r') != std::string::npos) {
      throw DataError("cell '" + s + "' contains the delimiter or a line break");
    }
    return s;
  };
  const auto& schema = d.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out << delimiter;
    out << check_token(schema[c].name);
  }
  out << '\n';
  for (const auto& row : d.rows()) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << delimiter;
      out << check_token(value_to_string(row[c]));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failure: " + path);
}

// ---------------------------------------------------------------------------
// Partitioning and splitting
// ---------------------------------------------------------------------------

std::vector<ClientPartition> partition_by_column(const Dataset& d,
                                                 std::string_view column) {
  std::size_t idx = d.column_index(column);
  if (d.column(idx).kind != ColumnKind::categorical) {
    throw ValidationError("partition column '" + std::string(column) +
                          "' is not categorical");
  }
  std::map<std::string, std::vector<Row>> buckets;
  for (const auto& row : d.rows()) {
    buckets[std::get<std::string>(row[idx])].push_back(row);
  }
  std::vector<ClientPartition> out;
  out.reserve(buckets.size());
  for (auto& [label, rows] : buckets) {
    out.push_back(ClientPartition{label, Dataset(d.schema(), std::move(rows))});
  }
  return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed) {
  if (d.row_count() < 2) throw ValidationError("train_test_split: fewer than 2 rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ValidationError("train_test_split: test_fraction outside (0, 1)");
  }
  std::size_t n = d.row_count();
  auto train_n = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * (1.0 - test_fraction)));
  train_n = std::min(train_n, n);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  StreamRng rng(seed);
  rng.shuffle(order);

  std::vector<Row> train_rows, test_rows;
  train_rows.reserve(train_n);
  test_rows.reserve(n - train_n);
  for (std::size_t i = 0; i < n; ++i) {
    (i < train_n ? train_rows : test_rows).push_back(d.rows()[order[i]]);
  }
  return {Dataset(d.schema(), std::move(train_rows)),
          Dataset(d.schema(), std::move(test_rows))};
}

// ---------------------------------------------------------------------------
// Synthetic data
// ---------------------------------------------------------------------------

namespace {

struct NumericRange {
  double lo;
  double hi;
  bool integral;
  int decimals;  // rounding for reals; <0 keeps full precision
};

NumericRange numeric_range_for(const ColumnSchema& col) {
  if (col.name == "age") return {20, 89, true, 0};
  if (col.name == "year") return {2015, 2024, true, 0};
  if (col.kind == ColumnKind::integer) return {0, 99, true, 0};
  return {0.0, 10.0, false, 1};
}

std::vector<std::string> category_vocabulary(const ColumnSchema& col) {
  if (col.name == "gender") return {"Female", "Male"};
  if (col.name == "cancer_type") {
    return {"Breast", "Colon", "Leukemia", "Lung",
            "Lymphoma", "Prostate", "Skin", "Stomach"};
  }
  if (col.name == "cancer_stage") {
    return {"Stage 0", "Stage I", "Stage II", "Stage III", "Stage IV"};
  }
  std::vector<std::string> generic;
  for (int i = 0; i < 6; ++i) {
    generic.push_back(col.name + "_" + std::to_string(i));
  }
  return generic;
}

double round_to(double v, int decimals) {
  if (decimals < 0) return v;
  double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace

const std::vector<std::string>& synthetic_country_labels() {
  static const std::vector<std::string> kCountries = {
      "Australia", "Brazil", "Canada", "China", "Germany",
      "India",     "Pakistan", "Russia", "UK",  "USA"};
  return kCountries;
}

Dataset generate_synthetic(const std::vector<ColumnSchema>& schema, std::size_t n,
                           std::uint64_t seed) {
  validate_schema(schema);
  if (n == 0) throw ValidationError("generate_synthetic: n must be at least 1");

  // Numeric feature columns drive the target; weights cycle through a fixed
  // pattern so any schema yields a learnable signal.
  static const double kWeights[] = {2.0, 1.5, 1.2, 1.0, 0.8};
  std::vector<std::size_t> risk_cols;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (schema[c].role == ColumnRole::feature && schema[c].kind != ColumnKind::categorical) {
      risk_cols.push_back(c);
    }
  }
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < risk_cols.size(); ++j) {
    weight_sum += kWeights[j % 5];
  }
  double interaction_sum = (risk_cols.size() >= 2 ? 1.5 : 0.0) +
                           (risk_cols.size() >= 4 ? 0.8 : 0.0);
  double target_range = weight_sum + interaction_sum;
  double noise_std = 0.10 * target_range;
  constexpr double kTargetBase = 2.0;

  StreamRng rng(seed);
  std::vector<Row> rows;
  rows.reserve(n);
  int id_width = static_cast<int>(std::to_string(n).size());

  for (std::size_t r = 0; r < n; ++r) {
    Row row(schema.size());
    std::vector<double> normalized(risk_cols.size(), 0.0);
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& col = schema[c];
      if (col.role == ColumnRole::identifier) {
        std::string digits = std::to_string(r + 1);
        row[c] = "ID" + std::string(id_width - static_cast<int>(digits.size()), '0') +
                 digits;
        continue;
      }
      if (col.role == ColumnRole::target) continue;  // second pass
      if (col.role == ColumnRole::partition_key) {
        const auto& labels = synthetic_country_labels();
        row[c] = labels[rng.bounded(labels.size())];
        continue;
      }
      if (col.kind == ColumnKind::categorical) {
        auto vocab = category_vocabulary(col);
        row[c] = vocab[rng.bounded(vocab.size())];
        continue;
      }
      NumericRange range = numeric_range_for(col);
      if (range.integral) {
        auto span = static_cast<std::uint64_t>(range.hi - range.lo) + 1;
        std::int64_t v = static_cast<std::int64_t>(range.lo) +
                         static_cast<std::int64_t>(rng.bounded(span));
        row[c] = v;
      } else {
        double v = round_to(rng.uniform(range.lo, range.hi), range.decimals);
        row[c] = v;
      }
    }
    for (std::size_t j = 0; j < risk_cols.size(); ++j) {
      const auto& col = schema[risk_cols[j]];
      NumericRange range = numeric_range_for(col);
      double raw = value_to_double(row[risk_cols[j]]);
      normalized[j] = (raw - range.lo) / (range.hi - range.lo);
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (schema[c].role != ColumnRole::target) continue;
      double y = kTargetBase;
      for (std::size_t j = 0; j < normalized.size(); ++j) {
        y += kWeights[j % 5] * normalized[j];
      }
      if (normalized.size() >= 2) y += 1.5 * normalized[0] * normalized[1];
      if (normalized.size() >= 4) y += 0.8 * normalized[2] * normalized[3];
      y += rng.normal(0.0, noise_std);
      if (schema[c].kind == ColumnKind::integer) {
        row[c] = static_cast<std::int64_t>(std::llround(y));
      } else {
        row[c] = y;
      }
    }
    rows.push_back(std::move(row));
  }
  return Dataset(schema, std::move(rows));
}

std::vector<ColumnSchema> medical_schema() {
  using K = ColumnKind;
  using R = ColumnRole;
  return {
      {"patient_id", K::categorical, R::identifier},
      {"age", K::integer, R::quasi_identifier},
      {"gender", K::categorical, R::quasi_identifier},
      {"country", K::categorical, R::partition_key},
      {"year", K::integer, R::quasi_identifier},
      {"cancer_type", K::categorical, R::quasi_identifier},
      {"cancer_stage", K::categorical, R::feature},
      {"genetic_risk", K::real, R::feature},
      {"air_pollution", K::real, R::feature},
      {"alcohol_use", K::real, R::feature},
      {"smoking", K::real, R::feature},
      {"obesity_level", K::real, R::feature},
      {"severity_score", K::real, R::target},
  };
}

}  // namespace fedpriv
