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

#ifndef FEDPRIV_TABULAR_HPP
#define FEDPRIV_TABULAR_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fedpriv/common.hpp"

namespace fedpriv {

enum class ColumnKind { categorical, integer, real };

enum class ColumnRole {
  identifier,
  quasi_identifier,
  sensitive,
  feature,
  target,
  partition_key,
  ignored,
};

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  ColumnRole role = ColumnRole::feature;
};

std::string to_string(ColumnKind kind);
std::string to_string(ColumnRole role);
ColumnKind column_kind_from_string(std::string_view s);
ColumnRole column_role_from_string(std::string_view s);

/// Cell value. Categorical cells hold text tokens, numeric cells finite
/// integers or reals.
using Value = std::variant<std::int64_t, double, std::string>;
using Row = std::vector<Value>;

/// Canonical text form of a cell; reals render in shortest round-trip form.
std::string value_to_string(const Value& v);

/// Numeric view of a cell; throws for categorical cells.
double value_to_double(const Value& v);

/// Immutable typed table. Rows are validated against the schema at
/// construction; instances are safe to share across threads.
class Dataset {
 public:
  Dataset(std::vector<ColumnSchema> schema, std::vector<Row> rows);

  const std::vector<ColumnSchema>& schema() const { return schema_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t row_count() const { return rows_.size(); }
  std::size_t column_count() const { return schema_.size(); }

  const ColumnSchema& column(std::size_t index) const { return schema_.at(index); }
  bool has_column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;

  /// Indexes of columns with the given role, in schema order.
  std::vector<std::size_t> columns_with_role(ColumnRole role) const;

  /// Index of the unique target column; throws unless exactly one exists.
  std::size_t target_index() const;

 private:
  std::vector<ColumnSchema> schema_;
  std::vector<Row> rows_;
};

/// Schema-level checks shared by all constructors: unique names, at most one
/// target, at most one partition key.
void validate_schema(const std::vector<ColumnSchema>& schema);

struct ClientPartition {
  std::string label;
  Dataset data;
};

// ---------------------------------------------------------------------------
// File I/O. Delimiter-separated UTF-8 text with a header row. Cells may not
// contain the delimiter or line breaks; missing values are rejected.
// ---------------------------------------------------------------------------

Dataset load_dataset(const std::string& path, const std::vector<ColumnSchema>& schema,
                     char delimiter = ',');

void save_dataset(const Dataset& d, const std::string& path, char delimiter = ',');

// ---------------------------------------------------------------------------
// Partitioning and splitting.
// ---------------------------------------------------------------------------

/// One partition per distinct value of a categorical column, sorted by label.
std::vector<ClientPartition> partition_by_column(const Dataset& d,
                                                 std::string_view column);

/// Deterministic shuffled split into ceil(n*(1-f)) training rows and the
/// remainder for testing.
std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double test_fraction,
                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic data. Generates complete records for an arbitrary schema; the
// target is a noisy linear + interaction function of the numeric feature
// columns so that a regression model is learnable. Values for well-known
// medical-record column names come from fixed vocabularies and ranges.
// ---------------------------------------------------------------------------

Dataset generate_synthetic(const std::vector<ColumnSchema>& schema, std::size_t n,
                           std::uint64_t seed);

/// The ten client labels used by the synthetic generator for partition keys.
const std::vector<std::string>& synthetic_country_labels();

/// Schema of the bundled medical-records example: patient id, demographic
/// quasi-identifiers, risk factors, clinical features and a severity target.
std::vector<ColumnSchema> medical_schema();

}  // namespace fedpriv

#endif  // FEDPRIV_TABULAR_HPP
