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

#ifndef FEDPRIV_ANONYMITY_HPP
#define FEDPRIV_ANONYMITY_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fedpriv/tabular.hpp"

namespace fedpriv {

/// Token written into fully suppressed cells.
inline constexpr const char* kSuppressedToken = "*";

// ---------------------------------------------------------------------------
// Generalization hierarchies. Each level maps raw values to coarser tokens;
// level 0 is the identity. Numeric columns generalize through nested interval
// bins, categorical columns through explicit mapping tables; either may end
// in a full-suppression level. Levels are validated to be total over the raw
// domain and monotone: values merged at one level stay merged at the next.
// ---------------------------------------------------------------------------

struct HierarchyLevel {
  enum class Kind { mapping, binning, suppress };
  Kind kind = Kind::suppress;
  std::map<std::string, std::string> mapping;  // Kind::mapping
  double bin_width = 0.0;                      // Kind::binning
  double bin_origin = 0.0;

  static HierarchyLevel map_table(std::map<std::string, std::string> table);
  static HierarchyLevel bins(double width, double origin = 0.0);
  static HierarchyLevel suppress();
};

class GeneralizationHierarchy {
 public:
  /// Levels beyond the implicit identity level 0; may be empty.
  GeneralizationHierarchy(std::string column, std::vector<HierarchyLevel> levels);

  const std::string& column() const { return column_; }
  int max_level() const { return static_cast<int>(levels_.size()); }
  bool level_suppresses(int level) const;

  /// Generalizes one raw cell to the given level (level >= 1).
  std::string apply(const Value& raw, int level) const;

 private:
  std::string column_;
  std::vector<HierarchyLevel> levels_;
};

using HierarchySet = std::vector<GeneralizationHierarchy>;

/// Pointer into the set for a column, or nullptr when the column only has the
/// identity level.
const GeneralizationHierarchy* find_hierarchy(const HierarchySet& hierarchies,
                                              std::string_view column);

// ---------------------------------------------------------------------------
// Transformations over the quasi-identifier columns (in schema order).
// ---------------------------------------------------------------------------

struct TransformationVector {
  std::vector<int> levels;

  bool operator==(const TransformationVector& other) const = default;
};

std::string to_string(const TransformationVector& t);

/// Names of quasi-identifier columns in schema order.
std::vector<std::string> qi_columns(const Dataset& d);

/// Replaces each quasi-identifier cell by its generalization at the per-column
/// level in `t`. Columns generalized past level 0 become categorical; other
/// columns are untouched. Suppression levels blank the whole column with the
/// suppressed token.
Dataset apply_transformation(const Dataset& d, const TransformationVector& t,
                             const HierarchySet& hierarchies);

// ---------------------------------------------------------------------------
// Equivalence classes and audits.
// ---------------------------------------------------------------------------

struct EquivalenceClass {
  std::vector<std::string> key;       // canonical QI tuple
  std::vector<std::size_t> row_ids;   // indexes into the audited dataset
};

struct EquivalenceClassPartition {
  std::vector<EquivalenceClass> classes;  // sorted by key

  std::size_t class_count() const { return classes.size(); }
};

EquivalenceClassPartition equivalence_classes(const Dataset& d,
                                              const std::vector<std::string>& qi);

/// True iff every equivalence class over the given columns has >= k rows.
bool verify_k(const Dataset& d, const std::vector<std::string>& qi, int k);

/// Minimum over equivalence classes of the number of distinct sensitive
/// values.
int l_diversity(const Dataset& d, const std::vector<std::string>& qi,
                std::string_view sensitive);

/// Maximum over equivalence classes of the ordered earth-mover's distance
/// between the class distribution of the sensitive attribute and its global
/// distribution, normalized by (distinct values - 1) into [0, 1].
double t_closeness(const Dataset& d, const std::vector<std::string>& qi,
                   std::string_view sensitive);

/// Average re-identification risk over equivalence classes:
/// mean over classes of 1 / class size. Always in (0, 1].
double arirec(const EquivalenceClassPartition& p);

struct AnonymityReport {
  int k_achieved = 0;
  int l_diversity = 0;
  double t_closeness = 0.0;
  double arirec = 0.0;
  std::size_t suppressed_rows = 0;
  TransformationVector transformation;
};

/// Applies a fixed transformation, suppresses rows of undersized classes and
/// audits the result. Fails when more than floor(limit * n) rows would need
/// suppression.
std::pair<Dataset, AnonymityReport> anonymize_with(const Dataset& d,
                                                   const HierarchySet& hierarchies,
                                                   const TransformationVector& t,
                                                   int k, double suppression_limit);

/// Searches the generalization lattice breadth-first by total level sum
/// (lexicographic tie-break) for the first node where suppressing the rows of
/// classes smaller than k stays within the suppression limit. Returns the
/// anonymized dataset and a full audit report.
std::pair<Dataset, AnonymityReport> k_anonymize(const Dataset& d,
                                                const HierarchySet& hierarchies,
                                                int k, double suppression_limit);

/// Element-wise maximum of client transformation vectors.
TransformationVector harmonize(const std::vector<TransformationVector>& vectors);

}  // namespace fedpriv

#endif  // FEDPRIV_ANONYMITY_HPP
