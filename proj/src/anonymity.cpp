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

#include "fedpriv/anonymity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace fedpriv {

HierarchyLevel HierarchyLevel::map_table(std::map<std::string, std::string> table) {
  HierarchyLevel level;
  level.kind = Kind::mapping;
  level.mapping = std::move(table);
  return level;
}

HierarchyLevel HierarchyLevel::bins(double width, double origin) {
  HierarchyLevel level;
  level.kind = Kind::binning;
  level.bin_width = width;
  level.bin_origin = origin;
  return level;
}

HierarchyLevel HierarchyLevel::suppress() {
  HierarchyLevel level;
  level.kind = Kind::suppress;
  return level;
}

namespace {

bool is_integral(double v) { return std::floor(v) == v; }

std::string format_bound(double v) {
  if (is_integral(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  return value_to_string(Value{v});
}

std::string bin_label(double value, const HierarchyLevel& level) {
  double lo = level.bin_origin +
              std::floor((value - level.bin_origin) / level.bin_width) * level.bin_width;
  return "[" + format_bound(lo) + "," + format_bound(lo + level.bin_width) + ")";
}

}  // namespace

GeneralizationHierarchy::GeneralizationHierarchy(std::string column,
                                                 std::vector<HierarchyLevel> levels)
    : column_(std::move(column)), levels_(std::move(levels)) {
  using Kind = HierarchyLevel::Kind;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& level = levels_[i];
    if (level.kind == Kind::suppress && i + 1 != levels_.size()) {
      throw ValidationError("hierarchy '" + column_ +
                            "': suppression must be the last level");
    }
    if (level.kind == Kind::binning && !(level.bin_width > 0.0)) {
      throw ValidationError("hierarchy '" + column_ + "': bin width must be positive");
    }
    if (level.kind == Kind::mapping && level.mapping.empty()) {
      throw ValidationError("hierarchy '" + column_ + "': empty mapping table");
    }
    if (i == 0) continue;
    const auto& prev = levels_[i - 1];
    if (prev.kind == Kind::suppress) continue;  // unreachable, suppress is last
    if (level.kind == Kind::suppress) continue;
    if (level.kind != prev.kind) {
      throw ValidationError("hierarchy '" + column_ +
                            "': levels must share one generalization style");
    }
    if (level.kind == Kind::binning) {
      if (level.bin_origin != prev.bin_origin) {
        throw ValidationError("hierarchy '" + column_ +
                              "': bin origins differ between levels");
      }
      double ratio = level.bin_width / prev.bin_width;
      if (!(ratio >= 1.0) || !is_integral(ratio)) {
        throw ValidationError("hierarchy '" + column_ +
                              "': bin widths must nest (integer multiples)");
      }
    } else {
      // Mapping levels must share the raw domain and refine monotonically:
      // raw values with equal images at the previous level keep equal images.
      if (level.mapping.size() != prev.mapping.size()) {
        throw ValidationError("hierarchy '" + column_ +
                              "': mapping levels cover different domains");
      }
      std::map<std::string, std::string> image_of_group;
      for (const auto& [raw, coarse] : prev.mapping) {
        auto it = level.mapping.find(raw);
        if (it == level.mapping.end()) {
          throw ValidationError("hierarchy '" + column_ + "': value '" + raw +
                                "' missing from level " + std::to_string(i + 1));
        }
        auto [group_it, inserted] = image_of_group.emplace(coarse, it->second);
        if (!inserted && group_it->second != it->second) {
          throw ValidationError("hierarchy '" + column_ +
                                "': level " + std::to_string(i + 1) +
                                " splits values merged at level " + std::to_string(i));
        }
      }
    }
  }
}

bool GeneralizationHierarchy::level_suppresses(int level) const {
  if (level < 1 || level > max_level()) return false;
  return levels_[level - 1].kind == HierarchyLevel::Kind::suppress;
}

std::string GeneralizationHierarchy::apply(const Value& raw, int level) const {
  if (level < 1 || level > max_level()) {
    throw ValidationError("hierarchy '" + column_ + "': level " +
                          std::to_string(level) + " out of range [1, " +
                          std::to_string(max_level()) + "]");
  }
  const auto& rule = levels_[level - 1];
  switch (rule.kind) {
    case HierarchyLevel::Kind::suppress:
      return kSuppressedToken;
    case HierarchyLevel::Kind::binning:
      return bin_label(value_to_double(raw), rule);
    case HierarchyLevel::Kind::mapping: {
      auto it = rule.mapping.find(value_to_string(raw));
      if (it == rule.mapping.end()) {
        throw DataError("hierarchy '" + column_ + "': raw value '" +
                        value_to_string(raw) + "' absent from level " +
                        std::to_string(level) + " mapping");
      }
      return it->second;
    }
  }
  throw ValidationError("unreachable");
}

const GeneralizationHierarchy* find_hierarchy(const HierarchySet& hierarchies,
                                              std::string_view column) {
  for (const auto& h : hierarchies) {
    if (h.column() == column) return &h;
  }
  return nullptr;
}

std::string to_string(const TransformationVector& t) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < t.levels.size(); ++i) {
    if (i) out << ',';
    out << t.levels[i];
  }
  out << ']';
  return out.str();
}

std::vector<std::string> qi_columns(const Dataset& d) {
  std::vector<std::string> out;
  for (const auto& col : d.schema()) {
    if (col.role == ColumnRole::quasi_identifier) out.push_back(col.name);
  }
  return out;
}

Dataset apply_transformation(const Dataset& d, const TransformationVector& t,
                             const HierarchySet& hierarchies) {
  auto qi = qi_columns(d);
  if (t.levels.size() != qi.size()) {
    throw ValidationError("transformation has " + std::to_string(t.levels.size()) +
                          " levels for " + std::to_string(qi.size()) +
                          " quasi-identifier columns");
  }
  std::vector<ColumnSchema> schema = d.schema();
  std::vector<std::pair<std::size_t, const GeneralizationHierarchy*>> active;
  for (std::size_t j = 0; j < qi.size(); ++j) {
    int level = t.levels[j];
    if (level < 0) throw ValidationError("negative hierarchy level");
    if (level == 0) continue;
    const auto* h = find_hierarchy(hierarchies, qi[j]);
    int max_level = h ? h->max_level() : 0;
    if (level > max_level) {
      throw ValidationError("column '" + qi[j] + "': level " + std::to_string(level) +
                            " out of range [0, " + std::to_string(max_level) + "]");
    }
    std::size_t idx = d.column_index(qi[j]);
    schema[idx].kind = ColumnKind::categorical;  // generalized tokens
    active.emplace_back(idx, h);
  }

  std::vector<Row> rows = d.rows();
  for (auto& row : rows) {
    for (std::size_t j = 0, a = 0; j < qi.size(); ++j) {
      if (t.levels[j] == 0) continue;
      auto [idx, h] = active[a++];
      row[idx] = h->apply(row[idx], t.levels[j]);
    }
  }
  return Dataset(std::move(schema), std::move(rows));
}

// ---------------------------------------------------------------------------
// Equivalence classes
// ---------------------------------------------------------------------------

EquivalenceClassPartition equivalence_classes(const Dataset& d,
                                              const std::vector<std::string>& qi) {
  std::vector<std::size_t> cols;
  cols.reserve(qi.size());
  for (const auto& name : qi) cols.push_back(d.column_index(name));

  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    std::vector<std::string> key;
    key.reserve(cols.size());
    for (std::size_t c : cols) key.push_back(value_to_string(d.rows()[r][c]));
    groups[std::move(key)].push_back(r);
  }
  EquivalenceClassPartition out;
  out.classes.reserve(groups.size());
  for (auto& [key, row_ids] : groups) {
    out.classes.push_back(EquivalenceClass{key, std::move(row_ids)});
  }
  return out;
}

bool verify_k(const Dataset& d, const std::vector<std::string>& qi, int k) {
  auto partition = equivalence_classes(d, qi);
  for (const auto& ec : partition.classes) {
    if (static_cast<int>(ec.row_ids.size()) < k) return false;
  }
  return true;
}

int l_diversity(const Dataset& d, const std::vector<std::string>& qi,
                std::string_view sensitive) {
  if (d.row_count() == 0) throw DataError("l_diversity: empty dataset");
  std::size_t s = d.column_index(sensitive);
  auto partition = equivalence_classes(d, qi);
  int min_distinct = std::numeric_limits<int>::max();
  for (const auto& ec : partition.classes) {
    std::set<std::string> distinct;
    for (std::size_t r : ec.row_ids) distinct.insert(value_to_string(d.rows()[r][s]));
    min_distinct = std::min(min_distinct, static_cast<int>(distinct.size()));
  }
  return min_distinct;
}

double t_closeness(const Dataset& d, const std::vector<std::string>& qi,
                   std::string_view sensitive) {
  if (d.row_count() == 0) throw DataError("t_closeness: empty dataset");
  std::size_t s = d.column_index(sensitive);
  bool numeric = d.column(s).kind != ColumnKind::categorical;

  // Value domain ordered numerically when possible, lexicographically for
  // (ordered) categorical attributes.
  std::vector<double> numeric_values;
  std::vector<std::string> text_values;
  std::unordered_map<std::string, std::size_t> rank_of;
  if (numeric) {
    std::set<double> distinct;
    for (const auto& row : d.rows()) distinct.insert(value_to_double(row[s]));
    numeric_values.assign(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i < numeric_values.size(); ++i) {
      rank_of[value_to_string(Value{numeric_values[i]})] = i;
    }
  } else {
    std::set<std::string> distinct;
    for (const auto& row : d.rows()) distinct.insert(std::get<std::string>(row[s]));
    text_values.assign(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i < text_values.size(); ++i) rank_of[text_values[i]] = i;
  }
  std::size_t domain = rank_of.size();
  if (domain <= 1) return 0.0;

  auto rank_of_row = [&](std::size_t r) {
    const Value& v = d.rows()[r][s];
    if (numeric) return rank_of.at(value_to_string(Value{value_to_double(v)}));
    return rank_of.at(std::get<std::string>(v));
  };

  std::vector<double> global(domain, 0.0);
  for (std::size_t r = 0; r < d.row_count(); ++r) global[rank_of_row(r)] += 1.0;
  double n = static_cast<double>(d.row_count());
  for (double& g : global) g /= n;

  auto partition = equivalence_classes(d, qi);
  double worst = 0.0;
  std::vector<double> local(domain);
  for (const auto& ec : partition.classes) {
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t r : ec.row_ids) local[rank_of_row(r)] += 1.0;
    double size = static_cast<double>(ec.row_ids.size());
    // Ordered earth-mover's distance: mean absolute cumulative difference.
    double cum = 0.0;
    double dist = 0.0;
    for (std::size_t i = 0; i + 1 < domain; ++i) {
      cum += local[i] / size - global[i];
      dist += std::abs(cum);
    }
    worst = std::max(worst, dist / static_cast<double>(domain - 1));
  }
  return worst;
}

double arirec(const EquivalenceClassPartition& p) {
  if (p.classes.empty()) throw DataError("arirec: empty partition");
  double sum = 0.0;
  for (const auto& ec : p.classes) {
    if (ec.row_ids.empty()) throw DataError("arirec: empty equivalence class");
    sum += 1.0 / static_cast<double>(ec.row_ids.size());
  }
  return sum / static_cast<double>(p.classes.size());
}

// ---------------------------------------------------------------------------
// k-anonymization
// ---------------------------------------------------------------------------

namespace {

/// Rows that would be suppressed at this node: members of classes smaller
/// than k after generalizing the QI tuple.
std::size_t rows_to_suppress(const Dataset& d, const std::vector<std::size_t>& qi_cols,
                             const std::vector<const GeneralizationHierarchy*>& rules,
                             const std::vector<int>& levels, int k,
                             std::vector<char>* suppress_mask) {
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  groups.reserve(d.row_count());
  std::string key;
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    key.clear();
    for (std::size_t j = 0; j < qi_cols.size(); ++j) {
      const Value& raw = d.rows()[r][qi_cols[j]];
      if (levels[j] == 0) {
        key += value_to_string(raw);
      } else {
        key += rules[j]->apply(raw, levels[j]);
      }
      key.push_back('\x1f');
    }
    groups[key].push_back(r);
  }
  std::size_t suppressed = 0;
  if (suppress_mask) suppress_mask->assign(d.row_count(), 0);
  for (const auto& [_, members] : groups) {
    if (static_cast<int>(members.size()) < k) {
      suppressed += members.size();
      if (suppress_mask) {
        for (std::size_t r : members) (*suppress_mask)[r] = 1;
      }
    }
  }
  return suppressed;
}

AnonymityReport audit(const Dataset& anonymized, const TransformationVector& t,
                      std::size_t suppressed) {
  AnonymityReport report;
  report.transformation = t;
  report.suppressed_rows = suppressed;
  auto qi = qi_columns(anonymized);
  auto partition = equivalence_classes(anonymized, qi);
  if (partition.classes.empty()) {
    return report;  // fully suppressed dataset: all metrics stay at zero
  }
  std::size_t min_class = partition.classes.front().row_ids.size();
  for (const auto& ec : partition.classes) {
    min_class = std::min(min_class, ec.row_ids.size());
  }
  report.k_achieved = static_cast<int>(min_class);
  report.arirec = arirec(partition);

  // The sensitive attribute defaults to the target when none is declared.
  std::string sensitive;
  for (const auto& col : anonymized.schema()) {
    if (col.role == ColumnRole::sensitive) sensitive = col.name;
  }
  if (sensitive.empty()) {
    for (const auto& col : anonymized.schema()) {
      if (col.role == ColumnRole::target) sensitive = col.name;
    }
  }
  if (!sensitive.empty()) {
    report.l_diversity = l_diversity(anonymized, qi, sensitive);
    report.t_closeness = t_closeness(anonymized, qi, sensitive);
  }
  return report;
}

std::vector<const GeneralizationHierarchy*> hierarchy_rules(
    const Dataset& d, const HierarchySet& hierarchies,
    const std::vector<std::string>& qi) {
  std::vector<const GeneralizationHierarchy*> rules;
  rules.reserve(qi.size());
  for (const auto& name : qi) rules.push_back(find_hierarchy(hierarchies, name));
  return rules;
}

}  // namespace

std::pair<Dataset, AnonymityReport> anonymize_with(const Dataset& d,
                                                   const HierarchySet& hierarchies,
                                                   const TransformationVector& t,
                                                   int k, double suppression_limit) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (suppression_limit < 0.0 || suppression_limit > 1.0) {
    throw ValidationError("suppression limit outside [0, 1]");
  }
  if (d.row_count() == 0) throw DataError("anonymize_with: empty dataset");

  auto qi = qi_columns(d);
  auto rules = hierarchy_rules(d, hierarchies, qi);
  if (t.levels.size() != qi.size()) {
    throw ValidationError("transformation length mismatch");
  }
  std::vector<std::size_t> qi_cols;
  for (const auto& name : qi) qi_cols.push_back(d.column_index(name));

  Dataset transformed = apply_transformation(d, t, hierarchies);

  std::vector<char> mask;
  std::vector<int> zero_levels(qi.size(), 0);
  std::size_t suppressed =
      rows_to_suppress(transformed, qi_cols, rules, zero_levels, k, &mask);
  auto allowance = static_cast<std::size_t>(
      suppression_limit * static_cast<double>(d.row_count()));
  if (suppressed > allowance) {
    throw InfeasibleError("transformation " + to_string(t) + " needs " +
                          std::to_string(suppressed) + " suppressions, limit is " +
                          std::to_string(allowance));
  }

  std::vector<Row> kept;
  kept.reserve(d.row_count() - suppressed);
  for (std::size_t r = 0; r < transformed.row_count(); ++r) {
    if (!mask[r]) kept.push_back(transformed.rows()[r]);
  }
  Dataset result(transformed.schema(), std::move(kept));
  return {std::move(result), audit(result, t, suppressed)};
}

std::pair<Dataset, AnonymityReport> k_anonymize(const Dataset& d,
                                                const HierarchySet& hierarchies,
                                                int k, double suppression_limit) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (suppression_limit < 0.0 || suppression_limit > 1.0) {
    throw ValidationError("suppression limit outside [0, 1]");
  }
  if (d.row_count() == 0) throw DataError("k_anonymize: empty dataset");

  auto qi = qi_columns(d);
  if (qi.empty()) throw ValidationError("k_anonymize: no quasi-identifier columns");
  auto rules = hierarchy_rules(d, hierarchies, qi);
  std::vector<std::size_t> qi_cols;
  for (const auto& name : qi) qi_cols.push_back(d.column_index(name));

  std::vector<int> max_levels(qi.size());
  for (std::size_t j = 0; j < qi.size(); ++j) {
    max_levels[j] = rules[j] ? rules[j]->max_level() : 0;
  }

  // Enumerate the lattice ordered by total generalization (minimal
  // information loss first), lexicographic within equal sums.
  std::vector<std::vector<int>> nodes;
  std::vector<int> node(qi.size(), 0);
  for (;;) {
    nodes.push_back(node);
    std::size_t j = qi.size();
    while (j > 0 && node[j - 1] == max_levels[j - 1]) {
      node[j - 1] = 0;
      --j;
    }
    if (j == 0) break;
    ++node[j - 1];
  }
  std::stable_sort(nodes.begin(), nodes.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     int sa = 0, sb = 0;
                     for (int x : a) sa += x;
                     for (int x : b) sb += x;
                     if (sa != sb) return sa < sb;
                     return a < b;
                   });

  auto allowance = static_cast<std::size_t>(
      suppression_limit * static_cast<double>(d.row_count()));
  for (const auto& candidate : nodes) {
    std::size_t suppressed =
        rows_to_suppress(d, qi_cols, rules, candidate, k, nullptr);
    if (suppressed <= allowance) {
      return anonymize_with(d, hierarchies, TransformationVector{candidate}, k,
                            suppression_limit);
    }
  }
  throw InfeasibleError("no generalization satisfies k=" + std::to_string(k) +
                        " within a suppression limit of " +
                        std::to_string(suppression_limit));
}

TransformationVector harmonize(const std::vector<TransformationVector>& vectors) {
  if (vectors.empty()) throw ValidationError("harmonize: empty vector list");
  TransformationVector out = vectors.front();
  for (const auto& v : vectors) {
    if (v.levels.size() != out.levels.size()) {
      throw ValidationError("harmonize: dimension mismatch");
    }
    for (std::size_t j = 0; j < out.levels.size(); ++j) {
      out.levels[j] = std::max(out.levels[j], v.levels[j]);
    }
  }
  return out;
}

}  // namespace fedpriv
