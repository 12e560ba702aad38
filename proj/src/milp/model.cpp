#include "oos/milp/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace oos {

int MilpModel::add_var(std::string name, VarKind kind, double lb, double ub) {
  if (kind == VarKind::binary) {
    lb = std::max(lb, 0.0);
    ub = std::min(ub, 1.0);
  }
  cols.push_back({std::move(name), kind, lb, ub, 0.0});
  return static_cast<int>(cols.size()) - 1;
}

int MilpModel::add_row(std::string family, std::string name, std::vector<std::pair<int, double>> terms, Sense sense,
                       double rhs) {
  for (const auto& [v, c] : terms)
    if (v < 0 || v >= static_cast<int>(cols.size())) throw std::logic_error("row " + name + " references no variable");
  // Merge repeated variables so every backend sees one entry per column.
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  terms = std::move(merged);
  rows.push_back({std::move(family), std::move(name), std::move(terms), sense, rhs});
  return static_cast<int>(rows.size()) - 1;
}

void MilpModel::add_objective(const std::string& component, int var, double coef) {
  if (coef == 0.0) return;
  components[component].emplace_back(var, coef);
  cols.at(static_cast<std::size_t>(var)).obj += component == "revenues" ? coef : -coef;
}

std::size_t MilpModel::count(VarKind kind) const {
  return static_cast<std::size_t>(std::count_if(cols.begin(), cols.end(), [&](const Column& c) { return c.kind == kind; }));
}

std::size_t MilpModel::count_rows(const std::string& family) const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const Row& r) { return r.family == family; }));
}

double MilpModel::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (std::size_t j = 0; j < cols.size(); ++j) total += cols[j].obj * values.at(j);
  return total;
}

double MilpModel::component_value(const std::string& component, const std::vector<double>& values) const {
  auto it = components.find(component);
  if (it == components.end()) return 0.0;
  double total = 0.0;
  for (const auto& [v, c] : it->second) total += c * values.at(static_cast<std::size_t>(v));
  return total;
}

}  // namespace oos
