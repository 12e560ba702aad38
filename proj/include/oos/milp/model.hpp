#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oos {

enum class VarKind { continuous, integer, binary };
enum class Sense { le, eq, ge };

struct Column {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lb = 0.0;
  double ub = 0.0;
  double obj = 0.0;
};

struct Row {
  std::string family;  // "eq7", "eq16", "sos2", ...
  std::string name;
  std::vector<std::pair<int, double>> terms;
  Sense sense = Sense::eq;
  double rhs = 0.0;
};

/// Lambda weights of one piecewise-linear embedding plus the interval
/// selectors that keep at most two adjacent weights nonzero.
struct Sos2Group {
  int arc = -1;
  std::vector<int> lambdas;
  std::vector<int> selectors;
};

/// Objective component names, in ledger order.
inline const std::vector<std::string>& objective_components() {
  static const std::vector<std::string> names{"revenues", "launch", "pdm", "delay", "depot_ops", "servicer_ops"};
  return names;
}

/// Linear model in maximization form.  Objective coefficients are kept per
/// component (revenues positive, costs as positive amounts) so the total is
/// revenues minus the five cost terms.
class MilpModel {
 public:
  std::vector<Column> cols;
  std::vector<Row> rows;
  std::vector<Sos2Group> sos2;
  std::map<std::string, std::vector<std::pair<int, double>>> components;

  int add_var(std::string name, VarKind kind, double lb, double ub);
  int add_row(std::string family, std::string name, std::vector<std::pair<int, double>> terms, Sense sense,
              double rhs);
  /// Adds `coef` to component `component` for `var`; revenues count +, costs -.
  void add_objective(const std::string& component, int var, double coef);

  std::size_t count(VarKind kind) const;
  std::size_t count_rows(const std::string& family) const;
  double objective_value(const std::vector<double>& values) const;
  double component_value(const std::string& component, const std::vector<double>& values) const;
};

}  // namespace oos
