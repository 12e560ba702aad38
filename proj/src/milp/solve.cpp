#include "oos/milp/solve.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "Highs.h"
#include "oos/milp/highs_polish.hpp"
#include "oos/text.hpp"

namespace oos {

namespace fs = std::filesystem;

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::gap_stopped: return "gap_stopped";
    case SolveStatus::time_limit: return "time_limit";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::error: return "error";
  }
  return "error";
}

SolveStatus parse_status(const std::string& s) {
  for (auto st : {SolveStatus::optimal, SolveStatus::gap_stopped, SolveStatus::time_limit, SolveStatus::infeasible,
                  SolveStatus::unbounded, SolveStatus::error})
    if (to_string(st) == s) return st;
  throw std::invalid_argument("unknown solve status \"" + s + "\"");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

HighsModel to_highs(const MilpModel& m, bool relax) {
  HighsModel hm;
  HighsLp& lp = hm.lp_;
  const auto n = static_cast<HighsInt>(m.cols.size());
  lp.num_col_ = n;
  lp.num_row_ = static_cast<HighsInt>(m.rows.size());
  lp.sense_ = ObjSense::kMaximize;
  for (const auto& c : m.cols) {
    lp.col_cost_.push_back(c.obj);
    lp.col_lower_.push_back(c.lb);
    lp.col_upper_.push_back(std::isinf(c.ub) ? kHighsInf : c.ub);
    lp.col_names_.push_back(c.name);
    lp.integrality_.push_back(relax || c.kind == VarKind::continuous ? HighsVarType::kContinuous
                                                                     : HighsVarType::kInteger);
  }
  std::vector<std::vector<std::pair<HighsInt, double>>> by_col(m.cols.size());
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    const auto& row = m.rows[r];
    lp.row_lower_.push_back(row.sense == Sense::le ? -kHighsInf : row.rhs);
    lp.row_upper_.push_back(row.sense == Sense::ge ? kHighsInf : row.rhs);
    lp.row_names_.push_back(row.name);
    for (const auto& [v, c] : row.terms) by_col[static_cast<std::size_t>(v)].emplace_back(static_cast<HighsInt>(r), c);
  }
  auto& a = lp.a_matrix_;
  a.format_ = MatrixFormat::kColwise;
  a.num_col_ = lp.num_col_;
  a.num_row_ = lp.num_row_;
  a.start_.assign(1, 0);
  a.index_.clear();
  a.value_.clear();
  for (const auto& col : by_col) {
    for (const auto& [r, c] : col) {
      a.index_.push_back(r);
      a.value_.push_back(c);
    }
    a.start_.push_back(static_cast<HighsInt>(a.index_.size()));
  }
  return hm;
}

void configure(Highs& h, const SolveOptions& o) {
  h.setOptionValue("output_flag", o.verbose);
  h.setOptionValue("threads", o.threads);
  h.setOptionValue("random_seed", o.seed);
  h.setOptionValue("mip_rel_gap", o.mip_gap);
  h.setOptionValue("time_limit", o.time_limit);
  h.setOptionValue("mip_feasibility_tolerance", 1e-7);
}

std::vector<std::string> iis_hint(const MilpModel& m, const SolveOptions& o) {
  Highs h;
  configure(h, o);
  // Elastic LP, then shrink to an irreducible set.
  h.setOptionValue("iis_strategy", 2 + 8);
  h.setOptionValue("iis_time_limit", std::min(o.time_limit, 60.0));
  h.passModel(to_highs(m, true));
  h.run();
  if (h.getModelStatus() != HighsModelStatus::kInfeasible) return {};
  HighsIis iis;
  if (h.getIis(iis) != HighsStatus::kOk) return {};
  std::vector<std::string> out;
  for (HighsInt r : iis.row_index_)
    if (r >= 0 && static_cast<std::size_t>(r) < m.rows.size()) out.push_back(m.rows[static_cast<std::size_t>(r)].name);
  return out;
}

}  // namespace

Solution HighsBackend::solve(const MilpModel& model, const SolveOptions& options) const {
  Solution sol;
  Highs h;
  configure(h, options);
  if (h.passModel(to_highs(model, false)) == HighsStatus::kError) {
    sol.message = "HiGHS rejected the model";
    return sol;
  }
  h.run();
  const auto ms = h.getModelStatus();
  const auto& info = h.getInfo();
  const bool has_point = info.primal_solution_status == kSolutionStatusFeasible;
  switch (ms) {
    case HighsModelStatus::kOptimal:
      sol.status = info.mip_gap > 1e-6 && std::isfinite(info.mip_gap) ? SolveStatus::gap_stopped : SolveStatus::optimal;
      break;
    case HighsModelStatus::kTimeLimit:
    case HighsModelStatus::kIterationLimit:
    case HighsModelStatus::kSolutionLimit:
    case HighsModelStatus::kInterrupt:
      sol.status = SolveStatus::time_limit;
      break;
    case HighsModelStatus::kInfeasible:
    case HighsModelStatus::kUnboundedOrInfeasible:
      sol.status = SolveStatus::infeasible;
      break;
    case HighsModelStatus::kUnbounded:
      sol.status = SolveStatus::unbounded;
      break;
    default:
      sol.status = SolveStatus::error;
  }
  sol.message = h.modelStatusToString(ms);
  if (sol.status == SolveStatus::infeasible) {
    sol.iis_rows = iis_hint(model, options);
    return sol;
  }
  if (!has_point) return sol;
  sol.gap = std::isfinite(info.mip_gap) ? info.mip_gap : 0.0;
  sol.values = h.getSolution().col_value;
  polish_integers(h, sol.values);
  sol.objective = model.objective_value(sol.values);
  return sol;
}

// ---------------------------------------------------------------------------

LpFileBackend::LpFileBackend(std::string command) : command_(std::move(command)) {}

std::string default_lp_solver_command() {
  if (const char* env = std::getenv("OOS_LP_SOLVER"); env && *env) return env;
  std::error_code ec;
  fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    fs::path sibling = self.parent_path() / "oos-lp-solve";
    if (fs::exists(sibling, ec)) return sibling.string();
  }
  return "oos-lp-solve";
}

std::unique_ptr<Backend> make_backend(const std::string& spec) {
  if (spec == "highs") return std::make_unique<HighsBackend>();
  if (spec == "lp") return std::make_unique<LpFileBackend>(default_lp_solver_command());
  if (spec.rfind("lp:", 0) == 0 && spec.size() > 3) return std::make_unique<LpFileBackend>(spec.substr(3));
  throw std::invalid_argument("unknown backend \"" + spec + "\" (expected highs, lp or lp:<command>)");
}

std::string write_lp(const MilpModel& m) {
  std::ostringstream os;
  auto terms_out = [&](const std::vector<std::pair<int, double>>& terms) {
    if (terms.empty()) {
      os << " 0 " << m.cols.front().name;
      return;
    }
    int n = 0;
    for (const auto& [v, c] : terms) {
      if (n > 0 && n % 8 == 0) os << "\n   ";
      os << (c < 0 ? " - " : " + ") << format_double(std::abs(c)) << ' ' << m.cols[static_cast<std::size_t>(v)].name;
      ++n;
    }
  };
  os << "\\ oos planning model\nMaximize\n obj:";
  std::vector<std::pair<int, double>> obj;
  for (std::size_t j = 0; j < m.cols.size(); ++j)
    if (m.cols[j].obj != 0.0) obj.emplace_back(static_cast<int>(j), m.cols[j].obj);
  terms_out(obj);
  os << "\nSubject To\n";
  for (const auto& r : m.rows) {
    os << ' ' << r.name << ':';
    terms_out(r.terms);
    os << (r.sense == Sense::le ? " <= " : r.sense == Sense::ge ? " >= " : " = ") << format_double(r.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& c : m.cols) {
    if (c.lb == c.ub)
      os << ' ' << c.name << " = " << format_double(c.lb) << '\n';
    else if (std::isinf(c.ub))
      os << ' ' << c.name << " >= " << format_double(c.lb) << '\n';
    else
      os << ' ' << format_double(c.lb) << " <= " << c.name << " <= " << format_double(c.ub) << '\n';
  }
  auto section = [&](const char* title, VarKind kind) {
    bool any = false;
    for (const auto& c : m.cols)
      if (c.kind == kind) {
        if (!any) os << title << '\n';
        any = true;
        os << ' ' << c.name << '\n';
      }
  };
  section("General", VarKind::integer);
  section("Binary", VarKind::binary);
  os << "End\n";
  return os.str();
}

Solution parse_solution_text(const std::string& text, const MilpModel& model) {
  Solution sol;
  std::map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < model.cols.size(); ++j) index[model.cols[j].name] = j;
  std::vector<double> values(model.cols.size(), 0.0);
  bool any_value = false, has_status = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, val;
    if (!(ls >> key >> val)) continue;
    if (key == "status") {
      sol.status = parse_status(val);
      has_status = true;
    } else if (key == "objective") {
      sol.objective = std::stod(val);
    } else if (key == "gap") {
      sol.gap = std::stod(val);
    } else if (key == "message") {
      std::string rest;
      std::getline(ls, rest);
      sol.message = val + rest;
    } else if (key == "iis") {
      sol.iis_rows.push_back(val);
    } else if (auto it = index.find(key); it != index.end()) {
      values[it->second] = std::stod(val);
      any_value = true;
    } else {
      throw std::runtime_error("solution names unknown variable \"" + key + "\"");
    }
  }
  if (!has_status) throw std::runtime_error("solution text has no status line");
  if (any_value || (model.cols.empty() && sol.status != SolveStatus::infeasible)) sol.values = std::move(values);
  if (sol.has_point()) sol.objective = model.objective_value(sol.values);
  return sol;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

}  // namespace

Solution LpFileBackend::solve(const MilpModel& model, const SolveOptions& options) const {
  static std::atomic<unsigned> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("oos-lp-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);
  const fs::path lp = dir / "model.lp", out = dir / "solution.txt", log = dir / "solver.log";
  {
    std::ofstream f(lp);
    f << write_lp(model);
  }
  std::ostringstream cmd;
  cmd << command_ << " --gap " << format_double(options.mip_gap) << " --time-limit "
      << format_double(options.time_limit) << " --threads " << options.threads << " --seed " << options.seed << ' '
      << shell_quote(lp.string()) << ' ' << shell_quote(out.string()) << " > " << shell_quote(log.string())
      << " 2>&1";
  const int rc = std::system(cmd.str().c_str());
  Solution sol;
  std::ifstream in(out);
  if (!in) {
    std::ifstream lf(log);
    std::stringstream ls;
    ls << lf.rdbuf();
    sol.message = "solver command failed (exit " + std::to_string(rc) + "): " + ls.str();
  } else {
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      sol = parse_solution_text(ss.str(), model);
    } catch (const std::exception& e) {
      sol = Solution{};
      sol.message = e.what();
    }
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  return sol;
}

}  // namespace oos
