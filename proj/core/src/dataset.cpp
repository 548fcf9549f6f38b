#include "bsim/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <fstream>
#include <set>
#include <unordered_map>

#include "bsim/errors.hpp"
#include "bsim/logging.hpp"

namespace bsim {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" ||
         cell == "." || cell == "null";
}

std::optional<double> parse_number(const std::string& cell) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

void Dataset::validate(bool require_both_arms) const {
  const auto rows = n();
  if (x_main.rows() != rows || static_cast<Eigen::Index>(arm.size()) != rows) {
    throw DataError("dataset: row counts of x_main, x_index and arm differ");
  }
  if (y.size() != 0 && y.size() != rows) {
    throw DataError("dataset: outcome length differs from covariate rows");
  }
  if (static_cast<Eigen::Index>(main_names.size()) != x_main.cols() ||
      static_cast<Eigen::Index>(index_names.size()) != x_index.cols()) {
    throw DataError("dataset: column names do not match matrix widths");
  }
  const std::set<std::string> mains(main_names.begin(), main_names.end());
  const std::set<std::string> indexes(index_names.begin(), index_names.end());
  if (mains.size() != main_names.size() ||
      indexes.size() != index_names.size()) {
    throw DataError("dataset: duplicate column names");
  }
  bool seen[2] = {false, false};
  for (std::size_t i = 0; i < arm.size(); ++i) {
    if (arm[i] != 0 && arm[i] != 1) {
      throw DataError("dataset: arm at row " + std::to_string(i) +
                      " is not 0/1");
    }
    seen[arm[i]] = true;
  }
  if (require_both_arms && !(seen[0] && seen[1])) {
    throw DataError("dataset: both treatment arms must be present");
  }
}

double arm_one_fraction(const std::vector<int>& arm) {
  if (arm.empty()) return 0.0;
  const auto ones = std::count(arm.begin(), arm.end(), 1);
  return static_cast<double>(ones) / static_cast<double>(arm.size());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(std::move(cell)));
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(trim(std::move(cell)));
  return cells;
}

IngestReport ingest_csv(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("data file '" + path + "' is empty");
  const auto header = split_csv_line(line);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!position.emplace(header[j], j).second) {
      throw DataError("duplicate column '" + header[j] + "' in header");
    }
  }
  const auto locate = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) {
      throw DataError("column '" + name + "' not found in '" + path + "'");
    }
    return it->second;
  };

  if (options.index_cols.empty()) {
    throw DataError("at least one index covariate is required");
  }
  const bool has_outcome = !options.outcome_col.empty();
  const bool has_arm = !options.arm_col.empty();
  const std::size_t outcome_pos = has_outcome ? locate(options.outcome_col) : 0;
  const std::size_t arm_pos = has_arm ? locate(options.arm_col) : 0;
  const bool has_id = !options.id_col.empty();
  const std::size_t id_pos = has_id ? locate(options.id_col) : 0;
  std::vector<std::size_t> main_pos;
  std::vector<std::size_t> index_pos;
  for (const auto& c : options.main_cols) main_pos.push_back(locate(c));
  for (const auto& c : options.index_cols) index_pos.push_back(locate(c));

  std::vector<double> ys;
  std::vector<int> arms;
  std::vector<std::vector<double>> mains;
  std::vector<std::vector<double>> indexes;
  std::vector<std::string> ids;

  IngestReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++report.rows_read;
    const auto cells = split_csv_line(line);
    const auto cell = [&](std::size_t j) -> const std::string& {
      static const std::string empty;
      return j < cells.size() ? cells[j] : empty;
    };

    bool missing = false;
    const auto number = [&](std::size_t j, const std::string& col) {
      const std::string& c = cell(j);
      if (is_missing(c)) {
        missing = true;
        return 0.0;
      }
      const auto v = parse_number(c);
      if (!v) {
        throw DataError("non-numeric value '" + c + "' in column '" + col +
                        "' at line " + std::to_string(line_no));
      }
      return *v;
    };

    double y = 0.0;
    if (has_outcome) y = number(outcome_pos, options.outcome_col);
    double a = 0.0;
    if (has_arm) a = number(arm_pos, options.arm_col);
    std::vector<double> xm;
    std::vector<double> xi;
    for (std::size_t k = 0; k < main_pos.size(); ++k) {
      xm.push_back(number(main_pos[k], options.main_cols[k]));
    }
    for (std::size_t k = 0; k < index_pos.size(); ++k) {
      xi.push_back(number(index_pos[k], options.index_cols[k]));
    }
    if (has_id && is_missing(cell(id_pos))) missing = true;
    if (missing) {
      ++report.rows_dropped;
      continue;
    }
    if (has_arm && a != 0.0 && a != 1.0) {
      throw DataError("arm column '" + options.arm_col + "' has value '" +
                      cell(arm_pos) + "' at line " + std::to_string(line_no) +
                      " (expected 0 or 1)");
    }
    ys.push_back(y);
    arms.push_back(static_cast<int>(a));
    mains.push_back(std::move(xm));
    indexes.push_back(std::move(xi));
    ids.push_back(has_id ? cell(id_pos) : std::to_string(line_no - 1));
  }

  if (report.rows_dropped > 0) {
    log_warning("dropped " + std::to_string(report.rows_dropped) +
                " incomplete row(s) from '" + path + "'");
  }

  const auto n = static_cast<Eigen::Index>(ys.size());
  if (n == 0 && options.require_both_arms) {
    throw DataError("no complete rows left in '" + path + "'");
  }

  Dataset& data = report.data;
  const Eigen::Index intercept = options.add_intercept ? 1 : 0;
  const auto p_main = static_cast<Eigen::Index>(main_pos.size()) + intercept;
  const auto p_index = static_cast<Eigen::Index>(index_pos.size());
  data.y = has_outcome ? Eigen::Map<const Vector>(ys.data(), n) : Vector();
  data.arm = std::move(arms);
  data.x_main.resize(n, p_main);
  data.x_index.resize(n, p_index);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    if (options.add_intercept) data.x_main(i, 0) = 1.0;
    for (std::size_t k = 0; k < main_pos.size(); ++k) {
      data.x_main(i, intercept + static_cast<Eigen::Index>(k)) = mains[r][k];
    }
    for (std::size_t k = 0; k < index_pos.size(); ++k) {
      data.x_index(i, static_cast<Eigen::Index>(k)) = indexes[r][k];
    }
  }
  if (options.add_intercept) data.main_names.emplace_back(kInterceptName);
  data.main_names.insert(data.main_names.end(), options.main_cols.begin(),
                         options.main_cols.end());
  data.index_names = options.index_cols;
  data.ids = std::move(ids);

  if (options.pi1_override) {
    data.pi1 = *options.pi1_override;
    data.pi0 = 1.0 - data.pi1;
  } else if (has_arm && n > 0) {
    data.pi1 = arm_one_fraction(data.arm);
    data.pi0 = 1.0 - data.pi1;
  }
  data.validate(options.require_both_arms && has_arm);
  return report;
}

}  // namespace bsim
