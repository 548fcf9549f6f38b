#ifndef BSIM_DATASET_HPP
#define BSIM_DATASET_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bsim/types.hpp"

namespace bsim {

/// Trial data D = {(Y_i, A_i, X_i)}. Main-effect and index covariates are
/// kept separately; they may overlap. x_main carries the intercept column
/// when the data came through ingest_csv.
struct Dataset {
  Vector y;
  std::vector<int> arm;
  Matrix x_main;
  Matrix x_index;
  double pi0 = 0.5;
  double pi1 = 0.5;
  std::vector<std::string> main_names;
  std::vector<std::string> index_names;
  std::vector<std::string> ids;

  Eigen::Index n() const { return x_index.rows(); }

  // Dimensions agree, arms are 0/1, names unique. With require_both_arms,
  // each arm must have at least one subject.
  void validate(bool require_both_arms = true) const;
};

// Fraction of subjects in arm 1.
double arm_one_fraction(const std::vector<int>& arm);

inline constexpr const char* kInterceptName = "(Intercept)";

struct IngestOptions {
  std::string outcome_col;  // empty: no outcome (scoring new data)
  std::string arm_col;      // empty: no arm column (scoring new data)
  std::vector<std::string> main_cols;
  std::vector<std::string> index_cols;
  std::string id_col;  // empty: ids are 1-based data row numbers
  bool add_intercept = true;
  std::optional<double> pi1_override;
  bool require_both_arms = true;
};

struct IngestReport {
  Dataset data;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
};

// Reads a headered CSV and keeps complete cases in the used columns. Empty,
// NA, NaN and "." count as missing. Throws DataError on a missing column, an
// arm value other than 0/1 (naming the row), or no rows left after filtering
// when both arms are required.
IngestReport ingest_csv(const std::string& path, const IngestOptions& options);

// Splits one CSV record (RFC 4180 quoting).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace bsim

#endif  // BSIM_DATASET_HPP
