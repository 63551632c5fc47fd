// Copyright 2026 The privgram Authors
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

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/estimate.hpp"
#include "privgram/regress.hpp"
#include "privgram/sym_matrix.hpp"

namespace privgram {

namespace internal {

inline std::vector<double> parse_csv_row(const std::string& line,
                                         const std::string& where) {
  std::vector<double> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) {
    try {
      cells.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InputError(where + ": malformed number '" + cell + "'");
    }
  }
  if (cells.empty()) throw InputError(where + ": empty row");
  return cells;
}

inline void write_csv_row(std::ostream& out, const double* values,
                          std::size_t count) {
  out.precision(17);
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out << ',';
    out << values[i];
  }
  out << '\n';
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open for reading: " + path);
  return in;
}

}  // namespace internal

// Dataset files are plain CSV rows preceded by one sidecar line carrying the
// row bound:  # row_bound=<B>
inline void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out = internal::open_for_write(path);
  out.precision(17);
  out << "# row_bound=" << data.row_bound() << '\n';
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    internal::write_csv_row(out, data.rows().row(i).data(),
                            static_cast<std::size_t>(data.dim()));
  }
  if (!out) throw InputError("write failed: " + path);
}

inline Dataset read_dataset(const std::string& path) {
  std::ifstream in = internal::open_for_read(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# row_bound=", 0) != 0) {
    throw InputError("dataset file must start with '# row_bound=': " + path);
  }
  double bound = 0.0;
  try {
    bound = std::stod(line.substr(std::string("# row_bound=").size()));
  } catch (const std::exception&) {
    throw InputError("dataset file has malformed row bound: " + path);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(internal::parse_csv_row(line, path));
    if (rows.back().size() != rows.front().size()) {
      throw InputError("dataset rows have inconsistent width: " + path);
    }
  }
  if (rows.empty()) throw InputError("dataset file has no rows: " + path);
  RowMatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      matrix(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return Dataset(std::move(matrix), bound);
}

// Estimate files carry a `# key=value` header block (mechanism, seed, is_pd,
// branch, calibration entries) followed by the dense matrix in CSV rows.
inline void write_gram_estimate(const std::string& path,
                                const GramEstimate& est) {
  std::ofstream out = internal::open_for_write(path);
  out.precision(17);
  out << "# mechanism=" << est.mechanism << '\n';
  out << "# seed=" << est.seed << '\n';
  out << "# is_pd=" << (est.is_pd ? 1 : 0) << '\n';
  if (!est.branch.empty()) out << "# branch=" << est.branch << '\n';
  for (const auto& [key, value] : est.calibration) {
    out << "# " << key << '=' << value << '\n';
  }
  const int d = est.matrix.dim();
  std::vector<double> row(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) row[static_cast<std::size_t>(j)] = est.matrix(i, j);
    internal::write_csv_row(out, row.data(), row.size());
  }
  if (!out) throw InputError("write failed: " + path);
}

inline GramEstimate read_gram_estimate(const std::string& path) {
  std::ifstream in = internal::open_for_read(path);
  GramEstimate est;
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const std::string entry = line.substr(2);
      const std::size_t eq = entry.find('=');
      if (eq == std::string::npos) {
        throw InputError("estimate header without '=': " + path);
      }
      const std::string key = entry.substr(0, eq);
      const std::string value = entry.substr(eq + 1);
      try {
        if (key == "mechanism") {
          est.mechanism = value;
        } else if (key == "seed") {
          est.seed = std::stoull(value);
        } else if (key == "is_pd") {
          est.is_pd = std::stoi(value) != 0;
        } else if (key == "branch") {
          est.branch = value;
        } else {
          est.calibration[key] = std::stod(value);
        }
      } catch (const std::exception&) {
        throw InputError("estimate header has malformed value: " + line);
      }
      continue;
    }
    rows.push_back(internal::parse_csv_row(line, path));
  }
  if (rows.empty()) throw InputError("estimate file has no matrix: " + path);
  const std::size_t d = rows.size();
  Eigen::MatrixXd dense(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) {
      throw InputError("estimate matrix is not square: " + path);
    }
    for (std::size_t j = 0; j < d; ++j) {
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  est.matrix = SymMatrix::from_dense(dense);
  return est;
}

inline void write_coefficients(const std::string& path,
                               const Coefficients& coeffs) {
  std::ofstream out = internal::open_for_write(path);
  internal::write_csv_row(out, coeffs.values.data(),
                          static_cast<std::size_t>(coeffs.values.size()));
  if (!out) throw InputError("write failed: " + path);
}

inline Coefficients read_coefficients(const std::string& path) {
  std::ifstream in = internal::open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw InputError("coefficients file is empty: " + path);
  }
  const std::vector<double> cells = internal::parse_csv_row(line, path);
  Eigen::VectorXd values(static_cast<Eigen::Index>(cells.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    values(i) = cells[static_cast<std::size_t>(i)];
  }
  return {values};
}

}  // namespace privgram
