/*
 Copyright 2026 The pbctl Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "pbctl/csv.hpp"

#include <cmath>
#include <cstdio>

#include "pbctl/types.hpp"

namespace pbctl {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string metadata_line(const CsvMetadata& meta) {
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(meta.config_hash));
  return std::string("# pbctl ") + PBCTL_VERSION + " seed=" + std::to_string(meta.seed) +
         " config=" + hash;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const CsvMetadata& meta,
                     const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), width_(columns.size()) {
  if (!out_) throw IoError("cannot open " + path.string() + " for writing");
  out_ << metadata_line(meta) << '\n';
  row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  require_dims(cells.size() == width_, "csv: row width does not match header");
  for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  row(cells);
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const CsvMetadata& meta) {
  const int dx = data.per_controller.empty() || data.per_controller.front().empty()
                     ? 0
                     : static_cast<int>(data.per_controller.front().front().states.rows());
  std::vector<std::string> cols{"controller_index", "trajectory_index", "t"};
  for (int k = 1; k <= dx; ++k) cols.push_back("x_" + std::to_string(k));
  CsvWriter csv(path, meta, cols);
  for (std::size_t j = 0; j < data.per_controller.size(); ++j)
    for (std::size_t i = 0; i < data.per_controller[j].size(); ++i) {
      const MatrixXd& X = data.per_controller[j][i].states;
      for (Eigen::Index t = 0; t < X.cols(); ++t) {
        std::vector<std::string> cells{std::to_string(j), std::to_string(i), std::to_string(t + 1)};
        for (Eigen::Index k = 0; k < X.rows(); ++k) cells.push_back(format_number(X(k, t)));
        csv.row(cells);
      }
    }
}

}  // namespace pbctl
