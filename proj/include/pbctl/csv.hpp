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

#ifndef PBCTL_CSV_HPP
#define PBCTL_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pbctl/sysmodel.hpp"

namespace pbctl {

/// Decimal notation with 12 significant digits; "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

/// Metadata recorded in the first line of every CSV the tools write.
struct CsvMetadata {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

/// Line-oriented CSV writer: one metadata comment line, one header row, then rows.
/// Output is UTF-8 with LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const CsvMetadata& meta,
            const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
};

std::string metadata_line(const CsvMetadata& meta);

/// Columns: controller_index, trajectory_index, t, x_1..x_{d_x} (t = 1..T).
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data,
                       const CsvMetadata& meta);

}  // namespace pbctl

#endif  // PBCTL_CSV_HPP
