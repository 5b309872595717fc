// Copyright 2026 The qbath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QBATH_IO_HPP
#define QBATH_IO_HPP

#include <string>
#include <vector>

#include "qbath/ml.hpp"

namespace qbath {

/// Numeric CSV table with a header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Column position of `name`, or -1.
  int column(const std::string& name) const;
};

/// Round-trippable text (%.17g); non-finite values print as nan/inf/-inf.
std::string format_number(double v);

void write_csv(const std::string& path, const CsvTable& table);
/// Column-major convenience: every column must have the same length.
void write_columns(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<const std::vector<double>*>& columns);

/// Throws IoError when the file cannot be opened and ParseError (with the line) on ragged or
/// non-numeric rows.
CsvTable read_csv(const std::string& path);

/// Creates the directory and its parents; throws IoError on failure.
void ensure_directory(const std::string& path);

/// Joins a features CSV (`run_id,f_0,...`) and a targets CSV (`run_id,<names>...`) on run_id.
ml::Dataset load_dataset(const std::string& features_csv, const std::string& targets_csv);

/// Features CSV without targets (for prediction); run ids are returned through `run_ids`.
RealMatrix load_features(const std::string& features_csv, std::vector<long>* run_ids = nullptr);

}  // namespace qbath

#endif  // QBATH_IO_HPP
