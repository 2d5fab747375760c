// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV persistence for embedding batches, variance grids, descent paths and
// loss traces. Floats are written with 17 significant digits so every value
// reads back bit-for-bit. Parse failures are kParseError with the line and
// column of the offending field.

#ifndef ICCLAB_CSV_IO_HPP_
#define ICCLAB_CSV_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "icclab/batch.hpp"
#include "icclab/landscape.hpp"

namespace icclab {

// "%.17g"; non-finite values as nan, inf and -inf.
std::string format_double(double v);

// One record per line; fields split on commas with RFC 4180 quoting.
std::vector<std::string> split_csv_line(std::string_view line);

// Columns class_id,sample_id,e_0,...,e_{L-1}. Class ids are arbitrary
// strings numbered in order of first appearance; rows keep file order
// within a class. `class_names`, when given, receives the ids by index.
EmbeddingBatch read_batch_csv(std::istream& in, std::vector<std::string>* class_names = nullptr);
// Ids default to the class index.
void write_batch_csv(std::ostream& out, const EmbeddingBatch& batch,
                     const std::vector<std::string>& class_names = {});

// Columns intra_var,inter_var,value_mean,value_std,n_repeats, row-major over
// intra then inter. Reading restores the axes from the coordinates; the
// loss field is left at its default.
void write_grid_csv(std::ostream& out, const VarianceGrid& grid);
VarianceGrid read_grid_csv(std::istream& in);

// Columns step_index,intra_var,inter_var,value.
void write_path_csv(std::ostream& out, const DescentPath& path);
std::vector<PathPoint> read_path_csv(std::istream& in);

// Columns step,loss.
void write_loss_trace_csv(std::ostream& out, const std::vector<double>& trace);
std::vector<double> read_loss_trace_csv(std::istream& in);

// Whole-file helpers; kIoError when the file cannot be opened or written.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace icclab

#endif  // ICCLAB_CSV_IO_HPP_
