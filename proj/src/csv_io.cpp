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

#include "icclab/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "icclab/error.hpp"

namespace icclab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos && trim(s) == s) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Line-oriented reader that knows where it is for error messages.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::vector<std::string> expected_prefix, bool exact)
      : in_(in) {
    if (!next()) fail(0, "missing header row");
    header_ = fields_;
    if (exact ? header_ != expected_prefix : header_.size() < expected_prefix.size()) {
      std::string want;
      for (const auto& h : expected_prefix) want += (want.empty() ? "" : ",") + h;
      fail(0, "header must be '" + want + (exact ? "'" : ",...'"));
    }
    for (std::size_t c = 0; c < expected_prefix.size(); ++c) {
      if (header_[c] != expected_prefix[c]) fail(c, "expected column '" + expected_prefix[c] + "'");
    }
  }

  const std::vector<std::string>& header() const { return header_; }

  // Advances to the next non-blank record; false at end of input.
  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (trim(line).empty()) continue;
      fields_ = split_csv_line(line);
      if (!header_.empty() && fields_.size() != header_.size()) {
        fail(std::min(fields_.size(), header_.size()),
             "expected " + std::to_string(header_.size()) + " fields, found " +
                 std::to_string(fields_.size()));
      }
      return true;
    }
    return false;
  }

  const std::string& text(std::size_t c) const { return fields_[c]; }

  double number(std::size_t c) const {
    const std::string_view f = trim(fields_[c]);
    if (f == "nan") return std::nan("");
    if (f == "inf") return INFINITY;
    if (f == "-inf") return -INFINITY;
    double v = 0.0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || end != f.data() + f.size()) {
      fail(c, "expected a number, found '" + std::string(f) + "'");
    }
    return v;
  }

  std::size_t count(std::size_t c) const {
    const std::string_view f = trim(fields_[c]);
    std::size_t v = 0;
    const auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (f.empty() || ec != std::errc() || end != f.data() + f.size()) {
      fail(c, "expected a non-negative integer, found '" + std::string(f) + "'");
    }
    return v;
  }

  [[noreturn]] void fail(std::size_t column, const std::string& what) const {
    std::string where = "line " + std::to_string(line_no_) + ", column " + std::to_string(column + 1);
    if (column < header_.size()) where += " (" + header_[column] + ")";
    throw Error(ErrorCode::kParseError, where + ": " + what);
  }

 private:
  std::istream& in_;
  std::vector<std::string> header_;
  std::vector<std::string> fields_;
  std::size_t line_no_ = 0;
};

Axis axis_from_values(const std::vector<double>& v) {
  Axis a;
  a.start = v.front();
  a.stop = v.back();
  a.step = v.size() > 1 ? (v.back() - v.front()) / static_cast<double>(v.size() - 1) : 1.0;
  return a;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

EmbeddingBatch read_batch_csv(std::istream& in, std::vector<std::string>* class_names) {
  CsvReader r(in, {"class_id", "sample_id"}, false);
  const std::size_t dim = r.header().size() - 2;
  if (dim == 0) r.fail(2, "no embedding columns");
  for (std::size_t l = 0; l < dim; ++l) {
    if (r.header()[l + 2] != "e_" + std::to_string(l)) r.fail(l + 2, "expected column 'e_" + std::to_string(l) + "'");
  }
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows_by_class;
  while (r.next()) {
    const std::string id(trim(r.text(0)));
    auto [it, inserted] = index.try_emplace(id, names.size());
    if (inserted) {
      names.push_back(id);
      rows_by_class.emplace_back();
    }
    auto& rows = rows_by_class[it->second];
    for (std::size_t l = 0; l < dim; ++l) rows.push_back(r.number(l + 2));
  }
  if (names.empty()) throw Error(ErrorCode::kParseError, "batch CSV has no data rows");
  std::vector<std::size_t> sizes;
  std::vector<double> values;
  for (const auto& rows : rows_by_class) {
    sizes.push_back(rows.size() / dim);
    values.insert(values.end(), rows.begin(), rows.end());
  }
  if (class_names) *class_names = std::move(names);
  return EmbeddingBatch(std::move(sizes), dim, std::move(values));
}

void write_batch_csv(std::ostream& out, const EmbeddingBatch& batch,
                     const std::vector<std::string>& class_names) {
  out << "class_id,sample_id";
  for (std::size_t l = 0; l < batch.dim(); ++l) out << ",e_" << l;
  out << '\n';
  for (std::size_t j = 0; j < batch.n_classes(); ++j) {
    const std::string name = j < class_names.size() ? quote_if_needed(class_names[j]) : std::to_string(j);
    for (std::size_t i = 0; i < batch.class_size(j); ++i) {
      out << name << ',' << i;
      for (double v : batch.row(batch.class_begin(j) + i)) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

void write_grid_csv(std::ostream& out, const VarianceGrid& grid) {
  out << "intra_var,inter_var,value_mean,value_std,n_repeats\n";
  for (std::size_t i = 0; i < grid.n_intra(); ++i) {
    for (std::size_t j = 0; j < grid.n_inter(); ++j) {
      out << format_double(grid.intra_values[i]) << ',' << format_double(grid.inter_values[j]) << ','
          << format_double(grid.mean_at(i, j)) << ',' << format_double(grid.std_at(i, j)) << ','
          << grid.n_repeats << '\n';
    }
  }
}

VarianceGrid read_grid_csv(std::istream& in) {
  CsvReader r(in, {"intra_var", "inter_var", "value_mean", "value_std", "n_repeats"}, true);
  VarianceGrid g;
  std::vector<std::array<double, 2>> coords;
  bool first = true;
  while (r.next()) {
    const double intra = r.number(0);
    const double inter = r.number(1);
    g.values_mean.push_back(r.number(2));
    g.values_std.push_back(r.number(3));
    const std::size_t n = r.count(4);
    if (first) {
      g.n_repeats = n;
      first = false;
    } else if (n != g.n_repeats) {
      r.fail(4, "n_repeats differs from the first row");
    }
    // The inter block of the first intra value fixes the column axis.
    if (g.intra_values.empty() || intra != g.intra_values.back()) {
      if (!g.intra_values.empty() && g.inter_values.size() * g.intra_values.size() != coords.size()) {
        r.fail(0, "intra_var changed before the inter_var block was complete");
      }
      g.intra_values.push_back(intra);
    }
    if (g.intra_values.size() == 1) g.inter_values.push_back(inter);
    const std::size_t k = coords.size();
    const std::size_t n_inter = g.inter_values.size();
    if (g.intra_values.size() > 1 && inter != g.inter_values[k % n_inter]) {
      r.fail(1, "inter_var does not follow the first block's order");
    }
    coords.push_back({intra, inter});
  }
  if (coords.empty()) throw Error(ErrorCode::kParseError, "grid CSV has no data rows");
  if (coords.size() != g.intra_values.size() * g.inter_values.size()) {
    throw Error(ErrorCode::kParseError, "grid CSV ends inside an inter_var block");
  }
  g.config.intra = axis_from_values(g.intra_values);
  g.config.inter = axis_from_values(g.inter_values);
  g.config.n_repeats = g.n_repeats;
  return g;
}

void write_path_csv(std::ostream& out, const DescentPath& path) {
  out << "step_index,intra_var,inter_var,value\n";
  for (std::size_t k = 0; k < path.points.size(); ++k) {
    const PathPoint& p = path.points[k];
    out << k << ',' << format_double(p.intra) << ',' << format_double(p.inter) << ','
        << format_double(p.value) << '\n';
  }
}

std::vector<PathPoint> read_path_csv(std::istream& in) {
  CsvReader r(in, {"step_index", "intra_var", "inter_var", "value"}, true);
  std::vector<PathPoint> points;
  while (r.next()) {
    if (r.count(0) != points.size()) r.fail(0, "step_index must count up from 0");
    points.push_back({r.number(1), r.number(2), r.number(3)});
  }
  return points;
}

void write_loss_trace_csv(std::ostream& out, const std::vector<double>& trace) {
  out << "step,loss\n";
  for (std::size_t k = 0; k < trace.size(); ++k) out << k << ',' << format_double(trace[k]) << '\n';
}

std::vector<double> read_loss_trace_csv(std::istream& in) {
  CsvReader r(in, {"step", "loss"}, true);
  std::vector<double> trace;
  while (r.next()) {
    if (r.count(0) != trace.size()) r.fail(0, "step must count up from 0");
    trace.push_back(r.number(1));
  }
  return trace;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

}  // namespace icclab
