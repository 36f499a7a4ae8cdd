// SPDX-License-Identifier: Apache-2.0
#include "stabkit/point_cloud.hpp"

#include "stabkit/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace stabkit {

namespace {

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  if (!m.allFinite()) throw InvalidInput("point coordinates must be finite");
}

double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw InvalidInput("cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

std::vector<double> parse_row(std::string_view line) {
  std::vector<double> row;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    row.push_back(parse_number(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return row;
}

}  // namespace

PointCloud::PointCloud(int dim) : dim_(dim), coords_(dim, 0) {
  if (dim < 1) throw InvalidInput("dimension must be positive");
}

PointCloud::PointCloud(Eigen::MatrixXd coords) : dim_(static_cast<int>(coords.rows())), coords_(std::move(coords)) {
  if (dim_ < 1) throw InvalidInput("dimension must be positive");
  require_finite(coords_);
}

void PointCloud::push_back(const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() != dim_) throw InvalidInput("point dimension mismatch");
  require_finite(p);
  const Index n = coords_.cols();
  coords_.conservativeResize(Eigen::NoChange, n + 1);
  coords_.col(n) = p;
}

PointCloud PointCloud::with(const Eigen::Ref<const Eigen::VectorXd>& p) const {
  if (p.size() != dim_) throw InvalidInput("point dimension mismatch");
  require_finite(p);
  Eigen::MatrixXd m(dim_, coords_.cols() + 1);
  m.leftCols(coords_.cols()) = coords_;
  m.col(coords_.cols()) = p;
  PointCloud out(dim_);
  out.coords_ = std::move(m);
  return out;
}

PointCloud PointCloud::select(std::span<const Index> indices) const {
  PointCloud out(dim_);
  out.coords_.resize(dim_, static_cast<Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) out.coords_.col(static_cast<Index>(j)) = coords_.col(indices[j]);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

Point parse_point(const std::string& text) {
  const auto row = parse_row(text);
  Point p(static_cast<Index>(row.size()));
  for (std::size_t i = 0; i < row.size(); ++i) p[static_cast<Index>(i)] = row[i];
  return p;
}

void write_csv(std::ostream& out, const PointCloud& cloud) {
  std::string line;
  for (Index i = 0; i < cloud.size(); ++i) {
    line.clear();
    for (int j = 0; j < cloud.dim(); ++j) {
      if (j) line += ',';
      line += format_double(cloud.coords()(j, i));
    }
    line += '\n';
    out << line;
  }
}

PointCloud read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    rows.push_back(parse_row(line));
  }
  if (rows.empty()) throw InvalidInput("empty point CSV (dimension unknown)");
  const auto dim = static_cast<Index>(rows.front().size());
  Eigen::MatrixXd m(dim, static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != dim) throw InvalidInput("ragged point CSV at row " + std::to_string(i + 1));
    for (Index j = 0; j < dim; ++j) m(j, static_cast<Index>(i)) = rows[i][static_cast<std::size_t>(j)];
  }
  return PointCloud(std::move(m));
}

PointCloud read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_csv(in);
}

void write_csv_file(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path);
  write_csv(out, cloud);
}

}  // namespace stabkit
