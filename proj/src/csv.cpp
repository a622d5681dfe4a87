// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#include "podhjb/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace podhjb {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged CSV in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw std::runtime_error("empty CSV in " + path.string());
  }
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = 0; j < rows[i].size(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

void write_vector_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& v) {
  write_matrix_csv(path, v);
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  Eigen::MatrixXd m = read_matrix_csv(path);
  if (m.cols() != 1) {
    throw std::runtime_error("expected single-column CSV in " + path.string());
  }
  return m.col(0);
}

void write_keyvalue(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  for (const auto& [key, value] : kv) {
    out << key << '=' << value << '\n';
  }
}

}  // namespace podhjb
