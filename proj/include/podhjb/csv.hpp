// Copyright (c) 2026, the podhjb developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace podhjb {

// All tabular artifacts are plain CSV written with 17 significant digits so
// that doubles round-trip exactly and repeated runs are byte-identical.

std::string format_double(double value);

void write_matrix_csv(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

void write_vector_csv(const std::filesystem::path& path,
                      const Eigen::VectorXd& v);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

// Ordered key=value text, one pair per line.
void write_keyvalue(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& kv);

}  // namespace podhjb
