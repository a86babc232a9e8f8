#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "lyapb/banded.hpp"

namespace lyapb {

/// Coordinate text format: header "n nnz symmetric|general", then 1-based
/// "i j value" lines. Symmetric files list the lower triangle only.
RealBanded read_coordinate(std::istream& in);
RealBanded read_coordinate_file(const std::string& path);
void write_coordinate(std::ostream& out, const RealBanded& X);
void write_coordinate_file(const std::string& path, const RealBanded& X);

/// Dense column-major factor: header "rows cols", then one row per line.
void write_dense(std::ostream& out, const Eigen::MatrixXd& M);
Eigen::MatrixXd read_dense(std::istream& in);

}  // namespace lyapb
