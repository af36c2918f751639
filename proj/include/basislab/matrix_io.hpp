#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

#include "basislab/ack_projection.hpp"

namespace basislab {

// Binary matrix format, bit-exact: 8 magic bytes "BFDMAT1\0", then rows and
// cols as unsigned 64-bit little-endian, then the row-major payload as
// 64-bit IEEE-754 little-endian.

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix(std::istream& is);

// File variants write to a temporary sibling and rename into place.
void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);

// A basis file is five matrix blocks in fixed order: 1x3 header
// [n_samples, normalization, feature_dim], V_right, singular values (nb x 1),
// left vectors (k x nb), right vectors (rho x nb).
void save_ack_basis(const std::filesystem::path& path, const AckBasis& basis);
AckBasis load_ack_basis(const std::filesystem::path& path);

}  // namespace basislab
