#include "basislab/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "basislab/errors.hpp"

namespace basislab {

namespace {

constexpr std::array<char, 8> kMagic = {'B', 'F', 'D', 'M', 'A', 'T', '1', '\0'};
constexpr std::uint64_t kMaxEntries = 1ull << 32;

void write_u64(std::ostream& os, std::uint64_t value) {
  std::array<char, 8> bytes;
  for (int i = 0; i < 8; ++i) {
    bytes[static_cast<std::size_t>(i)] = static_cast<char>((value >> (8 * i)) & 0xff);
  }
  os.write(bytes.data(), 8);
}

std::uint64_t read_u64(std::istream& is) {
  std::array<char, 8> bytes;
  if (!is.read(bytes.data(), 8)) {
    throw IoError("matrix read: truncated header");
  }
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(
                 bytes[static_cast<std::size_t>(i)]))
             << (8 * i);
  }
  return value;
}

}  // namespace

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  os.write(kMagic.data(), kMagic.size());
  write_u64(os, static_cast<std::uint64_t>(m.rows()));
  write_u64(os, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      write_u64(os, std::bit_cast<std::uint64_t>(m(i, j)));
    }
  }
  if (!os) {
    throw IoError("matrix write: stream failure");
  }
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  std::array<char, 8> magic;
  if (!is.read(magic.data(), magic.size())) {
    throw IoError("matrix read: truncated magic");
  }
  if (magic != kMagic) {
    throw IoError("matrix read: bad magic bytes");
  }
  const std::uint64_t rows = read_u64(is);
  const std::uint64_t cols = read_u64(is);
  if (rows == 0 || cols == 0 || rows * cols > kMaxEntries) {
    throw IoError("matrix read: implausible dimensions");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::uint64_t i = 0; i < rows; ++i) {
    for (std::uint64_t j = 0; j < cols; ++j) {
      std::array<char, 8> bytes;
      if (!is.read(bytes.data(), 8)) {
        throw IoError("matrix read: truncated payload");
      }
      std::uint64_t raw = 0;
      for (int b = 0; b < 8; ++b) {
        raw |= static_cast<std::uint64_t>(static_cast<unsigned char>(
                   bytes[static_cast<std::size_t>(b)]))
               << (8 * b);
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::bit_cast<double>(raw);
    }
  }
  return m;
}

namespace {

template <typename WriteBody>
void atomic_write(const std::filesystem::path& path, const WriteBody& body) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) {
      throw IoError("cannot open for writing: " + tmp.string());
    }
    body(os);
    os.flush();
    if (!os) {
      throw IoError("write failure: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_matrix_file(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  atomic_write(path, [&](std::ostream& os) { write_matrix(os, m); });
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open for reading: " + path.string());
  }
  return read_matrix(is);
}

void save_ack_basis(const std::filesystem::path& path, const AckBasis& basis) {
  if (basis.triplets.empty()) {
    throw InputError("save_ack_basis: basis is empty");
  }
  const Eigen::Index nb = static_cast<Eigen::Index>(basis.triplets.size());
  const Eigen::Index k = basis.triplets.front().u.size();
  const Eigen::Index rho = basis.V_right.cols();
  Eigen::MatrixXd header(1, 3);
  header << static_cast<double>(basis.n_samples), basis.normalization,
      static_cast<double>(basis.feature_dim);
  Eigen::MatrixXd values(nb, 1);
  Eigen::MatrixXd left(k, nb);
  Eigen::MatrixXd right(rho, nb);
  for (Eigen::Index i = 0; i < nb; ++i) {
    values(i, 0) = basis.triplets[static_cast<std::size_t>(i)].s;
    left.col(i) = basis.triplets[static_cast<std::size_t>(i)].u;
    right.col(i) = basis.triplets[static_cast<std::size_t>(i)].v;
  }
  atomic_write(path, [&](std::ostream& os) {
    write_matrix(os, header);
    write_matrix(os, basis.V_right);
    write_matrix(os, values);
    write_matrix(os, left);
    write_matrix(os, right);
  });
}

AckBasis load_ack_basis(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) {
    throw IoError("cannot open for reading: " + path.string());
  }
  const Eigen::MatrixXd header = read_matrix(is);
  if (header.rows() != 1 || header.cols() != 3) {
    throw IoError("basis file: malformed header block");
  }
  AckBasis basis;
  basis.n_samples = static_cast<std::size_t>(header(0, 0));
  basis.normalization = header(0, 1);
  basis.feature_dim = static_cast<Eigen::Index>(header(0, 2));
  basis.V_right = read_matrix(is);
  const Eigen::MatrixXd values = read_matrix(is);
  const Eigen::MatrixXd left = read_matrix(is);
  const Eigen::MatrixXd right = read_matrix(is);
  if (values.cols() != 1 || left.cols() != values.rows() || right.cols() != values.rows() ||
      right.rows() != basis.V_right.cols() ||
      basis.V_right.rows() != static_cast<Eigen::Index>(basis.n_samples)) {
    throw IoError("basis file: inconsistent block dimensions");
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    basis.triplets.push_back(BasisTriplet{values(i, 0), left.col(i), right.col(i)});
  }
  return basis;
}

}  // namespace basislab
