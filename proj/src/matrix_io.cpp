#include "grom/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "grom/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "GROM files are little-endian; big-endian hosts are not supported");

namespace grom {

namespace {
constexpr char kMagic[4] = {'G', 'R', 'O', 'M'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  if (!m.allFinite()) {
    throw ValidationError("write_matrix('" + path.string() + "'): non-finite entries");
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw StorageError("cannot open '" + tmp.string() + "' for writing");
    }
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    // Eigen::MatrixXd is column-major, so the buffer is already in file order.
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!out) {
      throw StorageError("short write to '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw StorageError("cannot move '" + tmp.string() + "' to '" + path.string() +
                       "': " + ec.message());
  }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw StorageError("cannot open '" + path.string() + "' for reading");
  }
  char magic[4] = {};
  std::uint32_t version = 0;
  std::uint64_t rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in) {
    throw FormatError("'" + path.string() + "': truncated header");
  }
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("'" + path.string() + "': bad magic, not a GROM matrix file");
  }
  if (version != kVersion) {
    throw FormatError("'" + path.string() + "': unsupported format version " +
                      std::to_string(version));
  }
  // 2^30 doubles (8 GiB) is far beyond desk scale; treat it as corruption.
  if (rows > (1u << 30) || cols > (1u << 30)) {
    throw FormatError("'" + path.string() + "': implausible dimensions " + std::to_string(rows) +
                      "x" + std::to_string(cols));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in || in.gcount() != static_cast<std::streamsize>(sizeof(double) * m.size())) {
    throw FormatError("'" + path.string() + "': payload shorter than header promises");
  }
  return m;
}

Eigen::VectorXd read_vector(const std::filesystem::path& path) {
  Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 1) {
    throw FormatError("'" + path.string() + "': expected a column vector, got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  return m.col(0);
}

}  // namespace grom
