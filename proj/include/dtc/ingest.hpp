#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dtc/tensor.hpp"

namespace dtc {

// Binary tensor file: "DTNS", u16 version, u16 order, order x u64 dims, then
// prod(dims) f64 entries in last-index-fastest order. All little-endian.
inline constexpr std::uint16_t kTensorFileVersion = 1;

std::vector<std::uint8_t> encode_tensor(const DenseTensor& T);
DenseTensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const DenseTensor& T, const std::string& path);
DenseTensor read_tensor(const std::string& path);

struct WindowSpec {
  std::size_t width = 20;
  std::size_t step = 1;

  void validate(std::size_t length) const;
  std::size_t window_count(std::size_t length) const;
};

struct CorrelationTensor {
  DenseTensor tensor;  // (p, p, t)
  bool zero_variance = false;
};

// Pearson correlation of each window of columns. A series that is constant
// inside a window gets correlation 0 with every other series there (its
// diagonal stays 1) and sets `zero_variance`.
CorrelationTensor sliding_corr(const Eigen::MatrixXd& series, const WindowSpec& spec);

// Rectangular numeric CSV, one row per series. A first row with no numeric
// cell is taken as a header and skipped.
Eigen::MatrixXd parse_matrix_csv(std::string_view text);
Eigen::MatrixXd import_matrix_csv(const std::string& path);

void write_matrix_csv(const Eigen::MatrixXd& M, const std::string& path);

}  // namespace dtc
