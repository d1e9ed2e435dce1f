#include "dtc/ingest.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "dtc/errors.hpp"

namespace dtc {

namespace {

constexpr char kMagic[4] = {'D', 'T', 'N', 'S'};

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename U>
U get_le(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[pos + i]) << (8 * i);
  pos += sizeof(U);
  return value;
}

void need(std::span<const std::uint8_t> bytes, std::size_t pos, std::size_t n, const char* what) {
  if (bytes.size() < pos + n) throw MalformedFile(std::string("file ends inside the ") + what);
}

}  // namespace

std::vector<std::uint8_t> encode_tensor(const DenseTensor& T) {
  if (T.order() == 0 || T.order() > std::numeric_limits<std::uint16_t>::max())
    throw InvalidArgument("tensor order must lie in [1, 65535]");
  std::vector<std::uint8_t> out;
  out.reserve(8 + 8 * T.order() + 8 * T.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, kTensorFileVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(T.order()));
  for (auto d : T.dims()) put_le<std::uint64_t>(out, d);
  for (double x : T.data()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

DenseTensor decode_tensor(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  need(bytes, pos, 8, "header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw MalformedFile("bad magic (expected DTNS)");
  pos = 4;
  const auto version = get_le<std::uint16_t>(bytes, pos);
  if (version != kTensorFileVersion)
    throw MalformedFile("unsupported format version " + std::to_string(version));
  const auto order = get_le<std::uint16_t>(bytes, pos);
  if (order == 0) throw MalformedFile("tensor order is zero");
  need(bytes, pos, 8 * std::size_t{order}, "dimension list");
  Dims dims(order);
  std::size_t count = 1;
  for (auto& d : dims) {
    const auto v = get_le<std::uint64_t>(bytes, pos);
    if (v == 0) throw MalformedFile("zero-length dimension");
    if (count > std::numeric_limits<std::size_t>::max() / 8 / v)
      throw MalformedFile("dimensions overflow");
    d = static_cast<std::size_t>(v);
    count *= d;
  }
  const std::size_t payload = bytes.size() - pos;
  if (payload < 8 * count)
    throw TruncatedPayload("payload has " + std::to_string(payload) + " bytes, expected " +
                           std::to_string(8 * count));
  if (payload > 8 * count) throw MalformedFile("trailing bytes after payload");
  Vector data(count);
  for (auto& x : data) x = std::bit_cast<double>(get_le<std::uint64_t>(bytes, pos));
  return DenseTensor(std::move(dims), std::move(data));
}

void write_tensor(const DenseTensor& T, const std::string& path) {
  const auto bytes = encode_tensor(T);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write to '" + path + "' failed");
}

DenseTensor read_tensor(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return decode_tensor(bytes);
}

void WindowSpec::validate(std::size_t length) const {
  if (width < 2) throw InvalidArgument("window width must be at least 2");
  if (step < 1) throw InvalidArgument("window step must be at least 1");
  if (width > length)
    throw InvalidArgument("window width " + std::to_string(width) + " exceeds series length " +
                          std::to_string(length));
}

std::size_t WindowSpec::window_count(std::size_t length) const {
  validate(length);
  return (length - width) / step + 1;
}

CorrelationTensor sliding_corr(const Eigen::MatrixXd& series, const WindowSpec& spec) {
  const auto p = static_cast<std::size_t>(series.rows());
  const auto len = static_cast<std::size_t>(series.cols());
  if (p < 2) throw InvalidArgument("sliding_corr needs at least two series");
  const std::size_t t = spec.window_count(len);

  CorrelationTensor out;
  out.tensor = DenseTensor(Dims{p, p, t});
  auto data = out.tensor.mutable_data();
  int flagged = 0;
#pragma omp parallel for schedule(static) reduction(| : flagged)
  for (std::size_t k = 0; k < t; ++k) {
    const auto start = static_cast<Eigen::Index>(k * spec.step);
    const auto w = static_cast<Eigen::Index>(spec.width);
    Eigen::MatrixXd win = series.middleCols(start, w);
    win.colwise() -= win.rowwise().mean();
    const Eigen::VectorXd ss = win.rowwise().squaredNorm();
    const Eigen::MatrixXd cross = win * win.transpose();
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b) {
        const auto ia = static_cast<Eigen::Index>(a);
        const auto ib = static_cast<Eigen::Index>(b);
        double r;
        if (a == b) {
          r = 1.0;
        } else if (ss(ia) == 0.0 || ss(ib) == 0.0) {
          r = 0.0;
          flagged = 1;
        } else {
          r = std::clamp(cross(ia, ib) / std::sqrt(ss(ia) * ss(ib)), -1.0, 1.0);
        }
        data[(a * p + b) * t + k] = r;
      }
  }
  out.zero_variance = flagged != 0;
  return out;
}

namespace {

bool parse_double(std::string_view cell, double& value) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size();
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Eigen::MatrixXd parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const auto cells = split(line);
    std::vector<double> row(cells.size());
    std::size_t bad = 0;
    std::size_t numeric = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (parse_double(cells[c], row[c]))
        ++numeric;
      else if (bad == 0)
        bad = c + 1;
    }
    if (first) {
      first = false;
      if (numeric == 0) {
        width = cells.size();
        continue;  // header
      }
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw RaggedCsv("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(width));
    if (bad != 0)
      throw ParseError(line_no, bad, "'" + std::string(cells[bad - 1]) + "' is not a number");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidArgument("CSV contains no data rows");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return M;
}

Eigen::MatrixXd import_matrix_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read from '" + path + "' failed");
  return parse_matrix_csv(text);
}

void write_matrix_csv(const Eigen::MatrixXd& M, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  char buf[32];
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, M(i, j));
      if (j) f << ',';
      f.write(buf, res.ptr - buf);
    }
    f << '\n';
  }
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace dtc
