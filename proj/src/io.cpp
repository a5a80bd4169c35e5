#include "ssmt/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ssmt::io {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::optional<double> parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

// Parses "key=value" tokens of a '#' header line.
std::optional<std::string> header_value(const std::string& line, const std::string& key) {
  std::istringstream tokens(line.substr(1));
  std::string token;
  while (tokens >> token) {
    const auto eq = token.find('=');
    if (eq != std::string::npos && token.substr(0, eq) == key) return token.substr(eq + 1);
  }
  return std::nullopt;
}

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ifstream in(path, std::ios::in | mode);
  if (!in) throw FormatError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::out | std::ios::trunc | mode);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_value(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

TimeSeries read_signal_csv(const std::filesystem::path& path,
                           std::optional<double> sample_rate_hz) {
  auto in = open_input(path);
  std::vector<double> samples;
  std::optional<double> file_rate;
  std::string line;
  std::size_t line_number = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (auto rate = header_value(t, "sample_rate_hz")) file_rate = parse_double(*rate);
      continue;
    }
    // Only the first column of a multi-column line is the sample.
    const std::string field = t.substr(0, t.find(','));
    const auto value = parse_double(field);
    if (!value) {
      if (!seen_content) {
        seen_content = true;
        continue;  // column header
      }
      throw FormatError(path.string() + ":" + std::to_string(line_number) +
                        ": not a number: '" + field + "'");
    }
    seen_content = true;
    samples.push_back(*value);
  }
  const auto rate = sample_rate_hz ? sample_rate_hz : file_rate;
  if (!rate) {
    throw ConfigError("no sample rate: pass --sample-rate or add a '# sample_rate_hz=' header");
  }
  if (samples.empty()) throw DataError("insufficient data: '" + path.string() + "' has no samples");
  return TimeSeries(std::move(samples), *rate);
}

TimeSeries read_signal_f64(const std::filesystem::path& path, double sample_rate_hz) {
  auto in = open_input(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % sizeof(double) != 0) {
    throw FormatError("'" + path.string() + "' size is not a multiple of 8 bytes");
  }
  std::vector<double> samples(bytes.size() / sizeof(double));
  if (samples.empty()) throw DataError("insufficient data: '" + path.string() + "' is empty");
  std::memcpy(samples.data(), bytes.data(), bytes.size());
  return TimeSeries(std::move(samples), sample_rate_hz);
}

void write_signal_csv(const std::filesystem::path& path, const TimeSeries& series) {
  auto out = open_output(path);
  out << "# sample_rate_hz=" << format_value(series.sample_rate_hz()) << '\n';
  char buffer[32];
  for (double s : series.samples()) {
    // Signals are written round-trip exact.
    std::snprintf(buffer, sizeof(buffer), "%.17g\n", s);
    out << buffer;
  }
  check_written(out, path);
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix<double>& matrix,
                      Scale scale, const std::string& extra_header) {
  auto out = open_output(path);
  out << "# rows=" << matrix.rows() << " cols=" << matrix.cols() << " scale=" << to_string(scale);
  if (!extra_header.empty()) out << ' ' << extra_header;
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto row = matrix.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format_value(row[c]);
    }
    out << '\n';
  }
  check_written(out, path);
}

MatrixFile read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string header;
  if (!std::getline(in, header) || trim(header).empty() || trim(header).front() != '#') {
    throw FormatError("'" + path.string() + "' lacks a '# rows= cols=' header");
  }
  const auto rows_text = header_value(header, "rows");
  const auto cols_text = header_value(header, "cols");
  if (!rows_text || !cols_text) {
    throw FormatError("'" + path.string() + "' header must give rows= and cols=");
  }
  const auto rows = parse_double(*rows_text);
  const auto cols = parse_double(*cols_text);
  if (!rows || !cols || *rows < 0 || *cols < 0) {
    throw FormatError("'" + path.string() + "' has an invalid shape header");
  }
  MatrixFile file;
  if (auto scale = header_value(header, "scale")) file.scale = parse_scale(*scale);
  file.values = Matrix<double>(static_cast<std::size_t>(*rows), static_cast<std::size_t>(*cols));

  std::string line;
  std::size_t r = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (r >= file.values.rows()) throw FormatError("'" + path.string() + "' has extra rows");
    std::istringstream fields(line);
    std::string field;
    std::size_t c = 0;
    while (std::getline(fields, field, ',')) {
      const auto value = parse_double(field);
      if (!value || c >= file.values.cols()) {
        throw FormatError("'" + path.string() + "' row " + std::to_string(r + 1) +
                          " is malformed");
      }
      file.values(r, c++) = *value;
    }
    if (c != file.values.cols()) {
      throw FormatError("'" + path.string() + "' row " + std::to_string(r + 1) +
                        " has " + std::to_string(c) + " columns");
    }
    ++r;
  }
  if (r != file.values.rows()) {
    throw FormatError("'" + path.string() + "' has " + std::to_string(r) + " rows, header says " +
                      std::to_string(file.values.rows()));
  }
  return file;
}

void write_matrix_f32(const std::filesystem::path& path, const Matrix<double>& matrix) {
  auto out = open_output(path, std::ios::binary);
  const auto rows = static_cast<std::uint32_t>(matrix.rows());
  const auto cols = static_cast<std::uint32_t>(matrix.cols());
  out.write(kBinaryMagic, sizeof(kBinaryMagic));
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  std::vector<float> values(matrix.data().begin(), matrix.data().end());
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(float)));
  check_written(out, path);
}

Matrix<double> read_matrix_f32(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::binary);
  char magic[8];
  std::uint32_t rows = 0, cols = 0;
  in.read(magic, sizeof(magic));
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || std::memcmp(magic, kBinaryMagic, sizeof(magic)) != 0) {
    throw FormatError("'" + path.string() + "' is not an SSMTF32 matrix");
  }
  std::vector<float> values(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(float)));
  if (!in) throw FormatError("'" + path.string() + "' is truncated");
  Matrix<double> matrix(rows, cols);
  std::copy(values.begin(), values.end(), matrix.data().begin());
  return matrix;
}

void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& values) {
  Matrix<double> column(values.size(), 1);
  std::copy(values.begin(), values.end(), column.data().begin());
  write_matrix_csv(path, column, Scale::linear);
}

std::vector<double> read_vector_csv(const std::filesystem::path& path) {
  auto file = read_matrix_csv(path);
  if (file.values.cols() != 1) throw FormatError("'" + path.string() + "' is not a column");
  return file.values.data();
}

}  // namespace ssmt::io
