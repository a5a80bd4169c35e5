#ifndef SSMT_IO_HPP
#define SSMT_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssmt/kalman.hpp"
#include "ssmt/segmentation.hpp"
#include "ssmt/spectrogram.hpp"

namespace ssmt::io {

/// File-level failures (unreadable, malformed). Reported as data errors.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

/// One sample per line. Blank lines are ignored; lines starting with '#' are
/// comments, and a "# sample_rate_hz=<value>" comment supplies the rate. A
/// first line that does not parse as a number is treated as a column header.
/// sample_rate_hz, when given, overrides the file's own value.
TimeSeries read_signal_csv(const std::filesystem::path& path,
                           std::optional<double> sample_rate_hz = std::nullopt);

/// Raw little-endian IEEE-754 doubles, no header.
TimeSeries read_signal_f64(const std::filesystem::path& path, double sample_rate_hz);

void write_signal_csv(const std::filesystem::path& path, const TimeSeries& series);

/// "# rows=K cols=J scale=<linear|dB>[ key=value ...]" followed by K lines of
/// J comma-separated values printed with 9 significant digits.
void write_matrix_csv(const std::filesystem::path& path, const Matrix<double>& matrix,
                      Scale scale, const std::string& extra_header = {});

struct MatrixFile {
  Matrix<double> values;
  Scale scale = Scale::linear;
};
MatrixFile read_matrix_csv(const std::filesystem::path& path);

/// 16-byte header: the 8 magic bytes "SSMTF32\0", then rows and cols as
/// little-endian uint32, followed by rows * cols little-endian float32 values.
inline constexpr char kBinaryMagic[8] = {'S', 'S', 'M', 'T', 'F', '3', '2', '\0'};
void write_matrix_f32(const std::filesystem::path& path, const Matrix<double>& matrix);
Matrix<double> read_matrix_f32(const std::filesystem::path& path);

/// Single-column CSV ("# rows=N cols=1 scale=linear").
void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& values);
std::vector<double> read_vector_csv(const std::filesystem::path& path);

std::string format_value(double value);

}  // namespace ssmt::io

#endif  // SSMT_IO_HPP
