#include "fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <new>

namespace ssmt::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

std::size_t half_spectrum(std::size_t length) { return length / 2 + 1; }

}  // namespace

UnitaryRealDft::Workspace::Workspace(std::size_t length) {
  in_ = static_cast<double*>(fftw_malloc(sizeof(double) * length));
  out_ = fftw_malloc(sizeof(fftw_complex) * half_spectrum(length));
  if (in_ == nullptr || out_ == nullptr) {
    fftw_free(in_);
    fftw_free(out_);
    throw std::bad_alloc();
  }
}

UnitaryRealDft::Workspace::~Workspace() {
  fftw_free(in_);
  fftw_free(out_);
}

UnitaryRealDft::UnitaryRealDft(std::size_t length) : length_(length) {
  if (length == 0) throw ConfigError("DFT length must be positive");
  Workspace probe(length);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(length), probe.in_,
                               static_cast<fftw_complex*>(probe.out_), FFTW_ESTIMATE);
  if (plan_ == nullptr) throw std::runtime_error("FFTW failed to create a plan");
}

UnitaryRealDft::~UnitaryRealDft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void UnitaryRealDft::transform(std::span<const double> in, std::span<Complex> out,
                               Workspace& workspace) const {
  if (in.size() != length_ || out.size() != length_) {
    throw ConfigError("DFT buffer length mismatch");
  }
  std::memcpy(workspace.in_, in.data(), sizeof(double) * length_);
  auto* spectrum = static_cast<fftw_complex*>(workspace.out_);
  // New-array execution is thread-safe; fftw_malloc buffers share alignment.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_), workspace.in_, spectrum);

  const double scale = 1.0 / std::sqrt(static_cast<double>(length_));
  const std::size_t half = half_spectrum(length_);
  for (std::size_t j = 0; j < half; ++j) {
    out[j] = Complex(spectrum[j][0] * scale, spectrum[j][1] * scale);
  }
  for (std::size_t j = half; j < length_; ++j) out[j] = std::conj(out[length_ - j]);
}

}  // namespace ssmt::detail
