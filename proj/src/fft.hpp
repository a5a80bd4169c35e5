#ifndef SSMT_SRC_FFT_HPP
#define SSMT_SRC_FFT_HPP

#include <cstddef>
#include <memory>
#include <span>

#include "ssmt/types.hpp"

namespace ssmt::detail {

/// Unitary real-to-complex DFT of a fixed length J:
///   out[j] = J^{-1/2} sum_l in[l] exp(-i 2 pi l j / J),  j = 0..J-1.
/// The full conjugate-symmetric spectrum is written. Backed by an FFTW plan
/// that is created once (under a global planner lock) and then executed on
/// per-call scratch buffers, so one instance may be used from many threads.
class UnitaryRealDft {
 public:
  explicit UnitaryRealDft(std::size_t length);
  ~UnitaryRealDft();
  UnitaryRealDft(const UnitaryRealDft&) = delete;
  UnitaryRealDft& operator=(const UnitaryRealDft&) = delete;

  std::size_t length() const noexcept { return length_; }

  /// Scratch space for one thread. Not shareable between threads.
  class Workspace {
   public:
    explicit Workspace(std::size_t length);
    ~Workspace();
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;

   private:
    friend class UnitaryRealDft;
    double* in_ = nullptr;
    void* out_ = nullptr;
  };

  void transform(std::span<const double> in, std::span<Complex> out,
                 Workspace& workspace) const;

 private:
  std::size_t length_;
  void* plan_ = nullptr;
};

}  // namespace ssmt::detail

#endif  // SSMT_SRC_FFT_HPP
