#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace sonoforge::detail {

/// Thin value-semantics wrapper over Eigen's FFT; one instance per
/// spectrogram/convolution call, reused across frames (plans are cached
/// inside the instance, no global state).
class Fft {
 public:
  std::vector<std::complex<double>> forward(const std::vector<double>& in) {
    std::vector<std::complex<double>> out;
    impl_.fwd(out, in);
    return out;  // full spectrum, length in.size()
  }

  std::vector<std::complex<double>> forward(
      const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out;
    impl_.fwd(out, in);
    return out;
  }

  std::vector<std::complex<double>> inverse(
      const std::vector<std::complex<double>>& in) {
    std::vector<std::complex<double>> out;
    impl_.inv(out, in);  // scaled by 1/N
    return out;
  }

 private:
  Eigen::FFT<double> impl_;
};

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace sonoforge::detail
