#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "affect/audio.hpp"

namespace affect::audio {

namespace {

// Planner calls are not thread-safe in FFTW; execution with new-array
// functions is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

struct PlanDeleter {
  void operator()(fftw_plan p) const noexcept {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// Triangular filters on the FFT bin grid, HTK mel scale, 0 Hz to Nyquist.
std::vector<std::vector<double>> mel_filterbank(const MfccOptions& o) {
  const std::size_t bins = o.fft_size / 2 + 1;
  const double nyquist = o.sample_rate / 2.0;
  const double mel_hi = hz_to_mel(nyquist);
  std::vector<double> centers(o.mel_bins + 2);
  for (std::size_t i = 0; i < centers.size(); ++i) {
    centers[i] = mel_to_hz(mel_hi * static_cast<double>(i) / static_cast<double>(o.mel_bins + 1));
  }
  std::vector<std::vector<double>> bank(o.mel_bins, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < o.mel_bins; ++m) {
    const double left = centers[m], mid = centers[m + 1], right = centers[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * o.sample_rate / static_cast<double>(o.fft_size);
      if (hz > left && hz <= mid) {
        bank[m][k] = (hz - left) / (mid - left);
      } else if (hz > mid && hz < right) {
        bank[m][k] = (right - hz) / (right - mid);
      }
    }
  }
  return bank;
}

}  // namespace

std::vector<std::vector<double>> compute_mfcc(std::span<const double> samples, const MfccOptions& o) {
  if (samples.size() < o.frame_length || o.frame_length > o.fft_size) return {};
  const std::size_t frames = 1 + (samples.size() - o.frame_length) / o.frame_shift;
  const std::size_t bins = o.fft_size / 2 + 1;

  std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * o.fft_size)));
  std::unique_ptr<fftw_complex, FftwFree> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
  PlanPtr plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(o.fft_size), in.get(), out.get(), FFTW_ESTIMATE));
  }

  std::vector<double> window(o.frame_length);
  for (std::size_t i = 0; i < o.frame_length; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(o.frame_length - 1));
  }
  const auto bank = mel_filterbank(o);

  // Orthonormal DCT-II basis.
  std::vector<std::vector<double>> dct(o.num_ceps, std::vector<double>(o.mel_bins));
  for (std::size_t k = 0; k < o.num_ceps; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(o.mel_bins));
    for (std::size_t n = 0; n < o.mel_bins; ++n) {
      dct[k][n] = scale * std::cos(std::numbers::pi * static_cast<double>(k) * (2.0 * static_cast<double>(n) + 1.0) /
                                   (2.0 * static_cast<double>(o.mel_bins)));
    }
  }

  std::vector<std::vector<double>> result(frames, std::vector<double>(o.num_ceps));
  std::vector<double> power(bins);
  std::vector<double> log_mel(o.mel_bins);
  for (std::size_t f = 0; f < frames; ++f) {
    const double* frame = samples.data() + f * o.frame_shift;
    double* buf = in.get();
    double mean = 0.0;
    for (std::size_t i = 0; i < o.frame_length; ++i) mean += frame[i];
    mean /= static_cast<double>(o.frame_length);
    // DC removal, pre-emphasis 0.97, Hamming window, zero padding.
    double prev = frame[0] - mean;
    for (std::size_t i = 0; i < o.frame_length; ++i) {
      const double x = frame[i] - mean;
      buf[i] = (x - 0.97 * prev) * window[i];
      prev = x;
    }
    for (std::size_t i = o.frame_length; i < o.fft_size; ++i) buf[i] = 0.0;

    fftw_execute_dft_r2c(plan.get(), in.get(), out.get());
    for (std::size_t k = 0; k < bins; ++k) {
      power[k] = out.get()[k][0] * out.get()[k][0] + out.get()[k][1] * out.get()[k][1];
    }
    for (std::size_t m = 0; m < o.mel_bins; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) e += bank[m][k] * power[k];
      log_mel[m] = std::log(std::max(e, 1e-10));
    }
    for (std::size_t k = 0; k < o.num_ceps; ++k) {
      double c = 0.0;
      for (std::size_t n = 0; n < o.mel_bins; ++n) c += dct[k][n] * log_mel[n];
      result[f][k] = c;
    }
  }
  return result;
}

}  // namespace affect::audio
