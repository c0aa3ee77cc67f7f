#include "diraclab/analysis.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>

namespace diraclab {

std::vector<double> affine_residuals(const std::vector<double>& t, const std::vector<double>& y) {
  auto [slope, icept] = line_fit(t, y);
  std::vector<double> r(y.size());
  for (size_t i = 0; i < y.size(); ++i) r[i] = y[i] - (icept + slope * t[i]);
  return r;
}

double max_affine_residual(const std::vector<double>& t, const std::vector<double>& y) {
  double m = 0.0;
  for (double r : affine_residuals(t, y)) m = std::max(m, std::abs(r));
  return m;
}

double dominant_frequency_recurrence(const std::vector<double>& y, double dt) {
  std::vector<double> t(y.size());
  for (size_t i = 0; i < y.size(); ++i) t[i] = static_cast<double>(i);
  std::vector<double> r = affine_residuals(t, y);
  double num = 0.0, den = 0.0;
  for (size_t i = 1; i + 1 < r.size(); ++i) {
    num += r[i] * (r[i + 1] + r[i - 1]);
    den += 2.0 * r[i] * r[i];
  }
  if (den < 1e-300) throw NumericalFailure("frequency fit on a vanishing residual");
  double c = std::clamp(num / den, -1.0, 1.0);
  return std::acos(c) / dt;
}

double dominant_frequency_fft(const std::vector<double>& y, double dt) {
  const size_t n = y.size();
  std::vector<double> t(n);
  for (size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i);
  std::vector<double> r = affine_residuals(t, y);

  std::vector<std::complex<double>> in(n), out(n);
  for (size_t i = 0; i < n; ++i) {
    // Hann window tames leakage of the detrended series
    double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / (n - 1));
    in[i] = r[i] * w;
  }
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  size_t best = 1;
  double best_mag = 0.0;
  for (size_t k = 1; k < n / 2; ++k) {
    double m = std::abs(out[k]);
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  double km = static_cast<double>(best);
  if (best > 1 && best + 1 < n / 2) {
    double la = std::log(std::abs(out[best - 1]) + 1e-300);
    double lb = std::log(std::abs(out[best]) + 1e-300);
    double lc = std::log(std::abs(out[best + 1]) + 1e-300);
    double denom = la - 2 * lb + lc;
    if (std::abs(denom) > 1e-12) km += 0.5 * (la - lc) / denom;
  }
  return 2.0 * M_PI * km / (n * dt);
}

}  // namespace diraclab
