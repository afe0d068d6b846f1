#include "igasens/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace igasens::oracles {

double bessel_j0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_j1(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return 0.5 * x * sum;
}

namespace {
template <class F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}
}  // namespace

double bessel_j0_first_root() {
  static const double root = bisect([](double x) { return bessel_j0(x); }, 2.0, 3.0);
  return root;
}

double bessel_j1_first_root() {
  static const double root = bisect([](double x) { return bessel_j1(x); }, 3.0, 4.5);
  return root;
}

std::vector<double> pillbox_lambda_derivs(double r, int n) {
  if (!(r > 0.0)) throw DomainError("pillbox_lambda_derivs: radius must be positive");
  const double x01 = bessel_j0_first_root();
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  double factorial = 1.0;  // (k+1)!
  double power = r * r;    // r^(2+k)
  double sign = 1.0;
  for (int k = 0; k <= n; ++k) {
    out[static_cast<std::size_t>(k)] = sign * x01 * x01 * factorial / power;
    factorial *= (k + 2);
    power *= r;
    sign = -sign;
  }
  return out;
}

std::vector<double> cube_maxwell_spectrum(double L, int count) {
  if (!(L > 0.0)) throw DomainError("cube_maxwell_spectrum: edge length must be positive");
  if (count < 1) return {};
  const double scale = std::pow(std::numbers::pi / L, 2);
  std::vector<double> values;
  for (int bound = 4;; bound *= 2) {
    values.clear();
    for (int m = 0; m <= bound; ++m)
      for (int n = 0; n <= bound; ++n)
        for (int k = 0; k <= bound; ++k) {
          const int zeros = (m == 0) + (n == 0) + (k == 0);
          if (zeros >= 2) continue;
          const double value = scale * (m * m + n * n + k * k);
          const int multiplicity = (zeros == 0) ? 2 : 1;
          for (int c = 0; c < multiplicity; ++c) values.push_back(value);
        }
    std::sort(values.begin(), values.end());
    // Complete below scale*bound^2; accept once the requested prefix is.
    if (static_cast<int>(values.size()) >= count &&
        values[static_cast<std::size_t>(count - 1)] <= scale * bound * bound)
      break;
  }
  values.resize(static_cast<std::size_t>(count));
  return values;
}

std::vector<double> ClosedFormSpectrum::eigenvalues(int count) const {
  if (count < 1) return {};
  std::vector<double> out;
  switch (problem) {
    case Problem::DiskH1: {
      if (count > 3)
        throw UnsupportedError(
            "ClosedFormSpectrum: disk spectrum is limited to the first three values "
            "(J0/J1 roots only)");
      const double r2 = parameter * parameter;
      const double x01 = bessel_j0_first_root();
      const double x11 = bessel_j1_first_root();
      out = {x01 * x01 / r2, x11 * x11 / r2, x11 * x11 / r2};
      out.resize(static_cast<std::size_t>(count));
      return out;
    }
    case Problem::IntervalH1: {
      for (int k = 1; k <= count; ++k)
        out.push_back(std::pow(k * std::numbers::pi / parameter, 2));
      return out;
    }
    case Problem::SquareH1: {
      const double scale = std::pow(std::numbers::pi / parameter, 2);
      const int bound = count + 2;
      for (int m = 1; m <= bound; ++m)
        for (int n = 1; n <= bound; ++n) out.push_back(scale * (m * m + n * n));
      std::sort(out.begin(), out.end());
      out.resize(static_cast<std::size_t>(count));
      return out;
    }
    case Problem::CubeMaxwell:
      return cube_maxwell_spectrum(parameter, count);
  }
  throw DomainError("ClosedFormSpectrum: unknown problem tag");
}

}  // namespace igasens::oracles
