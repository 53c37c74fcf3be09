#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

#include "kci/errors.hpp"

namespace kci::detail {

// Cached FFTW plans for the type-I discrete sine transform (RODFT00).
// Plans are built once per size with FFTW_UNALIGNED so they can execute on any
// caller buffer; execution is thread-safe, creation is serialized.
class SinePlans {
 public:
  static fftw_plan get(int n) {
    static SinePlans reg;
    std::lock_guard<std::mutex> lock(reg.mutex_);
    auto it = reg.plans_.find(n);
    if (it != reg.plans_.end()) return it->second;
    std::vector<double> in(static_cast<size_t>(n)), out(static_cast<size_t>(n));
    fftw_plan p = fftw_plan_r2r_1d(n, in.data(), out.data(), FFTW_RODFT00,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw numerical_error("sine transform plan creation failed, n=" + std::to_string(n));
    reg.plans_.emplace(n, p);
    return p;
  }

 private:
  SinePlans() = default;
  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

// raw DST-I: out_k = 2 sum_{i=1..n} in_i sin(pi i k / (n+1)), k = 1..n.
// Self-inverse up to the factor 2(n+1).
inline void dst_raw(const double* in, double* out, int n) {
  fftw_execute_r2r(SinePlans::get(n), const_cast<double*>(in), out);
}

// values -> sine coefficients of u(x) = sum_k c_k sin(k pi x / L)
inline void sine_coeffs(const std::vector<double>& values, std::vector<double>& coeffs) {
  int n = static_cast<int>(values.size());
  coeffs.resize(values.size());
  dst_raw(values.data(), coeffs.data(), n);
  const double s = 1.0 / (n + 1);
  for (auto& c : coeffs) c *= s;
}

// sine coefficients -> nodal values
inline void sine_values(const std::vector<double>& coeffs, std::vector<double>& values) {
  int n = static_cast<int>(coeffs.size());
  values.resize(coeffs.size());
  dst_raw(coeffs.data(), values.data(), n);
  for (auto& v : values) v *= 0.5;
}

}  // namespace kci::detail
