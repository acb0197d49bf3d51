#pragma once

// Shared helpers for the test executables.

#include <cmath>
#include <filesystem>
#include <string>

#ifndef NPRACE_DATA_DIR
#define NPRACE_DATA_DIR "data"
#endif

namespace nprace::testing {

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(NPRACE_DATA_DIR) / rel; }

/// Central difference of f at x with step h.
template <typename F>
double central_diff(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

/// |a - b| / max(1, |b|).
inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace nprace::testing
