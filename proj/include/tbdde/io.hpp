#pragma once

#include <cstdio>
#include <ostream>
#include <string>

#include "tbdde/detect.hpp"

namespace tbdde {

/// Shortest round-trip decimal rendering, stable across runs.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  for (int prec = 1; prec < 17; ++prec) {
    char cand[32];
    std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
    std::sscanf(cand, "%lf", &back);
    if (back == v) return cand;
  }
  return buf;
}

/// Trajectory CSV: header k,t,z_1..z_n,dz_1..dz_n; one row per step with a
/// recorded difference quotient.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& t) {
  os << "k,t";
  for (int i = 1; i <= t.n; ++i) os << ",z_" << i;
  for (int i = 1; i <= t.n; ++i) os << ",dz_" << i;
  os << "\n";
  for (long k = 0; k < t.dz.rows(); ++k) {
    os << k << "," << format_double(k * t.eps());
    for (int i = 0; i < t.n; ++i) os << "," << format_double(t.z(k, i));
    for (int i = 0; i < t.n; ++i) os << "," << format_double(t.dz(k, i));
    os << "\n";
  }
}

inline void write_detection_csv_header(std::ostream& os) {
  os << "alpha2,alpha1_detected,residual,iterations,criterion\n";
}

inline void write_detection_csv_row(std::ostream& os, const DetectionResult& r) {
  os << format_double(r.alpha2) << "," << format_double(r.alpha1) << ","
     << format_double(r.residual) << "," << r.iterations << "," << r.criterion << "\n";
}

}  // namespace tbdde
