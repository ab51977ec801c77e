#pragma once

#include <map>
#include <string>
#include <vector>

#include "shrinker/entropy.hpp"
#include "shrinker/sweepout.hpp"
#include "shrinker/tightening.hpp"
#include "shrinker/variation.hpp"

namespace shrinker {

inline constexpr const char* kVersion = "0.1.0";

// 9 significant digits, locale independent.
std::string fmt9(double v);

std::string entropy_grid_csv(const EntropyResult& r);    // x0x,x0y,x0z,t0,F
std::string tighten_trace_csv(const TightenResult& r);   // step,F,case,gamma,dt
std::string width_grid_csv(const WidthReport& r);        // t1,t2,t3,tau,F
std::string flow_csv(const FlowTrajectory& f);           // step,F,dt,residual_sup

// JSON documents (pretty-printed, keys sorted).
std::string entropy_json(const EntropyResult& r);
std::string tighten_json(const TightenResult& r);
std::string width_json(const WidthReport& r);
std::string spectrum_json(const StabilitySpectrum& s);
std::string minmax_json(const MinmaxLocation& m);
// Plane slices as {normal, offset}; mesh and empty slices by kind only.
std::string slice_json(const Slice& s);

struct Manifest {
  std::string command;
  std::map<std::string, std::string> config;  // merged key=value settings
  double wall_seconds = 0;
  std::vector<std::string> outputs;
};
std::string manifest_json(const Manifest& m);

// Writes atomically enough for our purposes; E_IO on failure.
void write_text(const std::string& path, const std::string& content);

}  // namespace shrinker
