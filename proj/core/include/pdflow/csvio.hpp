#pragma once

#include <string>
#include <vector>

#include "pdflow/sde.hpp"
#include "pdflow/stats.hpp"

namespace pdflow {

/// Writes content to <path> through a temp file + rename, so files appear
/// only when complete.
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);

/// results.csv body: one row per check. Schema is versioned in the first line.
std::string results_csv(const std::vector<StatReport>& reports);

/// Human-readable per-check summary, one line each plus a tail count.
std::string report_text(const std::vector<StatReport>& reports);

/// Path export: time,particle,row,col,value.
std::string path_csv(const PathSample& path);

/// Trajectory export for labelled matrix series: time,object,row,col,value.
struct LabelledSeries {
  std::vector<double> times;
  std::vector<std::string> labels;            // per object
  std::vector<std::vector<Matrix>> values;    // [time][object]
};
std::string labelled_csv(const LabelledSeries& series);

/// Function-evaluation export: in0,...,inK,value,error.
std::string eval_csv(const std::vector<std::vector<double>>& inputs,
                     const std::vector<double>& values,
                     const std::vector<double>& errors);

}  // namespace pdflow
