#include "pdflow/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace pdflow {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path dir = target.parent_path().empty() ? fs::path(".")
                                                    : target.parent_path();
  const fs::path tmp = dir / ("." + target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.good()) throw NumericError("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  if (std::isnan(v)) return "nan";
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string results_csv(const std::vector<StatReport>& reports) {
  std::ostringstream out;
  out << "# pdflow-results-v1\n";
  out << "kind,params,estimate,stderr,reference,reference_error,z,ks_p,pass,"
         "seed,T,h,note\n";
  for (const StatReport& r : reports) {
    out << r.kind << ',' << r.params << ',' << format_double(r.estimate) << ','
        << format_double(r.stderr_) << ',' << format_double(r.reference) << ','
        << format_double(r.reference_error) << ',' << format_double(r.z) << ','
        << (r.ks_p ? format_double(*r.ks_p) : std::string("-")) << ','
        << (r.pass ? "1" : "0") << ',' << r.seed << ',' << format_double(r.T)
        << ',' << format_double(r.h) << ',' << r.note << '\n';
  }
  return out.str();
}

std::string report_text(const std::vector<StatReport>& reports) {
  std::ostringstream out;
  int passed = 0;
  for (const StatReport& r : reports) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.kind;
    if (!r.params.empty()) out << " (" << r.params << ")";
    out << " estimate=" << format_double(r.estimate);
    if (r.stderr_ != 0.0) out << " stderr=" << format_double(r.stderr_);
    out << " reference=" << format_double(r.reference);
    out << " z=" << format_double(r.z);
    if (r.ks_p) out << " ks_p=" << format_double(*r.ks_p);
    if (!r.note.empty()) out << " | " << r.note;
    out << '\n';
    if (r.pass) ++passed;
  }
  out << passed << "/" << reports.size() << " checks passed\n";
  return out.str();
}

std::string path_csv(const PathSample& path) {
  std::ostringstream out;
  out << "# pdflow-path-v1\n";
  out << "time,particle,row,col,value\n";
  for (size_t k = 0; k < path.times.size(); ++k) {
    for (size_t p = 0; p < path.states[k].size(); ++p) {
      const Matrix& m = path.states[k][p];
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          out << format_double(path.times[k]) << ',' << p << ',' << i << ','
              << j << ',' << format_double(m(i, j)) << '\n';
    }
  }
  return out.str();
}

std::string labelled_csv(const LabelledSeries& series) {
  std::ostringstream out;
  out << "# pdflow-toda-v1\n";
  out << "time,object,row,col,value\n";
  for (size_t k = 0; k < series.times.size(); ++k) {
    for (size_t p = 0; p < series.labels.size(); ++p) {
      const Matrix& m = series.values[k][p];
      for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
          out << format_double(series.times[k]) << ',' << series.labels[p]
              << ',' << i << ',' << j << ',' << format_double(m(i, j)) << '\n';
    }
  }
  return out.str();
}

std::string eval_csv(const std::vector<std::vector<double>>& inputs,
                     const std::vector<double>& values,
                     const std::vector<double>& errors) {
  std::ostringstream out;
  out << "# pdflow-specfun-v1\n";
  const size_t k = inputs.empty() ? 0 : inputs[0].size();
  for (size_t i = 0; i < k; ++i) out << "in" << i << ',';
  out << "value,error\n";
  for (size_t r = 0; r < values.size(); ++r) {
    for (size_t i = 0; i < k; ++i) out << format_double(inputs[r][i]) << ',';
    out << format_double(values[r]) << ',' << format_double(errors[r]) << '\n';
  }
  return out.str();
}

}  // namespace pdflow
