// Copyright 2026 The hrtfkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "core/error.hpp"

namespace hrtf {

namespace {

// U from a pair of U x 2 x F payloads, with shape validation.
size_t checked_num_dirs(const std::vector<double>& pred,
                        const std::vector<double>& truth, int num_freqs) {
  if (num_freqs <= 0) throw_invalid("metrics: num_freqs must be positive");
  if (pred.size() != truth.size()) {
    throw_invalid("metrics: pred and truth sizes differ");
  }
  const size_t row = 2 * static_cast<size_t>(num_freqs);
  if (pred.empty() || pred.size() % row != 0) {
    throw_invalid("metrics: payload is not a whole number of U x 2 x F rows");
  }
  return pred.size() / row;
}

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string format_f2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

double lsd_slice(const double* pred, const double* truth, int num_freqs) {
  double acc = 0.0;
  for (int f = 0; f < num_freqs; ++f) {
    const double d = pred[f] - truth[f];
    acc += d * d;
  }
  return std::sqrt(acc / num_freqs);
}

std::vector<double> lsd_per_direction(const std::vector<double>& pred,
                                      const std::vector<double>& truth,
                                      int num_freqs) {
  const size_t num_dirs = checked_num_dirs(pred, truth, num_freqs);
  std::vector<double> out;
  out.reserve(num_dirs * 2);
  const size_t stride = static_cast<size_t>(num_freqs);
  for (size_t i = 0; i < num_dirs * 2; ++i) {
    out.push_back(
        lsd_slice(pred.data() + i * stride, truth.data() + i * stride, num_freqs));
  }
  return out;
}

double mean_lsd(const std::vector<double>& pred,
                const std::vector<double>& truth, int num_freqs) {
  const std::vector<double> per_dir = lsd_per_direction(pred, truth, num_freqs);
  double acc = 0.0;
  for (double v : per_dir) acc += v;
  return acc / static_cast<double>(per_dir.size());
}

std::vector<double> lsd_per_frequency(const std::vector<double>& pred,
                                      const std::vector<double>& truth,
                                      int num_freqs) {
  const size_t num_dirs = checked_num_dirs(pred, truth, num_freqs);
  std::vector<double> acc(static_cast<size_t>(num_freqs), 0.0);
  const size_t stride = static_cast<size_t>(num_freqs);
  for (size_t i = 0; i < num_dirs * 2; ++i) {
    const double* p = pred.data() + i * stride;
    const double* t = truth.data() + i * stride;
    for (int f = 0; f < num_freqs; ++f) {
      const double d = p[f] - t[f];
      acc[static_cast<size_t>(f)] += d * d;
    }
  }
  const double denom = static_cast<double>(2 * num_dirs);
  for (double& v : acc) v = std::sqrt(v / denom);
  return acc;
}

double broadband_ild(const double* slice, int num_freqs) {
  double e_left = 0.0;
  double e_right = 0.0;
  for (int f = 0; f < num_freqs; ++f) {
    const double ml = std::pow(10.0, slice[f] / 20.0);
    const double mr = std::pow(10.0, slice[num_freqs + f] / 20.0);
    e_left += ml * ml;
    e_right += mr * mr;
  }
  return 10.0 * std::log10(e_left / e_right);
}

double ild_error(const std::vector<double>& pred,
                 const std::vector<double>& truth, int num_freqs) {
  const size_t num_dirs = checked_num_dirs(pred, truth, num_freqs);
  const size_t row = 2 * static_cast<size_t>(num_freqs);
  double acc = 0.0;
  for (size_t d = 0; d < num_dirs; ++d) {
    const double ild_pred = broadband_ild(pred.data() + d * row, num_freqs);
    const double ild_truth = broadband_ild(truth.data() + d * row, num_freqs);
    acc += std::abs(ild_truth - ild_pred);
  }
  return acc / static_cast<double>(num_dirs);
}

MetricsReport compute_metrics(const std::vector<double>& pred,
                              const std::vector<double>& truth, int num_freqs,
                              const std::string& subject_id,
                              const std::string& method, int num_measured) {
  MetricsReport report;
  report.subject_id = subject_id;
  report.method = method;
  report.num_measured = num_measured;
  report.per_direction_lsd_db = lsd_per_direction(pred, truth, num_freqs);
  double acc = 0.0;
  for (double v : report.per_direction_lsd_db) acc += v;
  report.mean_lsd_db = acc / static_cast<double>(report.per_direction_lsd_db.size());
  report.per_frequency_lsd_db = lsd_per_frequency(pred, truth, num_freqs);
  report.ild_error_db = ild_error(pred, truth, num_freqs);
  return report;
}

std::string metrics_csv_header() {
  return "subject_id,method,num_measured,mean_lsd_db,ild_error_db,"
         "extrapolated_targets,distance_weighted_fallback\n";
}

std::string metrics_csv_row(const MetricsReport& report) {
  std::string row;
  row += report.subject_id;
  row += ',';
  row += report.method;
  row += ',';
  row += std::to_string(report.num_measured);
  row += ',';
  row += format_g9(report.mean_lsd_db);
  row += ',';
  row += format_g9(report.ild_error_db);
  row += ',';
  row += std::to_string(report.extrapolated_targets);
  row += ',';
  row += report.distance_weighted_fallback ? "1" : "0";
  row += '\n';
  return row;
}

std::vector<MetricsReport> metrics_csv_parse(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) lines.push_back(current);
  if (lines.empty() || lines[0] + "\n" != metrics_csv_header()) {
    throw_format("metrics csv: missing or unexpected header row");
  }
  std::vector<MetricsReport> reports;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    for (char c : lines[i]) {
      if (c == ',') {
        fields.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    fields.push_back(field);
    if (fields.size() != 7) {
      throw_format("metrics csv line " + std::to_string(i + 1) + ": expected 7 fields, found " +
                   std::to_string(fields.size()));
    }
    MetricsReport r;
    r.subject_id = fields[0];
    r.method = fields[1];
    try {
      r.num_measured = std::stoi(fields[2]);
      r.mean_lsd_db = std::stod(fields[3]);
      r.ild_error_db = std::stod(fields[4]);
      r.extrapolated_targets = std::stoi(fields[5]);
      r.distance_weighted_fallback = fields[6] == "1";
    } catch (const std::exception&) {
      throw_format("metrics csv line " + std::to_string(i + 1) + ": malformed numeric field");
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

std::string per_frequency_csv(const std::vector<MetricsReport>& reports,
                              const std::vector<double>& frequencies_hz) {
  std::string out = "subject_id,method,num_measured";
  for (double f : frequencies_hz) {
    out += ',';
    out += format_g9(f);
  }
  out += '\n';
  for (const MetricsReport& r : reports) {
    if (r.per_frequency_lsd_db.size() != frequencies_hz.size()) {
      throw_invalid("per_frequency_csv: report bin count does not match grid");
    }
    out += r.subject_id;
    out += ',';
    out += r.method;
    out += ',';
    out += std::to_string(r.num_measured);
    for (double v : r.per_frequency_lsd_db) {
      out += ',';
      out += format_g9(v);
    }
    out += '\n';
  }
  return out;
}

std::string metrics_markdown_table(const std::vector<MetricsReport>& reports) {
  // Column order follows first appearance of each measurement count;
  // row order follows first appearance of each method.
  std::vector<int> ms;
  std::vector<std::string> methods;
  struct Cell {
    double lsd_sum = 0.0;
    double ild_sum = 0.0;
    int count = 0;
  };
  std::map<std::pair<std::string, int>, Cell> cells;
  for (const MetricsReport& r : reports) {
    if (std::find(ms.begin(), ms.end(), r.num_measured) == ms.end()) {
      ms.push_back(r.num_measured);
    }
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    Cell& c = cells[{r.method, r.num_measured}];
    c.lsd_sum += r.mean_lsd_db;
    c.ild_sum += r.ild_error_db;
    c.count += 1;
  }

  std::string out = "| Methods |";
  for (int m : ms) {
    out += " ILD [dB] (M=" + std::to_string(m) + ") |";
    out += " LSD [dB] (M=" + std::to_string(m) + ") |";
  }
  out += "\n|---|";
  for (size_t i = 0; i < ms.size(); ++i) out += "---|---|";
  out += "\n";
  for (const std::string& method : methods) {
    out += "| " + method + " |";
    for (int m : ms) {
      const auto it = cells.find({method, m});
      if (it == cells.end() || it->second.count == 0) {
        out += " - | - |";
      } else {
        out += " " + format_f2(it->second.ild_sum / it->second.count) + " |";
        out += " " + format_f2(it->second.lsd_sum / it->second.count) + " |";
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace hrtf
