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

#ifndef HRTFKIT_METRICS_METRICS_HPP_
#define HRTFKIT_METRICS_METRICS_HPP_

#include <string>
#include <vector>

namespace hrtf {

// Evaluation summary for one subject under one sparse configuration.
// Callers pass only unmeasured-direction rows into the metric functions;
// measured rows never contribute to any reported number.
struct MetricsReport {
  std::string subject_id;
  std::string method;
  int num_measured = 0;  // M of the sparse configuration
  double mean_lsd_db = 0.0;
  double ild_error_db = 0.0;
  std::vector<double> per_frequency_lsd_db;  // length F
  std::vector<double> per_direction_lsd_db;  // U x 2, (direction, ear)
  // Barycentric metadata: targets outside the hull, and whether the
  // method fell back to distance weighting entirely.
  int extrapolated_targets = 0;
  bool distance_weighted_fallback = false;
};

// Log-spectral distance for a single (direction, ear) pair of spectra:
// sqrt((1/F) sum_f (pred - truth)^2), both in dB.
double lsd_slice(const double* pred, const double* truth, int num_freqs);

// LSD per (direction, ear); inputs are U x 2 x F row-major. Output has
// U*2 entries in the same (direction, ear) order.
std::vector<double> lsd_per_direction(const std::vector<double>& pred,
                                      const std::vector<double>& truth,
                                      int num_freqs);

// Mean of lsd_per_direction over all 2U (direction, ear) pairs.
double mean_lsd(const std::vector<double>& pred,
                const std::vector<double>& truth, int num_freqs);

// Per-bin RMS of the dB error over all (direction, ear) pairs. The mean
// over bins of its square equals the mean over pairs of the squared
// per-direction LSD.
std::vector<double> lsd_per_frequency(const std::vector<double>& pred,
                                      const std::vector<double>& truth,
                                      int num_freqs);

// Broadband interaural level difference of one direction. slice is
// 2 x F log-magnitudes in dB; energies E_e = sum_f (10^(H/20))^2 and
// ILD = 10 log10(E_left / E_right).
double broadband_ild(const double* slice, int num_freqs);

// Mean absolute broadband-ILD difference over the U directions.
double ild_error(const std::vector<double>& pred,
                 const std::vector<double>& truth, int num_freqs);

// Bundles all metrics for one subject. pred and truth are U x 2 x F over
// the unmeasured directions only.
MetricsReport compute_metrics(const std::vector<double>& pred,
                              const std::vector<double>& truth, int num_freqs,
                              const std::string& subject_id,
                              const std::string& method, int num_measured);

// CSV: one row per subject per configuration.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& report);

// Inverse of header + rows. Per-frequency and per-direction vectors are
// not part of this CSV and come back empty.
std::vector<MetricsReport> metrics_csv_parse(const std::string& text);

// Per-frequency LSD as its own CSV: a header of bin frequencies (Hz),
// then one row per report.
std::string per_frequency_csv(const std::vector<MetricsReport>& reports,
                              const std::vector<double>& frequencies_hz);

// Markdown summary. Rows are methods; per measurement count M one
// "ILD [dB]" and one "LSD [dB]" column, subject-averaged raw values
// rounded to two decimals for display.
std::string metrics_markdown_table(const std::vector<MetricsReport>& reports);

}  // namespace hrtf

#endif  // HRTFKIT_METRICS_METRICS_HPP_
