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

#include "hrtf/hrtf.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "core/error.hpp"
#include "core/hrtf_set.hpp"
#include "dataio/container.hpp"
#include "dataio/correlation.hpp"
#include "dataio/subset.hpp"
#include "dataio/synthetic.hpp"
#include "metrics/metrics.hpp"
#include "model/fd_model.hpp"
#include "train/trainer.hpp"

struct hrtf_dataset {
  std::vector<hrtf::HrtfSet> sets;
};

struct hrtf_sparse {
  hrtf::SparseConfig cfg;
};

struct hrtf_model {
  hrtf::ModelConfig cfg;
  std::shared_ptr<hrtf::FdModel<float>> model;
  // Weights-plus-optimizer snapshot in sync with the model; hrtf_model_save
  // writes exactly these bytes, keeping save/load round-trips bit-exact.
  hrtf::Checkpoint snapshot;
};

struct hrtf_eval {
  hrtf::EvalResult result;
  std::vector<double> frequencies_hz;
};

namespace {

thread_local std::string g_last_error;

hrtf_status status_of(hrtf::ErrorCode code) {
  switch (code) {
    case hrtf::ErrorCode::kInvalidArgument:
      return HRTF_ERR_INVALID_ARGUMENT;
    case hrtf::ErrorCode::kIo:
      return HRTF_ERR_IO;
    case hrtf::ErrorCode::kFormat:
      return HRTF_ERR_FORMAT;
    case hrtf::ErrorCode::kNumeric:
      return HRTF_ERR_NUMERIC;
    case hrtf::ErrorCode::kInternal:
      return HRTF_ERR_INTERNAL;
  }
  return HRTF_ERR_INTERNAL;
}

template <typename Fn>
hrtf_status guarded(Fn&& fn) {
  try {
    fn();
    return HRTF_OK;
  } catch (const hrtf::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HRTF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return HRTF_ERR_INTERNAL;
  }
}

hrtf_status fail_invalid(const std::string& message) {
  g_last_error = message;
  return HRTF_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const hrtf::HrtfSet& subject_at(const hrtf_dataset* ds, int subject) {
  if (subject < 0 || subject >= static_cast<int>(ds->sets.size())) {
    hrtf::throw_invalid("subject index " + std::to_string(subject) +
                        " out of range for " + std::to_string(ds->sets.size()) +
                        " subjects");
  }
  return ds->sets[static_cast<size_t>(subject)];
}

hrtf::Checkpoint init_snapshot(const hrtf::FdModel<float>& model) {
  return hrtf::make_checkpoint(model, static_cast<const hrtf::Adam<float>*>(nullptr),
                               0, std::numeric_limits<double>::infinity());
}

}  // namespace

extern "C" {

const char* hrtf_version(void) { return "0.1.0"; }

const char* hrtf_last_error(void) { return g_last_error.c_str(); }

void hrtf_string_free(char* s) { std::free(s); }

int hrtf_set_threads(int n) {
  (void)n;
  return 1;
}

/* -------------------------------------------------------------------- */

hrtf_status hrtf_dataset_synth(uint64_t seed, int subjects, int num_directions,
                               int num_freqs, int sh_order, int notch_count,
                               hrtf_dataset** out) {
  if (out == nullptr) return fail_invalid("out must not be null");
  return guarded([&]() {
    if (subjects < 1 || num_directions < 1 || num_freqs < 1) {
      hrtf::throw_invalid("subjects, directions, and freqs must be positive");
    }
    hrtf::SyntheticSpec spec;
    spec.seed = seed;
    spec.n_subjects = static_cast<uint32_t>(subjects);
    spec.num_directions = static_cast<uint32_t>(num_directions);
    spec.num_freqs = static_cast<uint32_t>(num_freqs);
    spec.sh_order = sh_order;
    spec.notch_count = notch_count;
    auto ds = std::make_unique<hrtf_dataset>();
    ds->sets = hrtf::generate_synthetic(spec);
    *out = ds.release();
  });
}

hrtf_status hrtf_dataset_load(const char* path, hrtf_dataset** out) {
  if (path == nullptr || out == nullptr) return fail_invalid("path and out must not be null");
  return guarded([&]() {
    auto ds = std::make_unique<hrtf_dataset>();
    if (std::filesystem::is_directory(path)) {
      for (const std::string& file : hrtf::list_dataset_files(path)) {
        ds->sets.push_back(hrtf::read_set(file));
      }
      if (ds->sets.empty()) {
        hrtf::throw_io(std::string("no .hrtfset files in ") + path);
      }
    } else {
      ds->sets.push_back(hrtf::read_set(path));
    }
    *out = ds.release();
  });
}

hrtf_status hrtf_dataset_save(const hrtf_dataset* ds, const char* dir) {
  if (ds == nullptr || dir == nullptr) return fail_invalid("dataset and dir must not be null");
  return guarded([&]() {
    std::filesystem::create_directories(dir);
    for (const hrtf::HrtfSet& set : ds->sets) {
      hrtf::write_set(set, (std::filesystem::path(dir) / (set.subject_id() + ".hrtfset")).string());
    }
  });
}

hrtf_status hrtf_dataset_slice(const hrtf_dataset* ds, int begin, int count,
                               hrtf_dataset** out) {
  if (ds == nullptr || out == nullptr) return fail_invalid("dataset and out must not be null");
  return guarded([&]() {
    if (begin < 0 || count < 0 ||
        begin + count > static_cast<int>(ds->sets.size())) {
      hrtf::throw_invalid("slice [" + std::to_string(begin) + ", " +
                          std::to_string(begin + count) + ") out of range for " +
                          std::to_string(ds->sets.size()) + " subjects");
    }
    auto sliced = std::make_unique<hrtf_dataset>();
    sliced->sets.assign(ds->sets.begin() + begin, ds->sets.begin() + begin + count);
    *out = sliced.release();
  });
}

hrtf_status hrtf_dataset_with_values(const hrtf_dataset* ds, int subject,
                                     const double* values, size_t n,
                                     hrtf_dataset** out) {
  if (ds == nullptr || values == nullptr || out == nullptr) {
    return fail_invalid("dataset, values, and out must not be null");
  }
  return guarded([&]() {
    const hrtf::HrtfSet& base = subject_at(ds, subject);
    const size_t expect = static_cast<size_t>(base.num_directions()) * hrtf::kNumEars *
                          base.num_freqs();
    if (n != expect) {
      hrtf::throw_invalid("expected " + std::to_string(expect) + " values, got " +
                          std::to_string(n));
    }
    std::vector<float> logmag(n);
    for (size_t i = 0; i < n; ++i) logmag[i] = static_cast<float>(values[i]);
    auto single = std::make_unique<hrtf_dataset>();
    single->sets.emplace_back(base.subject_id(), base.directions(), base.freq_grid(),
                              base.sample_rate_hz(), std::move(logmag));
    *out = single.release();
  });
}

void hrtf_dataset_free(hrtf_dataset* ds) { delete ds; }

int hrtf_dataset_size(const hrtf_dataset* ds) {
  return ds == nullptr ? -1 : static_cast<int>(ds->sets.size());
}

int hrtf_dataset_num_directions(const hrtf_dataset* ds) {
  return (ds == nullptr || ds->sets.empty()) ? -1 : ds->sets[0].num_directions();
}

int hrtf_dataset_num_freqs(const hrtf_dataset* ds) {
  return (ds == nullptr || ds->sets.empty()) ? -1 : ds->sets[0].num_freqs();
}

hrtf_status hrtf_dataset_subject_id(const hrtf_dataset* ds, int subject, char** out) {
  if (ds == nullptr || out == nullptr) return fail_invalid("dataset and out must not be null");
  return guarded([&]() { *out = copy_string(subject_at(ds, subject).subject_id()); });
}

hrtf_status hrtf_dataset_values(const hrtf_dataset* ds, int subject, float* out,
                                size_t cap) {
  if (ds == nullptr || out == nullptr) return fail_invalid("dataset and out must not be null");
  return guarded([&]() {
    const hrtf::HrtfSet& set = subject_at(ds, subject);
    const std::vector<float>& v = set.logmag_db();
    if (cap < v.size()) {
      hrtf::throw_invalid("buffer holds " + std::to_string(cap) + " values, need " +
                          std::to_string(v.size()));
    }
    std::memcpy(out, v.data(), v.size() * sizeof(float));
  });
}

/* -------------------------------------------------------------------- */

hrtf_status hrtf_sparse_farthest(const hrtf_dataset* ds, int num_measured,
                                 hrtf_sparse** out) {
  if (ds == nullptr || out == nullptr) return fail_invalid("dataset and out must not be null");
  return guarded([&]() {
    if (ds->sets.empty()) hrtf::throw_invalid("dataset is empty");
    *out = new hrtf_sparse{
        hrtf::subset_farthest_point(ds->sets[0].directions(), num_measured)};
  });
}

hrtf_status hrtf_sparse_explicit(const int* indices, int num_measured,
                                 int num_directions, hrtf_sparse** out) {
  if (indices == nullptr || out == nullptr) return fail_invalid("indices and out must not be null");
  return guarded([&]() {
    std::vector<int> measured(indices, indices + num_measured);
    *out = new hrtf_sparse{hrtf::subset_explicit(std::move(measured), num_directions)};
  });
}

void hrtf_sparse_free(hrtf_sparse* sp) { delete sp; }

int hrtf_sparse_num_measured(const hrtf_sparse* sp) {
  return sp == nullptr ? -1 : sp->cfg.num_measured();
}

int hrtf_sparse_num_directions(const hrtf_sparse* sp) {
  return sp == nullptr ? -1 : sp->cfg.num_directions();
}

hrtf_status hrtf_sparse_indices(const hrtf_sparse* sp, int* out, size_t cap) {
  if (sp == nullptr || out == nullptr) return fail_invalid("sparse and out must not be null");
  return guarded([&]() {
    const std::vector<int>& m = sp->cfg.measured();
    if (cap < m.size()) {
      hrtf::throw_invalid("buffer holds " + std::to_string(cap) + " indices, need " +
                          std::to_string(m.size()));
    }
    std::memcpy(out, m.data(), m.size() * sizeof(int));
  });
}

/* -------------------------------------------------------------------- */

hrtf_status hrtf_model_create(const char* config_text, uint64_t seed,
                              hrtf_model** out) {
  if (config_text == nullptr || out == nullptr) {
    return fail_invalid("config_text and out must not be null");
  }
  return guarded([&]() {
    auto handle = std::make_unique<hrtf_model>();
    handle->cfg = hrtf::ModelConfig::from_text(config_text);
    handle->model = std::make_shared<hrtf::FdModel<float>>(handle->cfg, seed);
    handle->snapshot = init_snapshot(*handle->model);
    *out = handle.release();
  });
}

hrtf_status hrtf_model_load(const char* path, hrtf_model** out) {
  if (path == nullptr || out == nullptr) return fail_invalid("path and out must not be null");
  return guarded([&]() {
    auto handle = std::make_unique<hrtf_model>();
    handle->snapshot = hrtf::read_checkpoint(path);
    handle->cfg = hrtf::ModelConfig::from_text(handle->snapshot.config_text);
    handle->model = std::make_shared<hrtf::FdModel<float>>(handle->cfg, 0);
    hrtf::apply_checkpoint(handle->snapshot, *handle->model,
                           static_cast<hrtf::Adam<float>*>(nullptr));
    *out = handle.release();
  });
}

hrtf_status hrtf_model_save(const hrtf_model* model, const char* path) {
  if (model == nullptr || path == nullptr) return fail_invalid("model and path must not be null");
  return guarded([&]() { hrtf::write_checkpoint(model->snapshot, path); });
}

void hrtf_model_free(hrtf_model* model) { delete model; }

hrtf_status hrtf_model_config_text(const hrtf_model* model, char** out) {
  if (model == nullptr || out == nullptr) return fail_invalid("model and out must not be null");
  return guarded([&]() { *out = copy_string(model->cfg.to_text()); });
}

size_t hrtf_model_parameter_count(const hrtf_model* model) {
  return model == nullptr ? 0 : model->model->parameter_count();
}

hrtf_status hrtf_model_predict(const hrtf_model* model, const hrtf_dataset* ds,
                               int subject, const hrtf_sparse* sp, double* out,
                               size_t cap) {
  if (model == nullptr || ds == nullptr || sp == nullptr || out == nullptr) {
    return fail_invalid("model, dataset, sparse, and out must not be null");
  }
  return guarded([&]() {
    const hrtf::HrtfSet& set = subject_at(ds, subject);
    hrtf::DensePrediction pred =
        hrtf::model_predictor(model->model, sp->cfg)(set);
    if (cap < pred.values.size()) {
      hrtf::throw_invalid("buffer holds " + std::to_string(cap) + " values, need " +
                          std::to_string(pred.values.size()));
    }
    std::memcpy(out, pred.values.data(), pred.values.size() * sizeof(double));
  });
}

void hrtf_train_options_default(hrtf_train_options* out) {
  if (out == nullptr) return;
  out->learning_rate = 1e-3;
  out->batch_size = 32;
  out->max_epochs = 800;
  out->beta = 1.0;
  out->seed = 0;
  out->grad_clip = 5.0;
  out->checkpoint_path = nullptr;
}

hrtf_status hrtf_train(const hrtf_dataset* train_set, const hrtf_dataset* val_set,
                       const hrtf_sparse* sp, const char* model_config_text,
                       const hrtf_train_options* options, hrtf_epoch_fn on_epoch,
                       void* user, hrtf_model** out_model,
                       char** out_history_csv) {
  if (train_set == nullptr || val_set == nullptr || sp == nullptr ||
      model_config_text == nullptr || options == nullptr || out_model == nullptr) {
    return fail_invalid(
        "train_set, val_set, sparse, model_config_text, options, and out_model "
        "must not be null");
  }
  return guarded([&]() {
    const hrtf::ModelConfig model_cfg = hrtf::ModelConfig::from_text(model_config_text);
    hrtf::TrainConfig train_cfg;
    train_cfg.learning_rate = options->learning_rate;
    train_cfg.batch_size = options->batch_size;
    train_cfg.max_epochs = options->max_epochs;
    train_cfg.beta = options->beta;
    train_cfg.seed = options->seed;
    train_cfg.grad_clip = options->grad_clip;
    if (options->checkpoint_path != nullptr) {
      train_cfg.checkpoint_path = options->checkpoint_path;
    }
    hrtf::EpochCallback callback;
    if (on_epoch != nullptr) {
      callback = [on_epoch, user](const hrtf::EpochStats& s) {
        on_epoch(user, s.epoch, s.train_loss, s.val_lsd, s.wall_seconds);
      };
    }
    hrtf::FitResult result = hrtf::fit(train_set->sets, val_set->sets, sp->cfg,
                                       model_cfg, train_cfg, callback);
    auto handle = std::make_unique<hrtf_model>();
    handle->cfg = model_cfg;
    handle->model = std::make_shared<hrtf::FdModel<float>>(model_cfg, train_cfg.seed);
    hrtf::apply_checkpoint(result.best, *handle->model,
                           static_cast<hrtf::Adam<float>*>(nullptr));
    handle->snapshot = std::move(result.best);
    if (out_history_csv != nullptr) {
      *out_history_csv = copy_string(hrtf::history_csv(result.history));
    }
    *out_model = handle.release();
  });
}

/* -------------------------------------------------------------------- */

hrtf_status hrtf_baseline_dense(const hrtf_dataset* ds, int subject,
                                const hrtf_sparse* sp, const char* method,
                                int l_max, double lambda, double* out,
                                size_t cap) {
  if (ds == nullptr || sp == nullptr || method == nullptr || out == nullptr) {
    return fail_invalid("dataset, sparse, method, and out must not be null");
  }
  return guarded([&]() {
    const hrtf::HrtfSet& set = subject_at(ds, subject);
    hrtf::DensePrediction pred = hrtf::baseline_predict_dense(
        set, sp->cfg, hrtf::baseline_from_name(method), l_max, lambda);
    if (cap < pred.values.size()) {
      hrtf::throw_invalid("buffer holds " + std::to_string(cap) + " values, need " +
                          std::to_string(pred.values.size()));
    }
    std::memcpy(out, pred.values.data(), pred.values.size() * sizeof(double));
  });
}

hrtf_status hrtf_eval_baseline(const hrtf_dataset* ds, const hrtf_sparse* sp,
                               const char* method, int l_max, double lambda,
                               hrtf_eval** out) {
  if (ds == nullptr || sp == nullptr || method == nullptr || out == nullptr) {
    return fail_invalid("dataset, sparse, method, and out must not be null");
  }
  return guarded([&]() {
    if (ds->sets.empty()) hrtf::throw_invalid("dataset is empty");
    auto ev = std::make_unique<hrtf_eval>();
    ev->result = hrtf::evaluate(
        hrtf::baseline_predictor(hrtf::baseline_from_name(method), sp->cfg, l_max, lambda),
        ds->sets, sp->cfg, method);
    ev->frequencies_hz = ds->sets[0].freq_grid().frequencies_hz();
    *out = ev.release();
  });
}

hrtf_status hrtf_eval_model(const hrtf_model* model, const hrtf_dataset* ds,
                            const hrtf_sparse* sp, hrtf_eval** out) {
  if (model == nullptr || ds == nullptr || sp == nullptr || out == nullptr) {
    return fail_invalid("model, dataset, sparse, and out must not be null");
  }
  return guarded([&]() {
    if (ds->sets.empty()) hrtf::throw_invalid("dataset is empty");
    auto ev = std::make_unique<hrtf_eval>();
    ev->result = hrtf::evaluate(hrtf::model_predictor(model->model, sp->cfg),
                                ds->sets, sp->cfg,
                                hrtf::variant_name(model->cfg.variant));
    ev->frequencies_hz = ds->sets[0].freq_grid().frequencies_hz();
    *out = ev.release();
  });
}

void hrtf_eval_free(hrtf_eval* ev) { delete ev; }

double hrtf_eval_mean_lsd(const hrtf_eval* ev) {
  return ev == nullptr ? std::numeric_limits<double>::quiet_NaN()
                       : ev->result.aggregate.mean_lsd_db;
}

double hrtf_eval_mean_ild(const hrtf_eval* ev) {
  return ev == nullptr ? std::numeric_limits<double>::quiet_NaN()
                       : ev->result.aggregate.ild_error_db;
}

hrtf_status hrtf_eval_csv(const hrtf_eval* ev, char** out) {
  if (ev == nullptr || out == nullptr) return fail_invalid("eval and out must not be null");
  return guarded([&]() {
    std::string csv = hrtf::metrics_csv_header();
    for (const hrtf::MetricsReport& r : ev->result.per_subject) {
      csv += hrtf::metrics_csv_row(r);
    }
    *out = copy_string(csv);
  });
}

hrtf_status hrtf_eval_per_frequency_csv(const hrtf_eval* ev, char** out) {
  if (ev == nullptr || out == nullptr) return fail_invalid("eval and out must not be null");
  return guarded([&]() {
    *out = copy_string(hrtf::per_frequency_csv(ev->result.per_subject, ev->frequencies_hz));
  });
}

hrtf_status hrtf_eval_markdown(const hrtf_eval* ev, char** out) {
  if (ev == nullptr || out == nullptr) return fail_invalid("eval and out must not be null");
  return guarded([&]() {
    *out = copy_string(hrtf::metrics_markdown_table(ev->result.per_subject));
  });
}

hrtf_status hrtf_report_merge(const char* const* csv_texts, int n,
                              char** out_csv, char** out_markdown) {
  if (csv_texts == nullptr || n < 1) return fail_invalid("csv_texts must hold at least one document");
  return guarded([&]() {
    std::vector<hrtf::MetricsReport> merged;
    for (int i = 0; i < n; ++i) {
      if (csv_texts[i] == nullptr) hrtf::throw_invalid("csv_texts entries must not be null");
      std::vector<hrtf::MetricsReport> parsed = hrtf::metrics_csv_parse(csv_texts[i]);
      merged.insert(merged.end(), parsed.begin(), parsed.end());
    }
    if (out_csv != nullptr) {
      std::string csv = hrtf::metrics_csv_header();
      for (const hrtf::MetricsReport& r : merged) csv += hrtf::metrics_csv_row(r);
      *out_csv = copy_string(csv);
    }
    if (out_markdown != nullptr) {
      *out_markdown = copy_string(hrtf::metrics_markdown_table(merged));
    }
  });
}

/* -------------------------------------------------------------------- */

hrtf_status hrtf_correlation_csv(const hrtf_dataset* ds, char** out) {
  if (ds == nullptr || out == nullptr) return fail_invalid("dataset and out must not be null");
  return guarded([&]() {
    if (ds->sets.empty()) hrtf::throw_invalid("dataset is empty");
    const std::vector<double> matrix = hrtf::frequency_correlation(ds->sets);
    *out = copy_string(hrtf::correlation_csv(matrix, ds->sets[0].freq_grid()));
  });
}

} /* extern "C" */
