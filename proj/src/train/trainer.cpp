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

#include "train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <set>

#include "baselines/barycentric.hpp"
#include "baselines/interpolate.hpp"
#include "baselines/sh_basis.hpp"
#include "core/error.hpp"

namespace hrtf {

namespace {

void fisher_yates(std::vector<int>* v, Rng& rng) {
  for (size_t i = v->size(); i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap((*v)[i - 1], (*v)[j]);
  }
}

void check_sets(const std::vector<HrtfSet>& sets, const SparseConfig& sparse,
                const char* what) {
  for (const HrtfSet& set : sets) {
    if (set.num_directions() != sparse.num_directions()) {
      throw_invalid(std::string(what) + " set \"" + set.subject_id() +
                    "\" direction count does not match the sparse configuration");
    }
  }
}

// Mean validation LSD over subjects, unmeasured directions only.
double validation_lsd(const FdModel<float>& model,
                      const std::vector<HrtfSet>& val_sets,
                      const SparseConfig& sparse) {
  double total = 0.0;
  for (const HrtfSet& set : val_sets) {
    ForwardTrace<float> trace = model.predict(sparse_input(set, sparse));
    const std::vector<double> pred_dense(trace.sum->values.begin(),
                                         trace.sum->values.end());
    const std::vector<double> pred_u =
        gather_rows(pred_dense, set.num_freqs(), sparse.unmeasured());
    const SplitSet split = split_set(set, sparse);
    const std::vector<double> truth_u(split.unmeasured.begin(),
                                      split.unmeasured.end());
    total += mean_lsd(pred_u, truth_u, set.num_freqs());
  }
  return total / static_cast<double>(val_sets.size());
}

double global_grad_norm(const ParamList<float>& params) {
  double sum_sq = 0.0;
  for (const NamedParam<float>& p : params) {
    for (float g : p.tensor->grad) {
      sum_sq += static_cast<double>(g) * static_cast<double>(g);
    }
  }
  return std::sqrt(sum_sq);
}

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void TrainConfig::validate() const {
  if (learning_rate < 0.0) throw_invalid("train config: learning_rate must be >= 0");
  if (batch_size < 1) throw_invalid("train config: batch_size must be >= 1");
  if (max_epochs < 1) throw_invalid("train config: max_epochs must be >= 1");
  if (beta < 0.0) throw_invalid("train config: beta must be >= 0");
}

TensorPtr<float> sparse_input(const HrtfSet& set, const SparseConfig& sparse) {
  SplitSet split = split_set(set, sparse);
  return make_tensor<float>({sparse.num_measured(), 2, set.num_freqs()},
                            std::move(split.measured));
}

TensorPtr<float> dense_target(const HrtfSet& set) {
  return make_tensor<float>({set.num_directions(), 2, set.num_freqs()},
                            set.logmag_db());
}

FitResult fit(const std::vector<HrtfSet>& train_sets,
              const std::vector<HrtfSet>& val_sets, const SparseConfig& sparse,
              const ModelConfig& model_cfg, const TrainConfig& train_cfg,
              const EpochCallback& on_epoch) {
  train_cfg.validate();
  model_cfg.validate();
  if (train_sets.empty()) throw_invalid("fit: empty training set");
  if (val_sets.empty()) throw_invalid("fit: empty validation set");
  check_sets(train_sets, sparse, "training");
  check_sets(val_sets, sparse, "validation");
  {
    std::set<std::string> train_ids;
    for (const HrtfSet& s : train_sets) train_ids.insert(s.subject_id());
    for (const HrtfSet& s : val_sets) {
      if (train_ids.count(s.subject_id())) {
        throw_invalid("fit: subject \"" + s.subject_id() +
                      "\" appears in both training and validation splits");
      }
    }
  }
  const int num_freqs = train_sets.front().num_freqs();
  if (model_cfg.num_measured != sparse.num_measured() ||
      model_cfg.num_directions != sparse.num_directions() ||
      model_cfg.num_freqs != num_freqs) {
    throw_invalid("fit: model config geometry does not match the data");
  }

  FdModel<float> model(model_cfg, train_cfg.seed);
  const ParamList<float> params = model.parameters();
  Adam<float> opt(train_cfg.learning_rate);

  Rng base(train_cfg.seed);
  Rng shuffle_rng = base.fork(101);
  Rng dropout_rng = base.fork(102);

  std::vector<TensorPtr<float>> inputs;
  std::vector<TensorPtr<float>> targets;
  inputs.reserve(train_sets.size());
  targets.reserve(train_sets.size());
  for (const HrtfSet& set : train_sets) {
    inputs.push_back(sparse_input(set, sparse));
    targets.push_back(dense_target(set));
  }

  FitResult result;
  result.best_val_lsd = std::numeric_limits<double>::infinity();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<int> order(train_sets.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= train_cfg.max_epochs; ++epoch) {
    fisher_yates(&order, shuffle_rng);
    double epoch_loss = 0.0;
    const size_t n = order.size();
    const size_t batch = static_cast<size_t>(train_cfg.batch_size);
    for (size_t start = 0; start < n; start += batch) {
      const size_t end = std::min(start + batch, n);
      const int batch_index = static_cast<int>(start / batch);
      try {
        for (const NamedParam<float>& p : params) p.tensor->zero_grad();
        TensorPtr<float> batch_loss;
        for (size_t i = start; i < end; ++i) {
          const int s = order[i];
          ForwardTrace<float> trace =
              model.forward(inputs[static_cast<size_t>(s)], true, dropout_rng);
          TensorPtr<float> subject_loss = loss_total(
              trace.sum, targets[static_cast<size_t>(s)], train_cfg.beta);
          epoch_loss += static_cast<double>(subject_loss->values[0]);
          batch_loss = batch_loss ? add(batch_loss, subject_loss) : subject_loss;
        }
        batch_loss = scale(batch_loss, 1.0F / static_cast<float>(end - start));
        backward(batch_loss);
        if (train_cfg.grad_clip > 0.0) {
          const double norm = global_grad_norm(params);
          if (norm > train_cfg.grad_clip) {
            const float factor = static_cast<float>(train_cfg.grad_clip / norm);
            for (const NamedParam<float>& p : params) {
              for (float& g : p.tensor->grad) g *= factor;
            }
          }
        }
        opt.step(params);
      } catch (const Error& e) {
        throw Error(e.code(), "epoch " + std::to_string(epoch) + " batch " +
                                  std::to_string(batch_index) + ": " + e.what());
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = epoch_loss / static_cast<double>(n);
    stats.val_lsd = validation_lsd(model, val_sets, sparse);
    stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);

    if (stats.val_lsd < result.best_val_lsd) {
      result.best_val_lsd = stats.val_lsd;
      result.best_epoch = epoch;
      result.best = make_checkpoint(model, &opt, static_cast<uint32_t>(epoch),
                                    stats.val_lsd);
      if (!train_cfg.checkpoint_path.empty()) {
        write_checkpoint(result.best, train_cfg.checkpoint_path);
      }
    }
  }
  return result;
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string out = "epoch,train_loss,val_lsd,wall_seconds\n";
  for (const EpochStats& s : history) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", s.wall_seconds);
    out += std::to_string(s.epoch) + "," + g9(s.train_loss) + "," +
           g9(s.val_lsd) + "," + buf + "\n";
  }
  return out;
}

EvalResult evaluate(const DensePredictor& predictor,
                    const std::vector<HrtfSet>& test_sets,
                    const SparseConfig& sparse, const std::string& method_name) {
  if (test_sets.empty()) throw_invalid("evaluate: empty test set");
  check_sets(test_sets, sparse, "test");

  EvalResult result;
  for (const HrtfSet& set : test_sets) {
    DensePrediction pred = predictor(set);
    const size_t want = static_cast<size_t>(set.num_directions()) * kNumEars *
                        static_cast<size_t>(set.num_freqs());
    if (pred.values.size() != want) {
      throw_invalid("evaluate: predictor returned a wrong-sized tensor for \"" +
                    set.subject_id() + "\"");
    }
    const std::vector<double> pred_u =
        gather_rows(pred.values, set.num_freqs(), sparse.unmeasured());
    const SplitSet split = split_set(set, sparse);
    const std::vector<double> truth_u(split.unmeasured.begin(),
                                      split.unmeasured.end());
    MetricsReport report =
        compute_metrics(pred_u, truth_u, set.num_freqs(), set.subject_id(),
                        method_name, sparse.num_measured());
    report.extrapolated_targets = pred.extrapolated_targets;
    report.distance_weighted_fallback = pred.distance_weighted_fallback;
    result.per_subject.push_back(std::move(report));
  }

  MetricsReport& agg = result.aggregate;
  agg.subject_id = "mean";
  agg.method = method_name;
  agg.num_measured = sparse.num_measured();
  const double inv = 1.0 / static_cast<double>(result.per_subject.size());
  agg.per_frequency_lsd_db.assign(
      result.per_subject.front().per_frequency_lsd_db.size(), 0.0);
  agg.per_direction_lsd_db.assign(
      result.per_subject.front().per_direction_lsd_db.size(), 0.0);
  for (const MetricsReport& r : result.per_subject) {
    agg.mean_lsd_db += r.mean_lsd_db * inv;
    agg.ild_error_db += r.ild_error_db * inv;
    for (size_t i = 0; i < agg.per_frequency_lsd_db.size(); ++i) {
      agg.per_frequency_lsd_db[i] += r.per_frequency_lsd_db[i] * inv;
    }
    for (size_t i = 0; i < agg.per_direction_lsd_db.size(); ++i) {
      agg.per_direction_lsd_db[i] += r.per_direction_lsd_db[i] * inv;
    }
    agg.extrapolated_targets += r.extrapolated_targets;
    agg.distance_weighted_fallback =
        agg.distance_weighted_fallback || r.distance_weighted_fallback;
  }
  return result;
}

DensePredictor model_predictor(std::shared_ptr<const FdModel<float>> model,
                               SparseConfig sparse) {
  if (!model) throw_invalid("model_predictor: null model");
  return [model, sparse](const HrtfSet& set) {
    const ModelConfig& cfg = model->config();
    if (cfg.num_directions != set.num_directions() ||
        cfg.num_freqs != set.num_freqs() ||
        cfg.num_measured != sparse.num_measured()) {
      throw_invalid("model_predictor: subject \"" + set.subject_id() +
                    "\" does not match the model geometry");
    }
    ForwardTrace<float> trace = model->predict(sparse_input(set, sparse));
    DensePrediction out;
    out.values.assign(trace.sum->values.begin(), trace.sum->values.end());
    return out;
  };
}

std::string baseline_name(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::kNearest: return "nearest";
    case BaselineMethod::kDistanceWeighted: return "distw";
    case BaselineMethod::kBarycentric: return "barycentric";
    case BaselineMethod::kSh: return "sh";
  }
  throw_internal("unreachable baseline method");
}

BaselineMethod baseline_from_name(const std::string& name) {
  if (name == "nearest") return BaselineMethod::kNearest;
  if (name == "distw") return BaselineMethod::kDistanceWeighted;
  if (name == "barycentric") return BaselineMethod::kBarycentric;
  if (name == "sh") return BaselineMethod::kSh;
  throw_invalid("unknown baseline method \"" + name +
                "\" (expected nearest, distw, barycentric, or sh)");
}

DensePrediction baseline_predict_dense(const HrtfSet& set,
                                       const SparseConfig& sparse,
                                       BaselineMethod method, int l_max,
                                       double lambda) {
  if (set.num_directions() != sparse.num_directions()) {
    throw_invalid("baseline: sparse configuration does not match the set");
  }
  std::vector<Direction> measured_dirs;
  measured_dirs.reserve(static_cast<size_t>(sparse.num_measured()));
  for (int d : sparse.measured()) {
    measured_dirs.push_back(set.directions()[static_cast<size_t>(d)]);
  }
  const SplitSet split = split_set(set, sparse);
  const std::vector<double> measured(split.measured.begin(), split.measured.end());
  const std::vector<Direction>& targets = set.directions();
  const int num_freqs = set.num_freqs();

  DensePrediction out;
  switch (method) {
    case BaselineMethod::kNearest:
      out.values = nearest_neighbor(measured_dirs, measured, num_freqs, targets);
      break;
    case BaselineMethod::kDistanceWeighted:
      out.values = distance_weighted(measured_dirs, measured, num_freqs, targets);
      break;
    case BaselineMethod::kBarycentric: {
      BarycentricResult res =
          barycentric(measured_dirs, measured, num_freqs, targets);
      out.values = std::move(res.values);
      out.extrapolated_targets = res.extrapolated_targets;
      out.distance_weighted_fallback = res.distance_weighted_fallback;
      break;
    }
    case BaselineMethod::kSh: {
      if (l_max < 0) {
        l_max = static_cast<int>(
                    std::floor(std::sqrt(static_cast<double>(sparse.num_measured())))) -
                1;
        l_max = std::max(l_max, 0);
      }
      if (lambda < 0.0) lambda = 1e-3;
      const ShCoefficients coeffs =
          sh_fit(measured_dirs, measured, num_freqs, l_max, lambda);
      out.values = sh_eval(coeffs, targets);
      break;
    }
  }
  return out;
}

DensePredictor baseline_predictor(BaselineMethod method, SparseConfig sparse,
                                  int l_max, double lambda) {
  return [method, sparse, l_max, lambda](const HrtfSet& set) {
    return baseline_predict_dense(set, sparse, method, l_max, lambda);
  };
}

}  // namespace hrtf
