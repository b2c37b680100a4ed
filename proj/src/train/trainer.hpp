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

#ifndef HRTFKIT_TRAIN_TRAINER_HPP_
#define HRTFKIT_TRAIN_TRAINER_HPP_

#include <functional>
#include <string>
#include <vector>

#include "core/hrtf_set.hpp"
#include "metrics/metrics.hpp"
#include "model/fd_model.hpp"
#include "train/loss.hpp"

namespace hrtf {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 800;
  double beta = 1.0;  // spectral-gradient loss weight
  uint64_t seed = 0;
  // Global-norm gradient clip; zero or negative disables clipping.
  double grad_clip = 5.0;
  // Best checkpoint is persisted here after every improvement when set.
  std::string checkpoint_path;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_lsd = 0.0;
  double wall_seconds = 0.0;
};

struct FitResult {
  Checkpoint best;
  int best_epoch = 0;
  double best_val_lsd = 0.0;
  std::vector<EpochStats> history;
};

using EpochCallback = std::function<void(const EpochStats&)>;

// Supervised run: per epoch, seeded subject shuffle, minibatch Adam on
// loss_total over dense targets, then validation mean LSD over unmeasured
// directions in inference mode. The checkpoint snapshots on every strict
// validation improvement. Train and validation subjects must be disjoint
// and nonempty. Wall-clock seconds in the history are the one
// nondeterministic column; everything else is bitwise-reproducible for a
// fixed seed (single-threaded).
FitResult fit(const std::vector<HrtfSet>& train_sets,
              const std::vector<HrtfSet>& val_sets, const SparseConfig& sparse,
              const ModelConfig& model_cfg, const TrainConfig& train_cfg,
              const EpochCallback& on_epoch = EpochCallback());

// History CSV, one row per epoch.
std::string history_csv(const std::vector<EpochStats>& history);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Dense prediction for one subject: D x 2 x F values plus barycentric
// metadata (zero for every other predictor).
struct DensePrediction {
  std::vector<double> values;
  int extrapolated_targets = 0;
  bool distance_weighted_fallback = false;
};

using DensePredictor = std::function<DensePrediction(const HrtfSet&)>;

struct EvalResult {
  std::vector<MetricsReport> per_subject;
  // Unweighted mean over subjects of every metric; counts are summed and
  // the fallback flag is OR-ed.
  MetricsReport aggregate;
};

// Runs the predictor per subject, restricts both prediction and truth to
// the unmeasured directions, and computes the metric bundle.
EvalResult evaluate(const DensePredictor& predictor,
                    const std::vector<HrtfSet>& test_sets,
                    const SparseConfig& sparse, const std::string& method_name);

// (M, 2, F) model input built from a subject's measured rows.
TensorPtr<float> sparse_input(const HrtfSet& set, const SparseConfig& sparse);

// (D, 2, F) training target.
TensorPtr<float> dense_target(const HrtfSet& set);

// Predictor backed by a trained model snapshot.
DensePredictor model_predictor(std::shared_ptr<const FdModel<float>> model,
                               SparseConfig sparse);

enum class BaselineMethod { kNearest, kDistanceWeighted, kBarycentric, kSh };

std::string baseline_name(BaselineMethod method);
BaselineMethod baseline_from_name(const std::string& name);

// Classical interpolator over the full dense direction set. l_max < 0
// selects floor(sqrt(M)) - 1; lambda < 0 selects 1e-3 (SH method only).
DensePrediction baseline_predict_dense(const HrtfSet& set,
                                       const SparseConfig& sparse,
                                       BaselineMethod method, int l_max = -1,
                                       double lambda = -1.0);

DensePredictor baseline_predictor(BaselineMethod method, SparseConfig sparse,
                                  int l_max = -1, double lambda = -1.0);

}  // namespace hrtf

#endif  // HRTFKIT_TRAIN_TRAINER_HPP_
