// Copyright 2026 The varbench Authors
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

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "varbench/model.hpp"

namespace varbench {

enum class Task { kTimeDay, kDayWeek, kWeekend };

std::string_view to_string(Task t);
/// "timeday", "dayweek" or "weekend" (case-insensitive).
Task parse_task(std::string_view s);

/// Class names in label order: Night..Evening, Monday..Sunday, weekday/weekend.
std::vector<std::string> class_names(Task t);

/// Label index of a timestamp shifted by `utc_offset` into local time.
/// TimeDay bins are half-open 6-hour ranges starting at midnight.
int derive_label(Timestamp at, Task task, std::chrono::minutes utc_offset = {});

struct LabeledInstance {
  VmKey vm;
  std::int64_t round_index = 0;
  Timestamp timestamp{};
  std::vector<double> features;  // catalog order
  std::vector<bool> imputed;
  int label = 0;
};

/// One instance per (vm, round) of `provider`; features are the round means of
/// every catalog metric, gaps filled with the provider-wide metric mean.
/// Throws Error(kEmptySelection) below 50 instances.
std::vector<LabeledInstance> build_instances(const Dataset& dataset, const std::string& provider,
                                             Task task, std::chrono::minutes utc_offset = {},
                                             const Catalog& catalog = catalog_default());

/// Shuffles each class with `seed` and deals members round-robin over k folds.
/// Throws Error(kClassTooSmall) when a present class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed);

struct TrainOptions {
  double lambda = 1e-3;
  int iterations = 2000;
  double step = 1.0;
  double decay = 1e-3;       // step_t = step / (1 + decay * t)
  double tolerance = 1e-3;   // gradient max-norm for early exit
};

struct LogisticModel {
  std::vector<int> classes;
  std::vector<std::size_t> features;  // raw feature columns kept
  std::vector<std::size_t> dropped;   // zero-variance columns
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
  Eigen::MatrixXd weights;  // classes x kept features
  Eigen::VectorXd bias;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;

  Eigen::VectorXd probabilities(const Eigen::VectorXd& x) const;
  int predict(const Eigen::VectorXd& x) const;
};

/// Softmax regression with L2 penalty by gradient descent; the step is halved
/// whenever it would increase the loss. Rows of `x` are instances. Throws
/// Error(kInvalidArgument) unless at least two classes are present.
LogisticModel train_logistic(const Eigen::MatrixXd& x, std::span<const int> y,
                             const TrainOptions& options = {});

double accuracy(const LogisticModel& model, const Eigen::MatrixXd& x, std::span<const int> y);

struct TaskOptions {
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::chrono::minutes utc_offset{0};
  bool shuffle_labels = false;  // permutation control
  TrainOptions train;
};

struct TaskReport {
  std::string provider;
  Task task = Task::kTimeDay;
  std::size_t n_instances = 0;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
  double baseline = 0.0;
  std::size_t non_converged_folds = 0;
};

double random_baseline(Task task);

TaskReport run_task(const Dataset& dataset, const std::string& provider, Task task,
                    const TaskOptions& options = {}, const Catalog& catalog = catalog_default());

/// Cross-validation on prepared instances.
TaskReport run_task(std::span<const LabeledInstance> instances, Task task,
                    const TaskOptions& options = {});

}  // namespace varbench
