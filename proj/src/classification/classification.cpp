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

#include "varbench/classification.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "varbench/random.hpp"

namespace varbench {

std::string_view to_string(Task t) {
  switch (t) {
    case Task::kTimeDay: return "timeday";
    case Task::kDayWeek: return "dayweek";
    case Task::kWeekend: return "weekend";
  }
  return "?";
}

Task parse_task(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "timeday") return Task::kTimeDay;
  if (lower == "dayweek") return Task::kDayWeek;
  if (lower == "weekend") return Task::kWeekend;
  throw Error(ErrorCode::kInvalidArgument, "unknown task '" + std::string(s) + "'");
}

std::vector<std::string> class_names(Task t) {
  switch (t) {
    case Task::kTimeDay: return {"Night", "Morning", "Afternoon", "Evening"};
    case Task::kDayWeek:
      return {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};
    case Task::kWeekend: return {"weekday", "weekend"};
  }
  return {};
}

double random_baseline(Task task) { return 1.0 / static_cast<double>(class_names(task).size()); }

int derive_label(Timestamp at, Task task, std::chrono::minutes utc_offset) {
  using namespace std::chrono;
  const auto local = at + utc_offset;
  const auto day = floor<days>(local);
  const auto hour = duration_cast<hours>(local - day).count();
  const int monday_based = static_cast<int>((weekday(day).c_encoding() + 6) % 7);
  switch (task) {
    case Task::kTimeDay: return static_cast<int>(hour / 6);
    case Task::kDayWeek: return monday_based;
    case Task::kWeekend: return monday_based >= 5 ? 1 : 0;
  }
  return 0;
}

std::vector<LabeledInstance> build_instances(const Dataset& dataset, const std::string& provider,
                                             Task task, std::chrono::minutes utc_offset,
                                             const Catalog& catalog) {
  const auto vms = dataset.vms_of(provider);
  if (vms.empty()) throw Error(ErrorCode::kEmptySelection, "no VMs for provider " + provider);

  const std::size_t f = catalog.size();
  std::vector<std::map<std::string, Series>> per_vm;
  std::vector<double> sum(f, 0.0);
  std::vector<std::size_t> count(f, 0);
  for (const auto& vm : vms) {
    per_vm.push_back(series_of_vm(dataset, vm));
    for (const auto& [metric, s] : per_vm.back()) {
      const auto idx = catalog.index_of(metric);
      for (const auto& p : s.points) {
        sum[idx] += p.value;
        ++count[idx];
      }
    }
  }
  std::vector<double> fill(f, 0.0);
  for (std::size_t i = 0; i < f; ++i) {
    if (count[i] > 0) fill[i] = sum[i] / static_cast<double>(count[i]);
  }

  std::vector<LabeledInstance> out;
  for (std::size_t v = 0; v < vms.size(); ++v) {
    std::map<std::int64_t, LabeledInstance> rounds;
    for (const auto& [metric, s] : per_vm[v]) {
      const auto idx = catalog.index_of(metric);
      for (const auto& p : s.points) {
        auto [it, fresh] = rounds.try_emplace(p.round_index);
        auto& inst = it->second;
        if (fresh) {
          inst.vm = vms[v];
          inst.round_index = p.round_index;
          inst.timestamp = p.timestamp;
          inst.features = fill;
          inst.imputed.assign(f, true);
        }
        inst.timestamp = std::min(inst.timestamp, p.timestamp);
        inst.features[idx] = p.value;
        inst.imputed[idx] = false;
      }
    }
    for (auto& [r, inst] : rounds) {
      inst.label = derive_label(inst.timestamp, task, utc_offset);
      out.push_back(std::move(inst));
    }
  }
  if (out.size() < 50) {
    throw Error(ErrorCode::kEmptySelection, provider + " has " + std::to_string(out.size()) +
                                                " rounds, at least 50 needed");
  }
  return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const int> labels, std::size_t k,
                                                       std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [cls, members] : by_class) {
    if (members.size() < k) {
      throw Error(ErrorCode::kClassTooSmall, "class " + std::to_string(cls) + " has " +
                                                 std::to_string(members.size()) + " members, " +
                                                 std::to_string(k) + " folds requested");
    }
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t offset = 0;
  for (auto& [cls, members] : by_class) {
    rng.shuffle(members.begin(), members.end());
    for (std::size_t i = 0; i < members.size(); ++i) folds[(offset + i) % k].push_back(members[i]);
    offset += members.size();
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

namespace {

// Row-wise softmax of logits, in place. Returns the mean negative
// log-likelihood of `onehot`.
double softmax_nll(Eigen::MatrixXd& logits, const Eigen::MatrixXd& onehot) {
  double nll = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    auto row = logits.row(i);
    const double m = row.maxCoeff();
    row.array() -= m;
    const double lse = std::log(row.array().exp().sum());
    nll -= (row.array() * onehot.row(i).array()).sum() - lse;
    row.array() = (row.array() - lse).exp();
  }
  return nll / static_cast<double>(logits.rows());
}

}  // namespace

Eigen::VectorXd LogisticModel::probabilities(const Eigen::VectorXd& x) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(features.size()));
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    z(jj) = (x(static_cast<Eigen::Index>(features[j])) - mean(jj)) / scale(jj);
  }
  Eigen::VectorXd logits = weights * z + bias;
  logits.array() -= logits.maxCoeff();
  logits = logits.array().exp();
  return logits / logits.sum();
}

int LogisticModel::predict(const Eigen::VectorXd& x) const {
  Eigen::Index best = 0;
  probabilities(x).maxCoeff(&best);
  return classes[static_cast<std::size_t>(best)];
}

LogisticModel train_logistic(const Eigen::MatrixXd& x, std::span<const int> y,
                             const TrainOptions& options) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "feature rows and labels differ in count");
  }
  LogisticModel model;
  const std::set<int> present(y.begin(), y.end());
  model.classes.assign(present.begin(), present.end());
  if (model.classes.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "training data needs at least two classes");
  }
  const auto n = x.rows();
  const auto nd = static_cast<double>(n);

  std::vector<double> means, scales;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double m = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - m).square().sum() / nd);
    if (sd > 1e-12 * std::max(1.0, std::abs(m))) {
      model.features.push_back(static_cast<std::size_t>(j));
      means.push_back(m);
      scales.push_back(sd);
    } else {
      model.dropped.push_back(static_cast<std::size_t>(j));
    }
  }
  const auto f = static_cast<Eigen::Index>(model.features.size());
  const auto c = static_cast<Eigen::Index>(model.classes.size());
  model.mean = Eigen::Map<Eigen::VectorXd>(means.data(), f);
  model.scale = Eigen::Map<Eigen::VectorXd>(scales.data(), f);

  Eigen::MatrixXd xs(n, f);
  for (Eigen::Index j = 0; j < f; ++j) {
    xs.col(j) = (x.col(static_cast<Eigen::Index>(model.features[static_cast<std::size_t>(j)])).array() -
                 model.mean(j)) /
                model.scale(j);
  }
  Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto pos = std::lower_bound(model.classes.begin(), model.classes.end(),
                                      y[static_cast<std::size_t>(i)]) -
                     model.classes.begin();
    onehot(i, static_cast<Eigen::Index>(pos)) = 1.0;
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(c, f);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(c);
  auto objective = [&](const Eigen::MatrixXd& wt, const Eigen::VectorXd& bt, Eigen::MatrixXd& p) {
    p = xs * wt.transpose();
    p.rowwise() += bt.transpose();
    return softmax_nll(p, onehot) + 0.5 * options.lambda * wt.squaredNorm();
  };

  Eigen::MatrixXd p;
  double loss = objective(w, b, p);
  double shrink = 1.0;
  int t = 0;
  for (; t < options.iterations; ++t) {
    const Eigen::MatrixXd g = (p - onehot) / nd;
    const Eigen::MatrixXd gw = g.transpose() * xs + options.lambda * w;
    const Eigen::VectorXd gb = g.colwise().sum().transpose();
    if (std::max(gw.lpNorm<Eigen::Infinity>(), gb.lpNorm<Eigen::Infinity>()) < options.tolerance) {
      model.converged = true;
      break;
    }
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      const double lr = options.step * shrink / (1.0 + options.decay * t);
      Eigen::MatrixXd wt = w - lr * gw;
      Eigen::VectorXd bt = b - lr * gb;
      Eigen::MatrixXd pt;
      const double lt = objective(wt, bt, pt);
      if (lt <= loss) {
        w = std::move(wt);
        b = std::move(bt);
        p = std::move(pt);
        loss = lt;
        accepted = true;
      } else {
        shrink /= 2.0;
      }
    }
    if (!accepted) {
      model.converged = true;
      break;
    }
  }
  model.weights = std::move(w);
  model.bias = std::move(b);
  model.loss = loss;
  model.iterations = t;
  return model;
}

double accuracy(const LogisticModel& model, const Eigen::MatrixXd& x, std::span<const int> y) {
  if (y.empty()) throw Error(ErrorCode::kTooShort, "accuracy of an empty set");
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (model.predict(x.row(i).transpose()) == y[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

TaskReport run_task(std::span<const LabeledInstance> instances, Task task,
                    const TaskOptions& options) {
  if (instances.empty()) throw Error(ErrorCode::kEmptySelection, "no instances");
  const auto n = instances.size();
  const auto f = instances.front().features.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(f));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = instances[i].features[j];
    }
    labels[i] = instances[i].label;
  }
  if (options.shuffle_labels) {
    Rng rng(mix64(options.seed, stable_hash("label-permutation")));
    rng.shuffle(labels.begin(), labels.end());
  }

  const auto folds = stratified_kfold(labels, options.folds, options.seed);
  TaskReport report;
  report.task = task;
  report.n_instances = n;
  report.baseline = random_baseline(task);
  std::vector<char> in_test(n);
  for (const auto& fold : folds) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (auto i : fold) in_test[i] = 1;
    std::vector<Eigen::Index> train_idx;
    std::vector<int> train_y, test_y;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_test[i] == 0) {
        train_idx.push_back(static_cast<Eigen::Index>(i));
        train_y.push_back(labels[i]);
      }
    }
    std::vector<Eigen::Index> test_idx;
    for (auto i : fold) {
      test_idx.push_back(static_cast<Eigen::Index>(i));
      test_y.push_back(labels[i]);
    }
    const Eigen::MatrixXd xtr = x(train_idx, Eigen::all);
    const Eigen::MatrixXd xte = x(test_idx, Eigen::all);
    const auto model = train_logistic(xtr, train_y, options.train);
    if (!model.converged) ++report.non_converged_folds;
    report.fold_accuracy.push_back(accuracy(model, xte, test_y));
  }
  const double k = static_cast<double>(report.fold_accuracy.size());
  double s = 0.0;
  for (double a : report.fold_accuracy) s += a;
  report.mean_accuracy = s / k;
  double ss = 0.0;
  for (double a : report.fold_accuracy) ss += (a - report.mean_accuracy) * (a - report.mean_accuracy);
  report.std_accuracy = std::sqrt(ss / k);
  return report;
}

TaskReport run_task(const Dataset& dataset, const std::string& provider, Task task,
                    const TaskOptions& options, const Catalog& catalog) {
  const auto instances = build_instances(dataset, provider, task, options.utc_offset, catalog);
  auto report = run_task(instances, task, options);
  report.provider = provider;
  return report;
}

}  // namespace varbench
