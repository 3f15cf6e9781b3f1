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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <tuple>
#include <utility>

#include <fmt/format.h>

#include "varbench/model.hpp"

namespace varbench {

void Dataset::add(Measurement m) {
  if (!std::isfinite(m.value)) {
    throw Error(ErrorCode::kNonFiniteValue, m.metric + " on " + m.vm.label());
  }
  if (m.round_index < 0 || m.trial_index < 0) {
    throw Error(ErrorCode::kInvalidArgument, "round and trial indices must be >= 0");
  }
  rows_.push_back(std::move(m));
}

std::vector<VmKey> Dataset::vms() const {
  std::set<VmKey> keys;
  for (const auto& r : rows_) keys.insert(r.vm);
  return {keys.begin(), keys.end()};
}

std::vector<VmKey> Dataset::vms_of(std::string_view provider) const {
  std::set<VmKey> keys;
  for (const auto& r : rows_) {
    if (r.vm.provider == provider) keys.insert(r.vm);
  }
  return {keys.begin(), keys.end()};
}

std::vector<std::string> Dataset::providers() const {
  std::set<std::string> names;
  for (const auto& r : rows_) names.insert(r.vm.provider);
  return {names.begin(), names.end()};
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

IngestResult ingest_csv(std::istream& in, const Catalog& catalog) {
  IngestResult result;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).starts_with('#')) continue;
    header = trim(line) == kMeasurementCsvHeader;
    break;
  }
  if (!header) {
    throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(line_no) + ": expected header '" +
                                              std::string(kMeasurementCsvHeader) + "'");
  }
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.starts_with('#')) continue;
    auto reject = [&](ErrorCode code, std::string detail) {
      result.errors.push_back({code, line_no, std::move(detail)});
    };
    const auto f = split(text, ',');
    if (f.size() != 9) {
      reject(ErrorCode::kMalformedRow, "expected 9 fields, got " + std::to_string(f.size()));
      continue;
    }
    Measurement m;
    try {
      m.timestamp = parse_timestamp(trim(f[0]));
      m.vm.provider = std::string(trim(f[1]));
      m.vm.vm_class = parse_vm_class(trim(f[2]));
      m.vm.vm_type = std::string(trim(f[3]));
    } catch (const Error& e) {
      reject(ErrorCode::kMalformedRow, e.what());
      continue;
    }
    if (m.vm.provider.empty() || m.vm.vm_type.empty() ||
        !parse_number(trim(f[4]), m.vm.instance) || m.vm.instance < 1 ||
        !parse_number(trim(f[5]), m.round_index) || m.round_index < 0 ||
        !parse_number(trim(f[6]), m.trial_index) || m.trial_index < 0) {
      reject(ErrorCode::kMalformedRow, "bad provider/type/instance/round/trial field");
      continue;
    }
    m.metric = std::string(trim(f[7]));
    if (catalog.find(m.metric) == nullptr) {
      reject(ErrorCode::kUnknownMetric, m.metric);
      continue;
    }
    if (!parse_number(trim(f[8]), m.value)) {
      reject(ErrorCode::kMalformedRow, "value '" + std::string(trim(f[8])) + "' is not a number");
      continue;
    }
    if (!std::isfinite(m.value)) {
      reject(ErrorCode::kNonFiniteValue, "value '" + std::string(trim(f[8])) + "'");
      continue;
    }
    result.dataset.add(std::move(m));
  }
  return result;
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  out << kMeasurementCsvHeader << '\n';
  for (const auto& m : dataset.rows()) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", format_timestamp(m.timestamp),
                       m.vm.provider, to_string(m.vm.vm_class), m.vm.vm_type, m.vm.instance,
                       m.round_index, m.trial_index, m.metric, m.value);
  }
}

std::vector<double> Series::values() const {
  std::vector<double> v;
  v.reserve(points.size());
  for (const auto& p : points) v.push_back(p.value);
  return v;
}

namespace {

struct RoundAccumulator {
  Timestamp start = Timestamp::max();
  std::vector<std::pair<std::int64_t, double>> trials;  // (trial index, value)
};

Series finish_series(std::string metric, const VmKey& vm,
                     std::map<std::int64_t, RoundAccumulator>& rounds) {
  Series s{std::move(metric), vm, {}};
  s.points.reserve(rounds.size());
  for (auto& [round, acc] : rounds) {
    // Sorting makes the floating-point sum independent of input row order.
    std::sort(acc.trials.begin(), acc.trials.end());
    double sum = 0.0;
    for (const auto& t : acc.trials) sum += t.second;
    s.points.push_back(
        {acc.start, round, sum / static_cast<double>(acc.trials.size()), acc.trials.size()});
  }
  std::sort(s.points.begin(), s.points.end(), [](const SeriesPoint& a, const SeriesPoint& b) {
    return std::tie(a.timestamp, a.round_index) < std::tie(b.timestamp, b.round_index);
  });
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    if (s.points[i].timestamp == s.points[i - 1].timestamp) {
      throw Error(ErrorCode::kInvalidArgument,
                  s.metric + " on " + vm.label() + ": rounds " +
                      std::to_string(s.points[i - 1].round_index) + " and " +
                      std::to_string(s.points[i].round_index) + " share a start timestamp");
    }
  }
  return s;
}

}  // namespace

Series to_series(const Dataset& dataset, std::string_view metric, const VmKey& vm) {
  std::map<std::int64_t, RoundAccumulator> rounds;
  for (const auto& m : dataset.rows()) {
    if (m.metric != metric || m.vm != vm) continue;
    auto& acc = rounds[m.round_index];
    acc.start = std::min(acc.start, m.timestamp);
    acc.trials.emplace_back(m.trial_index, m.value);
  }
  if (rounds.empty()) {
    throw Error(ErrorCode::kEmptySelection, std::string(metric) + " on " + vm.label());
  }
  return finish_series(std::string(metric), vm, rounds);
}

std::map<std::string, Series> series_of_vm(const Dataset& dataset, const VmKey& vm) {
  std::map<std::string, std::map<std::int64_t, RoundAccumulator>> by_metric;
  for (const auto& m : dataset.rows()) {
    if (m.vm != vm) continue;
    auto& acc = by_metric[m.metric][m.round_index];
    acc.start = std::min(acc.start, m.timestamp);
    acc.trials.emplace_back(m.trial_index, m.value);
  }
  std::map<std::string, Series> out;
  for (auto& [metric, rounds] : by_metric) {
    out.emplace(metric, finish_series(metric, vm, rounds));
  }
  return out;
}

}  // namespace varbench
