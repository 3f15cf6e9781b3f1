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

#include <map>
#include <set>

#include "varbench/harness.hpp"
#include "varbench/random.hpp"

namespace varbench {

void SuiteConfig::validate() const {
  if (benchmarks.empty()) throw Error(ErrorCode::kConfigError, "suite has no benchmarks");
  if (round_period.count() <= 0) {
    throw Error(ErrorCode::kConfigError, "round period must be positive");
  }
  std::set<std::string_view> seen;
  for (const auto& b : benchmarks) {
    if (b.id.empty()) throw Error(ErrorCode::kConfigError, "benchmark id must not be empty");
    if (!seen.insert(b.id).second) {
      throw Error(ErrorCode::kConfigError, "duplicate benchmark id " + b.id);
    }
    if (b.repetitions <= 0) {
      throw Error(ErrorCode::kConfigError, b.id + ": repetitions must be positive");
    }
    if (!is_registered_parser(b.parser_id)) {
      throw Error(ErrorCode::kConfigError, b.id + ": unknown parser '" + b.parser_id + "'");
    }
  }
}

int SuiteConfig::total_trials() const {
  int total = 0;
  for (const auto& b : benchmarks) total += b.repetitions;
  return total;
}

const BenchmarkSpec& SuiteConfig::benchmark(std::string_view id) const {
  for (const auto& b : benchmarks) {
    if (b.id == id) return b;
  }
  throw Error(ErrorCode::kUnknownBenchmark, std::string(id));
}

SuiteConfig default_suite() {
  SuiteConfig s;
  s.benchmarks = {
      {"ddbench-small", "ddbench-small", 5, {"DISKB_LAT"}, {}},
      {"ddbench-large", "ddbench-large", 5, {"DISKB_THR"}, {}},
      {"download-1", "download-1", 5, {"NETB_1"}, {}},
      {"download-2", "download-2", 5, {"NETB_2"}, {}},
      {"cpubench", "cpubench", 5, {"CPU_DUR"}, {}},
      {"sysbench", "sysbench", 3,
       {"CPU_EVENTS", "CPU_LAT", "CPU_TH_LAT", "MEM_SPEED", "MEM_LAT", "DISK_FILE_R",
        "DISK_FILE_W", "DISK_FILE_F", "DISK_THR_R", "DISK_THR_W", "DISK_LAT"},
       {}},
      {"nench", "nench", 3,
       {"CPU_SHA256", "CPU_BZIP2", "CPU_AES", "NET_1", "NET_2", "NET_3", "NET_4", "NET_5",
        "DISK_SEEK", "DISK_SEQ_R", "DISK_SEQ_W"},
       {}},
      {"webbench", "wrk", 3, {"APPB"}, {}},
  };
  return s;
}

TrialSchedule plan_round(const SuiteConfig& suite, std::int64_t round_index,
                         std::uint64_t seed) {
  TrialSchedule schedule{round_index, seed, {}};
  schedule.entries.reserve(static_cast<std::size_t>(suite.total_trials()));
  for (const auto& b : suite.benchmarks) {
    for (int r = 0; r < b.repetitions; ++r) schedule.entries.push_back({b.id, r});
  }
  Rng rng(mix64(seed, static_cast<std::uint64_t>(round_index)));
  rng.shuffle(schedule.entries.begin(), schedule.entries.end());
  // Repetition ordinals follow execution order.
  std::map<std::string_view, int> seen;
  for (auto& e : schedule.entries) e.repetition = seen[e.benchmark_id]++;
  return schedule;
}

}  // namespace varbench
