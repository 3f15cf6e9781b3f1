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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "varbench/model.hpp"
#include "varbench/time.hpp"

namespace varbench {

// ---------------------------------------------------------------------------
// Suite configuration and RMT planning
// ---------------------------------------------------------------------------

struct BenchmarkSpec {
  std::string id;
  std::string parser_id;
  int repetitions = 1;
  std::vector<std::string> metrics;  // metric ids the parser may produce
  // External command template. Placeholders: {benchmark} {vm} {provider}
  // {type} {instance} {round} {trial}. Empty for synthetic-only suites.
  std::string command;
};

struct LifecycleHooks {
  std::string power_on;   // run before the first trial of a round
  std::string power_off;  // run after the last trial of a round
};

struct SuiteConfig {
  std::vector<BenchmarkSpec> benchmarks;
  std::chrono::seconds round_period{3600};
  LifecycleHooks hooks;

  /// Unique ids, positive repetitions, registered parsers, positive period.
  /// Throws Error(kConfigError).
  void validate() const;
  int total_trials() const;
  /// Throws Error(kUnknownBenchmark).
  const BenchmarkSpec& benchmark(std::string_view id) const;
};

/// Six probes totalling 34 trials per round: DDBench and DownloadBench 10
/// each (5 per configuration), CPUBench 5, Sysbench, Nench and WebBench 3.
SuiteConfig default_suite();

struct ScheduleEntry {
  std::string benchmark_id;
  int repetition = 0;  // 0-based ordinal among this benchmark's trials

  friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

struct TrialSchedule {
  std::int64_t round_index = 0;
  std::uint64_t seed = 0;
  std::vector<ScheduleEntry> entries;

  friend bool operator==(const TrialSchedule&, const TrialSchedule&) = default;
};

/// Seeded random permutation of the round's full trial multiset
/// (repetitions of one benchmark are interleaved with the others).
TrialSchedule plan_round(const SuiteConfig& suite, std::int64_t round_index,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Output parsing
// ---------------------------------------------------------------------------

struct ParsedValue {
  std::string metric;
  double value = 0.0;

  friend bool operator==(const ParsedValue&, const ParsedValue&) = default;
};

std::span<const std::string_view> registered_parsers();
bool is_registered_parser(std::string_view parser_id);

/// Extracts every metric value present in `raw`. Values that are missing
/// from the text are omitted. Throws Error(kUnparseableOutput) when nothing
/// can be extracted and Error(kInvalidArgument) for unknown parser ids.
std::vector<ParsedValue> parse_output(std::string_view raw, std::string_view parser_id);

/// Renders values in the textual format `parser_id` understands; inverse
/// of parse_output for the values given.
std::string render_output(std::string_view parser_id, std::span<const ParsedValue> values);

// ---------------------------------------------------------------------------
// Synthetic probes
// ---------------------------------------------------------------------------

struct SyntheticMetric {
  std::string metric;
  double base = 1.0;
  double noise = 0.0;              // relative sigma of Gaussian noise
  double diurnal_amplitude = 0.0;  // relative amplitude of a 24h cosine
  double diurnal_peak_hour = 12.0; // UTC hour of the cosine's maximum
  double weekend_offset = 0.0;     // relative shift on Saturday/Sunday (UTC)
  double spike_probability = 0.0;
  double spike_magnitude = 0.0;    // relative shift when a spike fires
};

struct SyntheticProfile {
  std::string benchmark_id;
  std::string parser_id;
  std::vector<SyntheticMetric> metrics;
  std::uint64_t seed = 0;
  std::chrono::seconds duration{15};  // simulated trial duration

  /// base > 0, noise >= 0, probabilities in [0,1], parser registered.
  void validate() const;
};

/// value = base * (1 + diurnal(at) + weekend(at) + noise + spike);
/// deterministic in (profile.seed, at).
std::vector<ParsedValue> synth_values(const SyntheticProfile& profile, Timestamp at);

/// synth_values rendered through the profile's parser format.
std::string synth_probe(const SyntheticProfile& profile, Timestamp at);

/// One profile per benchmark of default_suite(), covering all 28 metrics.
std::vector<SyntheticProfile> default_profiles();

// ---------------------------------------------------------------------------
// Clocks and probe backends
// ---------------------------------------------------------------------------

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
  virtual void sleep_until(Timestamp t) = 0;
  /// Accounts for simulated work. Real clocks ignore it.
  virtual void advance(std::chrono::seconds d) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override;
  void sleep_until(Timestamp t) override;
  void advance(std::chrono::seconds) override {}
};

/// Deterministic clock for accelerated runs and tests: sleeping jumps
/// forward instantly.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start) : now_(start) {}
  Timestamp now() override { return now_; }
  void sleep_until(Timestamp t) override {
    if (t > now_) now_ = t;
  }
  void advance(std::chrono::seconds d) override { now_ += d; }

 private:
  Timestamp now_;
};

struct TrialContext {
  VmKey vm;
  std::int64_t round_index = 0;
  std::size_t position = 0;
  int repetition = 0;
  Timestamp at{};
};

struct ProbeOutput {
  bool ok = true;
  std::string raw;
  std::string error;  // set when !ok
  std::chrono::seconds simulated_duration{0};
};

class ProbeBackend {
 public:
  virtual ~ProbeBackend() = default;
  virtual bool resolves(const BenchmarkSpec& bench) const = 0;
  virtual ProbeOutput run(const BenchmarkSpec& bench, const TrialContext& ctx) = 0;
};

/// Generates outputs from synthetic profiles, keyed by benchmark id. Each
/// VM gets its own noise stream derived from (profile seed, run seed, vm).
class SyntheticBackend final : public ProbeBackend {
 public:
  SyntheticBackend(std::vector<SyntheticProfile> profiles, std::uint64_t run_seed);

  bool resolves(const BenchmarkSpec& bench) const override;
  ProbeOutput run(const BenchmarkSpec& bench, const TrialContext& ctx) override;

 private:
  std::map<std::string, SyntheticProfile, std::less<>> profiles_;
  std::uint64_t run_seed_;
};

/// Runs BenchmarkSpec::command through the shell and captures stdout.
/// A non-zero exit status marks the trial as failed.
class CommandBackend final : public ProbeBackend {
 public:
  bool resolves(const BenchmarkSpec& bench) const override { return !bench.command.empty(); }
  ProbeOutput run(const BenchmarkSpec& bench, const TrialContext& ctx) override;
};

/// Replaces {benchmark} {vm} {provider} {type} {instance} {round} {trial}.
std::string expand_template(std::string_view tmpl, const VmKey& vm, std::int64_t round,
                            std::size_t trial, std::string_view benchmark = {});

/// Executes a lifecycle hook; returns the command's exit status.
using HookRunner = std::function<int(const std::string& command)>;
int shell_hook_runner(const std::string& command);

// ---------------------------------------------------------------------------
// Rounds
// ---------------------------------------------------------------------------

enum class TrialStatus { kOk, kFailed };

struct TrialRecord {
  std::string benchmark_id;
  std::size_t position = 0;
  int repetition = 0;
  Timestamp started_at{};
  Timestamp finished_at{};
  std::string raw_output;
  TrialStatus status = TrialStatus::kOk;
  std::string error;  // failure tag when status == kFailed
  std::vector<ParsedValue> values;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct RoundResult {
  VmKey vm;
  std::int64_t round_index = 0;
  std::uint64_t seed = 0;
  Timestamp started_at{};
  std::vector<TrialRecord> trials;
  int errors = 0;              // trials with status kFailed
  std::string provider_error;  // non-empty when the round was aborted

  bool aborted() const { return !provider_error.empty(); }

  friend bool operator==(const RoundResult&, const RoundResult&) = default;
};

/// Executes the schedule strictly sequentially on one VM. Trial failures
/// are recorded and do not stop the round. Throws Error(kUnknownBenchmark)
/// if the backend cannot resolve a scheduled benchmark, and
/// Error(kLifecycleHookFailed) if a power hook exits non-zero.
RoundResult run_round(const TrialSchedule& schedule, const SuiteConfig& suite, const VmKey& vm,
                      ProbeBackend& backend, Clock& clock,
                      const HookRunner& hooks = shell_hook_runner);

// ---------------------------------------------------------------------------
// Bins: append-only NDJSON round store
// ---------------------------------------------------------------------------

std::string round_to_json(const RoundResult& round);
/// Throws Error(kStoreCorrupt).
RoundResult round_from_json(std::string_view line);

/// One bin file. Appends from several threads are serialized.
class RoundStore {
 public:
  explicit RoundStore(std::filesystem::path path);

  void append(const RoundResult& round);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mu_;
};

void persist_round(const std::filesystem::path& path, const RoundResult& round);

/// Reads rounds in persist order. Throws Error(kStoreCorrupt) with the byte
/// offset of the first bad or truncated record.
std::vector<RoundResult> load_rounds(const std::filesystem::path& path);

/// Measurements of all successful trials, in round/position order. Values
/// for metrics outside `catalog` are dropped.
Dataset export_dataset(std::span<const RoundResult> rounds,
                       const Catalog& catalog = catalog_default());

}  // namespace varbench
