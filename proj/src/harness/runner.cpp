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

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <thread>

#include "varbench/harness.hpp"
#include "varbench/random.hpp"

namespace varbench {

Timestamp SystemClock::now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

void SystemClock::sleep_until(Timestamp t) { std::this_thread::sleep_until(t); }

SyntheticBackend::SyntheticBackend(std::vector<SyntheticProfile> profiles,
                                   std::uint64_t run_seed)
    : run_seed_(run_seed) {
  for (auto& p : profiles) {
    p.validate();
    auto id = p.benchmark_id;
    profiles_.insert_or_assign(std::move(id), std::move(p));
  }
}

bool SyntheticBackend::resolves(const BenchmarkSpec& bench) const {
  return profiles_.find(bench.id) != profiles_.end();
}

ProbeOutput SyntheticBackend::run(const BenchmarkSpec& bench, const TrialContext& ctx) {
  auto it = profiles_.find(bench.id);
  if (it == profiles_.end()) throw Error(ErrorCode::kUnknownBenchmark, bench.id);
  SyntheticProfile profile = it->second;
  profile.seed = mix64(profile.seed, mix64(run_seed_, stable_hash(ctx.vm.label())));
  return {true, synth_probe(profile, ctx.at), {}, profile.duration};
}

std::string expand_template(std::string_view tmpl, const VmKey& vm, std::int64_t round,
                            std::size_t trial, std::string_view benchmark) {
  const std::pair<std::string_view, std::string> subs[] = {
      {"{benchmark}", std::string(benchmark)},
      {"{vm}", vm.label()},
      {"{provider}", vm.provider},
      {"{type}", vm.vm_type},
      {"{instance}", std::to_string(vm.instance)},
      {"{round}", std::to_string(round)},
      {"{trial}", std::to_string(trial)},
  };
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [key, value] : subs) {
        if (tmpl.substr(i, key.size()) == key) {
          out += value;
          i += key.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

namespace {

int decode_status(int status) {
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

ProbeOutput CommandBackend::run(const BenchmarkSpec& bench, const TrialContext& ctx) {
  const auto cmd = expand_template(bench.command, ctx.vm, ctx.round_index, ctx.position, bench.id);
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return {false, {}, "cannot start '" + cmd + "'"};
  ProbeOutput out;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe.get())) > 0) out.raw.append(buf, n);
  const int status = decode_status(pclose(pipe.release()));
  if (status != 0) {
    out.ok = false;
    out.error = "exit status " + std::to_string(status);
  }
  return out;
}

int shell_hook_runner(const std::string& command) {
  return decode_status(std::system(command.c_str()));
}

RoundResult run_round(const TrialSchedule& schedule, const SuiteConfig& suite, const VmKey& vm,
                      ProbeBackend& backend, Clock& clock, const HookRunner& hooks) {
  if (schedule.entries.size() > static_cast<std::size_t>(suite.total_trials())) {
    throw Error(ErrorCode::kInvalidArgument, "schedule has more trials than the suite plans");
  }
  std::vector<const BenchmarkSpec*> benches;
  benches.reserve(schedule.entries.size());
  for (const auto& e : schedule.entries) {
    const auto& bench = suite.benchmark(e.benchmark_id);
    if (!backend.resolves(bench)) {
      throw Error(ErrorCode::kUnknownBenchmark, "backend cannot run " + bench.id);
    }
    benches.push_back(&bench);
  }

  RoundResult result;
  result.vm = vm;
  result.round_index = schedule.round_index;
  result.seed = schedule.seed;
  result.started_at = clock.now();

  auto run_hook = [&](const std::string& tmpl, const char* which) {
    if (tmpl.empty()) return;
    const auto cmd = expand_template(tmpl, vm, schedule.round_index, 0);
    const int status = hooks(cmd);
    if (status != 0) {
      throw Error(ErrorCode::kLifecycleHookFailed, std::string(which) + " hook '" + cmd +
                                                       "' exited with " + std::to_string(status));
    }
  };

  run_hook(suite.hooks.power_on, "power-on");
  result.trials.reserve(schedule.entries.size());
  for (std::size_t pos = 0; pos < schedule.entries.size(); ++pos) {
    const auto& entry = schedule.entries[pos];
    const auto& bench = *benches[pos];
    TrialRecord rec;
    rec.benchmark_id = bench.id;
    rec.position = pos;
    rec.repetition = entry.repetition;
    rec.started_at = clock.now();
    ProbeOutput out;
    try {
      out = backend.run(bench, {vm, schedule.round_index, pos, entry.repetition, rec.started_at});
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
    clock.advance(out.simulated_duration);
    rec.finished_at = clock.now();
    rec.raw_output = std::move(out.raw);
    if (!out.ok) {
      rec.status = TrialStatus::kFailed;
      rec.error = "probe failed: " + out.error;
    } else {
      try {
        rec.values = parse_output(rec.raw_output, bench.parser_id);
      } catch (const Error& e) {
        rec.status = TrialStatus::kFailed;
        rec.error = e.what();
      }
    }
    if (rec.status == TrialStatus::kFailed) ++result.errors;
    result.trials.push_back(std::move(rec));
  }
  run_hook(suite.hooks.power_off, "power-off");
  return result;
}

}  // namespace varbench
