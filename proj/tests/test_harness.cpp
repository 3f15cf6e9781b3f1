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

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>

#include "support.hpp"
#include "varbench/harness.hpp"

using namespace varbench;
using vbtest::code_of;
namespace fs = std::filesystem;

namespace {

const char* kSysbenchCpu = R"(sysbench 1.0.18 (using system LuaJIT 2.1.0-beta3)

Running the test with following options:
Number of threads: 1
Initializing random number generator from current time


Prime numbers limit: 10000

Initializing worker threads...

Threads started!

CPU speed:
    events per second:   927.41

General statistics:
    total time:                          10.0010s
    total number of events:              9276

Latency (ms):
         min:                                    1.07
         avg:                                    1.08
         max:                                    1.61
         95th percentile:                        1.10
         sum:                                 9996.43

Threads fairness:
    events (avg/stddev):           9276.0000/0.00
    execution time (avg/stddev):   9.9964/0.00
)";

const char* kNench = R"(-------------------------------------------------
 nench.sh v2019.07.20 -- https://git.io/nench.sh
-------------------------------------------------

CPU: SHA256-hashing 500 MB
    2.812 seconds
CPU: bzip2-compressing 500 MB
    5.104 seconds
CPU: AES-encrypting 500 MB
    1.247 seconds

ioping: seek rate
    min/avg/max/mdev = 93.2 us / 187.4 us / 6.91 ms / 101.3 us
ioping: sequential read speed
    generated 5.51 k requests in 5.00 s, 1.35 GiB, 1.10 k iops, 275.4 MiB/s

dd: sequential write speed
    1st run:    152.59 MiB/s
    2nd run:    158.31 MiB/s
    3rd run:    160.22 MiB/s
    average:    157.04 MiB/s

IPv4 speedtests
    your IPv4:    10.0.0.1

    Cachefly CDN:         95.61 MiB/s
    Leaseweb (NL):        48.20 MiB/s
    Softlayer DAL (US):   7.13 MiB/s
    Online.net (FR):      52.07 MiB/s
    OVH BHS (CA):         9.88 MiB/s
)";

SuiteConfig one_benchmark_suite(int reps = 1) {
  SuiteConfig s;
  s.benchmarks.push_back({"cpubench", "cpubench", reps, {"CPU_DUR"}, ""});
  return s;
}

class FailingBackend final : public ProbeBackend {
 public:
  FailingBackend(ProbeBackend& inner, std::string failing) : inner_(inner), failing_(std::move(failing)) {}
  bool resolves(const BenchmarkSpec& b) const override { return inner_.resolves(b); }
  ProbeOutput run(const BenchmarkSpec& b, const TrialContext& ctx) override {
    if (b.id == failing_) return {false, "", "boom", std::chrono::seconds(1)};
    return inner_.run(b, ctx);
  }

 private:
  ProbeBackend& inner_;
  std::string failing_;
};

fs::path temp_path(const std::string& name) {
  auto dir = fs::temp_directory_path() / "varbench_harness_test";
  fs::create_directories(dir);
  auto p = dir / name;
  fs::remove(p);
  return p;
}

RoundResult synthetic_round(std::int64_t r, std::uint64_t seed = 1) {
  const auto suite = default_suite();
  SyntheticBackend backend(default_profiles(), seed);
  VirtualClock clock(vbtest::hour(r));
  return run_round(plan_round(suite, r, seed), suite, vbtest::vm("aws", "a1.large"), backend, clock,
                   [](const std::string&) { return 0; });
}

}  // namespace

// ---- suite and scheduling --------------------------------------------------

TEST(Suite, DefaultHas34Trials) {
  const auto s = default_suite();
  EXPECT_NO_THROW(s.validate());
  EXPECT_EQ(s.total_trials(), 34);
  EXPECT_EQ(s.round_period, std::chrono::hours(1));
}

TEST(Suite, ValidateRejectsBadConfig) {
  auto s = one_benchmark_suite();
  s.benchmarks[0].repetitions = 0;
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kConfigError);
  s = one_benchmark_suite();
  s.benchmarks.push_back(s.benchmarks[0]);
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kConfigError);
  s = one_benchmark_suite();
  s.benchmarks[0].parser_id = "nope";
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::kConfigError);
}

TEST(Schedule, SingletonSuite) {
  const auto sched = plan_round(one_benchmark_suite(), 0, 1);
  ASSERT_EQ(sched.entries.size(), 1u);
  EXPECT_EQ(sched.entries[0].benchmark_id, "cpubench");
}

TEST(Schedule, DefaultSuiteIsPermutationOfMultiset) {
  const auto suite = default_suite();
  for (std::int64_t r = 0; r < 20; ++r) {
    const auto sched = plan_round(suite, r, 99);
    ASSERT_EQ(sched.entries.size(), 34u);
    std::map<std::string, std::vector<int>> reps;
    for (const auto& e : sched.entries) reps[e.benchmark_id].push_back(e.repetition);
    for (const auto& b : suite.benchmarks) {
      auto& v = reps[b.id];
      ASSERT_EQ(static_cast<int>(v.size()), b.repetitions) << b.id;
      for (int i = 0; i < b.repetitions; ++i) EXPECT_EQ(v[static_cast<std::size_t>(i)], i);
    }
  }
}

TEST(Schedule, DeterministicAndVariesAcrossRounds) {
  const auto suite = default_suite();
  std::set<std::vector<std::string>> orders;
  for (std::int64_t r = 0; r < 100; ++r) {
    const auto a = plan_round(suite, r, 3);
    EXPECT_EQ(a, plan_round(suite, r, 3));
    std::vector<std::string> ids;
    for (const auto& e : a.entries) ids.push_back(e.benchmark_id);
    orders.insert(ids);
  }
  EXPECT_EQ(orders.size(), 100u);
}

TEST(ScheduleProperty, PositionsAreUniform) {
  const auto suite = default_suite();
  const int rounds = 3000;
  std::map<std::string, std::vector<int>> counts;
  for (const auto& b : suite.benchmarks) counts[b.id].assign(34, 0);
  for (int r = 0; r < rounds; ++r) {
    const auto sched = plan_round(suite, r, 17);
    for (std::size_t pos = 0; pos < sched.entries.size(); ++pos) {
      ++counts[sched.entries[pos].benchmark_id][pos];
    }
  }
  // 33 degrees of freedom; 0.1% upper critical value is 63.87.
  for (const auto& b : suite.benchmarks) {
    const double expected = rounds * b.repetitions / 34.0;
    double chi2 = 0;
    for (int c : counts[b.id]) chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 63.87) << b.id;
  }
}

// ---- parsers ---------------------------------------------------------------

TEST(Parsers, SysbenchCpuBlock) {
  const auto v = parse_output(kSysbenchCpu, "sysbench");
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (ParsedValue{"CPU_EVENTS", 927.41}));
  EXPECT_EQ(v[1], (ParsedValue{"CPU_LAT", 1.08}));
}

TEST(Parsers, MissingLatencyIsOmitted) {
  std::string text = kSysbenchCpu;
  text = text.substr(0, text.find("Latency (ms):"));
  const auto v = parse_output(text, "sysbench");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].metric, "CPU_EVENTS");
}

TEST(Parsers, EmptyTextIsUnparseable) {
  for (const auto id : registered_parsers()) {
    EXPECT_EQ(code_of([&] { parse_output("", id); }), ErrorCode::kUnparseableOutput) << id;
  }
}

TEST(Parsers, UnknownParser) {
  EXPECT_FALSE(is_registered_parser("nope"));
  EXPECT_EQ(code_of([&] { parse_output("x", "nope"); }), ErrorCode::kInvalidArgument);
}

TEST(Parsers, Nench) {
  std::map<std::string, double> got;
  for (const auto& p : parse_output(kNench, "nench")) got[p.metric] = p.value;
  EXPECT_DOUBLE_EQ(got.at("CPU_SHA256"), 2.812);
  EXPECT_DOUBLE_EQ(got.at("CPU_BZIP2"), 5.104);
  EXPECT_DOUBLE_EQ(got.at("CPU_AES"), 1.247);
  EXPECT_DOUBLE_EQ(got.at("DISK_SEEK"), 187.4);
  EXPECT_DOUBLE_EQ(got.at("DISK_SEQ_R"), 275.4);
  EXPECT_DOUBLE_EQ(got.at("DISK_SEQ_W"), 157.04);
  EXPECT_DOUBLE_EQ(got.at("NET_1"), 95.61);
  EXPECT_DOUBLE_EQ(got.at("NET_2"), 48.20);
  EXPECT_DOUBLE_EQ(got.at("NET_3"), 7.13);
  EXPECT_DOUBLE_EQ(got.at("NET_4"), 52.07);
  EXPECT_DOUBLE_EQ(got.at("NET_5"), 9.88);
  EXPECT_EQ(got.size(), 11u);
}

TEST(Parsers, DdWgetWrkCpubenchRaw) {
  const auto dd = parse_output(
      "10+0 records in\n10+0 records out\n1073741824 bytes (1.1 GB, 1.0 GiB) copied, 8.2 s, 131 MB/s\n",
      "ddbench-large");
  EXPECT_EQ(dd, (std::vector<ParsedValue>{{"DISKB_THR", 131}}));
  const auto wg = parse_output(
      "2020-04-01 00:00:09 (93.9 MB/s) - '/dev/null' saved [1073741824/1073741824]\n", "download-1");
  EXPECT_EQ(wg, (std::vector<ParsedValue>{{"NETB_1", 93.9}}));
  const auto wrk = parse_output(
      "Running 30s test @ http://localhost/\n  2 threads and 10 connections\nRequests/sec:   8123.55\n"
      "Transfer/sec:      6.60MB\n",
      "wrk");
  EXPECT_EQ(wrk, (std::vector<ParsedValue>{{"APPB", 8123.55}}));
  EXPECT_EQ(parse_output("run 1 done\nmean duration 12.5 s\n", "cpubench"),
            (std::vector<ParsedValue>{{"CPU_DUR", 12.5}}));
  EXPECT_EQ(parse_output("CPU_LAT=1.5\nnoise\nNET_1 = 2e3\n", "raw"),
            (std::vector<ParsedValue>{{"CPU_LAT", 1.5}, {"NET_1", 2000}}));
}

TEST(Parsers, RenderParseRoundTripForEveryDefaultBenchmark) {
  const auto suite = default_suite();
  for (const auto& prof : default_profiles()) {
    const auto values = synth_values(prof, vbtest::hour(5));
    const auto parsed = parse_output(render_output(prof.parser_id, values), prof.parser_id);
    std::map<std::string, double> a, b;
    for (const auto& v : values) a[v.metric] = v.value;
    for (const auto& v : parsed) b[v.metric] = v.value;
    EXPECT_EQ(a, b) << prof.benchmark_id;
    for (const auto& [m, x] : b) {
      const auto& metrics = suite.benchmark(prof.benchmark_id).metrics;
      EXPECT_NE(std::find(metrics.begin(), metrics.end(), m), metrics.end()) << m;
    }
  }
}

// ---- synthetic probe -------------------------------------------------------

TEST(Synthetic, NoNoiseGivesBase) {
  SyntheticProfile p{"cpubench", "cpubench", {{"CPU_DUR", 12.25}}, 9, std::chrono::seconds(15)};
  for (int h = 0; h < 48; ++h) {
    const auto v = parse_output(synth_probe(p, vbtest::hour(h)), "cpubench");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].value, 12.25);
  }
}

TEST(Synthetic, DiurnalPeak) {
  SyntheticMetric m{"CPU_DUR", 10.0};
  m.diurnal_amplitude = 0.2;
  m.diurnal_peak_hour = 12.0;
  SyntheticProfile p{"cpubench", "cpubench", {m}, 1, std::chrono::seconds(15)};
  const double noon = synth_values(p, vbtest::hour(12))[0].value;
  const double midnight = synth_values(p, vbtest::hour(0))[0].value;
  EXPECT_GT(noon, midnight);
  EXPECT_NEAR(noon, 12.0, 1e-12);
  EXPECT_NEAR(midnight, 8.0, 1e-12);
}

TEST(Synthetic, WeekendOffset) {
  SyntheticMetric m{"CPU_DUR", 10.0};
  m.weekend_offset = 0.1;
  SyntheticProfile p{"cpubench", "cpubench", {m}, 1, std::chrono::seconds(15)};
  // 2020-04-04 is a Saturday, 2020-04-06 a Monday.
  EXPECT_NEAR(synth_values(p, parse_timestamp("2020-04-04T10:00:00Z"))[0].value, 11.0, 1e-12);
  EXPECT_NEAR(synth_values(p, parse_timestamp("2020-04-06T10:00:00Z"))[0].value, 10.0, 1e-12);
}

TEST(Synthetic, SampleMeanWithinThreeSigma) {
  SyntheticMetric m{"CPU_DUR", 50.0};
  m.noise = 0.05;
  SyntheticProfile p{"cpubench", "cpubench", {m}, 1234, std::chrono::seconds(15)};
  double sum = 0;
  for (int i = 0; i < 1000; ++i) sum += synth_values(p, vbtest::hour(i))[0].value;
  const double sigma_mean = 50.0 * 0.05 / std::sqrt(1000.0);
  EXPECT_NEAR(sum / 1000.0, 50.0, 3 * sigma_mean);
}

TEST(Synthetic, DeterministicGivenSeedAndTime) {
  for (const auto& p : default_profiles()) {
    EXPECT_EQ(synth_probe(p, vbtest::hour(7)), synth_probe(p, vbtest::hour(7)));
  }
}

TEST(Synthetic, ValidateRejectsBadProfiles) {
  SyntheticProfile p{"cpubench", "cpubench", {{"CPU_DUR", 0.0}}, 1, std::chrono::seconds(15)};
  EXPECT_THROW(p.validate(), Error);
  p.metrics[0].base = 1;
  p.metrics[0].noise = -0.1;
  EXPECT_THROW(p.validate(), Error);
  p.metrics[0].noise = 0;
  p.metrics[0].spike_probability = 1.5;
  EXPECT_THROW(p.validate(), Error);
}

// ---- round execution -------------------------------------------------------

TEST(RunRound, SyntheticAllSuccess) {
  const auto r = synthetic_round(0);
  EXPECT_EQ(r.trials.size(), 34u);
  EXPECT_EQ(r.errors, 0);
  EXPECT_FALSE(r.aborted());
  for (const auto& t : r.trials) {
    EXPECT_EQ(t.status, TrialStatus::kOk);
    EXPECT_FALSE(t.values.empty());
    EXPECT_FALSE(t.raw_output.empty());
  }
}

TEST(RunRound, FailingBenchmarkCountsItsRepetitions) {
  const auto suite = default_suite();
  SyntheticBackend inner(default_profiles(), 1);
  FailingBackend backend(inner, "sysbench");
  VirtualClock clock(vbtest::hour(0));
  const auto r = run_round(plan_round(suite, 0, 1), suite, vbtest::vm("aws", "t"), backend, clock,
                           [](const std::string&) { return 0; });
  EXPECT_EQ(r.trials.size(), 34u);
  EXPECT_EQ(r.errors, suite.benchmark("sysbench").repetitions);
  int failed = 0;
  for (const auto& t : r.trials) {
    if (t.status == TrialStatus::kFailed) {
      ++failed;
      EXPECT_EQ(t.benchmark_id, "sysbench");
      EXPECT_FALSE(t.error.empty());
    }
  }
  EXPECT_EQ(failed, r.errors);
}

TEST(RunRound, HookFailureAborts) {
  auto suite = default_suite();
  suite.hooks.power_on = "power-on {vm}";
  SyntheticBackend backend(default_profiles(), 1);
  VirtualClock clock(vbtest::hour(0));
  EXPECT_EQ(code_of([&] {
              run_round(plan_round(suite, 0, 1), suite, vbtest::vm("aws", "t"), backend, clock,
                        [](const std::string&) { return 1; });
            }),
            ErrorCode::kLifecycleHookFailed);
}

TEST(RunRound, HooksWrapTheTrials) {
  auto suite = one_benchmark_suite(2);
  suite.hooks.power_on = "on {provider} {type} {instance} {round}";
  suite.hooks.power_off = "off {vm}";
  SyntheticBackend backend(default_profiles(), 1);
  VirtualClock clock(vbtest::hour(3));
  std::vector<std::string> calls;
  const auto r = run_round(plan_round(suite, 3, 1), suite, vbtest::vm("aws", "a1.large", 2), backend,
                           clock, [&](const std::string& c) {
                             calls.push_back(c);
                             return 0;
                           });
  EXPECT_EQ(calls, (std::vector<std::string>{"on aws a1.large 2 3", "off aws/a1.large-2"}));
  EXPECT_EQ(r.trials.size(), 2u);
}

TEST(RunRound, TrialsAreSequential) {
  const auto r = synthetic_round(4);
  EXPECT_EQ(r.started_at, vbtest::hour(4));
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    EXPECT_EQ(r.trials[i].position, i);
    EXPECT_LT(r.trials[i].started_at, r.trials[i].finished_at);
    if (i > 0) EXPECT_GE(r.trials[i].started_at, r.trials[i - 1].finished_at);
  }
}

TEST(RunRound, UnresolvableBenchmark) {
  const auto suite = default_suite();
  CommandBackend backend;
  VirtualClock clock(vbtest::hour(0));
  EXPECT_EQ(code_of([&] {
              run_round(plan_round(suite, 0, 1), suite, vbtest::vm("aws", "t"), backend, clock);
            }),
            ErrorCode::kUnknownBenchmark);
}

TEST(RunRound, CommandBackendRunsTemplates) {
  SuiteConfig suite;
  suite.benchmarks.push_back({"echo", "raw", 2, {"CPU_LAT"}, "echo CPU_LAT={trial}.5"});
  suite.benchmarks.push_back({"fail", "raw", 1, {"CPU_LAT"}, "exit 3"});
  CommandBackend backend;
  VirtualClock clock(vbtest::hour(0));
  const auto r = run_round(plan_round(suite, 0, 1), suite, vbtest::vm("aws", "t"), backend, clock);
  EXPECT_EQ(r.errors, 1);
  for (const auto& t : r.trials) {
    if (t.benchmark_id == "echo") {
      ASSERT_EQ(t.values.size(), 1u);
      EXPECT_DOUBLE_EQ(t.values[0].value, static_cast<double>(t.position) + 0.5);
    } else {
      EXPECT_EQ(t.status, TrialStatus::kFailed);
    }
  }
}

TEST(Template, ExpandsPlaceholders) {
  EXPECT_EQ(expand_template("{benchmark}:{vm}:{provider}:{type}:{instance}:{round}:{trial}",
                            vbtest::vm("gcp", "E2-T1", 2), 7, 3, "nench"),
            "nench:gcp/E2-T1-2:gcp:E2-T1:2:7:3");
}

// ---- store -----------------------------------------------------------------

TEST(Store, PersistThenLoadIsEqual) {
  const auto p = temp_path("one.ndjson");
  const auto r = synthetic_round(0);
  persist_round(p, r);
  const auto back = load_rounds(p);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], r);
}

TEST(Store, LoadOrderIsPersistOrder) {
  const auto p = temp_path("two.ndjson");
  RoundStore store(p);
  store.append(synthetic_round(5));
  store.append(synthetic_round(2));
  const auto back = load_rounds(p);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].round_index, 5);
  EXPECT_EQ(back[1].round_index, 2);
}

TEST(Store, TruncatedFileIsCorrupt) {
  const auto p = temp_path("trunc.ndjson");
  persist_round(p, synthetic_round(0));
  persist_round(p, synthetic_round(1));
  const auto size = fs::file_size(p);
  fs::resize_file(p, size - 40);
  EXPECT_EQ(code_of([&] { load_rounds(p); }), ErrorCode::kStoreCorrupt);
  try {
    load_rounds(p);
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
  }
}

TEST(Store, GarbageLineIsCorrupt) {
  const auto p = temp_path("garbage.ndjson");
  persist_round(p, synthetic_round(0));
  std::ofstream(p, std::ios::app) << "{\"provider\": 1}\n";
  EXPECT_EQ(code_of([&] { load_rounds(p); }), ErrorCode::kStoreCorrupt);
}

TEST(Store, AbortedRoundRoundTrips) {
  const auto p = temp_path("aborted.ndjson");
  RoundResult r;
  r.vm = vbtest::vm("azure", "A2-v2");
  r.round_index = 3;
  r.started_at = vbtest::hour(3);
  r.provider_error = "LifecycleHookFailed: power-on";
  persist_round(p, r);
  EXPECT_EQ(load_rounds(p).at(0), r);
}

TEST(Store, ConcurrentAppendsStayWellFormed) {
  const auto p = temp_path("concurrent.ndjson");
  RoundStore store(p);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w) {
    workers.emplace_back([&, w] {
      for (int r = 0; r < 5; ++r) store.append(synthetic_round(w * 10 + r));
    });
  }
  for (auto& t : workers) t.join();
  const auto back = load_rounds(p);
  EXPECT_EQ(back.size(), 20u);
}

TEST(Export, OnlySuccessfulTrialsBecomeMeasurements) {
  auto r = synthetic_round(0);
  std::size_t expected = 0;
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    if (i % 3 == 0) {
      r.trials[i].status = TrialStatus::kFailed;
    } else {
      expected += r.trials[i].values.size();
    }
  }
  const std::vector<RoundResult> rounds{r};
  const auto ds = export_dataset(rounds);
  EXPECT_EQ(ds.size(), expected);
  for (const auto& m : ds.rows()) {
    const auto& t = r.trials[static_cast<std::size_t>(m.trial_index)];
    EXPECT_EQ(t.status, TrialStatus::kOk);
    EXPECT_EQ(m.timestamp, t.started_at);
    EXPECT_EQ(m.round_index, 0);
  }
}
