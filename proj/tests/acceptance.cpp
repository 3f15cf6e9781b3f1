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

// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "support.hpp"
#include "varbench/analysis.hpp"
#include "varbench/classification.hpp"
#include "varbench/cli.hpp"
#include "varbench/forecasting.hpp"
#include "varbench/harness.hpp"
#include "varbench/variability.hpp"

using namespace varbench;
namespace fs = std::filesystem;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

Outcome pass_if(bool ok, std::string detail) {
  return {ok ? Verdict::kPass : Verdict::kFail, std::move(detail)};
}

// ---- 1 ---------------------------------------------------------------------

Outcome table_rows() {
  const double rows[3][4] = {
      {2.50, 6.80, 3.99, 4.43}, {16.33, 41.74, 25.71, 27.93}, {5.16, 14.16, 9.65, 9.66}};
  double worst = 0;
  for (const auto& r : rows) worst = std::max(worst, std::abs(combine(r[0], r[1], r[2]) - r[3]));
  return pass_if(worst <= 0.005, fmt::format("max |vi - table| = {:.4f}", worst));
}

// ---- 2 ---------------------------------------------------------------------

Outcome ideal_vm() {
  std::mt19937_64 eng(2);
  std::uniform_real_distribution<double> val(-1e6, 1e6), unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(3, 10000);
  double worst = 0;
  int cases = 0;
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = i == 0 ? 3 : i == 1 ? 10000 : len(eng);
    double c = val(eng);
    if (c == 0.0) c = 1.0;
    const double a = unit(eng), b = unit(eng) * (1 - a);
    const auto dir = i % 2 ? Direction::kHIB : Direction::kLIB;
    const auto r = vi(std::vector<double>(n, c), dir, unit(eng), VIWeights{a, b, 1 - a - b});
    worst = std::max(worst, std::abs(r.vi));
    ++cases;
  }
  return pass_if(worst <= 1e-12, fmt::format("{} series, max |vi| = {:g}", cases, worst));
}

// ---- 3 ---------------------------------------------------------------------

Outcome scale_invariance() {
  double worst = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = vbtest::positive_series(10 + s * 5, s);
    const auto dir = s % 2 ? Direction::kHIB : Direction::kLIB;
    const double base = vi(x, dir).vi;
    for (double k : {0.01, 1.0, 3.7, 1e6}) {
      auto y = x;
      for (auto& v : y) v *= k;
      worst = std::max(worst, std::abs(vi(y, dir).vi - base) / base);
    }
  }
  return pass_if(worst <= 1e-9, fmt::format("max relative deviation {:g}", worst));
}

// ---- 4 ---------------------------------------------------------------------

Outcome mase_calibration() {
  double worst_naive = 0, worst_perfect = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto train = s % 2 ? vbtest::random_walk(200, s) : vbtest::positive_series(200, s);
    const std::vector<double> real(train.begin() + 1, train.end());
    const std::vector<double> pred(train.begin(), train.end() - 1);
    worst_naive = std::max(worst_naive, std::abs(mase(real, pred, train) - 1.0));
    worst_perfect = std::max(worst_perfect, mase(real, real, train));
  }
  return pass_if(worst_naive <= 1e-9 && worst_perfect == 0.0,
                 fmt::format("naive |MASE-1| <= {:g}, perfect MASE = {:g}", worst_naive,
                             worst_perfect));
}

// ---- 5 ---------------------------------------------------------------------

Outcome arima_consistency() {
  double err = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    err += std::abs(fit_arima(vbtest::ar1(1000, 0.6, s), {1, 0, 0}).phi[0] - 0.6);
  }
  err /= 50.0;
  int wn_stationary = 0, rw_nonstationary = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    if (adf_check(vbtest::white_noise(1000, s)).stationary) ++wn_stationary;
    if (!adf_check(vbtest::random_walk(1000, s)).stationary) ++rw_nonstationary;
  }
  return pass_if(err < 0.05 && wn_stationary >= 95 && rw_nonstationary >= 95,
                 fmt::format("mean |phi-0.6| = {:.4f}; ADF white noise stationary {}/100, random "
                             "walk non-stationary {}/100",
                             err, wn_stationary, rw_nonstationary));
}

// ---- 6 ---------------------------------------------------------------------

Outcome model_ordering() {
  Dataset ds;
  const auto& specs = catalog_default().specs();
  std::uint64_t seed = 600;
  for (int v = 1; v <= 3; ++v) {
    const auto key = vbtest::vm("sim", "T1", v);
    for (const auto& spec : specs) {
      auto z = vbtest::ar1(400, 0.6, seed++);
      for (auto& x : z) x = 100.0 + 5.0 * x;
      vbtest::add_series(ds, key, spec.id, z);
    }
  }
  EvalConfig cfg;
  cfg.models = {ForecastModel::kVar, ForecastModel::kArima};
  const auto rep = evaluate_all(ds, cfg);
  double sum[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (const auto& r : rep.rows) {
    const int i = r.model == ForecastModel::kArima ? 1 : 0;
    sum[i] += r.mase;
    ++n[i];
  }
  if (n[0] == 0 || n[1] == 0) return {Verdict::kFail, "missing model rows"};
  const double var = sum[0] / static_cast<double>(n[0]), arima = sum[1] / static_cast<double>(n[1]);
  return pass_if(arima <= var, fmt::format("mean MASE ARIMA {:.4f} vs VAR {:.4f} ({} + {} rows, {} "
                                           "skipped)",
                                           arima, var, n[1], n[0], rep.skipped.size()));
}

// ---- 7 / 8 -----------------------------------------------------------------

const Dataset& planted() {
  static const Dataset ds = vbtest::planted_dataset("sim", 6, 720, 0.2, 0.05, 77);
  return ds;
}

Outcome signal_detection() {
  const auto real = run_task(planted(), "sim", Task::kTimeDay);
  TaskOptions shuffled;
  shuffled.shuffle_labels = true;
  const auto null = run_task(planted(), "sim", Task::kTimeDay, shuffled);
  return pass_if(real.mean_accuracy >= 0.5 && std::abs(null.mean_accuracy - 0.25) <= 0.05,
                 fmt::format("TimeDay accuracy {:.3f}, shuffled {:.3f} (baseline 0.25)",
                             real.mean_accuracy, null.mean_accuracy));
}

Outcome null_weekday() {
  const auto r = run_task(planted(), "sim", Task::kDayWeek);
  return pass_if(std::abs(r.mean_accuracy - 1.0 / 7.0) <= 0.05,
                 fmt::format("DayWeek accuracy {:.3f} (baseline 0.143)", r.mean_accuracy));
}

// ---- 9 ---------------------------------------------------------------------

std::vector<double> noisy(std::size_t n, double base, double rel_sd, std::uint64_t seed) {
  auto e = vbtest::white_noise(n, seed, rel_sd);
  for (auto& v : e) v = base * (1.0 + v);
  return e;
}

Outcome coincidence() {
  std::mt19937_64 eng(9);
  std::vector<std::size_t> rounds(720);
  std::iota(rounds.begin(), rounds.end(), std::size_t{0});
  std::shuffle(rounds.begin() + 1, rounds.end() - 1, eng);
  std::uniform_real_distribution<double> mag(0.3, 0.6);
  auto a = noisy(720, 100, 0.01, 1), b = noisy(720, 40, 0.01, 2);
  for (std::size_t i = 1; i <= 70; ++i) {
    const double m = 1 + mag(eng);
    a[rounds[i]] *= m;
    b[rounds[i]] *= m;
  }
  const auto planted_verdict = gradient_coincidence(a, b, 100, 0.6);
  int false_related = 0;
  std::size_t max_overlap = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto v = gradient_coincidence(noisy(720, 10, 0.05, 1000 + 2 * s),
                                        noisy(720, 10, 0.05, 1001 + 2 * s), 100, 0.6);
    false_related += v.related ? 1 : 0;
    max_overlap = std::max(max_overlap, v.overlap);
  }
  return pass_if(planted_verdict.related && false_related == 0,
                 fmt::format("planted overlap {}/100; independent pairs related {}/100 (max "
                             "overlap {})",
                             planted_verdict.overlap, false_related, max_overlap));
}

// ---- 10 --------------------------------------------------------------------

Outcome filter_effect() {
  // Laplace relative noise: heavier tails than Gaussian, finite variance.
  std::mt19937_64 eng(10);
  std::exponential_distribution<double> ex(1.0);
  std::bernoulli_distribution sign(0.5);
  double total = 0;
  int n = 0;
  for (int v = 0; v < 6; ++v) {
    for (std::size_t m = 0; m < catalog_default().size(); ++m) {
      const double base = 10.0 * static_cast<double>(m + 1);
      const double scale = 0.01 * static_cast<double>(1 + (m % 5));
      std::vector<double> x(720);
      for (auto& e : x) e = base * (1.0 + scale * (sign(eng) ? ex(eng) : -ex(eng)));
      total += 1.0 - dispersion(percentile_filter(x)) / dispersion(x);
      ++n;
    }
  }
  const double reduction = total / n * 100.0;
  return pass_if(reduction >= 15.0 && reduction <= 45.0,
                 fmt::format("mean RSD reduction {:.1f}% over {} series", reduction, n));
}

// ---- 11 --------------------------------------------------------------------

int cli(std::vector<std::string> args, std::string* captured = nullptr) {
  args.insert(args.begin(), "varbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (captured != nullptr) *captured = out.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string snapshot(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string all;
  for (const auto& f : files) all += f.filename().string() + "\n" + slurp(f);
  return all;
}

Outcome end_to_end() {
  const auto root = fs::temp_directory_path() / "varbench_acceptance_e2e";
  fs::remove_all(root);
  fs::create_directories(root);
  { std::ofstream(root / "config.json") << R"({"seed": 7})"; }
  const auto store = (root / "store").string();
  const auto data = (root / "data.csv").string();
  const auto cfg = (root / "config.json").string();

  std::string first_store, first_csv, first_vi;
  std::vector<std::string> failures;
  for (int pass = 0; pass < 2; ++pass) {
    fs::remove_all(store);
    const int run = cli({"run", "-c", cfg, "--store", store, "--rounds", "24"});
    if (run != kExitOk) failures.push_back(fmt::format("run exit {}", run));
    const auto rounds = load_rounds(store_file(store, default_vms().front().key));
    if (rounds.size() != 24 || rounds.front().trials.size() != 34) {
      failures.push_back("unexpected store shape");
    }
    const int ex = cli({"export", "--store", store, "-o", data});
    if (ex != kExitOk) failures.push_back(fmt::format("export exit {}", ex));
    std::string vi_out;
    cli({"vi", "-i", data, "--seed", "7"}, &vi_out);
    if (pass == 0) {
      first_store = snapshot(store);
      first_csv = slurp(data);
      first_vi = vi_out;
    } else {
      if (snapshot(store) != first_store) failures.push_back("store differs between runs");
      if (slurp(data) != first_csv) failures.push_back("export differs between runs");
      if (vi_out != first_vi) failures.push_back("vi report differs between runs");
    }
  }

  std::istringstream in(first_csv);
  const auto ds = ingest_csv(in).dataset;
  const auto vm = ds.vms().front().label();
  const std::vector<std::vector<std::string>> commands = {
      {"vi", "-i", data},
      {"analyze", "rsd", "-i", data},
      {"analyze", "rsd", "-i", data, "--filtered"},
      {"analyze", "corr", "-i", data},
      {"analyze", "coincidence", "-i", data, "--n", "5"},
      {"analyze", "cpr", "-i", data},
      {"analyze", "filter", "-i", data, "--vm", vm, "--metric", "CPU_EVENTS"},
      {"forecast", "-i", data},
      {"classify", "-i", data},
      {"report", "-i", data, "--out-dir", (root / "report").string()},
  };
  int warned = 0;
  for (const auto& c : commands) {
    const int code = cli(c);
    if (code == kExitWarnings) ++warned;
    if (code > kExitWarnings) failures.push_back(fmt::format("{} exit {}", c[0], code));
  }
  if (!failures.empty()) return {Verdict::kFail, failures.front()};
  return {Verdict::kPass,
          fmt::format("{} measurements, {} analysis commands ok ({} with skip warnings), "
                      "double run byte-identical",
                      ds.size(), commands.size(), warned)};
}

// ---- 12 --------------------------------------------------------------------

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Outcome replay() {
  const char* path = std::getenv("VARBENCH_REPLAY_CSV");
  if (path == nullptr || *path == '\0') {
    return {Verdict::kSkip, "VARBENCH_REPLAY_CSV not set (companion dataset absent)"};
  }
  std::ifstream in(path);
  if (!in) return {Verdict::kFail, std::string("cannot read ") + path};
  const auto ds = ingest_csv(in).dataset;

  // Aggregate VI per (provider, class) as published.
  const std::map<std::pair<std::string, VmClass>, double> published = {
      {{"aws", VmClass::kC1}, 4.43},   {{"azure", VmClass::kC1}, 27.93},
      {{"gcp", VmClass::kC1}, 6.17},   {{"egi", VmClass::kC1}, 9.66},
      {{"aws", VmClass::kC2}, 4.78},   {{"azure", VmClass::kC2}, 25.84},
      {{"gcp", VmClass::kC2}, 5.51},   {{"egi", VmClass::kC2}, 13.54},
      {{"aws", VmClass::kC3}, 5.03},   {{"azure", VmClass::kC3}, 7.09},
      {{"gcp", VmClass::kC3}, 6.72},   {{"egi", VmClass::kC3}, 13.89},
      {{"aws", VmClass::kC4}, 4.81},   {{"azure", VmClass::kC4}, 6.42},
      {{"gcp", VmClass::kC4}, 6.15},   {{"egi", VmClass::kC4}, 12.42}};
  const auto rep = aggregate_vi(ds);
  std::map<std::pair<std::string, VmClass>, std::pair<double, double>> got;
  for (const auto& g : rep.groups) {
    auto& acc = got[{lower(g.provider), g.vm_class}];
    acc.first += g.vi * static_cast<double>(g.n_series);
    acc.second += static_cast<double>(g.n_series);
  }
  std::size_t vi_ok = 0;
  double worst = 0;
  for (const auto& [key, value] : published) {
    const auto it = got.find(key);
    if (it == got.end()) continue;
    const double d = std::abs(it->second.first / it->second.second - value);
    worst = std::max(worst, d);
    if (d <= 0.5) ++vi_ok;
  }

  // Provider ordering of average RSD per metric.
  const std::map<std::string, std::array<double, 4>> rsd_table = {
      {"CPU_EVENTS", {1.46, 4.76, 1.38, 1.19}},  {"CPU_LAT", {3.16, 4.61, 2.18, 1.30}},
      {"CPU_TH_LAT", {3.30, 9.74, 1.45, 2.60}},  {"CPU_SHA256", {1.75, 5.15, 2.14, 1.71}},
      {"CPU_BZIP2", {1.92, 4.73, 2.68, 1.56}},   {"CPU_AES", {4.00, 15.35, 3.35, 2.47}},
      {"CPU_DUR", {35.77, 22.66, 43.62, 21.22}}, {"MEM_SPEED", {1.80, 7.93, 1.61, 9.27}},
      {"MEM_LAT", {2.88, 8.49, 1.95, 9.56}},     {"DISK_FILE_R", {5.38, 61.09, 9.37, 15.76}},
      {"DISK_FILE_W", {5.38, 61.09, 9.37, 15.76}}, {"DISK_FILE_F", {5.38, 60.96, 9.36, 15.73}},
      {"DISK_THR_R", {5.38, 61.09, 9.37, 15.76}}, {"DISK_THR_W", {5.38, 61.09, 9.37, 15.76}},
      {"DISK_LAT", {6.09, 36.61, 9.51, 18.99}},  {"DISK_SEEK", {1.16, 19.01, 11.56, 98.03}},
      {"DISK_SEQ_R", {0.63, 31.33, 0.27, 19.24}}, {"DISK_SEQ_W", {0.37, 0.89, 9.96, 11.49}},
      {"DISKB_LAT", {13.37, 87.34, 12.77, 102.98}}, {"DISKB_THR", {5.96, 2.37, 13.04, 13.62}},
      {"NET_1", {8.99, 29.38, 7.04, 4.51}},      {"NET_2", {16.13, 30.18, 27.41, 14.19}},
      {"NET_3", {24.39, 14.94, 10.28, 1.30}},    {"NET_4", {10.46, 13.58, 9.51, 6.54}},
      {"NET_5", {10.81, 7.47, 6.98, 3.82}},      {"NETB_1", {7.29, 25.88, 19.63, 78.82}},
      {"NETB_2", {8.96, 19.04, 6.77, 2.85}},     {"APPB", {1.97, 4.89, 1.04, 1.74}}};
  const std::array<std::string, 4> providers = {"aws", "azure", "gcp", "egi"};
  std::map<std::string, std::string> names;
  for (const auto& vm : ds.vms()) names[lower(vm.provider)] = vm.provider;
  std::map<std::string, std::array<double, 4>> measured;
  for (std::size_t p = 0; p < providers.size(); ++p) {
    if (names.count(providers[p]) == 0) continue;
    for (const auto& e : rsd_summary(ds, names[providers[p]]).entries) {
      measured[e.metric][p] = e.avg;
    }
  }
  auto order = [](const std::array<double, 4>& v) {
    std::array<int, 4> idx = {0, 1, 2, 3};
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] < v[b]; });
    return idx;
  };
  std::size_t same = 0;
  for (const auto& [metric, values] : rsd_table) {
    const auto it = measured.find(metric);
    if (it != measured.end() && order(it->second) == order(values)) ++same;
  }
  const bool ok = vi_ok == published.size() && same * 5 >= rsd_table.size() * 4;
  return pass_if(ok, fmt::format("VI within 0.5 for {}/{} groups (max dev {:.2f}); RSD ordering "
                                 "matches for {}/{} metrics",
                                 vi_ok, published.size(), worst, same, rsd_table.size()));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"indicator arithmetic on published rows", table_rows},
      {"ideal VM has zero indicator", ideal_vm},
      {"indicator scale invariance", scale_invariance},
      {"MASE calibration", mase_calibration},
      {"ARIMA consistency and ADF decisions", arima_consistency},
      {"ARIMA beats VAR on AR(1) panel", model_ordering},
      {"TimeDay signal detection", signal_detection},
      {"DayWeek null accuracy", null_weekday},
      {"gradient coincidence discrimination", coincidence},
      {"percentile filter RSD reduction", filter_effect},
      {"harness end to end", end_to_end},
      {"companion dataset replay", replay},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kFail ? "FAIL" : "SKIP";
    if (o.verdict == Verdict::kFail) ++failed;
    std::cout << fmt::format("[{}] {:2d} {}: {} ({:.2f} s)", tag, i + 1, criteria[i].first,
                             o.detail, secs)
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
