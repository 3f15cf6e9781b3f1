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
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "varbench/analysis.hpp"
#include "varbench/classification.hpp"
#include "varbench/cli.hpp"
#include "varbench/random.hpp"
#include "varbench/forecasting.hpp"
#include "varbench/variability.hpp"

namespace varbench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct Provenance {
  std::string input_digest;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> params;
};

std::string cell_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return fmt::format("{}", v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

std::string provenance_comments(const Provenance& prov) {
  std::string s;
  s += fmt::format("# tool: varbench {}\n", version());
  s += fmt::format("# input_sha256: {}\n", prov.input_digest);
  s += fmt::format("# seed: {}\n", prov.seed);
  std::string params;
  for (const auto& [k, v] : prov.params) params += (params.empty() ? "" : ";") + k + "=" + v;
  s += fmt::format("# params: {}\n", params);
  return s;
}

std::string render_csv(const Provenance& prov, const Table& t) {
  std::string s = provenance_comments(prov);
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + cell_text(row[i]);
    s += "\n";
  }
  return s;
}

json provenance_json(const Provenance& prov) {
  json params = json::object();
  for (const auto& [k, v] : prov.params) params[k] = v;
  return {{"tool", "varbench"},
          {"version", std::string(version())},
          {"input_sha256", prov.input_digest},
          {"seed", prov.seed},
          {"params", params}};
}

json table_json(const Table& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json o = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = row[i];
    rows.push_back(std::move(o));
  }
  return rows;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  bool warned = false;

  void warn(const std::string& msg) {
    err << "warning: " << msg << "\n";
    warned = true;
  }
};

struct CommonOpts {
  std::string input;
  std::string output;
  bool as_json = false;
  std::uint64_t seed = 0;
};

void emit(Context& ctx, const CommonOpts& o, const std::string& text) {
  if (o.output.empty()) {
    ctx.out << text;
    return;
  }
  const fs::path p(o.output);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error(ErrorCode::kConfigError, "cannot write " + o.output);
  f << text;
}

void emit_table(Context& ctx, const CommonOpts& o, const Provenance& prov, const Table& t) {
  if (o.as_json) {
    emit(ctx, o, json{{"provenance", provenance_json(prov)}, {"rows", table_json(t)}}.dump(2) + "\n");
  } else {
    emit(ctx, o, render_csv(prov, t));
  }
}

struct LoadedData {
  Dataset dataset;
  std::string digest;
};

LoadedData load_input(Context& ctx, const std::string& path) {
  if (path.empty()) throw Error(ErrorCode::kConfigError, "--input is required");
  const auto text = read_file(path);
  std::istringstream in(text);
  auto res = ingest_csv(in);
  for (const auto& e : res.errors) {
    ctx.warn(fmt::format("{}:{}: rejected row ({}: {})", path, e.line, to_string(e.code), e.detail));
  }
  return {std::move(res.dataset), sha256_hex(text)};
}

std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  if (out.size() != expected) {
    throw Error(ErrorCode::kConfigError, fmt::format("{} needs {} comma-separated values", what, expected));
  }
  return out;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double v) { return fmt::format("{}", v); }

// ---- run / export --------------------------------------------------------

struct RunOpts {
  std::string config;
  std::string store;
  std::int64_t rounds = 24;
  std::int64_t start_round = 0;
  std::optional<std::uint64_t> seed;
  std::string clock = "accelerated";
};

fs::path resolve_store(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VARBENCH_STORE_DIR"); env != nullptr && *env != '\0') return env;
  return "store";
}

int cmd_run(Context& ctx, const RunOpts& o) {
  if (o.config.empty()) throw Error(ErrorCode::kConfigError, "--config is required");
  if (!fs::exists(o.config)) throw Error(ErrorCode::kConfigError, "config not found: " + o.config);
  const auto text = read_file(o.config);
  const auto cfg = parse_run_config(text);
  if (o.rounds < 1 || o.start_round < 0) {
    throw Error(ErrorCode::kConfigError, "--rounds must be >= 1 and --start-round >= 0");
  }
  if (o.clock != "accelerated" && o.clock != "real") {
    throw Error(ErrorCode::kConfigError, "--clock must be 'accelerated' or 'real'");
  }
  const std::uint64_t seed = o.seed.value_or(cfg.seed.value_or(0));
  const auto dir = resolve_store(o.store);
  fs::create_directories(dir);

  json manifest = {{"tool", "varbench"},
                   {"version", std::string(version())},
                   {"config", o.config},
                   {"config_sha256", sha256_hex(text)},
                   {"seed", seed},
                   {"clock", o.clock},
                   {"start_round", o.start_round},
                   {"stop_round", o.start_round + o.rounds}};
  {
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << "\n";
  }

  std::unique_ptr<ProbeBackend> backend;
  if (cfg.backend == BackendKind::kSynthetic) {
    backend = std::make_unique<SyntheticBackend>(cfg.profiles, seed);
  } else {
    backend = std::make_unique<CommandBackend>();
  }
  std::map<VmKey, std::unique_ptr<RoundStore>> stores;
  for (const auto& d : cfg.vms) stores[d.key] = std::make_unique<RoundStore>(store_file(dir, d.key));

  SystemClock system_clock;
  std::size_t failed_trials = 0, aborted = 0, total = 0;
  for (std::int64_t r = o.start_round; r < o.start_round + o.rounds; ++r) {
    const Timestamp due = cfg.start + cfg.suite.round_period * r;
    for (const auto& d : cfg.vms) {
      const auto schedule = plan_round(cfg.suite, r, mix64(seed, stable_hash(d.key.label())));
      VirtualClock virtual_clock(due);
      Clock* clock = &virtual_clock;
      if (o.clock == "real") {
        system_clock.sleep_until(due);
        clock = &system_clock;
      }
      RoundResult round;
      try {
        round = run_round(schedule, cfg.suite, d.key, *backend, *clock);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kLifecycleHookFailed) throw;
        round = RoundResult{};
        round.vm = d.key;
        round.round_index = r;
        round.seed = schedule.seed;
        round.started_at = due;
        round.provider_error = e.what();
      }
      stores.at(d.key)->append(round);
      ++total;
      failed_trials += static_cast<std::size_t>(round.errors);
      if (round.aborted()) {
        ++aborted;
        ctx.warn(fmt::format("{} round {} aborted: {}", d.key.label(), r, round.provider_error));
      }
    }
  }
  ctx.out << fmt::format("rounds: {}\naborted: {}\nfailed_trials: {}\nstore: {}\n", total, aborted,
                         failed_trials, dir.string());
  if (failed_trials > 0) ctx.warned = true;
  return ctx.warned ? kExitWarnings : kExitOk;
}

std::vector<fs::path> store_files(const fs::path& p) {
  if (!fs::exists(p)) throw Error(ErrorCode::kConfigError, "store not found: " + p.string());
  if (fs::is_regular_file(p)) return {p};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && e.path().extension() == ".ndjson") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_export(Context& ctx, const CommonOpts& o, const std::string& store) {
  const auto files = store_files(resolve_store(store));
  std::string all;
  std::vector<RoundResult> rounds;
  for (const auto& f : files) {
    all += read_file(f);
    auto part = load_rounds(f);
    rounds.insert(rounds.end(), std::make_move_iterator(part.begin()),
                  std::make_move_iterator(part.end()));
  }
  const auto ds = export_dataset(rounds);
  Provenance prov{sha256_hex(all), o.seed, {{"store", resolve_store(store).string()}}};
  std::ostringstream csv;
  write_csv(ds, csv);
  emit(ctx, o, provenance_comments(prov) + csv.str());
  return ctx.warned ? kExitWarnings : kExitOk;
}

// ---- vi ------------------------------------------------------------------

struct ViOpts {
  double threshold = 0.0;
  std::string weights;
};

Table vi_table(const VIReport& rep) {
  Table t;
  t.columns = {"level", "provider", "vm_class", "vm_type", "vm", "metric", "n",
               "breadth", "dispersion", "speed", "vi"};
  for (const auto& r : rep.rows) {
    t.rows.push_back({"series", r.vm.provider, std::string(to_string(r.vm.vm_class)), r.vm.vm_type,
                      r.vm.label(), r.metric, r.result.n_points, r.result.breadth,
                      r.result.dispersion, r.result.speed, r.result.vi});
  }
  for (const auto& g : rep.groups) {
    t.rows.push_back({"group", g.provider, std::string(to_string(g.vm_class)), g.vm_type, "", "",
                      g.n_series, g.breadth, g.dispersion, g.speed, g.vi});
  }
  return t;
}

VIWeights parse_weights(const std::string& s) {
  VIWeights w;
  if (s.empty()) return w;
  const auto v = parse_list(s, 3, "--weights");
  w = {v[0], v[1], v[2]};
  try {
    w.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  return w;
}

int cmd_vi(Context& ctx, const CommonOpts& o, const ViOpts& v) {
  const auto w = parse_weights(v.weights);
  if (!(v.threshold >= 0.0)) throw Error(ErrorCode::kConfigError, "--threshold must be >= 0");
  auto data = load_input(ctx, o.input);
  const auto rep = aggregate_vi(data.dataset, v.threshold, w);
  for (const auto& s : rep.skipped) {
    ctx.warn(fmt::format("vi: skipped {} {} ({})", s.vm.label(), s.metric, to_string(s.reason)));
  }
  Provenance prov{data.digest, o.seed,
                  {{"threshold", num(v.threshold)},
                   {"weights", fmt::format("{},{},{}", w.w_b, w.w_d, w.w_s)}}};
  emit_table(ctx, o, prov, vi_table(rep));
  return ctx.warned ? kExitWarnings : kExitOk;
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeOpts {
  std::string provider;
  std::string vm;
  std::string metrics;
  std::string metric;
  bool filtered = false;
  std::size_t n = 100;
  double coincidence_threshold = 0.6;
  double lo = 5.0;
  double hi = 95.0;
  std::string vms_file;
};

std::vector<std::string> providers_of(const Dataset& ds, const std::string& only) {
  if (!only.empty()) return {only};
  return ds.providers();
}

std::vector<VmKey> select_vms(const Dataset& ds, const std::string& label) {
  auto vms = ds.vms();
  if (label.empty()) return vms;
  std::vector<VmKey> out;
  for (const auto& v : vms) {
    if (v.label() == label) out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::kEmptySelection, "no VM labelled " + label);
  return out;
}

int cmd_rsd(Context& ctx, const CommonOpts& o, const AnalyzeOpts& a) {
  auto data = load_input(ctx, o.input);
  Table t;
  t.columns = {"provider", "metric", "avg", "min", "max", "n_vms"};
  for (const auto& p : providers_of(data.dataset, a.provider)) {
    const auto s = rsd_summary(data.dataset, p, a.filtered);
    if (s.skipped > 0) ctx.warn(fmt::format("rsd: {} series skipped for {}", s.skipped, p));
    for (const auto& e : s.entries) t.rows.push_back({p, e.metric, e.avg, e.min, e.max, e.n_vms});
  }
  Provenance prov{data.digest, o.seed,
                  {{"filtered", a.filtered ? "5-95" : "none"}, {"provider", a.provider}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

int cmd_corr(Context& ctx, const CommonOpts& o, const AnalyzeOpts& a) {
  auto data = load_input(ctx, o.input);
  Table t;
  t.columns = {"scope", "metric_a", "metric_b", "r"};
  auto add = [&](const std::string& scope, const CorrelationMatrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < m.size(); ++j) {
        t.rows.push_back({scope, m.metrics[i], m.metrics[j], m.at(i, j)});
      }
    }
  };
  if (!a.vm.empty()) {
    for (const auto& vm : select_vms(data.dataset, a.vm)) {
      add(vm.label(), correlation_matrix(series_of_vm(data.dataset, vm)));
    }
  } else {
    for (const auto& p : providers_of(data.dataset, a.provider)) {
      try {
        add(p, provider_correlation(data.dataset, p));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInsufficientOverlap) throw;
        ctx.warn(fmt::format("corr: {} skipped ({})", p, e.what()));
      }
    }
  }
  Provenance prov{data.digest, o.seed, {{"provider", a.provider}, {"vm", a.vm}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

int cmd_coincidence(Context& ctx, const CommonOpts& o, const AnalyzeOpts& a) {
  auto data = load_input(ctx, o.input);
  const auto wanted = split_names(a.metrics);
  if (!wanted.empty() && wanted.size() != 2) {
    throw Error(ErrorCode::kConfigError, "--metrics takes exactly two metric ids");
  }
  Table t;
  t.columns = {"vm", "metric_a", "metric_b", "n", "overlap", "threshold", "related"};
  for (const auto& vm : select_vms(data.dataset, a.vm)) {
    const auto series = series_of_vm(data.dataset, vm);
    std::vector<std::pair<std::string, std::string>> pairs;
    if (!wanted.empty()) {
      pairs.emplace_back(wanted[0], wanted[1]);
    } else {
      for (const auto& spec : catalog_default().specs()) {
        for (const auto& spec2 : catalog_default().specs()) {
          if (catalog_default().index_of(spec.id) < catalog_default().index_of(spec2.id) &&
              series.count(spec.id) != 0 && series.count(spec2.id) != 0) {
            pairs.emplace_back(spec.id, spec2.id);
          }
        }
      }
    }
    for (const auto& [ma, mb] : pairs) {
      if (series.count(ma) == 0 || series.count(mb) == 0) {
        ctx.warn(fmt::format("coincidence: {} lacks {} or {}", vm.label(), ma, mb));
        continue;
      }
      try {
        const auto v =
            gradient_coincidence(series.at(ma), series.at(mb), a.n, a.coincidence_threshold);
        t.rows.push_back({vm.label(), ma, mb, v.n, v.overlap, v.threshold, v.related});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTooShort && e.code() != ErrorCode::kZeroMean) throw;
        ctx.warn(fmt::format("coincidence: {} {}/{} skipped ({})", vm.label(), ma, mb,
                             to_string(e.code())));
      }
    }
  }
  Provenance prov{data.digest, o.seed,
                  {{"n", std::to_string(a.n)},
                   {"threshold", num(a.coincidence_threshold)},
                   {"vm", a.vm},
                   {"metrics", a.metrics}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

int cmd_cpr(Context& ctx, const CommonOpts& o, const AnalyzeOpts& a) {
  auto data = load_input(ctx, o.input);
  std::vector<VmDescriptor> vms = default_vms();
  if (!a.vms_file.empty()) {
    const auto text = read_file(a.vms_file);
    vms = parse_run_config(json{{"vms", json::parse(text, nullptr, false)}}.dump()).vms;
  }
  Table t;
  t.columns = {"provider", "vm_class", "vm_type", "metric", "mean", "cost_per_hour", "cpr", "excluded"};
  for (const auto& r : cpr_table(data.dataset, vms)) {
    t.rows.push_back({r.provider, std::string(to_string(r.vm_class)), r.vm_type, r.metric, r.mean,
                      r.cost_per_hour, r.cpr.ratio, r.cpr.excluded});
  }
  Provenance prov{data.digest, o.seed, {{"vms", a.vms_file.empty() ? "default" : a.vms_file}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

int cmd_filter(Context& ctx, const CommonOpts& o, const AnalyzeOpts& a) {
  if (a.vm.empty() || a.metric.empty()) {
    throw Error(ErrorCode::kConfigError, "filter needs --vm and --metric");
  }
  auto data = load_input(ctx, o.input);
  const auto vm = select_vms(data.dataset, a.vm).front();
  const auto s = to_series(data.dataset, a.metric, vm);
  const auto values = s.values();
  const auto kept = percentile_filter(values, a.lo, a.hi);
  const double lo = *std::min_element(kept.begin(), kept.end());
  const double hi = *std::max_element(kept.begin(), kept.end());
  Table t;
  t.columns = {"round", "timestamp", "value", "kept"};
  for (const auto& p : s.points) {
    t.rows.push_back({p.round_index, format_timestamp(p.timestamp), p.value,
                      p.value >= lo && p.value <= hi});
  }
  Provenance prov{data.digest, o.seed,
                  {{"vm", a.vm}, {"metric", a.metric}, {"lo", num(a.lo)}, {"hi", num(a.hi)}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

// ---- forecast ------------------------------------------------------------

struct ForecastOpts {
  std::string models = "naive,var,arima";
  std::string order = "1,1,1";
  std::size_t horizon = 5;
  int var_lag = 1;
  std::string mae_scale = "normalized";
  std::size_t min_points = 100;
};

EvalConfig eval_config(const ForecastOpts& f) {
  EvalConfig cfg;
  cfg.horizon = f.horizon;
  cfg.var_lag = f.var_lag;
  cfg.min_points = f.min_points;
  if (f.horizon == 0) throw Error(ErrorCode::kConfigError, "--horizon must be positive");
  if (f.var_lag < 1) throw Error(ErrorCode::kConfigError, "--var-lag must be >= 1");
  const auto ord = parse_list(f.order, 3, "--order");
  for (double v : ord) {
    if (v < 0 || v != static_cast<int>(v)) throw Error(ErrorCode::kConfigError, "--order takes integers");
  }
  cfg.order = {static_cast<int>(ord[0]), static_cast<int>(ord[1]), static_cast<int>(ord[2])};
  if (cfg.order.d > 2) throw Error(ErrorCode::kConfigError, "d must be 0, 1 or 2");
  if (f.mae_scale == "normalized") {
    cfg.mae_scale = MaeScale::kNormalized;
  } else if (f.mae_scale == "original") {
    cfg.mae_scale = MaeScale::kOriginal;
  } else {
    throw Error(ErrorCode::kConfigError, "--mae-scale must be 'normalized' or 'original'");
  }
  cfg.models.clear();
  for (const auto& m : split_names(f.models)) {
    std::string lower = m;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "naive") {
      cfg.models.push_back(ForecastModel::kNaive);
    } else if (lower == "var") {
      cfg.models.push_back(ForecastModel::kVar);
    } else if (lower == "arima") {
      cfg.models.push_back(ForecastModel::kArima);
    } else {
      throw Error(ErrorCode::kConfigError, "unknown model '" + m + "'");
    }
  }
  if (cfg.models.empty()) throw Error(ErrorCode::kConfigError, "--models is empty");
  return cfg;
}

int cmd_forecast(Context& ctx, const CommonOpts& o, const ForecastOpts& f) {
  const auto cfg = eval_config(f);
  auto data = load_input(ctx, o.input);
  const auto rep = evaluate_all(data.dataset, cfg);
  for (const auto& s : rep.skipped) {
    ctx.warn(fmt::format("forecast: {} {} {} skipped ({})", s.vm.label(), s.metric,
                         to_string(s.model), to_string(s.reason)));
  }
  Table t;
  t.columns = {"level", "provider", "vm", "metric", "model", "h", "mae", "mase",
               "naive_mae", "mae_lt_0.05", "mae_lt_0.02"};
  for (const auto& r : rep.rows) {
    t.rows.push_back({"series", r.vm.provider, r.vm.label(), r.metric, std::string(to_string(r.model)),
                      r.horizon, r.mae, r.mase, r.naive_denominator, r.mae_below_005,
                      r.mae_below_002});
  }
  for (const auto& a : rep.by_vm) {
    t.rows.push_back({"vm", a.provider, a.vm, "", std::string(to_string(a.model)), cfg.horizon,
                      a.mean_mae, a.mean_mase, nullptr, nullptr, nullptr});
  }
  for (const auto& a : rep.by_provider) {
    t.rows.push_back({"provider", a.provider, "", "", std::string(to_string(a.model)), cfg.horizon,
                      a.mean_mae, a.mean_mase, nullptr, nullptr, nullptr});
  }
  Provenance prov{data.digest, o.seed,
                  {{"models", f.models},
                   {"order", f.order},
                   {"horizon", std::to_string(f.horizon)},
                   {"var_lag", std::to_string(f.var_lag)},
                   {"mae_scale", f.mae_scale},
                   {"min_points", std::to_string(f.min_points)}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

// ---- classify ------------------------------------------------------------

struct ClassifyOpts {
  std::string task = "all";
  std::size_t folds = 10;
  std::string provider;
  int utc_offset = 0;
  bool shuffle_labels = false;
};

int cmd_classify(Context& ctx, const CommonOpts& o, const ClassifyOpts& c) {
  std::vector<Task> tasks;
  if (c.task == "all") {
    tasks = {Task::kTimeDay, Task::kDayWeek, Task::kWeekend};
  } else {
    try {
      tasks = {parse_task(c.task)};
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError, e.what());
    }
  }
  if (c.folds < 2) throw Error(ErrorCode::kConfigError, "--folds must be >= 2");
  auto data = load_input(ctx, o.input);
  TaskOptions opts;
  opts.folds = c.folds;
  opts.seed = o.seed;
  opts.utc_offset = std::chrono::minutes(c.utc_offset);
  opts.shuffle_labels = c.shuffle_labels;

  Table t;
  t.columns = {"task", "provider", "n", "mean_accuracy", "std_accuracy", "baseline", "folds"};
  for (const auto task : tasks) {
    for (const auto& p : providers_of(data.dataset, c.provider)) {
      try {
        const auto r = run_task(data.dataset, p, task, opts);
        if (r.non_converged_folds > 0) {
          ctx.warn(fmt::format("classify: {} {}: {} folds hit the iteration budget",
                               to_string(task), p, r.non_converged_folds));
        }
        t.rows.push_back({std::string(to_string(task)), p, r.n_instances, r.mean_accuracy,
                          r.std_accuracy, r.baseline, r.fold_accuracy.size()});
      } catch (const Error& e) {
        const auto code = e.code();
        if (code != ErrorCode::kClassTooSmall && code != ErrorCode::kEmptySelection &&
            code != ErrorCode::kInvalidArgument) {
          throw;
        }
        ctx.warn(fmt::format("classify: {} {} skipped ({})", to_string(task), p, e.what()));
      }
    }
  }
  Provenance prov{data.digest, o.seed,
                  {{"task", c.task},
                   {"folds", std::to_string(c.folds)},
                   {"provider", c.provider},
                   {"utc_offset_minutes", std::to_string(c.utc_offset)},
                   {"shuffle_labels", c.shuffle_labels ? "true" : "false"}}};
  emit_table(ctx, o, prov, t);
  return ctx.warned ? kExitWarnings : kExitOk;
}

// ---- report --------------------------------------------------------------

int cmd_report(Context& ctx, const CommonOpts& o, const std::string& out_dir, const ViOpts& v,
               const AnalyzeOpts& a, const ForecastOpts& f, const ClassifyOpts& c) {
  if (out_dir.empty()) throw Error(ErrorCode::kConfigError, "--out-dir is required");
  fs::create_directories(out_dir);
  const std::string ext = o.as_json ? ".json" : ".csv";
  int worst = kExitOk;
  auto step = [&](const std::string& name, auto&& fn) {
    CommonOpts sub = o;
    sub.output = (fs::path(out_dir) / (name + ext)).string();
    Context sctx{ctx.out, ctx.err};
    worst = std::max(worst, fn(sctx, sub));
  };
  step("vi", [&](Context& x, const CommonOpts& s) { return cmd_vi(x, s, v); });
  step("rsd", [&](Context& x, const CommonOpts& s) { return cmd_rsd(x, s, a); });
  step("rsd_filtered", [&](Context& x, const CommonOpts& s) {
    AnalyzeOpts af = a;
    af.filtered = true;
    return cmd_rsd(x, s, af);
  });
  step("corr", [&](Context& x, const CommonOpts& s) { return cmd_corr(x, s, a); });
  step("coincidence", [&](Context& x, const CommonOpts& s) { return cmd_coincidence(x, s, a); });
  step("cpr", [&](Context& x, const CommonOpts& s) { return cmd_cpr(x, s, a); });
  step("forecast", [&](Context& x, const CommonOpts& s) { return cmd_forecast(x, s, f); });
  step("classify", [&](Context& x, const CommonOpts& s) { return cmd_classify(x, s, c); });
  ctx.out << "report written to " << out_dir << "\n";
  return worst;
}

void add_common(CLI::App* app, CommonOpts& o, bool needs_input = true) {
  if (needs_input) app->add_option("-i,--input", o.input, "Measurement CSV");
  app->add_option("-o,--output", o.output, "Output file (default stdout)");
  app->add_flag("--json", o.as_json, "Emit JSON instead of CSV");
  app->add_option("--seed", o.seed, "Seed recorded in provenance and used by randomized steps");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"varbench: randomized benchmark rounds and performance variability analysis",
               "varbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  CommonOpts common;
  RunOpts run;
  std::uint64_t run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Execute benchmark rounds into an NDJSON store");
  run_cmd->add_option("-c,--config", run.config, "Run configuration (JSON)");
  run_cmd->add_option("--store", run.store, "Store directory (env VARBENCH_STORE_DIR)");
  run_cmd->add_option("--rounds", run.rounds, "Number of rounds");
  run_cmd->add_option("--start-round", run.start_round, "First round index");
  auto* seed_opt = run_cmd->add_option("--seed", run_seed, "Run seed (overrides config)");
  run_cmd->add_option("--clock", run.clock, "accelerated | real");

  std::string export_store;
  auto* export_cmd = app.add_subcommand("export", "Convert a store into measurement CSV");
  export_cmd->add_option("--store", export_store, "Store directory or file");
  add_common(export_cmd, common, false);

  ViOpts vi_opts;
  auto* vi_cmd = app.add_subcommand("vi", "Variability indicator per series and group");
  add_common(vi_cmd, common);
  vi_cmd->add_option("--threshold", vi_opts.threshold, "Change-vector threshold t (fraction)");
  vi_cmd->add_option("--weights", vi_opts.weights, "w_b,w_d,w_s");

  AnalyzeOpts an;
  auto* analyze = app.add_subcommand("analyze", "Descriptive analyses");
  analyze->require_subcommand(1);
  auto* rsd_cmd = analyze->add_subcommand("rsd", "RSD avg/min/max per provider and metric");
  add_common(rsd_cmd, common);
  rsd_cmd->add_option("--provider", an.provider);
  rsd_cmd->add_flag("--filtered", an.filtered, "Apply the 5th-95th percentile filter first");
  auto* corr_cmd = analyze->add_subcommand("corr", "Metric correlation matrices");
  add_common(corr_cmd, common);
  corr_cmd->add_option("--provider", an.provider);
  corr_cmd->add_option("--vm", an.vm, "Single VM label");
  auto* coin_cmd = analyze->add_subcommand("coincidence", "Gradient coincidence between metrics");
  add_common(coin_cmd, common);
  coin_cmd->add_option("--vm", an.vm, "VM label (default all)");
  coin_cmd->add_option("--metrics", an.metrics, "A,B (default all pairs)");
  coin_cmd->add_option("--n", an.n, "Top gradients per series");
  coin_cmd->add_option("--coincidence-threshold", an.coincidence_threshold);
  auto* cpr_cmd = analyze->add_subcommand("cpr", "Cost/performance ratio");
  add_common(cpr_cmd, common);
  cpr_cmd->add_option("--vms", an.vms_file, "VM descriptor JSON array (default built-in)");
  auto* filter_cmd = analyze->add_subcommand("filter", "Percentile filter plot data");
  add_common(filter_cmd, common);
  filter_cmd->add_option("--vm", an.vm);
  filter_cmd->add_option("--metric", an.metric);
  filter_cmd->add_option("--lo", an.lo);
  filter_cmd->add_option("--hi", an.hi);

  ForecastOpts fo;
  auto* fc_cmd = app.add_subcommand("forecast", "Naive/VAR/ARIMA forecasting evaluation");
  add_common(fc_cmd, common);
  fc_cmd->add_option("--models", fo.models, "naive,var,arima");
  fc_cmd->add_option("--order", fo.order, "ARIMA p,d,q");
  fc_cmd->add_option("--horizon", fo.horizon);
  fc_cmd->add_option("--var-lag", fo.var_lag);
  fc_cmd->add_option("--mae-scale", fo.mae_scale, "normalized | original");
  fc_cmd->add_option("--min-points", fo.min_points);

  ClassifyOpts co;
  auto* cl_cmd = app.add_subcommand("classify", "Temporal classification accuracy");
  add_common(cl_cmd, common);
  cl_cmd->add_option("--task", co.task, "timeday | dayweek | weekend | all");
  cl_cmd->add_option("--folds", co.folds);
  cl_cmd->add_option("--provider", co.provider);
  cl_cmd->add_option("--utc-offset", co.utc_offset, "Label timezone offset in minutes");
  cl_cmd->add_flag("--shuffle-labels", co.shuffle_labels, "Permutation control");

  std::string out_dir;
  auto* rep_cmd = app.add_subcommand("report", "Write every report into a directory");
  rep_cmd->add_option("-i,--input", common.input, "Measurement CSV");
  rep_cmd->add_option("--out-dir", out_dir);
  rep_cmd->add_flag("--json", common.as_json);
  rep_cmd->add_option("--seed", common.seed);
  rep_cmd->add_option("--threshold", vi_opts.threshold);
  rep_cmd->add_option("--weights", vi_opts.weights);
  rep_cmd->add_option("--n", an.n);
  rep_cmd->add_option("--coincidence-threshold", an.coincidence_threshold);
  rep_cmd->add_option("--models", fo.models);
  rep_cmd->add_option("--order", fo.order);
  rep_cmd->add_option("--horizon", fo.horizon);
  rep_cmd->add_option("--min-points", fo.min_points);
  rep_cmd->add_option("--task", co.task);
  rep_cmd->add_option("--folds", co.folds);
  rep_cmd->add_option("--utc-offset", co.utc_offset);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context ctx{out, err};
  try {
    if (run_cmd->parsed()) {
      if (seed_opt->count() > 0) run.seed = run_seed;
      return cmd_run(ctx, run);
    }
    if (export_cmd->parsed()) return cmd_export(ctx, common, export_store);
    if (vi_cmd->parsed()) return cmd_vi(ctx, common, vi_opts);
    if (rsd_cmd->parsed()) return cmd_rsd(ctx, common, an);
    if (corr_cmd->parsed()) return cmd_corr(ctx, common, an);
    if (coin_cmd->parsed()) return cmd_coincidence(ctx, common, an);
    if (cpr_cmd->parsed()) return cmd_cpr(ctx, common, an);
    if (filter_cmd->parsed()) return cmd_filter(ctx, common, an);
    if (fc_cmd->parsed()) return cmd_forecast(ctx, common, fo);
    if (cl_cmd->parsed()) return cmd_classify(ctx, common, co);
    if (rep_cmd->parsed()) return cmd_report(ctx, common, out_dir, vi_opts, an, fo, co);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigError ? kExitUsage : kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace varbench
