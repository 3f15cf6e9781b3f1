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

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "varbench/harness.hpp"

namespace varbench {

using nlohmann::json;

std::string round_to_json(const RoundResult& round) {
  json trials = json::array();
  for (const auto& t : round.trials) {
    json values = json::array();
    for (const auto& v : t.values) values.push_back({{"metric", v.metric}, {"value", v.value}});
    trials.push_back({{"benchmark", t.benchmark_id},
                      {"position", t.position},
                      {"repetition", t.repetition},
                      {"started_at", format_timestamp(t.started_at)},
                      {"finished_at", format_timestamp(t.finished_at)},
                      {"status", t.status == TrialStatus::kOk ? "ok" : "failed"},
                      {"error", t.error},
                      {"values", std::move(values)},
                      {"raw", t.raw_output}});
  }
  json j = {{"provider", round.vm.provider},
            {"vm_class", to_string(round.vm.vm_class)},
            {"vm_type", round.vm.vm_type},
            {"instance", round.vm.instance},
            {"round", round.round_index},
            {"seed", round.seed},
            {"started_at", format_timestamp(round.started_at)},
            {"errors", round.errors},
            {"provider_error", round.provider_error},
            {"trials", std::move(trials)}};
  return j.dump();
}

RoundResult round_from_json(std::string_view line) {
  try {
    const auto j = json::parse(line);
    RoundResult r;
    r.vm.provider = j.at("provider").get<std::string>();
    r.vm.vm_class = parse_vm_class(j.at("vm_class").get<std::string>());
    r.vm.vm_type = j.at("vm_type").get<std::string>();
    r.vm.instance = j.at("instance").get<int>();
    r.round_index = j.at("round").get<std::int64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.started_at = parse_timestamp(j.at("started_at").get<std::string>());
    r.errors = j.at("errors").get<int>();
    r.provider_error = j.at("provider_error").get<std::string>();
    for (const auto& tj : j.at("trials")) {
      TrialRecord t;
      t.benchmark_id = tj.at("benchmark").get<std::string>();
      t.position = tj.at("position").get<std::size_t>();
      t.repetition = tj.at("repetition").get<int>();
      t.started_at = parse_timestamp(tj.at("started_at").get<std::string>());
      t.finished_at = parse_timestamp(tj.at("finished_at").get<std::string>());
      const auto status = tj.at("status").get<std::string>();
      if (status != "ok" && status != "failed") {
        throw Error(ErrorCode::kStoreCorrupt, "bad trial status '" + status + "'");
      }
      t.status = status == "ok" ? TrialStatus::kOk : TrialStatus::kFailed;
      t.error = tj.at("error").get<std::string>();
      for (const auto& vj : tj.at("values")) {
        t.values.push_back({vj.at("metric").get<std::string>(), vj.at("value").get<double>()});
      }
      t.raw_output = tj.at("raw").get<std::string>();
      r.trials.push_back(std::move(t));
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kStoreCorrupt, e.what());
  } catch (const Error& e) {
    throw Error(ErrorCode::kStoreCorrupt, e.what());
  }
}

RoundStore::RoundStore(std::filesystem::path path) : path_(std::move(path)) {}

void RoundStore::append(const RoundResult& round) {
  const auto line = round_to_json(round) + "\n";
  std::lock_guard lock(mu_);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path_.string());
  out << line;
  out.flush();
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed on " + path_.string());
}

void persist_round(const std::filesystem::path& path, const RoundResult& round) {
  RoundStore(path).append(round);
}

std::vector<RoundResult> load_rounds(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();

  std::vector<RoundResult> rounds;
  std::size_t offset = 0;
  while (offset < data.size()) {
    const auto end = data.find('\n', offset);
    if (end == std::string::npos) {
      throw Error(ErrorCode::kStoreCorrupt,
                  path.string() + ": truncated record at offset " + std::to_string(offset));
    }
    const std::string_view line(data.data() + offset, end - offset);
    if (!line.empty()) {
      try {
        rounds.push_back(round_from_json(line));
      } catch (const Error& e) {
        throw Error(ErrorCode::kStoreCorrupt, path.string() + ": bad record at offset " +
                                                  std::to_string(offset) + " (" + e.what() + ")");
      }
    }
    offset = end + 1;
  }
  return rounds;
}

Dataset export_dataset(std::span<const RoundResult> rounds, const Catalog& catalog) {
  Dataset ds;
  for (const auto& r : rounds) {
    for (const auto& t : r.trials) {
      if (t.status != TrialStatus::kOk) continue;
      for (const auto& v : t.values) {
        if (catalog.find(v.metric) == nullptr || !std::isfinite(v.value)) continue;
        ds.add({v.metric, r.vm, r.round_index, static_cast<std::int64_t>(t.position),
                t.started_at, v.value});
      }
    }
  }
  return ds;
}

}  // namespace varbench
