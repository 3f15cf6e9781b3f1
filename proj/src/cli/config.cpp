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

#include <openssl/evp.h>

#include <array>

#include <fmt/format.h>

#include "json.hpp"
#include "varbench/cli.hpp"
#include "varbench/random.hpp"

namespace varbench {

using nlohmann::json;

std::string_view version() { return VARBENCH_VERSION; }

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInvalidArgument, "SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::filesystem::path store_file(const std::filesystem::path& dir, const VmKey& vm) {
  return dir / fmt::format("{}_{}_{}-{}.ndjson", vm.provider, to_string(vm.vm_class), vm.vm_type,
                           vm.instance);
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

SuiteConfig parse_suite(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "default") throw Error(ErrorCode::kConfigError, "unknown suite name");
    return default_suite();
  }
  SuiteConfig suite;
  suite.round_period = std::chrono::seconds(get_or<std::int64_t>(j, "round_period_s", 3600));
  if (j.contains("hooks")) {
    suite.hooks.power_on = get_or<std::string>(j.at("hooks"), "power_on", "");
    suite.hooks.power_off = get_or<std::string>(j.at("hooks"), "power_off", "");
  }
  for (const auto& b : j.at("benchmarks")) {
    BenchmarkSpec spec;
    spec.id = b.at("id").get<std::string>();
    spec.parser_id = b.at("parser").get<std::string>();
    spec.repetitions = b.at("repetitions").get<int>();
    spec.metrics = get_or<std::vector<std::string>>(b, "metrics", {});
    spec.command = get_or<std::string>(b, "command", "");
    suite.benchmarks.push_back(std::move(spec));
  }
  return suite;
}

std::vector<VmDescriptor> parse_vms(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "default") throw Error(ErrorCode::kConfigError, "unknown vms name");
    return default_vms();
  }
  std::vector<VmDescriptor> vms;
  for (const auto& v : j) {
    VmDescriptor d;
    d.key.provider = v.at("provider").get<std::string>();
    d.key.vm_class = parse_vm_class(v.at("class").get<std::string>());
    d.key.vm_type = v.at("type").get<std::string>();
    d.key.instance = get_or<int>(v, "instance", 1);
    d.vcpus = get_or<int>(v, "vcpus", 1);
    d.ram_gib = get_or<double>(v, "ram_gib", 1.0);
    d.cost_per_hour = get_or<double>(v, "cost_per_hour", 0.0);
    d.validate();
    vms.push_back(std::move(d));
  }
  return vms;
}

std::vector<SyntheticProfile> parse_profiles(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "default") {
      throw Error(ErrorCode::kConfigError, "unknown profiles name");
    }
    return default_profiles();
  }
  std::vector<SyntheticProfile> out;
  for (const auto& p : j) {
    SyntheticProfile prof;
    prof.benchmark_id = p.at("benchmark").get<std::string>();
    prof.parser_id = p.at("parser").get<std::string>();
    prof.seed = get_or<std::uint64_t>(p, "seed", stable_hash(prof.benchmark_id));
    prof.duration = std::chrono::seconds(get_or<std::int64_t>(p, "duration_s", 15));
    for (const auto& m : p.at("metrics")) {
      SyntheticMetric sm;
      sm.metric = m.at("metric").get<std::string>();
      sm.base = m.at("base").get<double>();
      sm.noise = get_or<double>(m, "noise", 0.0);
      sm.diurnal_amplitude = get_or<double>(m, "diurnal_amplitude", 0.0);
      sm.diurnal_peak_hour = get_or<double>(m, "diurnal_peak_hour", 12.0);
      sm.weekend_offset = get_or<double>(m, "weekend_offset", 0.0);
      sm.spike_probability = get_or<double>(m, "spike_probability", 0.0);
      sm.spike_magnitude = get_or<double>(m, "spike_magnitude", 0.0);
      prof.metrics.push_back(std::move(sm));
    }
    prof.validate();
    out.push_back(std::move(prof));
  }
  return out;
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
  try {
    const auto j = json::parse(json_text);
    if (!j.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
    RunConfig cfg;
    cfg.suite = parse_suite(j.contains("suite") ? j.at("suite") : json("default"));
    cfg.suite.validate();
    cfg.vms = parse_vms(j.contains("vms") ? j.at("vms") : json("default"));
    if (cfg.vms.empty()) throw Error(ErrorCode::kConfigError, "no VMs configured");
    const auto backend = get_or<std::string>(j, "backend", "synthetic");
    if (backend == "synthetic") {
      cfg.backend = BackendKind::kSynthetic;
    } else if (backend == "command") {
      cfg.backend = BackendKind::kCommand;
    } else {
      throw Error(ErrorCode::kConfigError, "backend must be 'synthetic' or 'command'");
    }
    cfg.profiles = parse_profiles(j.contains("profiles") ? j.at("profiles") : json("default"));
    cfg.start = parse_timestamp(get_or<std::string>(j, "start", "2020-04-01T00:00:00Z"));
    cfg.utc_offset = std::chrono::minutes(get_or<int>(j, "utc_offset_minutes", 0));
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigError) throw;
    throw Error(ErrorCode::kConfigError, e.what());
  }
}

}  // namespace varbench
