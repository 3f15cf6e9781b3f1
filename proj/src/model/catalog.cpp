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

#include "json.hpp"

#include "varbench/model.hpp"

namespace varbench {

using nlohmann::json;

std::string_view to_string(Direction d) { return d == Direction::kHIB ? "HIB" : "LIB"; }

Direction parse_direction(std::string_view text) {
  if (text == "HIB") return Direction::kHIB;
  if (text == "LIB") return Direction::kLIB;
  throw Error(ErrorCode::kInvalidArgument, "direction must be HIB or LIB, got '" +
                                               std::string(text) + "'");
}

Catalog::Catalog(std::vector<MetricSpec> specs) : specs_(std::move(specs)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "metric id must not be empty");
    }
    if (!index_.emplace(specs_[i].id, i).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate metric id " + specs_[i].id);
    }
  }
}

const MetricSpec* Catalog::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &specs_[it->second];
}

const MetricSpec& Catalog::at(std::string_view id) const {
  return specs_[index_of(id)];
}

std::size_t Catalog::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownMetric, std::string(id));
  }
  return it->second;
}

std::string Catalog::to_json() const {
  json arr = json::array();
  for (const auto& s : specs_) {
    arr.push_back({{"id", s.id},
                   {"benchmark", s.benchmark},
                   {"meaning", s.meaning},
                   {"unit", s.unit},
                   {"direction", to_string(s.direction)}});
  }
  return arr.dump(2);
}

Catalog Catalog::from_json(std::string_view text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("catalog: ") + e.what());
  }
  if (!arr.is_array()) throw Error(ErrorCode::kConfigError, "catalog must be a JSON array");
  std::vector<MetricSpec> specs;
  try {
    for (const auto& j : arr) {
      specs.push_back({j.at("id").get<std::string>(), j.value("benchmark", ""),
                       j.value("meaning", ""), j.value("unit", ""),
                       parse_direction(j.at("direction").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("catalog: ") + e.what());
  }
  return Catalog(std::move(specs));
}

const Catalog& catalog_default() {
  static const Catalog catalog([] {
    constexpr auto H = Direction::kHIB;
    constexpr auto L = Direction::kLIB;
    return std::vector<MetricSpec>{
        {"CPU_EVENTS", "Sysbench", "events (e) per second", "e/s", H},
        {"CPU_LAT", "Sysbench", "avg latency", "ms", L},
        {"CPU_TH_LAT", "Sysbench", "threads avg latency", "ms", L},
        {"CPU_SHA256", "Nench", "SHA256 execution", "s", L},
        {"CPU_BZIP2", "Nench", "bzip2 execution", "s", L},
        {"CPU_AES", "Nench", "AES execution", "s", L},
        {"CPU_DUR", "CPUBench", "mean duration", "s", L},
        {"NET_1", "Nench", "DL - Cachefly CDN", "MiB/s", H},
        {"NET_2", "Nench", "DL - Leaseweb (NL)", "MiB/s", H},
        {"NET_3", "Nench", "DL - Softlayer DAL (US)", "MiB/s", H},
        {"NET_4", "Nench", "DL - Online.net (FR)", "MiB/s", H},
        {"NET_5", "Nench", "DL - OVH BHS (CA)", "MiB/s", H},
        {"NETB_1", "DownloadBench", "DL - url 1 (1 GB)", "MiB/s", H},
        {"NETB_2", "DownloadBench", "DL - url 2 (100 MB)", "MiB/s", H},
        {"MEM_SPEED", "Sysbench", "speed", "MiB/s", H},
        {"MEM_LAT", "Sysbench", "avg latency", "ms", L},
        {"DISK_FILE_R", "Sysbench", "file op - read", "reads/s", H},
        {"DISK_FILE_W", "Sysbench", "file op - write", "writes/s", H},
        {"DISK_FILE_F", "Sysbench", "file op - fsync", "fsyncs/s", H},
        {"DISK_THR_R", "Sysbench", "throughput - read", "MiB/s", H},
        {"DISK_THR_W", "Sysbench", "throughput - write", "MiB/s", H},
        {"DISK_LAT", "Sysbench", "avg latency", "ms", L},
        {"DISK_SEEK", "Nench", "ioping - avg seek rate", "us", L},
        {"DISK_SEQ_R", "Nench", "ioping - seq. read speed", "MiB/s", H},
        {"DISK_SEQ_W", "Nench", "dd - avg seq. write speed", "MiB/s", H},
        // Small-block dd run, reported as MB/s but classified as a latency probe.
        {"DISKB_LAT", "DDBench", "dd - s. blk (latency)", "MB/s", L},
        {"DISKB_THR", "DDBench", "dd - l. blk (throughput)", "MB/s", H},
        {"APPB", "WebBench", "requests per second", "req/s", H},
    };
  }());
  return catalog;
}

std::string_view to_string(VmClass c) {
  switch (c) {
    case VmClass::kC1: return "C1";
    case VmClass::kC2: return "C2";
    case VmClass::kC3: return "C3";
    case VmClass::kC4: return "C4";
  }
  return "C?";
}

VmClass parse_vm_class(std::string_view text) {
  if (text == "C1") return VmClass::kC1;
  if (text == "C2") return VmClass::kC2;
  if (text == "C3") return VmClass::kC3;
  if (text == "C4") return VmClass::kC4;
  throw Error(ErrorCode::kInvalidArgument, "vm_class must be C1..C4, got '" +
                                               std::string(text) + "'");
}

std::string VmKey::label() const {
  return provider + "/" + vm_type + "-" + std::to_string(instance);
}

void VmDescriptor::validate() const {
  if (key.provider.empty() || key.vm_type.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "vm provider and type must be set");
  }
  if (key.instance < 1) {
    throw Error(ErrorCode::kInvalidArgument, key.label() + ": instance ordinal must be >= 1");
  }
  if (vcpus <= 0) throw Error(ErrorCode::kInvalidArgument, key.label() + ": vcpus must be > 0");
  if (!(ram_gib > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, key.label() + ": ram_gib must be > 0");
  }
  if (!(cost_per_hour >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, key.label() + ": cost_per_hour must be >= 0");
  }
}

std::vector<VmDescriptor> default_vms() {
  struct Row {
    VmClass cls;
    int instances, vcpus;
    double ram;
    const char* provider;
    const char* type;
    double cost;
  };
  static constexpr Row kRows[] = {
      {VmClass::kC1, 2, 2, 4, "aws", "a1.large", 0.0582},
      {VmClass::kC1, 2, 2, 4, "azure", "A2-v2", 0.0870},
      {VmClass::kC1, 2, 2, 4, "gcp", "E2-T1", 0.0713},
      {VmClass::kC1, 2, 2, 4, "egi", "T1", 0.0},
      {VmClass::kC2, 1, 4, 8, "aws", "a1.xlarge", 0.1164},
      {VmClass::kC2, 1, 4, 8, "azure", "A4-v2", 0.1830},
      {VmClass::kC2, 1, 4, 8, "gcp", "E2-T2", 0.1425},
      {VmClass::kC2, 1, 4, 8, "egi", "T2", 0.0},
      {VmClass::kC3, 2, 2, 8, "aws", "m5.large", 0.1150},
      {VmClass::kC3, 2, 2, 8, "azure", "B2MS", 0.0960},
      {VmClass::kC3, 2, 2, 8, "gcp", "N1-T1", 0.1250},
      {VmClass::kC3, 2, 2, 8, "egi", "T3", 0.0},
      {VmClass::kC4, 1, 4, 16, "aws", "m5.xlarge", 0.2300},
      {VmClass::kC4, 1, 4, 16, "azure", "B4MS", 0.1920},
      {VmClass::kC4, 1, 4, 16, "gcp", "N1-T2", 0.2501},
      {VmClass::kC4, 1, 4, 16, "egi", "T4", 0.0},
  };
  std::vector<VmDescriptor> out;
  for (const auto& r : kRows) {
    for (int i = 1; i <= r.instances; ++i) {
      out.push_back({{r.provider, r.cls, r.type, i}, r.vcpus, r.ram, r.cost});
    }
  }
  return out;
}

}  // namespace varbench
