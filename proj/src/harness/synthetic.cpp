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
#include <numbers>

#include "varbench/harness.hpp"
#include "varbench/random.hpp"

namespace varbench {

void SyntheticProfile::validate() const {
  if (!is_registered_parser(parser_id)) {
    throw Error(ErrorCode::kConfigError, benchmark_id + ": unknown parser '" + parser_id + "'");
  }
  if (metrics.empty()) throw Error(ErrorCode::kConfigError, benchmark_id + ": no metrics");
  for (const auto& m : metrics) {
    const auto where = benchmark_id + "/" + m.metric;
    if (!(m.base > 0.0)) throw Error(ErrorCode::kConfigError, where + ": base must be > 0");
    if (!(m.noise >= 0.0)) throw Error(ErrorCode::kConfigError, where + ": noise must be >= 0");
    if (!(m.spike_probability >= 0.0 && m.spike_probability <= 1.0)) {
      throw Error(ErrorCode::kConfigError, where + ": spike probability must be in [0,1]");
    }
  }
}

std::vector<ParsedValue> synth_values(const SyntheticProfile& profile, Timestamp at) {
  using namespace std::chrono;
  const auto day_start = floor<days>(at);
  const double hour = duration<double>(at - day_start).count() / 3600.0;
  const unsigned wd = weekday{day_start}.c_encoding();  // 0 = Sunday
  const bool weekend = wd == 0 || wd == 6;

  Rng rng(mix64(profile.seed, static_cast<std::uint64_t>(at.time_since_epoch().count())));
  std::vector<ParsedValue> out;
  out.reserve(profile.metrics.size());
  for (const auto& m : profile.metrics) {
    // Draw unconditionally so each metric's stream is independent of the
    // other metrics' parameters.
    const double z = rng.normal();
    const double u = rng.uniform();
    double rel = 0.0;
    if (m.diurnal_amplitude != 0.0) {
      rel += m.diurnal_amplitude *
             std::cos(2.0 * std::numbers::pi * (hour - m.diurnal_peak_hour) / 24.0);
    }
    if (weekend) rel += m.weekend_offset;
    rel += m.noise * z;
    if (u < m.spike_probability) rel += m.spike_magnitude;
    out.push_back({m.metric, m.base * (1.0 + rel)});
  }
  return out;
}

std::string synth_probe(const SyntheticProfile& profile, Timestamp at) {
  const auto values = synth_values(profile, at);
  return render_output(profile.parser_id, values);
}

std::vector<SyntheticProfile> default_profiles() {
  // Bases are in the catalog's native units, roughly the magnitudes a small
  // general-purpose VM reports. NET_1 and NETB_2 carry a daily cycle.
  auto m = [](const char* id, double base, double noise) {
    return SyntheticMetric{id, base, noise};
  };
  SyntheticMetric net1 = m("NET_1", 90.0, 0.06);
  net1.diurnal_amplitude = 0.08;
  net1.diurnal_peak_hour = 4.0;
  SyntheticMetric netb2 = m("NETB_2", 55.0, 0.06);
  netb2.diurnal_amplitude = 0.08;
  netb2.diurnal_peak_hour = 4.0;
  SyntheticMetric diskb_lat = m("DISKB_LAT", 15.0, 0.10);
  diskb_lat.spike_probability = 0.02;
  diskb_lat.spike_magnitude = -0.5;

  std::vector<SyntheticProfile> profiles = {
      {"ddbench-small", "ddbench-small", {diskb_lat}},
      {"ddbench-large", "ddbench-large", {m("DISKB_THR", 130.0, 0.05)}},
      {"download-1", "download-1", {m("NETB_1", 60.0, 0.07)}},
      {"download-2", "download-2", {netb2}},
      {"cpubench", "cpubench", {m("CPU_DUR", 12.0, 0.2)}, 0, std::chrono::seconds{40}},
      {"sysbench",
       "sysbench",
       {m("CPU_EVENTS", 927.41, 0.015), m("CPU_LAT", 1.08, 0.03), m("CPU_TH_LAT", 2.2, 0.03),
        m("MEM_SPEED", 5119.34, 0.02), m("MEM_LAT", 0.2, 0.03), m("DISK_FILE_R", 1234.56, 0.05),
        m("DISK_FILE_W", 823.04, 0.05), m("DISK_FILE_F", 2634.11, 0.05),
        m("DISK_THR_R", 19.29, 0.05), m("DISK_THR_W", 12.86, 0.05), m("DISK_LAT", 0.19, 0.06)},
       0,
       std::chrono::seconds{60}},
      {"nench",
       "nench",
       {m("CPU_SHA256", 1.543, 0.02), m("CPU_BZIP2", 5.137, 0.02), m("CPU_AES", 1.672, 0.04),
        net1, m("NET_2", 39.52, 0.15), m("NET_3", 7.8, 0.1), m("NET_4", 44.71, 0.1),
        m("NET_5", 9.85, 0.1), m("DISK_SEEK", 170.3, 0.02), m("DISK_SEQ_R", 470.8, 0.01),
        m("DISK_SEQ_W", 607.45, 0.01)},
       0,
       std::chrono::seconds{90}},
      {"webbench", "wrk", {m("APPB", 1523.45, 0.02)}, 0, std::chrono::seconds{30}},
  };
  for (auto& p : profiles) p.seed = stable_hash(p.benchmark_id);
  return profiles;
}

}  // namespace varbench
