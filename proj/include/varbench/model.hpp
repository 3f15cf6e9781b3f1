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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "varbench/error.hpp"
#include "varbench/time.hpp"

namespace varbench {

/// Optimization direction of a metric: higher-is-better or lower-is-better.
enum class Direction { kHIB, kLIB };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

struct MetricSpec {
  std::string id;
  std::string benchmark;
  std::string meaning;
  std::string unit;
  Direction direction = Direction::kHIB;

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

/// Ordered set of metric specs with unique ids.
class Catalog {
 public:
  Catalog() = default;
  /// Throws Error(kInvalidArgument) on duplicate ids.
  explicit Catalog(std::vector<MetricSpec> specs);

  std::span<const MetricSpec> specs() const { return specs_; }
  std::size_t size() const { return specs_.size(); }

  const MetricSpec* find(std::string_view id) const;
  /// Throws Error(kUnknownMetric).
  const MetricSpec& at(std::string_view id) const;
  /// Position of `id` in catalog order. Throws Error(kUnknownMetric).
  std::size_t index_of(std::string_view id) const;

  std::string to_json() const;
  static Catalog from_json(std::string_view text);

  friend bool operator==(const Catalog& a, const Catalog& b) {
    return a.specs_ == b.specs_;
  }

 private:
  std::vector<MetricSpec> specs_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// The 28 metrics produced by the default benchmark suite.
const Catalog& catalog_default();

enum class VmClass { kC1, kC2, kC3, kC4 };

std::string_view to_string(VmClass c);
VmClass parse_vm_class(std::string_view text);

/// Identity of one VM instance: provider, size class, provider type name and
/// instance ordinal (1-based).
struct VmKey {
  std::string provider;
  VmClass vm_class = VmClass::kC1;
  std::string vm_type;
  int instance = 1;

  std::string label() const;  // e.g. "aws/a1.large-1"

  friend auto operator<=>(const VmKey&, const VmKey&) = default;
  friend bool operator==(const VmKey&, const VmKey&) = default;
};

struct VmDescriptor {
  VmKey key;
  int vcpus = 1;
  double ram_gib = 1.0;
  double cost_per_hour = 0.0;  // 0 for free providers

  /// Throws Error(kInvalidArgument) unless vcpus > 0, ram > 0, cost >= 0
  /// and instance >= 1.
  void validate() const;
};

/// The 24 VM instances of the reference campaign (4 providers x 6 VMs).
std::vector<VmDescriptor> default_vms();

struct Measurement {
  std::string metric;
  VmKey vm;
  std::int64_t round_index = 0;
  std::int64_t trial_index = 0;
  Timestamp timestamp{};
  double value = 0.0;
};

/// Accepted measurements, in ingestion order.
class Dataset {
 public:
  /// Throws Error(kNonFiniteValue) for NaN/inf and Error(kInvalidArgument)
  /// for negative round/trial indices.
  void add(Measurement m);

  std::span<const Measurement> rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Distinct VMs, sorted.
  std::vector<VmKey> vms() const;
  std::vector<VmKey> vms_of(std::string_view provider) const;
  /// Distinct providers, sorted.
  std::vector<std::string> providers() const;

 private:
  std::vector<Measurement> rows_;
};

struct RowError {
  ErrorCode code;
  std::size_t line;  // 1-based, header is line 1
  std::string detail;
};

struct IngestResult {
  Dataset dataset;
  std::vector<RowError> errors;  // rejected rows, in line order

  bool ok() const { return errors.empty(); }
};

/// CSV header of the measurement exchange format.
inline constexpr std::string_view kMeasurementCsvHeader =
    "timestamp,provider,vm_class,vm_type,instance,round,trial,metric,value";

/// Reads measurement CSV; lines starting with # are comments. Rows that fail
/// to parse are reported in `errors` and excluded from the dataset; a missing
/// or wrong header throws Error(kMalformedRow) since nothing can be read.
IngestResult ingest_csv(std::istream& in, const Catalog& catalog = catalog_default());

/// Writes `dataset` in the same CSV schema (round-trips through ingest_csv).
void write_csv(const Dataset& dataset, std::ostream& out);

struct SeriesPoint {
  Timestamp timestamp;   // round start: earliest timestamp seen in the round
  std::int64_t round_index;
  double value;          // mean of the round's trial values
  std::size_t trials;    // number of trial values averaged
};

/// One value per round for a (metric, vm) pair, ordered by round start.
struct Series {
  std::string metric;
  VmKey vm;
  std::vector<SeriesPoint> points;

  std::vector<double> values() const;
  std::size_t size() const { return points.size(); }
};

/// Throws Error(kEmptySelection) when the dataset has no rows for the pair,
/// Error(kInvalidArgument) if two rounds share a start timestamp.
Series to_series(const Dataset& dataset, std::string_view metric, const VmKey& vm);

/// All series of one VM, keyed by metric id (only metrics with data).
std::map<std::string, Series> series_of_vm(const Dataset& dataset, const VmKey& vm);

}  // namespace varbench
