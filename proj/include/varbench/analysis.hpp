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

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "varbench/model.hpp"

namespace varbench {

struct RSDEntry {
  std::string metric;
  double avg = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t n_vms = 0;
};

struct RSDSummary {
  std::string provider;
  std::vector<RSDEntry> entries;  // catalog order, metrics without data omitted
  std::size_t skipped = 0;        // (vm, metric) series that could not be scored
};

/// Per metric: dispersion of each of the provider's VM series, then
/// avg/min/max across VMs. With `filtered`, each series first goes through
/// percentile_filter. Throws Error(kEmptySelection) for an unknown provider.
RSDSummary rsd_summary(const Dataset& dataset, const std::string& provider, bool filtered = false,
                       const Catalog& catalog = catalog_default());

/// Values within [P_lo, P_hi] inclusive, in input order. Percentiles in
/// [0,100], linear interpolation. Throws Error(kTooShort) below 20 points.
std::vector<double> percentile_filter(std::span<const double> x, double lo = 5.0,
                                      double hi = 95.0);

/// Values within [lo_value, hi_value] inclusive, in input order.
std::vector<double> filter_between(std::span<const double> x, double lo_value, double hi_value);

struct CorrelationMatrix {
  std::vector<std::string> metrics;
  std::vector<double> values;  // row-major, metrics.size()^2

  std::size_t size() const { return metrics.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * metrics.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * metrics.size() + j]; }
};

/// Pearson correlation of every metric pair, aligned on round index with
/// pairwise deletion. Metrics follow catalog order. Throws
/// Error(kInsufficientOverlap) when a pair shares fewer than 3 rounds.
CorrelationMatrix correlation_matrix(const std::map<std::string, Series>& series,
                                     const Catalog& catalog = catalog_default());

/// Entry-wise mean. Metrics are the union (catalog order); each entry averages
/// the matrices that contain both metrics.
CorrelationMatrix mean_correlation(std::span<const CorrelationMatrix> matrices,
                                   const Catalog& catalog = catalog_default());

/// Mean of the per-VM matrices of one provider.
CorrelationMatrix provider_correlation(const Dataset& dataset, const std::string& provider,
                                       const Catalog& catalog = catalog_default());

struct CoincidenceVerdict {
  std::string metric_a;
  std::string metric_b;
  std::size_t n = 0;
  std::size_t overlap = 0;
  double threshold = 0.0;
  bool related = false;
};

/// Normalizes each series by its mean, takes consecutive differences, keeps
/// the n time points with the largest |gradient| (earlier index wins ties)
/// and counts the shared time points. related <=> overlap > n*threshold.
CoincidenceVerdict gradient_coincidence(std::span<const double> a, std::span<const double> b,
                                        std::size_t n = 100, double threshold = 0.6);

/// Same, on two series aligned by round index.
CoincidenceVerdict gradient_coincidence(const Series& a, const Series& b, std::size_t n = 100,
                                        double threshold = 0.6);

/// Indices of the n largest |g|, ascending.
std::vector<std::size_t> top_gradient_points(std::span<const double> normalized, std::size_t n);

struct CprValue {
  double ratio = 0.0;
  bool excluded = false;  // free of charge, not ranked
};

/// HIB: cost/mean, LIB: cost*mean. Throws Error(kNonPositivePerformance) for
/// mean <= 0 and Error(kInvalidArgument) for negative cost.
CprValue cpr(double mean_value, Direction direction, double cost_per_hour);

struct CprRow {
  std::string provider;
  VmClass vm_class = VmClass::kC1;
  std::string vm_type;
  std::string metric;
  double mean = 0.0;
  double cost_per_hour = 0.0;
  CprValue cpr;
};

/// One row per (provider, class, metric): mean over every measurement of the
/// group's instances, cost taken from the matching descriptor. Groups
/// without a descriptor are skipped.
std::vector<CprRow> cpr_table(const Dataset& dataset, std::span<const VmDescriptor> vms,
                              const Catalog& catalog = catalog_default());

}  // namespace varbench
