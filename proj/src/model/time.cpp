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

#include "varbench/time.hpp"

#include <charconv>
#include <cstdio>

#include "varbench/error.hpp"

namespace varbench {

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  int y, mo, d, h, mi, s;
  const bool shape = text.size() == 20 && text[4] == '-' && text[7] == '-' &&
                     (text[10] == 'T' || text[10] == 't') && text[13] == ':' &&
                     text[16] == ':' && (text[19] == 'Z' || text[19] == 'z');
  if (!shape || !read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) ||
      !read_int(text, 8, 2, d) || !read_int(text, 11, 2, h) ||
      !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, s)) {
    throw Error(ErrorCode::kInvalidArgument,
                "timestamp '" + std::string(text) + "' is not YYYY-MM-DDTHH:MM:SSZ");
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
    throw Error(ErrorCode::kInvalidArgument,
                "timestamp '" + std::string(text) + "' is out of range");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss<seconds> hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kUnknownMetric: return "UnknownMetric";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kZeroMean: return "ZeroMean";
    case ErrorCode::kEmptyGroup: return "EmptyGroup";
    case ErrorCode::kInsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::kNonPositivePerformance: return "NonPositivePerformance";
    case ErrorCode::kLifecycleHookFailed: return "LifecycleHookFailed";
    case ErrorCode::kUnparseableOutput: return "UnparseableOutput";
    case ErrorCode::kUnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::kStoreCorrupt: return "StoreCorrupt";
    case ErrorCode::kDegenerateRange: return "DegenerateRange";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace varbench
