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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "varbench/harness.hpp"
#include "varbench/model.hpp"

namespace varbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarnings = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFailure = 3;

std::string_view version();

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

enum class BackendKind { kSynthetic, kCommand };

struct RunConfig {
  SuiteConfig suite;
  std::vector<VmDescriptor> vms;
  BackendKind backend = BackendKind::kSynthetic;
  std::vector<SyntheticProfile> profiles;
  Timestamp start{};
  std::chrono::minutes utc_offset{0};
  std::optional<std::uint64_t> seed;
};

/// Parses the JSON run configuration. "suite", "vms" and "profiles" accept
/// the string "default". Throws Error(kConfigError).
RunConfig parse_run_config(std::string_view json_text);

/// Store file of one VM inside a store directory.
std::filesystem::path store_file(const std::filesystem::path& dir, const VmKey& vm);

/// Entry point shared by the varbench binary and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace varbench
