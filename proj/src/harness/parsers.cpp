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

#include <array>
#include <charconv>
#include <optional>
#include <regex>
#include <string>

#include <fmt/format.h>

#include "varbench/harness.hpp"

namespace varbench {

namespace {

constexpr std::array<std::string_view, 9> kParsers = {
    "sysbench",   "nench",      "cpubench", "ddbench-small", "ddbench-large",
    "download-1", "download-2", "wrk",      "raw"};

#define VB_NUM "([-+]?[0-9]*\\.?[0-9]+(?:[eE][-+]?[0-9]+)?)"

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> first_match(const std::string& text, const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  return to_double(m[1].str());
}

std::optional<double> last_match(const std::string& text, const std::regex& re) {
  std::optional<double> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    out = to_double((*it)[1].str());
  }
  return out;
}

// Value plus a binary-prefixed unit, converted to MiB/s.
std::optional<double> mib_per_s(const std::string& text, const std::regex& re) {
  std::smatch m;
  if (!std::regex_search(text, m, re)) return std::nullopt;
  auto v = to_double(m[1].str());
  if (!v) return std::nullopt;
  const auto unit = m[2].str();
  if (unit == "KiB" || unit == "KB") return *v / 1024.0;
  if (unit == "GiB" || unit == "GB") return *v * 1024.0;
  return v;
}

void push(std::vector<ParsedValue>& out, std::string_view metric, std::optional<double> v) {
  if (v) out.push_back({std::string(metric), *v});
}

// sysbench prints one banner per invocation; the wrapper concatenates the
// cpu, threads, memory and fileio runs.
std::vector<std::string> sysbench_blocks(const std::string& text) {
  std::vector<std::string> blocks;
  std::size_t start = 0;
  std::size_t pos = text.rfind("sysbench ", 0) == 0 ? 0 : text.find("\nsysbench ");
  if (pos == std::string::npos) return {text};
  if (pos > 0) blocks.push_back(text.substr(0, pos));
  start = pos;
  while (true) {
    const auto next = text.find("\nsysbench ", start + 1);
    if (next == std::string::npos) {
      blocks.push_back(text.substr(start));
      return blocks;
    }
    blocks.push_back(text.substr(start, next - start));
    start = next;
  }
}

std::optional<double> latency_avg(const std::string& block) {
  static const std::regex re("Latency \\(ms\\):[\\s\\S]*?avg:\\s*" VB_NUM);
  return first_match(block, re);
}

std::vector<ParsedValue> parse_sysbench(const std::string& text) {
  static const std::regex events("events per second:\\s*" VB_NUM);
  static const std::regex mem("MiB transferred \\(" VB_NUM "\\s*MiB/sec\\)");
  static const std::regex reads("reads/s:\\s*" VB_NUM);
  static const std::regex writes("writes/s:\\s*" VB_NUM);
  static const std::regex fsyncs("fsyncs/s:\\s*" VB_NUM);
  static const std::regex thr_r("read, MiB/s:\\s*" VB_NUM);
  static const std::regex thr_w("written, MiB/s:\\s*" VB_NUM);
  std::vector<ParsedValue> out;
  for (const auto& b : sysbench_blocks(text)) {
    if (b.find("Prime numbers limit") != std::string::npos) {
      push(out, "CPU_EVENTS", first_match(b, events));
      push(out, "CPU_LAT", latency_avg(b));
    } else if (b.find("memory speed test") != std::string::npos) {
      push(out, "MEM_SPEED", first_match(b, mem));
      push(out, "MEM_LAT", latency_avg(b));
    } else if (b.find("File operations:") != std::string::npos ||
               b.find("Extra file open flags") != std::string::npos) {
      push(out, "DISK_FILE_R", first_match(b, reads));
      push(out, "DISK_FILE_W", first_match(b, writes));
      push(out, "DISK_FILE_F", first_match(b, fsyncs));
      push(out, "DISK_THR_R", first_match(b, thr_r));
      push(out, "DISK_THR_W", first_match(b, thr_w));
      push(out, "DISK_LAT", latency_avg(b));
    } else if (b.find("Latency (ms):") != std::string::npos) {
      push(out, "CPU_TH_LAT", latency_avg(b));
    }
  }
  return out;
}

std::vector<ParsedValue> parse_nench(const std::string& text) {
  static const std::regex sha("SHA256-hashing[^\\n]*\\n\\s*" VB_NUM "\\s*seconds");
  static const std::regex bz("bzip2-compressing[^\\n]*\\n\\s*" VB_NUM "\\s*seconds");
  static const std::regex aes("AES-encrypting[^\\n]*\\n\\s*" VB_NUM "\\s*seconds");
  static const std::regex seek(
      "ioping: seek rate\\s*\\n\\s*min/avg/max/mdev = [^/]*/\\s*" VB_NUM "\\s*(ns|us|ms|s)\\b");
  static const std::regex seq_r("ioping: sequential read speed\\s*\\n[^\\n]*?" VB_NUM
                                "\\s*(KiB|MiB|GiB)/s");
  static const std::regex seq_w("dd: sequential write speed[\\s\\S]*?average:\\s*" VB_NUM
                                "\\s*(KiB|MiB|GiB)/s");
  static const std::regex net1("Cachefly CDN:\\s*" VB_NUM "\\s*(KiB|MiB|GiB)/s");
  static const std::regex net2("Leaseweb \\(NL\\):\\s*" VB_NUM "\\s*(KiB|MiB|GiB)/s");
  static const std::regex net3("Softlayer DAL \\(US\\):\\s*" VB_NUM "\\s*(KiB|MiB|GiB)/s");
  static const std::regex net4("Online\\.net \\(FR\\):\\s*" VB_NUM "\\s*(KiB|MiB|GiB)/s");
  static const std::regex net5("OVH BHS \\(CA\\):\\s*" VB_NUM "\\s*(KiB|MiB|GiB)/s");
  std::vector<ParsedValue> out;
  push(out, "CPU_SHA256", first_match(text, sha));
  push(out, "CPU_BZIP2", first_match(text, bz));
  push(out, "CPU_AES", first_match(text, aes));
  {
    std::smatch m;
    if (std::regex_search(text, m, seek)) {
      if (auto v = to_double(m[1].str())) {
        const auto unit = m[2].str();
        const double scale = unit == "ns" ? 1e-3 : unit == "ms" ? 1e3 : unit == "s" ? 1e6 : 1.0;
        out.push_back({"DISK_SEEK", *v * scale});
      }
    }
  }
  push(out, "DISK_SEQ_R", mib_per_s(text, seq_r));
  push(out, "DISK_SEQ_W", mib_per_s(text, seq_w));
  push(out, "NET_1", mib_per_s(text, net1));
  push(out, "NET_2", mib_per_s(text, net2));
  push(out, "NET_3", mib_per_s(text, net3));
  push(out, "NET_4", mib_per_s(text, net4));
  push(out, "NET_5", mib_per_s(text, net5));
  return out;
}

// GNU dd summary: "... copied, 8.2 s, 130 MB/s". Decimal prefixes.
std::optional<double> dd_rate(const std::string& text) {
  static const std::regex re("copied,\\s*" VB_NUM "\\s*s,\\s*" VB_NUM "\\s*(kB|MB|GB)/s");
  std::optional<double> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    auto v = to_double((*it)[2].str());
    if (!v) continue;
    const auto unit = (*it)[3].str();
    out = unit == "kB" ? *v / 1000.0 : unit == "GB" ? *v * 1000.0 : *v;
  }
  return out;
}

// wget summary line: "(93.9 MB/s) - '/dev/null' saved". wget's units are binary.
std::optional<double> wget_rate(const std::string& text) {
  static const std::regex re("\\(" VB_NUM "\\s*(KB|MB|GB)/s\\)\\s*-");
  std::optional<double> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    auto v = to_double((*it)[1].str());
    if (!v) continue;
    const auto unit = (*it)[2].str();
    out = unit == "KB" ? *v / 1024.0 : unit == "GB" ? *v * 1024.0 : *v;
  }
  return out;
}

// Generic "METRIC=value" lines, for external probes written against this tool.
std::vector<ParsedValue> parse_raw(const std::string& text) {
  static const std::regex re("^\\s*([A-Z][A-Z0-9_]*)\\s*=\\s*" VB_NUM "\\s*$",
                             std::regex::multiline);
  std::vector<ParsedValue> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
       it != std::sregex_iterator(); ++it) {
    if (auto v = to_double((*it)[2].str())) out.push_back({(*it)[1].str(), *v});
  }
  return out;
}

}  // namespace

std::span<const std::string_view> registered_parsers() { return kParsers; }

bool is_registered_parser(std::string_view parser_id) {
  for (auto p : kParsers) {
    if (p == parser_id) return true;
  }
  return false;
}

std::vector<ParsedValue> parse_output(std::string_view raw, std::string_view parser_id) {
  if (!is_registered_parser(parser_id)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown parser '" + std::string(parser_id) + "'");
  }
  const std::string text(raw);
  std::vector<ParsedValue> out;
  if (parser_id == "sysbench") {
    out = parse_sysbench(text);
  } else if (parser_id == "nench") {
    out = parse_nench(text);
  } else if (parser_id == "cpubench") {
    static const std::regex re("mean duration\\s*" VB_NUM "\\s*s\\b");
    push(out, "CPU_DUR", last_match(text, re));
  } else if (parser_id == "ddbench-small") {
    push(out, "DISKB_LAT", dd_rate(text));
  } else if (parser_id == "ddbench-large") {
    push(out, "DISKB_THR", dd_rate(text));
  } else if (parser_id == "download-1") {
    push(out, "NETB_1", wget_rate(text));
  } else if (parser_id == "download-2") {
    push(out, "NETB_2", wget_rate(text));
  } else if (parser_id == "wrk") {
    static const std::regex re("Requests/sec:\\s*" VB_NUM);
    push(out, "APPB", last_match(text, re));
  } else {
    out = parse_raw(text);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kUnparseableOutput, std::string(parser_id));
  }
  return out;
}

#undef VB_NUM

namespace {

std::optional<double> lookup(std::span<const ParsedValue> values, std::string_view metric) {
  for (const auto& v : values) {
    if (v.metric == metric) return v.value;
  }
  return std::nullopt;
}

std::string render_sysbench(std::span<const ParsedValue> values) {
  constexpr std::string_view kBanner =
      "sysbench 1.0.20 (using bundled LuaJIT 2.1.0-beta2)\n\n"
      "Running the test with following options:\n";
  std::string out;
  auto latency = [](double avg) {
    return fmt::format("Latency (ms):\n         avg:                                    {}\n\n",
                       avg);
  };
  const auto ev = lookup(values, "CPU_EVENTS");
  const auto cl = lookup(values, "CPU_LAT");
  if (ev || cl) {
    out += kBanner;
    out += "Number of threads: 1\n\nPrime numbers limit: 10000\n\n";
    if (ev) out += fmt::format("CPU speed:\n    events per second: {:>8}\n\n", *ev);
    if (cl) out += latency(*cl);
  }
  if (auto th = lookup(values, "CPU_TH_LAT")) {
    out += kBanner;
    out += "Number of threads: 4\n\nGeneral statistics:\n    total number of events: 10000\n\n";
    out += latency(*th);
  }
  const auto ms = lookup(values, "MEM_SPEED");
  const auto ml = lookup(values, "MEM_LAT");
  if (ms || ml) {
    out += kBanner;
    out += "Number of threads: 1\n\nRunning memory speed test with the following options:\n"
           "  block size: 1KiB\n  total size: 102400MiB\n  operation: write\n\n";
    if (ms) out += fmt::format("102400.00 MiB transferred ({} MiB/sec)\n\n", *ms);
    if (ml) out += latency(*ml);
  }
  const char* disk[] = {"DISK_FILE_R", "DISK_FILE_W", "DISK_FILE_F",
                        "DISK_THR_R",  "DISK_THR_W",  "DISK_LAT"};
  bool any_disk = false;
  for (auto m : disk) any_disk = any_disk || lookup(values, m).has_value();
  if (any_disk) {
    out += kBanner;
    out += "Number of threads: 1\n\nExtra file open flags: (none)\n128 files, 8MiB each\n\n"
           "File operations:\n";
    if (auto v = lookup(values, "DISK_FILE_R")) out += fmt::format("    reads/s:   {}\n", *v);
    if (auto v = lookup(values, "DISK_FILE_W")) out += fmt::format("    writes/s:  {}\n", *v);
    if (auto v = lookup(values, "DISK_FILE_F")) out += fmt::format("    fsyncs/s:  {}\n", *v);
    out += "\nThroughput:\n";
    if (auto v = lookup(values, "DISK_THR_R")) out += fmt::format("    read, MiB/s:  {}\n", *v);
    if (auto v = lookup(values, "DISK_THR_W")) {
      out += fmt::format("    written, MiB/s:  {}\n", *v);
    }
    out += "\n";
    if (auto v = lookup(values, "DISK_LAT")) out += latency(*v);
  }
  return out;
}

std::string render_nench(std::span<const ParsedValue> values) {
  std::string out;
  const std::pair<const char*, const char*> cpu[] = {{"CPU_SHA256", "SHA256-hashing"},
                                                     {"CPU_BZIP2", "bzip2-compressing"},
                                                     {"CPU_AES", "AES-encrypting"}};
  for (const auto& [metric, label] : cpu) {
    if (auto v = lookup(values, metric)) {
      out += fmt::format("CPU: {} 500 MB\n    {} seconds\n", label, *v);
    }
  }
  out += "\n";
  if (auto v = lookup(values, "DISK_SEEK")) {
    out += fmt::format("ioping: seek rate\n    min/avg/max/mdev = 63.6 us / {} us / 4.58 ms / 51.2 us\n",
                       *v);
  }
  if (auto v = lookup(values, "DISK_SEQ_R")) {
    out += fmt::format(
        "ioping: sequential read speed\n    generated 9.42 k requests in 5.00 s, 2.30 GiB, "
        "1.88 k iops, {} MiB/s\n",
        *v);
  }
  out += "\n";
  if (auto v = lookup(values, "DISK_SEQ_W")) {
    out += fmt::format("dd: sequential write speed\n    1st run:    {0} MiB/s\n"
                       "    2nd run:    {0} MiB/s\n    3rd run:    {0} MiB/s\n"
                       "    average:    {0} MiB/s\n",
                       *v);
  }
  out += "\nIPv4 speedtests\n    your IPv4:    192.0.2.xxxx\n\n";
  const std::pair<const char*, const char*> net[] = {{"NET_1", "Cachefly CDN:"},
                                                     {"NET_2", "Leaseweb (NL):"},
                                                     {"NET_3", "Softlayer DAL (US):"},
                                                     {"NET_4", "Online.net (FR):"},
                                                     {"NET_5", "OVH BHS (CA):"}};
  for (const auto& [metric, label] : net) {
    if (auto v = lookup(values, metric)) out += fmt::format("    {:<20} {} MiB/s\n", label, *v);
  }
  return out;
}

std::string render_dd(std::optional<double> mb_per_s, const char* block) {
  if (!mb_per_s) return {};
  const double bytes = 1073741824.0;
  const double secs = *mb_per_s > 0 ? bytes / (*mb_per_s * 1e6) : 0.0;
  return fmt::format(
      "dd if=/dev/zero of=ddbench.tmp {}\n1+0 records in\n1+0 records out\n"
      "1073741824 bytes (1.1 GB, 1.0 GiB) copied, {:.4f} s, {} MB/s\n",
      block, secs, *mb_per_s);
}

std::string render_wget(std::optional<double> mib_s, const char* url) {
  if (!mib_s) return {};
  return fmt::format(
      "--2020-04-03 14:00:05--  {}\nHTTP request sent, awaiting response... 200 OK\n\n"
      "2020-04-03 14:00:17 ({} MB/s) - '/dev/null' saved [1073741824/1073741824]\n",
      url, *mib_s);
}

}  // namespace

std::string render_output(std::string_view parser_id, std::span<const ParsedValue> values) {
  if (parser_id == "sysbench") return render_sysbench(values);
  if (parser_id == "nench") return render_nench(values);
  if (parser_id == "cpubench") {
    auto v = lookup(values, "CPU_DUR");
    return v ? fmt::format("cpubench: 10 iterations, mean duration {} s\n", *v) : std::string{};
  }
  if (parser_id == "ddbench-small") return render_dd(lookup(values, "DISKB_LAT"), "bs=4k count=262144");
  if (parser_id == "ddbench-large") return render_dd(lookup(values, "DISKB_THR"), "bs=1G count=1");
  if (parser_id == "download-1") return render_wget(lookup(values, "NETB_1"), "http://url-1/1GB.bin");
  if (parser_id == "download-2") return render_wget(lookup(values, "NETB_2"), "http://url-2/100MB.bin");
  if (parser_id == "wrk") {
    auto v = lookup(values, "APPB");
    return v ? fmt::format("Running 30s test @ http://127.0.0.1:8000/\n  2 threads and 10 "
                           "connections\nRequests/sec: {:>10}\nTransfer/sec:    245.12KB\n",
                           *v)
             : std::string{};
  }
  if (parser_id == "raw") {
    std::string out;
    for (const auto& v : values) out += fmt::format("{}={}\n", v.metric, v.value);
    return out;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown parser '" + std::string(parser_id) + "'");
}

}  // namespace varbench
