// Copyright 2026 The lot Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace lot {

using Json = nlohmann::ordered_json;

// Structured outcome of an invariant check. Metrics keep insertion order so
// serialized reports are stable across runs.
struct CertificateReport {
  std::string name;
  bool pass = true;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;

  CertificateReport() = default;
  explicit CertificateReport(std::string n) : name(std::move(n)) {}

  CertificateReport& metric(const std::string& key, double value);
  double get(const std::string& key) const;
  bool has(const std::string& key) const;
  CertificateReport& note(std::string text);
  /// Fails the report with a note; returns *this for chaining.
  CertificateReport& fail(std::string why);
  /// pass &&= cond, recording `what` when the condition does not hold.
  CertificateReport& require(bool cond, const std::string& what);

  Json to_json() const;
};

/// Serializes with every real printed as a 17-significant-digit decimal
/// (non-finite values become null). Output is byte-stable for equal input.
std::string dump_json(const Json& value, int indent = 2);
/// One real as a 17-significant-digit decimal ("null" when not finite).
std::string format_real(double x);

}  // namespace lot
