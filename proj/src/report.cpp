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

#include "lot/report.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace lot {

CertificateReport& CertificateReport::metric(const std::string& key, double value) {
  for (auto& [k, v] : metrics) {
    if (k == key) {
      v = value;
      return *this;
    }
  }
  metrics.emplace_back(key, value);
  return *this;
}

double CertificateReport::get(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return v;
  }
  throw std::out_of_range("report '" + name + "' has no metric '" + key + "'");
}

bool CertificateReport::has(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return true;
  }
  return false;
}

CertificateReport& CertificateReport::note(std::string text) {
  notes.push_back(std::move(text));
  return *this;
}

CertificateReport& CertificateReport::fail(std::string why) {
  pass = false;
  return note(std::move(why));
}

CertificateReport& CertificateReport::require(bool cond, const std::string& what) {
  if (!cond) fail(what);
  return *this;
}

Json CertificateReport::to_json() const {
  Json j;
  j["name"] = name;
  j["pass"] = pass;
  Json m = Json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  j["metrics"] = m;
  j["notes"] = notes;
  return j;
}

namespace {

void format_real(double x, std::string& out) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void write(const Json& v, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        write(e, indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      format_real(v.get<double>(), out);
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  write(value, indent, 0, out);
  return out;
}

std::string format_real(double x) {
  std::string out;
  format_real(x, out);
  return out;
}

}  // namespace lot
