#include "projequiv/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace projequiv {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 8);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a_hex(const std::string& s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  return buf;
}

std::string mask_wall_time(const std::string& json) {
  const std::string key = "\"wall_time_ms\":";
  std::string out = json;
  std::size_t pos = out.find(key);
  while (pos != std::string::npos) {
    std::size_t start = pos + key.size();
    while (start < out.size() && out[start] == ' ') ++start;
    std::size_t end = start;
    while (end < out.size() && out[end] != ',' && out[end] != '\n' && out[end] != '}') ++end;
    out.replace(start, end - start, "0");
    pos = out.find(key, start);
  }
  return out;
}

std::string module_record_json(const std::string& op, const std::string& inputs_digest,
                               double value, double tol, bool pass) {
  std::ostringstream os;
  os << "{\"op\": \"" << json_escape(op) << "\", \"inputs\": \"" << json_escape(inputs_digest)
     << "\", \"value\": " << fmt_double(value) << ", \"tol\": " << fmt_double(tol)
     << ", \"pass\": " << (pass ? "true" : "false") << "}";
  return os.str();
}

Report::Report(std::string tool, std::string version, std::string command)
    : tool_(std::move(tool)), version_(std::move(version)), command_(std::move(command)) {}

void Report::set_config(const std::string& key, const std::string& value) {
  config_.emplace_back(key, "\"" + json_escape(value) + "\"");
}

void Report::set_config(const std::string& key, const char* value) {
  set_config(key, std::string(value));
}

void Report::set_config(const std::string& key, double value) {
  config_.emplace_back(key, fmt_double(value));
}

void Report::set_config(const std::string& key, long long value) {
  config_.emplace_back(key, std::to_string(value));
}

void Report::set_config(const std::string& key, int value) {
  set_config(key, static_cast<long long>(value));
}

void Report::set_config(const std::string& key, bool value) {
  config_.emplace_back(key, value ? "true" : "false");
}

void Report::add_check(CheckRecord record) { checks_.push_back(std::move(record)); }

bool Report::overall_pass() const {
  for (const CheckRecord& c : checks_) {
    if (!c.pass) return false;
  }
  return true;
}

std::string Report::to_json() const {
  std::ostringstream os;
  os << "{\n";
  os << "  \"tool\": \"" << json_escape(tool_) << "\",\n";
  os << "  \"version\": \"" << json_escape(version_) << "\",\n";
  os << "  \"command\": \"" << json_escape(command_) << "\",\n";
  os << "  \"config\": {";
  for (std::size_t i = 0; i < config_.size(); ++i) {
    os << (i ? ", " : "") << "\"" << json_escape(config_[i].first) << "\": " << config_[i].second;
  }
  os << "},\n";
  os << "  \"checks\": [\n";
  for (std::size_t i = 0; i < checks_.size(); ++i) {
    const CheckRecord& c = checks_[i];
    os << "    {\"name\": \"" << json_escape(c.name) << "\", \"value\": " << fmt_double(c.value)
       << ", \"tol\": " << fmt_double(c.tol) << ", \"pass\": " << (c.pass ? "true" : "false");
    if (!c.note.empty()) os << ", \"note\": \"" << json_escape(c.note) << "\"";
    os << "}" << (i + 1 < checks_.size() ? "," : "") << "\n";
  }
  os << "  ],\n";
  os << "  \"overall_pass\": " << (overall_pass() ? "true" : "false") << ",\n";
  os << "  \"wall_time_ms\": " << fmt_double(wall_time_ms_) << "\n";
  os << "}\n";
  return os.str();
}

}  // namespace projequiv
