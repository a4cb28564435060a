#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace projequiv {

// 17-significant-digit decimal rendering; round-trips IEEE doubles and is
// identical across runs and platforms using the same libc formatting of %g.
std::string fmt_double(double v);

std::string json_escape(const std::string& s);

std::uint64_t fnv1a(const std::string& s);
std::string fnv1a_hex(const std::string& s);

// Replaces the value of the "wall_time_ms" field with 0 so reports can be
// compared byte-for-byte across runs.
std::string mask_wall_time(const std::string& json);

// One-line JSON record for a single computed quantity.
std::string module_record_json(const std::string& op, const std::string& inputs_digest,
                               double value, double tol, bool pass);

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

// Machine-readable run report with a fixed field order:
//   tool, version, command, config (insertion order), checks, overall_pass,
//   wall_time_ms (always last, masked in golden comparisons).
class Report {
 public:
  Report(std::string tool, std::string version, std::string command);

  void set_config(const std::string& key, const std::string& value);
  void set_config(const std::string& key, const char* value);
  void set_config(const std::string& key, double value);
  void set_config(const std::string& key, long long value);
  void set_config(const std::string& key, int value);
  void set_config(const std::string& key, bool value);

  void add_check(CheckRecord record);
  bool overall_pass() const;
  void set_wall_time_ms(double ms) { wall_time_ms_ = ms; }

  std::string to_json() const;

 private:
  std::string tool_, version_, command_;
  std::vector<std::pair<std::string, std::string>> config_;  // key -> JSON literal
  std::vector<CheckRecord> checks_;
  double wall_time_ms_ = 0.0;
};

}  // namespace projequiv
