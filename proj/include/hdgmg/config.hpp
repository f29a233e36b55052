// SPDX-License-Identifier: Apache-2.0

#ifndef HDGMG_CONFIG_HPP
#define HDGMG_CONFIG_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdgmg
{

// Configuration / usage error with a file:line anchor where applicable.
struct ConfigError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

// Flat key = value configuration with [section] headers; keys inside a
// section are addressed as "section.key".  Lines starting with # or ; are
// comments; inline comments start at " #".
class Config
{
public:
  static Config from_file(const std::string &path);
  static Config from_string(const std::string &text, const std::string &name);

  bool has(const std::string &key) const;
  int line_of(const std::string &key) const;  // 0 when absent
  const std::string &name() const { return name_; }
  const std::string &raw_text() const { return raw_; }
  std::vector<std::string> keys() const;

  std::string str(const std::string &key) const;  // throws when missing
  std::string str_or(const std::string &key, const std::string &def) const;
  double num(const std::string &key) const;
  double num_or(const std::string &key, double def) const;
  int integer(const std::string &key) const;
  int integer_or(const std::string &key, int def) const;
  bool flag_or(const std::string &key, bool def) const;
  std::vector<int> int_list(const std::string &key) const;
  std::vector<int> int_list_or(const std::string &key, const std::vector<int> &def) const;
  std::vector<double> num_list(const std::string &key) const;
  std::vector<double> num_list_or(const std::string &key,
                                  const std::vector<double> &def) const;

  // Rejects keys outside the allowed set (anchored at the offending line).
  void check_allowed(const std::vector<std::string> &allowed) const;

private:
  struct Entry
  {
    std::string value;
    int line = 0;
  };
  [[noreturn]] void fail(const std::string &key, const std::string &msg) const;

  std::string name_, raw_;
  std::map<std::string, Entry> entries_;
};

}  // namespace hdgmg

#endif  // HDGMG_CONFIG_HPP
