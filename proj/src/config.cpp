// SPDX-License-Identifier: Apache-2.0

#include "hdgmg/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace hdgmg
{

namespace
{

std::string trim(const std::string &s)
{
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_items(const std::string &s)
{
  std::vector<std::string> out;
  std::string cur;
  for (char c : s)
  {
    if (c == ',' || c == ' ' || c == '\t')
    {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    }
    else
      cur.push_back(c);
  }
  if (!cur.empty())
    out.push_back(cur);
  return out;
}

}  // namespace

Config Config::from_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path + ": cannot open configuration file");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str(), path);
}

Config Config::from_string(const std::string &text, const std::string &name)
{
  Config cfg;
  cfg.name_ = name;
  cfg.raw_ = text;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line))
  {
    lineno++;
    // Strip inline comments introduced by " #".
    size_t hash = line.find(" #");
    if (hash != std::string::npos)
      line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';')
      continue;
    if (t.front() == '[')
    {
      if (t.back() != ']' || t.size() < 3)
        throw ConfigError(name + ":" + std::to_string(lineno) + ": malformed section header '" +
                          t + "'");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
    std::string full = section.empty() ? key : section + "." + key;
    auto it = cfg.entries_.find(full);
    if (it != cfg.entries_.end())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + full +
                        "' (first defined at line " + std::to_string(it->second.line) + ")");
    cfg.entries_[full] = Entry{value, lineno};
  }
  return cfg;
}

bool Config::has(const std::string &key) const
{
  return entries_.count(key) != 0;
}

int Config::line_of(const std::string &key) const
{
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::vector<std::string> Config::keys() const
{
  std::vector<std::string> out;
  for (const auto &kv : entries_)
    out.push_back(kv.first);
  return out;
}

void Config::fail(const std::string &key, const std::string &msg) const
{
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ConfigError(name_ + ": missing required key '" + key + "'");
  throw ConfigError(name_ + ":" + std::to_string(it->second.line) + ": key '" + key + "': " +
                    msg);
}

std::string Config::str(const std::string &key) const
{
  auto it = entries_.find(key);
  if (it == entries_.end())
    fail(key, "");
  return it->second.value;
}

std::string Config::str_or(const std::string &key, const std::string &def) const
{
  return has(key) ? str(key) : def;
}

double Config::num(const std::string &key) const
{
  std::string v = str(key);
  try
  {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size())
      fail(key, "trailing characters in number '" + v + "'");
    return d;
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const std::exception &)
  {
    fail(key, "expected a number, got '" + v + "'");
  }
}

double Config::num_or(const std::string &key, double def) const
{
  return has(key) ? num(key) : def;
}

int Config::integer(const std::string &key) const
{
  std::string v = str(key);
  try
  {
    size_t pos = 0;
    long d = std::stol(v, &pos);
    if (pos != v.size())
      fail(key, "trailing characters in integer '" + v + "'");
    return static_cast<int>(d);
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const std::exception &)
  {
    fail(key, "expected an integer, got '" + v + "'");
  }
}

int Config::integer_or(const std::string &key, int def) const
{
  return has(key) ? integer(key) : def;
}

bool Config::flag_or(const std::string &key, bool def) const
{
  if (!has(key))
    return def;
  std::string v = str(key);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (v == "1" || v == "true" || v == "yes" || v == "on")
    return true;
  if (v == "0" || v == "false" || v == "no" || v == "off")
    return false;
  fail(key, "expected a boolean, got '" + v + "'");
}

std::vector<int> Config::int_list(const std::string &key) const
{
  std::vector<int> out;
  for (const std::string &item : split_items(str(key)))
  {
    try
    {
      size_t pos = 0;
      out.push_back(static_cast<int>(std::stol(item, &pos)));
      if (pos != item.size())
        throw std::invalid_argument(item);
    }
    catch (const std::exception &)
    {
      fail(key, "expected a list of integers, got item '" + item + "'");
    }
  }
  if (out.empty())
    fail(key, "expected a non-empty list of integers");
  return out;
}

std::vector<int> Config::int_list_or(const std::string &key, const std::vector<int> &def) const
{
  return has(key) ? int_list(key) : def;
}

std::vector<double> Config::num_list(const std::string &key) const
{
  std::vector<double> out;
  for (const std::string &item : split_items(str(key)))
  {
    try
    {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size())
        throw std::invalid_argument(item);
    }
    catch (const std::exception &)
    {
      fail(key, "expected a list of numbers, got item '" + item + "'");
    }
  }
  if (out.empty())
    fail(key, "expected a non-empty list of numbers");
  return out;
}

std::vector<double> Config::num_list_or(const std::string &key,
                                        const std::vector<double> &def) const
{
  return has(key) ? num_list(key) : def;
}

void Config::check_allowed(const std::vector<std::string> &allowed) const
{
  for (const auto &kv : entries_)
  {
    if (std::find(allowed.begin(), allowed.end(), kv.first) == allowed.end())
      throw ConfigError(name_ + ":" + std::to_string(kv.second.line) + ": unknown key '" +
                        kv.first + "'");
  }
}

}  // namespace hdgmg
