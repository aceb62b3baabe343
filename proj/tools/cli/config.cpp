#include "config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path, const char* field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError(std::string(field) + ": cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

void check(lc_status s, const char* module, const char* operation) {
  if (s == LC_OK) return;
  throw LibraryError(s, module, operation, std::string(lc_status_string(s)) + ": " + lc_last_error());
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config " + path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw UsageError("config " + path + ":" + std::to_string(lineno) + ": empty key");
    std::replace(key.begin(), key.end(), '_', '-');
    out[key] = value;
  }
  return out;
}

std::vector<std::string> splice_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a path");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return rest;
  std::size_t sub = 0;
  while (sub < rest.size() && !rest[sub].empty() && rest[sub][0] == '-') ++sub;
  if (sub == rest.size()) throw UsageError("--config given without a subcommand");
  std::vector<std::string> out(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(sub + 1));
  for (const auto& [k, v] : read_config_file(config)) out.push_back("--" + k + "=" + v);
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(sub + 1), rest.end());
  return out;
}

json resolved_config(const CLI::App& sub) {
  json out = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const auto& names = opt->get_lnames();
    if (names.empty() || names[0] == "help") continue;
    const std::string& name = names[0];
    if (opt->get_items_expected_max() == 0) {
      out[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    if (opt->count() > 0) {
      out[name] = opt->results().back();
    } else {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw UsageError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw UsageError("cannot rename onto '" + path + "': " + ec.message());
  }
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row(header); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ += ',';
    out_ += cells[i];
  }
  out_ += '\n';
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::size_t> parse_size_list(const std::string& s, const char* field) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || v == 0 || item[0] == '-') {
      throw UsageError(std::string(field) + ": '" + item + "' is not a positive integer");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError(std::string(field) + ": empty list");
  return out;
}

MatrixArg load_matrix(const std::string& arg, const char* field) {
  const std::string text = !arg.empty() && trim(arg)[0] == '[' ? arg : read_file(arg, field);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string(field) + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_array() || j.empty()) throw UsageError(std::string(field) + ": expected a square array of rows");
  MatrixArg m;
  m.d = j.size();
  for (std::size_t i = 0; i < m.d; ++i) {
    if (!j[i].is_array() || j[i].size() != m.d) {
      throw UsageError(std::string(field) + ": row " + std::to_string(i) + " must have " + std::to_string(m.d) +
                       " entries");
    }
    for (const auto& v : j[i]) {
      if (!v.is_number()) throw UsageError(std::string(field) + ": non-numeric entry in row " + std::to_string(i));
      m.data.push_back(v.get<double>());
    }
  }
  return m;
}

json matrix_json(const double* data, std::size_t d) {
  json rows = json::array();
  for (std::size_t i = 0; i < d; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < d; ++j) row.push_back(number(data[i * d + j]));
    rows.push_back(row);
  }
  return rows;
}

std::size_t default_workers() {
  if (const char* env = std::getenv("LIECRAMER_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

}  // namespace cli
