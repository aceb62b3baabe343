#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liecramer/liecramer.h"

namespace cli {

using json = nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kCertificate = 2, kNumeric = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A failed library call, carrying enough context for a diagnostic report.
struct LibraryError : std::runtime_error {
  LibraryError(lc_status s, std::string module, std::string operation, const std::string& msg)
      : std::runtime_error(msg), status(s), module(std::move(module)), operation(std::move(operation)) {}
  lc_status status;
  std::string module;
  std::string operation;
};

void check(lc_status s, const char* module, const char* operation);

/// Reads a flat `key = value` file. Blank lines and lines starting with '#'
/// are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Splices config-file entries in front of the command-line flags of the
/// chosen subcommand so that flags given later win.
std::vector<std::string> splice_config(const std::vector<std::string>& args);

/// Every long option of `sub` with its effective value.
json resolved_config(const CLI::App& sub);

std::string format_double(double v);
json number(double v);

std::uint64_t fnv1a(const std::string& s);
std::string hex(std::uint64_t v);

/// Writes via a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& contents);

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  std::string str() const { return out_; }

private:
  std::size_t columns_;
  std::string out_;
};

std::string iso_timestamp();

/// Parses a comma separated list of positive integers.
std::vector<std::size_t> parse_size_list(const std::string& s, const char* field);

struct MatrixArg {
  std::size_t d = 0;
  std::vector<double> data;  // row-major
};

/// Inline JSON (starting with '[') or a path to a JSON file.
MatrixArg load_matrix(const std::string& arg, const char* field);

json matrix_json(const double* data, std::size_t d);

std::size_t default_workers();

}  // namespace cli
