#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "myller/errors.hpp"

namespace myller::cli {

inline constexpr const char* version = "0.1.0";

// Schema violation at a JSON pointer into the problem spec ("" is the document root).
class SchemaError : public ValidationError {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : ValidationError("SchemaError at " + (pointer.empty() ? std::string("/") : pointer) + ": " + what),
        pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

// Effective run settings: spec "options" overridden by command-line flags.
struct Settings {
  std::size_t grid = 1024;
  double fd_step = 1e-5;
  std::optional<double> tol;  // unset: each module's own default
  std::string format;         // "csv" or "json"; empty picks the kind's default
  std::string output;         // empty: standard output
};

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

struct ProblemSpec {
  std::string kind;
  std::string hash;  // FNV-1a 64 of the source bytes, hex
  nlohmann::json doc;
  Settings options;  // from the "options" block
  // Built at load time with every expression already parsed.
  std::function<ResultTable(const Settings&)> solve;
};

const std::vector<std::string>& kinds();

// Expression errors are rethrown as SchemaError at their pointer, with the original nested.
ProblemSpec parse_spec(const std::string& text);
ProblemSpec load_spec(const std::string& path);

ResultTable solve(const ProblemSpec& spec, const Settings& settings);

// CSV: header plus one line per row, 17 significant digits, LF. JSON: columns, rows, meta and summary keys.
void emit(const ResultTable& table, const std::string& format, std::ostream& out);
void emit(const ResultTable& table, const std::string& format, const std::string& path);

// Subcommand dispatch; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace myller::cli
