#ifndef NNPOST_TOOLS_IO_HPP
#define NNPOST_TOOLS_IO_HPP

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nnpost_cli {

// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CSV content. `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Dense numeric table, row-major.
struct Table {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<std::string> header;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  Table transposed() const;
};

// Comma-separated numbers. Blank lines are skipped; a first line with a
// non-numeric field is taken as a header. Every row must have the same
// number of fields.
Table read_csv(const std::string& path);
Table parse_csv(std::string_view text, const std::string& source);

// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

// Buffered CSV writer; flushes and checks for errors in close().
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  // Writes to an already open stream (stdout), not owned.
  explicit CsvWriter(std::FILE* stream);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);
  void close();

 private:
  std::FILE* file_ = nullptr;
  bool owned_ = false;
  std::string path_;
};

// Minimal streaming JSON emitter with two-space indentation. Doubles use
// format_double(); non-finite values become null.
class JsonWriter {
 public:
  void begin_object(std::string_view key = {});
  void end_object();
  void begin_array(std::string_view key = {});
  void end_array();
  void value(std::string_view key, double v);
  void value(std::string_view key, long long v);
  void value(std::string_view key, std::string_view v);
  void element(double v);
  void numbers(std::string_view key, const double* data, std::size_t count);
  // Array of `rows` arrays, each `cols` long, from row-major storage.
  void matrix(std::string_view key, const double* data, std::size_t rows, std::size_t cols);

  const std::string& str() const { return out_; }

 private:
  void prefix(std::string_view key);
  void newline();

  std::string out_;
  std::vector<bool> first_;
  bool inline_ = false;
};

void write_text(const std::string& path, const std::string& text);

}  // namespace nnpost_cli

#endif  // NNPOST_TOOLS_IO_HPP
