#include "io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nnpost_cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

bool parse_number(std::string_view field, double& out) {
  if (field.empty()) return false;
  std::string buf(field);
  char* end = nullptr;
  errno = 0;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && errno != ERANGE;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

}  // namespace

ParseError::ParseError(const std::string& path, std::size_t line, const std::string& what)
    : std::runtime_error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

Table Table::transposed() const {
  Table t;
  t.rows = cols;
  t.cols = rows;
  t.values.resize(values.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t.values[c * rows + r] = values[r * cols + c];
  return t;
}

Table parse_csv(std::string_view text, const std::string& source) {
  Table table;
  std::size_t line_no = 0;
  bool seen_first = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    const auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    const auto fields = split(line);
    std::vector<double> row(fields.size());
    std::size_t bad = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_number(fields[i], row[i])) {
        bad = i;
        break;
      }
    }
    if (!seen_first) {
      seen_first = true;
      table.cols = fields.size();
      if (bad != fields.size()) {
        for (auto f : fields) table.header.push_back(unquote(f));
        continue;
      }
    }
    if (fields.size() != table.cols) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(table.cols) + " fields, found " +
                           std::to_string(fields.size()));
    }
    if (bad != fields.size()) {
      throw ParseError(source, line_no,
                       "field " + std::to_string(bad + 1) + " is not a number: '" +
                           std::string(fields[bad]) + "'");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isfinite(row[i])) {
        throw ParseError(source, line_no, "field " + std::to_string(i + 1) + " is not finite");
      }
    }
    table.values.insert(table.values.end(), row.begin(), row.end());
    ++table.rows;
  }
  if (table.rows == 0) throw ParseError(source, line_no, "no data rows");
  return table;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + ": " + std::strerror(errno));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path);
  return parse_csv(buf.str(), path);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : owned_(true), path_(path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (!file_) throw IoError("cannot open " + path + " for writing: " + std::strerror(errno));
}

CsvWriter::CsvWriter(std::FILE* stream) : file_(stream), path_("<stdout>") {}

CsvWriter::~CsvWriter() {
  if (owned_ && file_) std::fclose(file_);
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', file_);
    std::fputs(cells[i].c_str(), file_);
  }
  std::fputc('\n', file_);
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) std::fputc(',', file_);
    std::fputs(format_double(values[i]).c_str(), file_);
  }
  std::fputc('\n', file_);
}

void CsvWriter::close() {
  if (!file_) return;
  const bool failed = std::ferror(file_) != 0;
  const int rc = owned_ ? std::fclose(file_) : std::fflush(file_);
  file_ = nullptr;
  if (failed || rc != 0) throw IoError("error writing " + path_);
}

void JsonWriter::newline() {
  out_ += '\n';
  out_.append(2 * first_.size(), ' ');
}

void JsonWriter::prefix(std::string_view key) {
  if (!first_.empty()) {
    if (!first_.back()) out_ += ',';
    first_.back() = false;
    if (inline_) {
      if (out_.back() == ',') out_ += ' ';
    } else {
      newline();
    }
  }
  if (!key.empty()) {
    out_ += '"';
    out_ += key;
    out_ += "\": ";
  }
}

void JsonWriter::begin_object(std::string_view key) {
  prefix(key);
  out_ += '{';
  first_.push_back(true);
}

void JsonWriter::end_object() {
  const bool empty = first_.back();
  first_.pop_back();
  if (!empty) newline();
  out_ += '}';
  if (first_.empty()) out_ += '\n';
}

void JsonWriter::begin_array(std::string_view key) {
  prefix(key);
  out_ += '[';
  first_.push_back(true);
  inline_ = true;
}

void JsonWriter::end_array() {
  first_.pop_back();
  out_ += ']';
  inline_ = false;
}

void JsonWriter::element(double v) {
  prefix({});
  out_ += std::isfinite(v) ? format_double(v) : "null";
}

void JsonWriter::value(std::string_view key, double v) {
  prefix(key);
  out_ += std::isfinite(v) ? format_double(v) : "null";
}

void JsonWriter::value(std::string_view key, long long v) {
  prefix(key);
  out_ += std::to_string(v);
}

void JsonWriter::value(std::string_view key, std::string_view v) {
  prefix(key);
  out_ += '"';
  for (char c : v) {
    switch (c) {
      case '"': out_ += "\\\""; break;
      case '\\': out_ += "\\\\"; break;
      case '\n': out_ += "\\n"; break;
      case '\r': out_ += "\\r"; break;
      case '\t': out_ += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
          out_ += buf;
        } else {
          out_ += c;
        }
    }
  }
  out_ += '"';
}

void JsonWriter::numbers(std::string_view key, const double* data, std::size_t count) {
  begin_array(key);
  for (std::size_t i = 0; i < count; ++i) element(data[i]);
  end_array();
}

void JsonWriter::matrix(std::string_view key, const double* data, std::size_t rows,
                        std::size_t cols) {
  prefix(key);
  out_ += '[';
  first_.push_back(true);
  for (std::size_t r = 0; r < rows; ++r) {
    prefix({});
    out_ += '[';
    first_.push_back(true);
    inline_ = true;
    for (std::size_t c = 0; c < cols; ++c) element(data[r * cols + c]);
    first_.pop_back();
    inline_ = false;
    out_ += ']';
  }
  first_.pop_back();
  if (rows) newline();
  out_ += ']';
}

void write_text(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open " + path + " for writing: " + std::strerror(errno));
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
  if (std::fclose(f) != 0 || !ok) throw IoError("error writing " + path);
}

}  // namespace nnpost_cli
