#include "mvcl/mve_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>
#include <system_error>

namespace mvcl {

namespace {

constexpr std::string_view kMagic = "mve1";

std::uint64_t parse_count(std::string_view token) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value == 0) {
    throw Error(ErrorCode::BadHeader, "bad count in header");
  }
  return value;
}

double parse_field(std::string_view token, const char* what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(
      token.data(), token.data() + token.size(), value,
      std::chars_format::general);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string("unparseable value in ") + what);
  }
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NonFinite, "nan or inf in data row");
  }
  return value;
}

// Splits on single spaces; rejects empty tokens so double spaces and
// trailing whitespace are malformed rather than silently accepted.
std::size_t split_fields(std::string_view line, std::string_view* out,
                         std::size_t max_fields) {
  std::size_t count = 0;
  while (!line.empty()) {
    const std::size_t pos = line.find(' ');
    const std::string_view token =
        pos == std::string_view::npos ? line : line.substr(0, pos);
    if (token.empty() || count == max_fields) return max_fields + 1;
    out[count++] = token;
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
    if (line.empty()) return max_fields + 1;  // trailing space
  }
  return count;
}

}  // namespace

ViewBatch parse_batch(const std::string& text) {
  if (text.empty() || text.back() != '\n') {
    throw Error(ErrorCode::ShapeMismatch, "missing final newline");
  }
  std::string_view rest = text;
  const std::size_t header_end = rest.find('\n');
  std::string_view header = rest.substr(0, header_end);
  rest.remove_prefix(header_end + 1);

  std::string_view tokens[4];
  if (split_fields(header, tokens, 4) != 4 || tokens[0] != kMagic) {
    throw Error(ErrorCode::BadHeader, "expected 'mve1 M N d'");
  }
  const std::uint64_t m = parse_count(tokens[1]);
  const std::uint64_t n = parse_count(tokens[2]);
  const std::uint64_t d = parse_count(tokens[3]);
  if (m * n * d > 100'000'000ULL) {
    throw Error(ErrorCode::BadHeader, "header counts unreasonably large");
  }

  ViewBatch batch(m, n, d);
  std::vector<std::string_view> fields(d);
  std::size_t row = 0;
  while (!rest.empty()) {
    const std::size_t line_end = rest.find('\n');
    if (line_end == std::string_view::npos) {
      throw Error(ErrorCode::ShapeMismatch, "missing final newline");
    }
    const std::string_view line = rest.substr(0, line_end);
    rest.remove_prefix(line_end + 1);
    if (row >= m * n) {
      throw Error(ErrorCode::ShapeMismatch, "more rows than header declares");
    }
    if (split_fields(line, fields.data(), d) != d) {
      throw Error(ErrorCode::ShapeMismatch, "row field count != d");
    }
    double* out = batch.flat_row(row);
    for (std::size_t k = 0; k < d; ++k) out[k] = parse_field(fields[k], "row");
    ++row;
  }
  if (row != m * n) {
    throw Error(ErrorCode::ShapeMismatch, "fewer rows than header declares");
  }
  return batch;
}

std::string format_batch(const ViewBatch& batch) {
  std::string out;
  out.reserve(batch.rows() * batch.d * 26 + 32);
  char buf[64];
  auto append_count = [&](std::uint64_t v) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
  };
  out += kMagic;
  out += ' ';
  append_count(batch.m);
  out += ' ';
  append_count(batch.n);
  out += ' ';
  append_count(batch.d);
  out += '\n';
  for (std::size_t r = 0; r < batch.rows(); ++r) {
    const double* row = batch.flat_row(r);
    for (std::size_t k = 0; k < batch.d; ++k) {
      if (!std::isfinite(row[k])) {
        throw Error(ErrorCode::NonFinite, "cannot serialize nan or inf");
      }
      const auto res = std::to_chars(buf, buf + sizeof(buf), row[k],
                                     std::chars_format::general, 17);
      if (k > 0) out += ' ';
      out.append(buf, res.ptr);
    }
    out += '\n';
  }
  return out;
}

ViewBatch read_batch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::IoFailure, "cannot open " + path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorCode::IoFailure, "read error on " + path);
  }
  return parse_batch(text);
}

void write_batch(const ViewBatch& batch, const std::string& path) {
  const std::string text = format_batch(batch);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    throw Error(ErrorCode::IoFailure, "write error on " + path);
  }
}

}  // namespace mvcl
