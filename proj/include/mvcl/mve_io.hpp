#pragma once

#include <string>

#include "mvcl/tensor.hpp"

namespace mvcl {

// MVE text format v1.
//   line 1: "mve1 M N d"
//   then M*N lines (instance-major, then view), each d space-separated
//   float64 values printed with 17 significant digits, '.' decimal separator,
//   no trailing whitespace, final newline required.
// 17 significant digits round-trip float64 exactly, so write then read is the
// identity bit-for-bit.
ViewBatch read_batch(const std::string& path);
void write_batch(const ViewBatch& batch, const std::string& path);

// In-memory variants used by the file API and by the CLI's atomic writes.
ViewBatch parse_batch(const std::string& text);
std::string format_batch(const ViewBatch& batch);

}  // namespace mvcl
