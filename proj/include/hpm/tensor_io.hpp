#pragma once

// Plain-text serialization.
//
//   SYMTENSOR v1 n=<n> m=<m>
//   <i_1> ... <i_m> <value>        one line per nonzero canonical entry
//
// Indices are 0-based and non-decreasing; values use shortest round-trip
// decimal. DENSETENSOR v1 has the same header shape and lists every one of
// the n^m index tuples.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "hpm/error.hpp"
#include "hpm/tensor.hpp"

namespace hpm::io {

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view tok, const std::string& where) {
  double v = 0.0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw DataError(where + ": invalid number '" + std::string(tok) + "'");
  }
  return v;
}

inline long parse_int(std::string_view tok, const std::string& where) {
  long v = 0;
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw DataError(where + ": invalid integer '" + std::string(tok) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

namespace detail {

struct Header {
  int n = 0;
  int m = 0;
};

inline Header parse_header(const std::string& line, std::string_view magic) {
  auto toks = split_ws(line);
  if (toks.size() != 4 || toks[0] != magic || toks[1] != "v1" || toks[2].substr(0, 2) != "n=" ||
      toks[3].substr(0, 2) != "m=") {
    throw DataError("line 1: expected header '" + std::string(magic) + " v1 n=<n> m=<m>'");
  }
  Header h;
  h.n = static_cast<int>(parse_int(toks[2].substr(2), "line 1"));
  h.m = static_cast<int>(parse_int(toks[3].substr(2), "line 1"));
  if (h.n < 1 || h.m < 1) throw DataError("line 1: n and m must be positive");
  return h;
}

}  // namespace detail

inline void write_symtensor(std::ostream& os, const SymmetricTensor& a) {
  os << "SYMTENSOR v1 n=" << a.dim() << " m=" << a.order() << '\n';
  const Layout& lay = a.layout();
  for (std::size_t pos : lay.lex_order()) {
    const double v = a.values()[pos];
    if (v == 0.0) continue;
    for (int i : lay.index(pos)) os << i << ' ';
    os << format_double(v) << '\n';
  }
}

inline std::string to_symtensor_string(const SymmetricTensor& a) {
  std::ostringstream os;
  write_symtensor(os, a);
  return os.str();
}

inline SymmetricTensor read_symtensor(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("line 1: empty tensor file");
  const auto h = detail::parse_header(line, "SYMTENSOR");
  SymmetricTensor a(h.n, h.m);
  const Layout& lay = a.layout();
  std::vector<bool> seen(a.size(), false);
  std::vector<int> idx(h.m);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<int>(toks.size()) != h.m + 1) {
      throw DataError(where + ": expected " + std::to_string(h.m) + " indices and a value");
    }
    for (int k = 0; k < h.m; ++k) {
      const long v = parse_int(toks[k], where);
      if (v < 0 || v >= h.n) throw DataError(where + ": index out of range [0, n)");
      idx[k] = static_cast<int>(v);
      if (k > 0 && idx[k] < idx[k - 1]) {
        throw DataError(where + ": indices must be non-decreasing");
      }
    }
    const std::size_t pos = lay.position(idx);
    if (seen[pos]) throw DataError(where + ": duplicate canonical index");
    seen[pos] = true;
    a.values()[pos] = parse_double(toks[h.m], where);
  }
  return a;
}

inline SymmetricTensor parse_symtensor(const std::string& text) {
  std::istringstream is(text);
  return read_symtensor(is);
}

inline void write_dense(std::ostream& os, const DenseTensor& d) {
  os << "DENSETENSOR v1 n=" << d.n << " m=" << d.m << '\n';
  for (std::size_t f = 0; f < d.data.size(); ++f) {
    for (int i : d.tuple(f)) os << i << ' ';
    os << format_double(d.data[f]) << '\n';
  }
}

inline DenseTensor read_dense(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DataError("line 1: empty dense tensor file");
  const auto h = detail::parse_header(line, "DENSETENSOR");
  DenseTensor d{h.n, h.m, std::vector<double>(dense_size(h.n, h.m), 0.0)};
  std::vector<bool> seen(d.data.size(), false);
  std::vector<int> idx(h.m);
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (static_cast<int>(toks.size()) != h.m + 1) {
      throw DataError(where + ": expected " + std::to_string(h.m) + " indices and a value");
    }
    for (int k = 0; k < h.m; ++k) {
      const long v = parse_int(toks[k], where);
      if (v < 0 || v >= h.n) throw DataError(where + ": index out of range [0, n)");
      idx[k] = static_cast<int>(v);
    }
    const std::size_t f = d.flat(idx);
    if (seen[f]) throw DataError(where + ": duplicate index tuple");
    seen[f] = true;
    d.data[f] = parse_double(toks[h.m], where);
  }
  for (std::size_t f = 0; f < seen.size(); ++f) {
    if (!seen[f]) throw DataError("dense tensor file is missing tuple #" + std::to_string(f));
  }
  return d;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

inline SymmetricTensor load_symtensor(const std::string& path) {
  auto in = open_input(path);
  try {
    return read_symtensor(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void save_symtensor(const std::string& path, const SymmetricTensor& a) {
  auto out = open_output(path);
  write_symtensor(out, a);
}

/// Parses a whitespace-separated list of +1/-1 labels.
inline std::vector<int> parse_labels(const std::string& text) {
  std::vector<int> labels;
  for (auto tok : split_ws(text)) {
    const long v = parse_int(tok, "labels");
    if (v != 1 && v != -1) throw DataError("labels: expected +1 or -1, got '" + std::string(tok) + "'");
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

inline std::vector<int> load_labels(const std::string& path) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  for (char& c : text) {
    if (c == '\n') c = ' ';
  }
  try {
    return parse_labels(text);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline std::string format_labels(const std::vector<int>& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(labels[i]);
  }
  return s;
}

}  // namespace hpm::io
