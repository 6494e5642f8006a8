#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "markov/core.hpp"

// Sample file formats:
//  - text: one line, one character per symbol, '0'..'9' then 'a'..'z'
//    (up to |A| = 36)
//  - binary: |A| and n as little-endian 64-bit, then one byte per symbol
// Both readers validate the symbol range.

namespace markov {

inline int symbol_from_char(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  throw std::invalid_argument(std::string("sample text: invalid symbol character '") + c + "'");
}

inline char char_from_symbol(int s) {
  if (s < 0 || s >= 36) throw std::invalid_argument("sample text: symbol out of text range");
  return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + s - 10);
}

/// Parse a text-format sample from a symbol string, e.g. "0100".
inline Sample sample_from_string(const std::string& line, int alphabet_size = 0) {
  std::vector<int> data;
  data.reserve(line.size());
  int max_sym = 0;
  for (char c : line) {
    if (c == '\n' || c == '\r') break;
    const int s = symbol_from_char(c);
    max_sym = std::max(max_sym, s);
    data.push_back(s);
  }
  const int size = alphabet_size > 0 ? alphabet_size : std::max(2, max_sym + 1);
  return Sample(Alphabet(size), std::move(data));
}

inline std::string to_string(const Sample& sample) {
  std::string line;
  line.reserve(sample.data.size());
  for (int s : sample.data) line.push_back(char_from_symbol(s));
  return line;
}

inline Sample read_sample_text(const std::string& path, int alphabet_size = 0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  std::string line;
  std::getline(in, line);
  return sample_from_string(line, alphabet_size);
}

inline void write_sample_text(const Sample& sample, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open sample file for writing: " + path);
  out << to_string(sample) << "\n";
}

inline Sample read_sample_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open sample file: " + path);
  auto read_u64 = [&in, &path]() {
    std::uint64_t v = 0;
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
      throw std::runtime_error("truncated binary sample: " + path);
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  };
  const std::uint64_t a = read_u64();
  const std::uint64_t n = read_u64();
  if (a < 2 || a > 256) throw std::runtime_error("binary sample: invalid alphabet size");
  std::vector<int> data(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    char c;
    if (!in.get(c)) throw std::runtime_error("truncated binary sample: " + path);
    data[i] = static_cast<unsigned char>(c);
  }
  return Sample(Alphabet(static_cast<int>(a)), std::move(data));
}

inline void write_sample_binary(const Sample& sample, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open sample file for writing: " + path);
  auto write_u64 = [&out](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  write_u64(static_cast<std::uint64_t>(sample.alphabet.size));
  write_u64(static_cast<std::uint64_t>(sample.size()));
  for (int s : sample.data) out.put(static_cast<char>(s));
}

/// Read a sample in either format; binary is recognized by its header.
inline Sample read_sample(const std::string& path, int alphabet_size = 0) {
  std::ifstream probe(path, std::ios::binary | std::ios::ate);
  if (!probe) throw std::runtime_error("cannot open sample file: " + path);
  const std::int64_t file_size = static_cast<std::int64_t>(probe.tellg());
  if (file_size >= 16) {
    probe.seekg(0);
    unsigned char b[16];
    probe.read(reinterpret_cast<char*>(b), 16);
    std::uint64_t a = 0, n = 0;
    for (int i = 0; i < 8; ++i) a |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(b[8 + i]) << (8 * i);
    if (a >= 2 && a <= 256 && n >= 1 && file_size == 16 + static_cast<std::int64_t>(n))
      return read_sample_binary(path);
  }
  return read_sample_text(path, alphabet_size);
}

}  // namespace markov
