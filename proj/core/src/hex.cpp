#include "aesimc/hex.hpp"

#include <cctype>

#include "aesimc/errors.hpp"

namespace aesimc::hex {

namespace {

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string encode(const Block& block) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(32);
  for (std::uint8_t b : block) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

Block decode_block(std::string_view text, std::size_t line) {
  const std::string where = line ? "line " + std::to_string(line) + ": " : std::string{};
  if (text.size() % 2 != 0) {
    throw FormatError(where + "odd number of hex digits (" + std::to_string(text.size()) + ")", line);
  }
  if (text.size() != 32) {
    throw FormatError(where + "expected 32 hex digits, got " + std::to_string(text.size()), line);
  }
  Block out{};
  for (std::size_t i = 0; i < 16; ++i) {
    const int hi = digit_value(text[2 * i]);
    const int lo = digit_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) throw FormatError(where + "invalid hex digit", line);
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

std::vector<Block> read_blocks(std::istream& in) {
  std::vector<Block> blocks;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    blocks.push_back(decode_block(text, line));
  }
  return blocks;
}

Key128 read_key(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    return decode_block(text, line);
  }
  throw FormatError("key file holds no key line", line);
}

}  // namespace aesimc::hex
