#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "aesimc/gf_aes_ref.hpp"

namespace aesimc::hex {

/// Lowercase hex, no prefix.
std::string encode(const Block& block);

/// Parses exactly 32 hex digits (either case). Throws FormatError tagged with
/// `line` on any other input.
Block decode_block(std::string_view text, std::size_t line = 0);

/// One block per line; blank lines are skipped. Line numbers are 1-based.
std::vector<Block> read_blocks(std::istream& in);

/// Reads the single key line of a key file.
Key128 read_key(std::istream& in);

}  // namespace aesimc::hex
