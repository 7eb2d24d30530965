#pragma once

// Golden AES-128 encryption and GF(2^8) arithmetic (modulus x^8+x^4+x^3+x+1).
// Everything here is a pure function over value types.

#include <array>
#include <cstddef>
#include <cstdint>

namespace aesimc {

using Block = std::array<std::uint8_t, 16>;
using Key128 = std::array<std::uint8_t, 16>;

namespace gf {

inline constexpr std::uint16_t kModulus = 0x11B;

constexpr std::uint8_t xtime(std::uint8_t a) noexcept {
  std::uint16_t v = static_cast<std::uint16_t>(a) << 1;
  if (v & 0x100) v ^= kModulus;
  return static_cast<std::uint8_t>(v);
}

constexpr std::uint8_t mul3(std::uint8_t a) noexcept {
  return static_cast<std::uint8_t>(xtime(a) ^ a);
}

/// Shift-and-add product, reduced with xtime at every step.
constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept {
  std::uint8_t acc = 0;
  while (b != 0) {
    if (b & 1) acc ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return acc;
}

/// a^254, which is the multiplicative inverse for a != 0 and 0 for a == 0.
constexpr std::uint8_t inverse(std::uint8_t a) noexcept {
  std::uint8_t result = 1;
  std::uint8_t base = a;
  unsigned exp = 254;
  while (exp != 0) {
    if (exp & 1) result = mul(result, base);
    base = mul(base, base);
    exp >>= 1;
  }
  return a == 0 ? 0 : result;
}

constexpr std::uint8_t rotl8(std::uint8_t v, unsigned n) noexcept {
  return static_cast<std::uint8_t>((v << n) | (v >> (8 - n)));
}

/// Inverse followed by the affine map b ^ rotl(b,1..4) ^ 0x63.
constexpr std::uint8_t sbox_computed(std::uint8_t a) noexcept {
  const std::uint8_t b = inverse(a);
  return static_cast<std::uint8_t>(b ^ rotl8(b, 1) ^ rotl8(b, 2) ^ rotl8(b, 3) ^
                                   rotl8(b, 4) ^ 0x63);
}

namespace detail {
constexpr std::array<std::uint8_t, 256> build_sbox() {
  std::array<std::uint8_t, 256> t{};
  for (unsigned i = 0; i < 256; ++i) t[i] = sbox_computed(static_cast<std::uint8_t>(i));
  return t;
}
constexpr std::array<std::uint8_t, 256> build_m2() {
  std::array<std::uint8_t, 256> t{};
  for (unsigned i = 0; i < 256; ++i) t[i] = xtime(static_cast<std::uint8_t>(i));
  return t;
}
}  // namespace detail

inline constexpr std::array<std::uint8_t, 256> kSboxTable = detail::build_sbox();
/// Multiply-by-2 lookup table (the "M-2" LUT).
inline constexpr std::array<std::uint8_t, 256> kM2Table = detail::build_m2();

constexpr std::uint8_t sbox_lut(std::uint8_t a) noexcept { return kSboxTable[a]; }
constexpr std::uint8_t m2_lut(std::uint8_t a) noexcept { return kM2Table[a]; }

}  // namespace gf

/// 4x4 AES state, S(row, col). Bytes are loaded column-major from the block,
/// so block byte k sits at row k % 4, column k / 4.
class AesState {
 public:
  constexpr AesState() = default;
  constexpr explicit AesState(const Block& block) : bytes_(block) {}

  constexpr std::uint8_t& at(std::size_t row, std::size_t col) { return bytes_[col * 4 + row]; }
  constexpr std::uint8_t at(std::size_t row, std::size_t col) const { return bytes_[col * 4 + row]; }

  constexpr const Block& bytes() const noexcept { return bytes_; }
  constexpr Block to_block() const noexcept { return bytes_; }

  friend constexpr bool operator==(const AesState&, const AesState&) = default;

 private:
  Block bytes_{};
};

/// Expanded AES-128 key: words W0..W43 (W0 is the most significant key word).
struct KeySchedule {
  static constexpr std::size_t kNk = 4;
  static constexpr std::size_t kNb = 4;
  static constexpr std::size_t kRounds = 10;
  static constexpr std::size_t kWords = kNb * (kRounds + 1);

  std::array<std::uint32_t, kWords> words{};

  /// Round key r (0..10) as 16 bytes in block order.
  Block round_key(std::size_t round) const;
};

/// rcon word for round r (1..10): first byte x^(r-1), remaining bytes zero.
std::uint32_t rcon(std::size_t round);

std::uint32_t rot_word(std::uint32_t w) noexcept;
std::uint32_t sub_word(std::uint32_t w) noexcept;

/// One step of the key schedule: round key r from round key r-1.
Block next_round_key(const Block& previous, std::size_t round);

AesState sub_bytes(const AesState& s);
AesState shift_rows(const AesState& s);
AesState mix_columns(const AesState& s);
AesState add_round_key(const AesState& s, const Block& round_key);

KeySchedule expand_key(const Key128& key);
Block encrypt_block(const Block& plaintext, const Key128& key);

}  // namespace aesimc
