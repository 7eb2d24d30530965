#include "aesimc/gf_aes_ref.hpp"

#include <stdexcept>

namespace aesimc {

namespace {

std::uint32_t load_word(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

void store_word(std::uint32_t w, std::uint8_t* p) {
  p[0] = static_cast<std::uint8_t>(w >> 24);
  p[1] = static_cast<std::uint8_t>(w >> 16);
  p[2] = static_cast<std::uint8_t>(w >> 8);
  p[3] = static_cast<std::uint8_t>(w);
}

}  // namespace

std::uint32_t rcon(std::size_t round) {
  if (round < 1 || round > KeySchedule::kRounds) {
    throw std::out_of_range("rcon: round must be in 1..10");
  }
  std::uint8_t c = 1;
  for (std::size_t i = 1; i < round; ++i) c = gf::xtime(c);
  return std::uint32_t{c} << 24;
}

std::uint32_t rot_word(std::uint32_t w) noexcept { return (w << 8) | (w >> 24); }

std::uint32_t sub_word(std::uint32_t w) noexcept {
  std::uint32_t out = 0;
  for (int shift = 24; shift >= 0; shift -= 8) {
    out |= std::uint32_t{gf::sbox_lut(static_cast<std::uint8_t>(w >> shift))} << shift;
  }
  return out;
}

Block KeySchedule::round_key(std::size_t round) const {
  if (round > kRounds) throw std::out_of_range("round_key: round must be in 0..10");
  Block out{};
  for (std::size_t c = 0; c < kNb; ++c) store_word(words[round * kNb + c], &out[c * 4]);
  return out;
}

Block next_round_key(const Block& previous, std::size_t round) {
  std::array<std::uint32_t, 4> w{};
  for (std::size_t c = 0; c < 4; ++c) w[c] = load_word(&previous[c * 4]);
  std::array<std::uint32_t, 4> next{};
  next[0] = w[0] ^ sub_word(rot_word(w[3])) ^ rcon(round);
  for (std::size_t c = 1; c < 4; ++c) next[c] = w[c] ^ next[c - 1];
  Block out{};
  for (std::size_t c = 0; c < 4; ++c) store_word(next[c], &out[c * 4]);
  return out;
}

KeySchedule expand_key(const Key128& key) {
  KeySchedule ks;
  for (std::size_t i = 0; i < KeySchedule::kNk; ++i) ks.words[i] = load_word(&key[i * 4]);
  for (std::size_t i = KeySchedule::kNk; i < KeySchedule::kWords; ++i) {
    std::uint32_t t = ks.words[i - 1];
    if (i % KeySchedule::kNk == 0) t = sub_word(rot_word(t)) ^ rcon(i / KeySchedule::kNk);
    ks.words[i] = ks.words[i - KeySchedule::kNk] ^ t;
  }
  return ks;
}

AesState sub_bytes(const AesState& s) {
  Block out = s.bytes();
  for (auto& b : out) b = gf::sbox_lut(b);
  return AesState(out);
}

AesState shift_rows(const AesState& s) {
  AesState out;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out.at(r, c) = s.at(r, (c + r) % 4);
  }
  return out;
}

AesState mix_columns(const AesState& s) {
  AesState out;
  for (std::size_t c = 0; c < 4; ++c) {
    const std::uint8_t s0 = s.at(0, c), s1 = s.at(1, c), s2 = s.at(2, c), s3 = s.at(3, c);
    out.at(0, c) = gf::xtime(s0) ^ gf::mul3(s1) ^ s2 ^ s3;
    out.at(1, c) = s0 ^ gf::xtime(s1) ^ gf::mul3(s2) ^ s3;
    out.at(2, c) = s0 ^ s1 ^ gf::xtime(s2) ^ gf::mul3(s3);
    out.at(3, c) = gf::mul3(s0) ^ s1 ^ s2 ^ gf::xtime(s3);
  }
  return out;
}

AesState add_round_key(const AesState& s, const Block& round_key) {
  Block out = s.bytes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= round_key[i];
  return AesState(out);
}

Block encrypt_block(const Block& plaintext, const Key128& key) {
  const KeySchedule ks = expand_key(key);
  AesState s = add_round_key(AesState(plaintext), ks.round_key(0));
  for (std::size_t round = 1; round <= KeySchedule::kRounds; ++round) {
    s = shift_rows(sub_bytes(s));
    if (round != KeySchedule::kRounds) s = mix_columns(s);
    s = add_round_key(s, ks.round_key(round));
  }
  return s.to_block();
}

}  // namespace aesimc
