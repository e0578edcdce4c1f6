// Little-endian byte codec used by the .skyf and .rt file formats.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

namespace sky {

inline void put_u16(std::span<std::byte> buf, std::size_t off, std::uint16_t v) {
  buf[off] = std::byte(v & 0xff);
  buf[off + 1] = std::byte((v >> 8) & 0xff);
}

inline void put_u32(std::span<std::byte> buf, std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf[off + i] = std::byte((v >> (8 * i)) & 0xff);
}

inline void put_u64(std::span<std::byte> buf, std::size_t off, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf[off + i] = std::byte((v >> (8 * i)) & 0xff);
}

inline void put_f64(std::span<std::byte> buf, std::size_t off, double v) {
  put_u64(buf, off, std::bit_cast<std::uint64_t>(v));
}

inline std::uint16_t get_u16(std::span<const std::byte> buf, std::size_t off) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(buf[off]) |
                                    (std::to_integer<unsigned>(buf[off + 1]) << 8));
}

inline std::uint32_t get_u32(std::span<const std::byte> buf, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint32_t>(buf[off + i]);
  return v;
}

inline std::uint64_t get_u64(std::span<const std::byte> buf, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | std::to_integer<std::uint64_t>(buf[off + i]);
  return v;
}

inline double get_f64(std::span<const std::byte> buf, std::size_t off) {
  return std::bit_cast<double>(get_u64(buf, off));
}

}  // namespace sky
