#include "ptinv/util/binary_io.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace ptinv::io {

namespace {

template <typename U>
void put_le(std::ostream& out, U v) {
  char buf[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf, sizeof(U));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void write_u16(std::ostream& out, std::uint16_t v) { put_le(out, v); }
void write_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
void write_f32(std::ostream& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }
void write_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

void write_f32_array(std::ostream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size_bytes()));
  } else {
    for (float v : values) write_f32(out, v);
  }
}

void write_bytes(std::ostream& out, std::string_view bytes) {
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void Reader::read_raw(void* dst, std::size_t n) {
  in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) fail("unexpected end of file");
}

void Reader::fail(const std::string& why) const { throw std::runtime_error(what_ + ": " + why); }

std::uint8_t Reader::u8() {
  unsigned char b = 0;
  read_raw(&b, 1);
  return b;
}

std::uint16_t Reader::u16() {
  unsigned char b[2];
  read_raw(b, 2);
  return get_le<std::uint16_t>(b);
}

std::uint32_t Reader::u32() {
  unsigned char b[4];
  read_raw(b, 4);
  return get_le<std::uint32_t>(b);
}

std::int32_t Reader::i32() { return static_cast<std::int32_t>(u32()); }

float Reader::f32() { return std::bit_cast<float>(u32()); }

double Reader::f64() {
  unsigned char b[8];
  read_raw(b, 8);
  return std::bit_cast<double>(get_le<std::uint64_t>(b));
}

void Reader::f32_array(std::span<float> out) {
  if constexpr (std::endian::native == std::endian::little) {
    read_raw(out.data(), out.size_bytes());
  } else {
    for (auto& v : out) v = f32();
  }
}

std::string Reader::bytes(std::size_t n) {
  std::string s(n, '\0');
  read_raw(s.data(), n);
  return s;
}

void Reader::skip(std::size_t n) {
  std::vector<char> tmp(n);
  read_raw(tmp.data(), n);
}

bool Reader::at_end() { return in_.peek() == std::char_traits<char>::eof(); }

void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("failed writing " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace ptinv::io
