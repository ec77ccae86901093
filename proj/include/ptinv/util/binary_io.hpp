#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace ptinv::io {

// Little-endian primitives, independent of host byte order.

void write_u16(std::ostream& out, std::uint16_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
void write_f32_array(std::ostream& out, std::span<const float> values);
void write_bytes(std::ostream& out, std::string_view bytes);

/// Readers throw std::runtime_error mentioning `what` on short reads.
class Reader {
 public:
  Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::int32_t i32();
  float f32();
  double f64();
  void f32_array(std::span<float> out);
  std::string bytes(std::size_t n);
  void skip(std::size_t n);
  [[nodiscard]] bool at_end();

  [[noreturn]] void fail(const std::string& why) const;
  [[nodiscard]] const std::string& what() const { return what_; }

 private:
  void read_raw(void* dst, std::size_t n);
  std::istream& in_;
  std::string what_;
};

/// Streams into `path`.tmp and renames over `path` once the writer returns,
/// so readers never observe a partially written file.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& writer);

}  // namespace ptinv::io
