#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace ptinv {

/// The six articulatory controls of the synthesizer, in storage order.
enum class Param : std::size_t {
  frequency = 0,
  tenseness,
  tongue_index,
  tongue_diameter,
  constriction_index,
  constriction_diameter,
};

inline constexpr std::size_t kNumParams = 6;

struct ParamRange {
  double lo;
  double hi;

  [[nodiscard]] constexpr double span() const { return hi - lo; }
  [[nodiscard]] constexpr bool contains(double v) const { return v >= lo && v <= hi; }
};

// Physical ranges. frequency in Hz, diameters in cm, indices in tract sections.
inline constexpr std::array<ParamRange, kNumParams> kParamRanges{{
    {80.0, 400.0},
    {0.0, 1.0},
    {12.0, 29.0},
    {2.05, 3.5},
    {2.0, 43.0},
    {0.3, 3.5},
}};

inline constexpr std::array<std::string_view, kNumParams> kParamNames{
    "frequency",          "tenseness",         "tongue_index",
    "tongue_diameter",    "constriction_index", "constriction_diameter",
};

[[nodiscard]] constexpr std::size_t index_of(Param p) { return static_cast<std::size_t>(p); }
[[nodiscard]] constexpr std::string_view name_of(Param p) { return kParamNames[index_of(p)]; }
[[nodiscard]] std::optional<Param> param_from_name(std::string_view name);

/// Parameter vector with every field mapped affinely onto [0,1].
using NormalizedParams = std::array<double, kNumParams>;

/// Physical articulatory configuration. Construction validates every field;
/// an instance is always finite and in range.
class PTParams {
 public:
  /// Neutral open vowel with a mid tongue.
  PTParams();
  PTParams(double frequency, double tenseness, double tongue_index, double tongue_diameter,
           double constriction_index, double constriction_diameter);

  /// Throws std::invalid_argument naming the offending field.
  static PTParams from_array(const std::array<double, kNumParams>& values);
  /// Values outside [0,1] are rejected; the result is clamped to the physical range
  /// so that u = 1 lands exactly on the upper bound.
  static PTParams from_normalized(const NormalizedParams& u);

  [[nodiscard]] double frequency() const { return v_[0]; }
  [[nodiscard]] double tenseness() const { return v_[1]; }
  [[nodiscard]] double tongue_index() const { return v_[2]; }
  [[nodiscard]] double tongue_diameter() const { return v_[3]; }
  [[nodiscard]] double constriction_index() const { return v_[4]; }
  [[nodiscard]] double constriction_diameter() const { return v_[5]; }

  [[nodiscard]] double operator[](Param p) const { return v_[index_of(p)]; }
  [[nodiscard]] const std::array<double, kNumParams>& values() const { return v_; }
  [[nodiscard]] NormalizedParams normalized() const;

  /// Componentwise (1 - w) * a + w * b, w in [0,1].
  static PTParams lerp(const PTParams& a, const PTParams& b, double w);

  friend bool operator==(const PTParams&, const PTParams&) = default;

 private:
  explicit PTParams(const std::array<double, kNumParams>& v, bool /*checked*/);
  std::array<double, kNumParams> v_;
};

[[nodiscard]] double normalize_value(Param p, double physical);
[[nodiscard]] double denormalize_value(Param p, double unit);

}  // namespace ptinv
