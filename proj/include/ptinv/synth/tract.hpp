#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ptinv/synth/params.hpp"

namespace ptinv {

inline constexpr std::size_t kDefaultSections = 44;

/// Landmark section indices, scaled from the 44-section reference layout.
struct TractLayout {
  std::size_t n_sections = kDefaultSections;
  std::size_t blade_start = 10;
  std::size_t tip_start = 32;
  std::size_t lip_start = 39;

  static TractLayout for_sections(std::size_t n);
};

/// Raw shaping controls. Unlike PTParams these only need to be finite and
/// non-negative, which allows full closures (diameter 0) to be expressed.
struct TractControls {
  double tongue_index = 20.0;
  double tongue_diameter = 2.8;
  double constriction_index = 43.0;
  double constriction_diameter = 3.5;

  static TractControls from(const PTParams& p);
};

/// Neutral tube: narrow glottal region, pharynx, then the 1.5 cm oral tube.
[[nodiscard]] std::vector<double> default_rest_diameters(std::size_t n_sections = kDefaultSections);

/// Tongue body as a cosine bump over the palatal region, then a cosine-tapered
/// constriction that can only narrow the tract. Areas follow area = diameter^2.
[[nodiscard]] std::vector<double> tract_shape(const TractControls& controls,
                                              std::span<const double> rest);
[[nodiscard]] std::vector<double> tract_shape(const PTParams& params, std::span<const double> rest);

/// Kelly-Lochbaum junction coefficients k_i = (A_i - A_{i+1}) / (A_i + A_{i+1}),
/// with k_i = 0 where both areas vanish. Throws on negative areas or fewer
/// than two sections.
[[nodiscard]] std::vector<double> reflection_coefficients(std::span<const double> areas);

/// Reflection-line vocal tract. Diameters are linearly interpolated between
/// the previous and the current control target across each control block.
class Tract {
 public:
  struct Options {
    double glottal_reflection = 0.75;
    double lip_reflection = -0.85;
    double fade = 0.999;            // per-step propagation loss
    bool zero_reflections = false;  // uniform-tube bypass: k_i forced to 0
  };

  explicit Tract(std::span<const double> initial_diameters);
  Tract(std::span<const double> initial_diameters, Options options);

  /// Starts a new control block heading towards `diameters`.
  void set_target(std::span<const double> diameters);

  /// One scattering step; `block_fraction` in [0,1] positions the step within
  /// the current control block. Returns the lip output (right-going wave at
  /// the last section).
  double step(double glottal_input, double block_fraction);

  [[nodiscard]] std::size_t n_sections() const { return right_.size(); }
  [[nodiscard]] std::span<const double> current_diameters() const { return diameter_; }
  [[nodiscard]] std::span<const double> areas() const { return area_; }
  [[nodiscard]] std::span<const double> forward_wave() const { return right_; }
  [[nodiscard]] std::span<const double> backward_wave() const { return left_; }

 private:
  Options opt_;
  std::vector<double> from_, to_;
  std::vector<double> diameter_, area_, reflection_;
  std::vector<double> right_, left_;
  std::vector<double> junction_right_, junction_left_;
};

}  // namespace ptinv
