#pragma once
#include <optional>
#include <string>
#include <string_view>

namespace bisampler {

struct ParamSet
{
  std::string name;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

inline constexpr double kSigmaMax = 1.8205;
inline constexpr double kSigmaMin512 = 1.1165085072329104;
inline constexpr double kSigmaMin1024 = 1.2778336969128337;

ParamSet falcon512();
ParamSet falcon1024();

// Resolves "falcon512", "falcon1024" or "custom" with optional overrides.
// Throws std::invalid_argument for unknown names, a custom set without both
// overrides, or sigma_min >= sigma_max.
ParamSet make_param_set(std::string_view name,
                        std::optional<double> sigma_min = std::nullopt,
                        std::optional<double> sigma_max = std::nullopt);

} // namespace bisampler
