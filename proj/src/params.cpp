#include "bisampler/params.hpp"

#include <cmath>
#include <stdexcept>

namespace bisampler {

ParamSet falcon512()
{
  return { "falcon512", kSigmaMin512, kSigmaMax };
}

ParamSet falcon1024()
{
  return { "falcon1024", kSigmaMin1024, kSigmaMax };
}

ParamSet make_param_set(std::string_view name, std::optional<double> sigma_min, std::optional<double> sigma_max)
{
  ParamSet p;
  if (name == "falcon512")
    p = falcon512();
  else if (name == "falcon1024")
    p = falcon1024();
  else if (name == "custom") {
    if (!sigma_min || !sigma_max)
      throw std::invalid_argument("params custom requires both --sigma-min and --sigma-max");
    p.name = "custom";
  } else
    throw std::invalid_argument("unknown parameter set: " + std::string(name));

  if (sigma_min)
    p.sigma_min = *sigma_min;
  if (sigma_max)
    p.sigma_max = *sigma_max;
  if (!std::isfinite(p.sigma_min) || !std::isfinite(p.sigma_max) || p.sigma_min <= 0.0)
    throw std::invalid_argument("sigma bounds must be positive and finite");
  if (p.sigma_min >= p.sigma_max)
    throw std::invalid_argument("sigma_min must be below sigma_max");
  return p;
}

} // namespace bisampler
