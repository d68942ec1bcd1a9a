#include "amg/diffusion/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amg/error.hpp"

namespace amg {

std::string to_string(ScheduleKind kind) { return kind == ScheduleKind::kLinear ? "linear" : "cosine"; }

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "linear") return ScheduleKind::kLinear;
  if (name == "cosine") return ScheduleKind::kCosine;
  throw ConfigError("unknown schedule kind '" + name + "' (expected linear or cosine)");
}

NoiseSchedule NoiseSchedule::make(ScheduleKind kind, std::size_t steps, double beta_min, double beta_max) {
  if (steps < 2) throw DomainError("noise schedule needs at least 2 steps");
  if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0)) {
    throw DomainError("noise schedule needs 0 < beta_min <= beta_max < 1");
  }
  NoiseSchedule s;
  s.kind_ = kind;
  s.beta_min_ = beta_min;
  s.beta_max_ = beta_max;
  s.betas_.resize(steps);

  if (kind == ScheduleKind::kLinear) {
    for (std::size_t i = 0; i < steps; ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(steps - 1);
      s.betas_[i] = beta_min + (beta_max - beta_min) * frac;
    }
  } else {
    // Squared-cosine profile with the usual small offset.
    constexpr double offset = 0.008;
    auto f = [&](double t) {
      const double c = std::cos((t / static_cast<double>(steps) + offset) / (1.0 + offset) * std::numbers::pi / 2.0);
      return c * c;
    };
    for (std::size_t i = 0; i < steps; ++i) {
      const double b = 1.0 - f(static_cast<double>(i + 1)) / f(static_cast<double>(i));
      s.betas_[i] = std::clamp(b, 1e-6, 0.999);
    }
  }

  s.alphas_bar_.resize(steps);
  double prod = 1.0;
  for (std::size_t i = 0; i < steps; ++i) {
    prod *= 1.0 - s.betas_[i];
    s.alphas_bar_[i] = prod;
  }
  return s;
}

double NoiseSchedule::alpha_bar(std::size_t t) const {
  if (t > steps()) throw DomainError("timestep " + std::to_string(t) + " beyond schedule length");
  return t == 0 ? 1.0 : alphas_bar_[t - 1];
}

}  // namespace amg
