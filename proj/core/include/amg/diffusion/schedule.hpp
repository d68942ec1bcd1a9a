#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace amg {

enum class ScheduleKind { kLinear, kCosine };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

/// Diffusion clock with T noisy levels. Level t in [1, T] has cumulative
/// signal fraction alpha_bar(t) = prod_{s<t} (1 - beta_s); level 0 is clean
/// data with alpha_bar(0) = 1.
class NoiseSchedule {
 public:
  static NoiseSchedule make(ScheduleKind kind, std::size_t steps, double beta_min, double beta_max);

  ScheduleKind kind() const { return kind_; }
  std::size_t steps() const { return betas_.size(); }
  double beta_min() const { return beta_min_; }
  double beta_max() const { return beta_max_; }

  /// Per-step betas; betas()[s] moves level s to level s + 1.
  const std::vector<double>& betas() const { return betas_; }
  /// alphas_bar()[s] = prod_{r<=s} (1 - beta_r), i.e. alpha_bar(s + 1).
  const std::vector<double>& alphas_bar() const { return alphas_bar_; }

  double alpha_bar(std::size_t t) const;

 private:
  ScheduleKind kind_ = ScheduleKind::kCosine;
  double beta_min_ = 0.0;
  double beta_max_ = 0.0;
  std::vector<double> betas_;
  std::vector<double> alphas_bar_;
};

}  // namespace amg
