#include "amg/diffusion/process.hpp"

#include <cmath>

#include "amg/error.hpp"

namespace amg {
namespace {

void require_level(std::size_t t, const NoiseSchedule& sched) {
  if (t > sched.steps()) {
    throw DomainError("timestep " + std::to_string(t) + " outside [0, " + std::to_string(sched.steps()) + "]");
  }
}

double checked_alpha_bar(std::size_t t, const NoiseSchedule& sched) {
  require_level(t, sched);
  const double abar = sched.alpha_bar(t);
  if (!(abar > 0.0)) throw NumericError("singular diffusion kernel: alpha_bar is zero at t=" + std::to_string(t));
  return abar;
}

}  // namespace

Tensor forward_sample(const Tensor& z0, std::size_t t, const Tensor& eps, const NoiseSchedule& sched) {
  require_same_shape(z0, eps, "forward_sample");
  require_level(t, sched);
  const double abar = sched.alpha_bar(t);
  const double a = std::sqrt(abar);
  const double b = std::sqrt(1.0 - abar);
  Tensor out(z0.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * z0[i] + b * eps[i];
  return out;
}

Tensor predict_z0(const Tensor& z_t, const Tensor& eps_hat, std::size_t t, const NoiseSchedule& sched) {
  require_same_shape(z_t, eps_hat, "predict_z0");
  const double abar = checked_alpha_bar(t, sched);
  const double noise = std::sqrt(1.0 - abar);
  const double signal = std::sqrt(abar);
  Tensor out(z_t.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (z_t[i] - noise * eps_hat[i]) / signal;
  return out;
}

Var predict_z0(const Var& z_t, const Var& eps_hat, std::size_t t, const NoiseSchedule& sched) {
  require_same_shape(z_t.value(), eps_hat.value(), "predict_z0");
  const double abar = checked_alpha_bar(t, sched);
  return div(sub(z_t, scale(eps_hat, std::sqrt(1.0 - abar))), std::sqrt(abar));
}

LatentState ddim_step(const Tensor& z_t, const Tensor& eps_hat, std::size_t t, const NoiseSchedule& sched) {
  if (t == 0) throw DomainError("ddim_step: already at the clean level t=0");
  const Tensor z0 = predict_z0(z_t, eps_hat, t, sched);
  const double prev = sched.alpha_bar(t - 1);
  const double a = std::sqrt(prev);
  const double b = std::sqrt(1.0 - prev);
  LatentState out{Tensor(z_t.shape()), t - 1};
  for (std::size_t i = 0; i < z0.size(); ++i) out.z[i] = a * z0[i] + b * eps_hat[i];
  return out;
}

TrainingLoss training_loss(const NoisePredictor& predictor, std::span<const TrainingExample> batch,
                           const NoiseSchedule& sched, RngStream& rng, double p_uncond) {
  if (batch.empty()) throw DomainError("training_loss: empty batch");
  const auto dim = predictor.latent_dim();
  const auto rows = batch.size();

  std::vector<std::size_t> steps(rows);
  std::vector<CaptionId> captions(rows);
  Tensor noisy(Shape{rows, dim});
  Tensor target(Shape{rows, dim});
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& ex = batch[r];
    if (ex.z0.size() != dim) throw ShapeError("training_loss: latent dimension mismatch");
    steps[r] = 1 + static_cast<std::size_t>(rng.uniform_index(sched.steps()));
    const Tensor eps = gaussian_sample(Shape{dim}, rng);
    const bool drop = rng.uniform() < p_uncond;
    captions[r] = drop ? kNullCaption : ex.caption;
    const Tensor zt = forward_sample(ex.z0, steps[r], eps, sched);
    for (std::size_t c = 0; c < dim; ++c) {
      noisy.at(r, c) = zt[c];
      target.at(r, c) = eps[c];
    }
  }

  Tape tape;
  const auto params = predictor.bind_parameters(tape);
  const Var z = tape.constant(std::move(noisy));
  const Var eps = tape.constant(std::move(target));
  const Var pred = predictor.predict(tape, params, z, steps, captions);
  const Var diff = sub(eps, pred);
  const Var loss = div(sum(mul(diff, diff)), static_cast<double>(rows));

  TrainingLoss out;
  out.value = loss.value().item();
  const auto grads = tape.backward(loss);
  out.gradients.reserve(params.size());
  for (const auto& p : params) out.gradients.push_back(grads.of(p));
  return out;
}

}  // namespace amg
