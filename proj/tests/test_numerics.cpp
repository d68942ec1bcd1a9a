#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "amg/error.hpp"
#include "amg/numerics/linalg.hpp"
#include "amg/numerics/rng.hpp"
#include "amg/numerics/tape.hpp"
#include "support.hpp"

namespace amg {
namespace {

using testing::max_abs_diff;
using testing::numeric_gradient;
using testing::random_tensor;
using testing::relative_error;

TEST(Rng, SameSeedSameDraws) {
  RngStream a(42), b(42);
  EXPECT_EQ(gaussian_sample(Shape{4}, a), gaussian_sample(Shape{4}, b));
}

TEST(Rng, DifferentSeedsDiffer) {
  RngStream a(1), b(2);
  EXPECT_FALSE(gaussian_sample(Shape{4}, a) == gaussian_sample(Shape{4}, b));
}

TEST(Rng, GaussianMomentsWithinMonteCarloBounds) {
  RngStream rng(7);
  const Tensor x = gaussian_sample(Shape{100000}, rng);
  double mean = 0.0;
  for (double v : x.data()) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x.data()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(var, 1.0, 0.05);
}

TEST(Rng, EmptyShapeIsAnError) {
  RngStream rng(1);
  EXPECT_THROW(gaussian_sample(Shape{0}, rng), DomainError);
  EXPECT_THROW(gaussian_sample(Shape{}, rng), DomainError);
}

TEST(Rng, UniformStaysInUnitInterval) {
  RngStream rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
  EXPECT_THROW(rng.uniform_index(0), DomainError);
}

TEST(Rng, DeriveSeparatesStreams) {
  EXPECT_NE(RngStream::derive(5, 0), RngStream::derive(5, 1));
  EXPECT_EQ(RngStream::derive(5, 1), RngStream::derive(5, 1));
}

TEST(Tape, AddValues) {
  Tape tape;
  const Var a = tape.constant(Tensor::vector({1, 2}));
  const Var b = tape.constant(Tensor::vector({3, 4}));
  EXPECT_EQ((a + b).value(), Tensor::vector({4, 6}));
}

TEST(Tape, MatmulIdentity) {
  Tape tape;
  const Tensor v = Tensor::vector({1.5, -2, 7});
  const Var out = matmul(tape.constant(Tensor::identity(3)), tape.constant(v));
  EXPECT_EQ(out.value(), v);
}

TEST(Tape, NormOfThreeFour) {
  Tape tape;
  EXPECT_DOUBLE_EQ(norm(tape.constant(Tensor::vector({3, 4}))).value().item(), 5.0);
}

TEST(Tape, SquareGradient) {
  Tape tape;
  const Var x = tape.leaf(Tensor::scalar(3.0));
  const auto g = tape.backward(x * x);
  EXPECT_DOUBLE_EQ(g.of(x).item(), 6.0);
}

TEST(Tape, CosineSelfSimilarityIsStationary) {
  Tape tape;
  const Var x = tape.leaf(Tensor::vector({0.3, -1.2, 2.0, 0.7}));
  const auto g = tape.backward(cosine_similarity(x, x));
  for (double v : g.of(x).data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Tape, ShapeMismatchThrows) {
  Tape tape;
  const Var a = tape.constant(Tensor::vector({1, 2}));
  const Var b = tape.constant(Tensor::vector({1, 2, 3}));
  EXPECT_THROW(a + b, ShapeError);
  EXPECT_THROW(matmul(tape.constant(Tensor(Shape{2, 3})), tape.constant(Tensor(Shape{2, 3}))), ShapeError);
}

TEST(Tape, ZeroDivisorThrows) {
  Tape tape;
  const Var a = tape.constant(Tensor::vector({1, 2}));
  EXPECT_THROW(div(a, 0.0), NumericError);
}

TEST(Tape, StaleHandleRejected) {
  Tape tape;
  const Var x = tape.leaf(Tensor::scalar(2.0));
  tape.backward(x * x);
  EXPECT_THROW(x * x, Error);
}

// Every primitive feeds the scalar output.
double composite(Tape& tape, const Var& x) {
  const Var m = reshape(x, Shape{2, 4});
  const Var w = tape.constant(random_tensor(Shape{4, 3}, 11, 0.5));
  const Var bias = tape.constant(Tensor::vector({0.1, -0.2, 0.3}));
  const Var h = tanh(add_row(matmul(m, w), bias));  // [2,3]
  const std::size_t rows[] = {1, 0, 1};
  const Var g = gather_rows(h, rows);  // [3,3]
  const Var parts[] = {g, scale(g, 0.5)};
  const Var c = concat_cols(parts);  // [3,6]
  const Var cm = mean_rows(c);       // [6]
  const Var fr = frame(x, 4, 2);     // [3,4]
  const Var pos = add_scalar(mul(x, x), 1.0);
  const Var a = sqrt(pos);
  const Var b = log1p(pos);
  const Var u = normalize(sub(a, b));
  const Var s1 = dot(u, x);
  const Var s2 = div(sum(fr), add_scalar(norm(cm), 1.0));
  const Var s3 = cosine_similarity(a, add_scalar(x, 2.0));
  const Var s4 = mean(mul(cm, cm));
  return (s1 + s2 + s3 + s4).value().item();
}

TEST(Tape, CompositeMatchesFiniteDifferences) {
  const Tensor x0 = random_tensor(Shape{8}, 5);
  Tape tape;
  const Var x = tape.leaf(x0);
  const Var m = reshape(x, Shape{2, 4});
  const Var w = tape.constant(random_tensor(Shape{4, 3}, 11, 0.5));
  const Var bias = tape.constant(Tensor::vector({0.1, -0.2, 0.3}));
  const Var h = tanh(add_row(matmul(m, w), bias));
  const std::size_t rows[] = {1, 0, 1};
  const Var g = gather_rows(h, rows);
  const Var parts[] = {g, scale(g, 0.5)};
  const Var cm = mean_rows(concat_cols(parts));
  const Var fr = frame(x, 4, 2);
  const Var pos = add_scalar(mul(x, x), 1.0);
  const Var a = sqrt(pos);
  const Var b = log1p(pos);
  const Var u = normalize(sub(a, b));
  const Var root = dot(u, x) + div(sum(fr), add_scalar(norm(cm), 1.0)) +
                   cosine_similarity(a, add_scalar(x, 2.0)) + mean(mul(cm, cm));
  const Tensor analytic = tape.backward(root).of(x);

  const Tensor fd = numeric_gradient(
      [](const Tensor& p) {
        Tape t;
        return composite(t, t.leaf(p));
      },
      x0, 1e-5);
  EXPECT_LT(relative_error(analytic, fd), 1e-6);
}

TEST(Tape, MatmulGradientsAllForms) {
  const Tensor a0 = random_tensor(Shape{3, 4}, 1);
  const Tensor b0 = random_tensor(Shape{4, 2}, 2);
  const Tensor v0 = random_tensor(Shape{4}, 3);
  auto f = [&](const Tensor& a, const Tensor& b, const Tensor& v) {
    Tape t;
    const Var y = sum(matmul(t.leaf(a), t.leaf(b))) + sum(matmul(t.leaf(v), t.leaf(b))) +
                  sum(matmul(t.leaf(a), t.leaf(v)));
    return y.value().item();
  };
  Tape tape;
  const Var a = tape.leaf(a0), b = tape.leaf(b0), v = tape.leaf(v0);
  const auto g = tape.backward(sum(matmul(a, b)) + sum(matmul(v, b)) + sum(matmul(a, v)));
  EXPECT_LT(relative_error(g.of(a), numeric_gradient([&](const Tensor& p) { return f(p, b0, v0); }, a0, 1e-6)),
            1e-7);
  EXPECT_LT(relative_error(g.of(b), numeric_gradient([&](const Tensor& p) { return f(a0, p, v0); }, b0, 1e-6)),
            1e-7);
  EXPECT_LT(relative_error(g.of(v), numeric_gradient([&](const Tensor& p) { return f(a0, b0, p); }, v0, 1e-6)),
            1e-7);
}

TEST(Tape, ConstantsReceiveNoGradient) {
  Tape tape;
  const Var x = tape.leaf(Tensor::vector({1, 2}));
  const Var c = tape.constant(Tensor::vector({3, 4}));
  const auto g = tape.backward(dot(x, c));
  EXPECT_TRUE(g.contains(x));
  EXPECT_FALSE(g.contains(c));
  EXPECT_EQ(g.of(x), Tensor::vector({3, 4}));
}

TEST(Linalg, SqrtOfIdentity) {
  EXPECT_LT(max_abs_diff(matrix_sqrt_psd(Tensor::identity(4)), Tensor::identity(4)), 1e-14);
}

TEST(Linalg, SqrtOfDiagonal) {
  const Tensor s = matrix_sqrt_psd(Tensor::matrix(2, 2, {4, 0, 0, 9}));
  EXPECT_NEAR(s.at(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(s.at(1, 1), 3.0, 1e-14);
  EXPECT_NEAR(s.at(0, 1), 0.0, 1e-14);
}

TEST(Linalg, SqrtSquaresBack) {
  const Tensor a = random_tensor(Shape{6, 6}, 9);
  const Tensor m = matmul(transpose(a), a);
  const Tensor s = matrix_sqrt_psd(m);
  EXPECT_LT(frobenius_distance(matmul(s, s), m), 1e-8);
  EXPECT_LT(frobenius_distance(s, transpose(s)), 1e-12);
}

TEST(Linalg, SqrtRejectsIndefiniteAndAsymmetric) {
  EXPECT_THROW(matrix_sqrt_psd(Tensor::matrix(2, 2, {1, 0, 0, -1})), DomainError);
  EXPECT_THROW(matrix_sqrt_psd(Tensor::matrix(2, 2, {1, 2, 0, 1})), DomainError);
  EXPECT_THROW(matrix_sqrt_psd(Tensor(Shape{2, 3})), ShapeError);
}

TEST(Linalg, JacobiMatchesEigen) {
  const Tensor a = random_tensor(Shape{7, 7}, 21);
  const Tensor m = matmul(transpose(a), a);
  const auto ours = jacobi_eigen(m);
  Eigen::MatrixXd em(7, 7);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) em(i, j) = m.at(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(em);
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(ours.values[k], solver.eigenvalues()[6 - k], 1e-9);
  for (std::size_t k = 1; k < ours.values.size(); ++k) EXPECT_GE(ours.values[k - 1], ours.values[k]);
}

TEST(Linalg, CovarianceMatchesEigen) {
  const Tensor x = random_tensor(Shape{20, 3}, 4);
  Eigen::MatrixXd ex(20, 3);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 3; ++j) ex(i, j) = x.at(i, j);
  const Eigen::MatrixXd centered = ex.rowwise() - ex.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 19.0;
  const Tensor ours = covariance(x);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(ours.at(i, j), cov(i, j), 1e-12);
  EXPECT_THROW(covariance(Tensor(Shape{1, 3})), DomainError);
}

TEST(Tensor, ReshapeAndItemChecks) {
  const Tensor t(Shape{2, 3}, 1.0);
  EXPECT_THROW(t.reshaped(Shape{4}), ShapeError);
  EXPECT_THROW(t.item(), ShapeError);
  EXPECT_EQ(t.reshaped(Shape{6}).size(), 6u);
  EXPECT_THROW(normalized(Tensor(Shape{3})), NumericError);
}

}  // namespace
}  // namespace amg
