#pragma once

#include "discbench/data.hpp"
#include "discbench/numerics.hpp"

#include <cstdint>
#include <vector>

namespace discbench {

/// Multinomial logistic regression head: scores = x W + b.
struct ClassifierModel {
  Matrix weights;  // d x C
  Vector bias;     // C
  double reg_c = 1.0;
  bool converged = false;
  int iterations_used = 0;
  std::vector<double> objective_trace;  // objective after each accepted iterate
};

struct TrainOptions {
  double reg_c = 1.0;
  int max_iter = 5000;
  double tol = 1e-6;
  std::uint64_t seed = 0;  // unused: zero initialization of a strictly convex objective
  int history = 10;        // L-BFGS memory
};

/// J(W, b) = sum_i -log softmax(x_i W + b)[y_i] + ||W||_F^2 / (2 reg_c); bias unpenalized.
struct Objective {
  double value = 0.0;
  Matrix grad_weights;
  Vector grad_bias;
};
Objective logistic_objective(const Matrix& features, const Labels& labels, int num_classes,
                             const Matrix& weights, const Vector& bias, double reg_c);

/// Minimizes J by limited-memory BFGS from W = 0, b = 0. Stops when the
/// infinity norm of grad(J) / N drops to `tol`, when the relative decrease of J
/// falls to round-off (64 eps), or after `max_iter` iterations.
ClassifierModel train_classifier(const Matrix& features, const Labels& labels, int num_classes,
                                 const TrainOptions& options = {});

/// argmax_c (x W + b)_c, ties resolved toward the lowest class index.
Labels predict(const ClassifierModel& model, const Matrix& features);

double accuracy(const Labels& predicted, const Labels& actual);

}  // namespace discbench
