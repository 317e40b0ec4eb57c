#include "discbench/classifier.hpp"

#include "discbench/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace discbench {

Objective logistic_objective(const Matrix& features, const Labels& labels, int num_classes,
                             const Matrix& weights, const Vector& bias, double reg_c) {
  const Eigen::Index n = features.rows();
  if (weights.rows() != features.cols() || weights.cols() != num_classes || bias.size() != num_classes)
    throw DimensionError("logistic objective: parameter shapes do not match data");
  if (static_cast<Eigen::Index>(labels.size()) != n) throw DimensionError("logistic objective: label count mismatch");
  Matrix scores = (features * weights).rowwise() + bias.transpose();
  Objective out;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double top = scores.row(i).maxCoeff();
    auto row = scores.row(i).array();
    row = (row - top).exp();
    const double z = row.sum();
    const int y = labels[static_cast<std::size_t>(i)];
    loss += std::log(z) - std::log(row(y));
    row /= z;
    row(y) -= 1.0;  // scores now hold softmax - onehot
  }
  out.value = loss + weights.squaredNorm() / (2.0 * reg_c);
  if (!std::isfinite(out.value)) throw NumericError("logistic objective is not finite");
  out.grad_weights = features.transpose() * scores + weights / reg_c;
  out.grad_bias = scores.colwise().sum().transpose();
  return out;
}

namespace {

// Parameters flattened as [vec(W); b].
struct Layout {
  Eigen::Index d;
  Eigen::Index c;
  Vector pack(const Matrix& w, const Vector& b) const {
    Vector theta(d * c + c);
    theta.head(d * c) = Eigen::Map<const Vector>(w.data(), d * c);
    theta.tail(c) = b;
    return theta;
  }
  Matrix weights(const Vector& theta) const { return Eigen::Map<const Matrix>(theta.data(), d, c); }
  Vector bias(const Vector& theta) const { return theta.tail(c); }
};

}  // namespace

ClassifierModel train_classifier(const Matrix& features, const Labels& labels, int num_classes,
                                 const TrainOptions& options) {
  if (static_cast<Eigen::Index>(labels.size()) != features.rows())
    throw DimensionError("classifier: label count does not match feature rows");
  if (num_classes < 1) throw ArgumentError("classifier: need at least one class");
  if (!(options.reg_c > 0.0)) throw ArgumentError("classifier: reg_c must be positive");
  if (options.max_iter < 0 || options.history < 1) throw ArgumentError("classifier: invalid iteration settings");
  for (int y : labels)
    if (y < 0 || y >= num_classes) throw CorruptionError("classifier: label outside [0, C)");

  const Layout layout{features.cols(), num_classes};
  auto evaluate = [&](const Vector& theta, Vector& grad) {
    Objective obj = logistic_objective(features, labels, num_classes, layout.weights(theta), layout.bias(theta),
                                       options.reg_c);
    grad = layout.pack(obj.grad_weights, obj.grad_bias);
    return obj.value;
  };

  Vector theta = Vector::Zero(layout.d * layout.c + layout.c);
  Vector grad;
  double f = evaluate(theta, grad);

  ClassifierModel model;
  model.reg_c = options.reg_c;
  model.objective_trace.push_back(f);

  // The gradient test is on J / N so tol does not tighten as the training set grows.
  const double inv_n = 1.0 / static_cast<double>(std::max<Eigen::Index>(features.rows(), 1));
  constexpr double kRelativeDecrease = 64.0 * std::numeric_limits<double>::epsilon();

  std::deque<Vector> s_hist, y_hist;
  std::deque<double> rho_hist;
  int it = 0;
  while (true) {
    if (grad.cwiseAbs().maxCoeff() * inv_n <= options.tol) {
      model.converged = true;
      break;
    }
    if (it >= options.max_iter) break;

    // Two-loop recursion for the search direction.
    Vector q = grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    else gamma = 1.0 / std::max(1.0, grad.norm());
    Vector dir = gamma * q;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(dir);
      dir += (alpha[k] - beta) * s_hist[k];
    }
    dir = -dir;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      // Lost descent (numerical drift in the history): restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -grad / std::max(1.0, grad.norm());
      slope = grad.dot(dir);
    }

    // Backtracking line search with the Armijo sufficient-decrease condition.
    double step = 1.0;
    Vector next_theta, next_grad;
    double next_f = f;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      next_theta = theta + step * dir;
      try {
        next_f = evaluate(next_theta, next_grad);
        if (next_f <= f + 1e-4 * step * slope) {
          moved = true;
          break;
        }
      } catch (const NumericError&) {
      }
      step *= 0.5;
    }
    if (!moved) break;  // no representable decrease left

    Vector s = next_theta - theta;
    Vector y = next_grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double decrease = (f - next_f) / std::max({std::abs(f), std::abs(next_f), 1.0});
    theta = std::move(next_theta);
    grad = std::move(next_grad);
    f = next_f;
    model.objective_trace.push_back(f);
    ++it;
    if (decrease <= kRelativeDecrease) {
      // Objective has stalled at round-off level.
      model.converged = true;
      break;
    }
  }

  model.weights = layout.weights(theta);
  model.bias = layout.bias(theta);
  model.iterations_used = it;
  return model;
}

Labels predict(const ClassifierModel& model, const Matrix& features) {
  if (features.cols() != model.weights.rows())
    throw DimensionError("classifier expects " + std::to_string(model.weights.rows()) + " features, got " +
                         std::to_string(features.cols()));
  const Matrix scores = (features * model.weights).rowwise() + model.bias.transpose();
  Labels out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double accuracy(const Labels& predicted, const Labels& actual) {
  if (predicted.size() != actual.size())
    throw ArgumentError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                        std::to_string(actual.size()) + " labels");
  if (actual.empty()) throw ArgumentError("accuracy: empty label vectors");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) hits += predicted[i] == actual[i];
  return static_cast<double>(hits) / static_cast<double>(actual.size());
}

}  // namespace discbench
