#pragma once

#include "discbench/data.hpp"
#include "discbench/numerics.hpp"
#include "discbench/scatter.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace discbench {

enum class Method { full, pca, lda, pca_lda, rlda, lfda, nca, rda, dsb };

/// Every method in benchmark roster order.
inline constexpr Method kAllMethods[] = {Method::full, Method::pca,  Method::lda,
                                         Method::pca_lda, Method::rlda, Method::lfda,
                                         Method::nca,  Method::rda,  Method::dsb};

std::string_view method_name(Method m);
/// Throws ArgumentError listing the valid names when `name` is unknown.
Method parse_method(std::string_view name);
std::string valid_method_names();
/// Methods whose output is capped at C - 1 directions.
bool is_lda_family(Method m);

/// Fitted linear map x -> (x - center) * weights.
struct Projection {
  Matrix weights;              // D x d
  RowVector center;            // length D
  Vector discriminant_values;  // length d, descending (RDA: descending within each block)
  std::string method_name;

  Eigen::Index in_dim() const { return weights.rows(); }
  Eigen::Index out_dim() const { return weights.cols(); }
};

Matrix transform(const Projection& p, const Matrix& features);

/// How RDA forms residuals from the LDA basis W.
enum class ResidualMode {
  least_squares,  // z - W (W^T W)^{-1} W^T z, an orthogonal projector
  literal,        // z - W W^T z exactly as written for orthonormal W
};

struct RdaConfig {
  std::optional<int> residual_components;  // k; default 20 if D <= 1024 else 30
  ResidualMode mode = ResidualMode::least_squares;
};

struct DsbConfig {
  int rounds = 2;
  double weight_growth = 2.0;
};

struct ReducerConfig {
  Method method = Method::lda;
  std::optional<int> out_dim;  // empty = method maximum
  int lfda_neighbors = 7;
  int nca_max_iter = 50;
  std::optional<double> rlda_shrinkage;  // empty = Ledoit-Wolf estimate
  RdaConfig rda;
  DsbConfig dsb;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Largest output dimension `method` supports on `train`.
int max_out_dim(Method method, const FeatureDataset& train);

/// Fits the configured method on training data only.
Projection fit(const ReducerConfig& config, const FeatureDataset& train);

// Individual methods. `d` empty means the method maximum.

Projection fit_full(Eigen::Index dim);

Projection fit_pca(const Matrix& features, int d);

/// Generalized eigenproblem S_b w = lambda S_w w through the within-class
/// whitening route: thin SVD of the (weighted) class-centered data, singular
/// directions below 1e-10 of the largest dropped, then the whitened between
/// class scatter is diagonalized. Columns satisfy w^T S_w w = 1 and the
/// discriminant values are their Fisher ratios.
Projection fit_lda(const FeatureDataset& train, std::optional<int> d = std::nullopt,
                   std::optional<std::span<const double>> weights = std::nullopt);

Projection fit_pca_lda(const FeatureDataset& train, std::optional<int> d = std::nullopt);

/// LDA with S_w replaced by its Ledoit-Wolf shrinkage estimate, or by the
/// shrinkage at `alpha_override` when given.
Projection fit_rlda(const FeatureDataset& train, std::optional<int> d = std::nullopt,
                    std::optional<double> alpha_override = std::nullopt);

/// Localized within/between scatter with local-scaling affinities:
///   A_ij = exp(-||z_i - z_j||^2 / (sigma_i sigma_j)),
///   sigma_i = distance from z_i to its k-th nearest same-class neighbour,
///   W^lw_ij = A_ij / n_c (same class), 0 otherwise
///   W^lb_ij = A_ij (1/N - 1/n_c) (same class), 1/N otherwise
///   S = 1/2 sum_ij W_ij (z_i - z_j)(z_i - z_j)^T
/// k is truncated to n_c - 1 within small classes.
ScatterPair local_scatter(const FeatureDataset& train, int k);

Projection fit_lfda(const FeatureDataset& train, std::optional<int> d = std::nullopt, int k = 7);

/// Value and gradient of the soft leave-one-out objective
///   f(A) = sum_i sum_{j != i, y_j = y_i} p_ij,
///   p_ij = exp(-||A z_i - A z_j||^2) / sum_{k != i} exp(-||A z_i - A z_k||^2)
/// for a d x D transform A.
struct NcaEvaluation {
  double objective = 0.0;
  Matrix gradient;  // d x D, empty unless requested
};
NcaEvaluation nca_evaluate(const Matrix& transform, const Matrix& features, const Labels& labels,
                           bool with_gradient = true);

struct NcaResult {
  Projection projection;
  std::vector<double> objective_trace;  // accepted iterates, first entry is the initial value
  int iterations = 0;
};
NcaResult fit_nca_traced(const FeatureDataset& train, std::optional<int> d = std::nullopt,
                         int max_iter = 50, std::uint64_t seed = 0);
Projection fit_nca(const FeatureDataset& train, std::optional<int> d = std::nullopt, int max_iter = 50,
                   std::uint64_t seed = 0);

// Low-level discriminant solver shared by the LDA family.
struct DiscriminantSolution {
  Matrix directions;  // D x d
  Vector values;      // d, descending, clipped at 0
};
DiscriminantSolution solve_discriminant_factors(const Matrix& within_factor, const Matrix& between_factor,
                                                int d);
DiscriminantSolution solve_discriminant_matrices(const Matrix& s_b, const Matrix& s_w, int d);

/// Every class in [0, C) must have at least `min_size` samples.
void require_class_sizes(const FeatureDataset& train, Eigen::Index min_size);

}  // namespace discbench
