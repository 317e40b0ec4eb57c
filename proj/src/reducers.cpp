#include "discbench/reducers.hpp"

#include "discbench/errors.hpp"
#include "discbench/extensions.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace discbench {

namespace {

constexpr double kWhiteningCutoff = 1e-10;

constexpr std::array<std::string_view, 9> kMethodNames = {"full", "pca",  "lda", "pca_lda", "rlda",
                                                          "lfda", "nca", "rda", "dsb"};

int resolve_dim(std::optional<int> requested, int maximum, std::string_view method) {
  if (!requested) {
    if (maximum < 1)
      throw CapacityError(std::string(method) + ": no output dimension available on this data");
    return maximum;
  }
  if (*requested < 1) throw ArgumentError(std::string(method) + ": output dimension must be >= 1");
  if (*requested > maximum)
    throw CapacityError(std::string(method) + ": requested " + std::to_string(*requested) +
                        " dimensions, maximum is " + std::to_string(maximum));
  return *requested;
}

int lda_max_dim(const FeatureDataset& train) {
  return static_cast<int>(std::min<Eigen::Index>(train.num_classes - 1, train.dim()));
}

Projection make_projection(Matrix weights, RowVector center, Vector values, Method m) {
  canonicalize_signs(weights);
  Projection p;
  p.weights = std::move(weights);
  p.center = std::move(center);
  p.discriminant_values = std::move(values);
  p.method_name = std::string(method_name(m));
  return p;
}

}  // namespace

std::string_view method_name(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

Method parse_method(std::string_view name) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i)
    if (kMethodNames[i] == name) return static_cast<Method>(i);
  throw ArgumentError("unknown method '" + std::string(name) + "'; valid methods: " + valid_method_names());
}

std::string valid_method_names() {
  std::string out;
  for (auto n : kMethodNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

bool is_lda_family(Method m) {
  return m == Method::lda || m == Method::pca_lda || m == Method::rlda || m == Method::lfda ||
         m == Method::dsb;
}

void ReducerConfig::validate() const {
  if (out_dim && *out_dim < 1) throw ArgumentError("out_dim must be >= 1");
  if (lfda_neighbors < 1) throw ArgumentError("lfda_neighbors must be >= 1");
  if (nca_max_iter < 0) throw ArgumentError("nca_max_iter must be >= 0");
  if (rlda_shrinkage && (*rlda_shrinkage < 0.0 || *rlda_shrinkage > 1.0))
    throw ArgumentError("rlda shrinkage must lie in [0, 1]");
  if (rda.residual_components && *rda.residual_components < 0)
    throw ArgumentError("rda residual components must be >= 0");
  if (dsb.rounds < 1) throw ArgumentError("dsb rounds must be >= 1");
  if (!(dsb.weight_growth > 1.0)) throw ArgumentError("dsb weight growth must exceed 1");
}

void require_class_sizes(const FeatureDataset& train, Eigen::Index min_size) {
  const auto counts = train.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] < min_size)
      throw DegenerateClassError("class " + std::to_string(c) + " has " + std::to_string(counts[c]) +
                                 " samples, need at least " + std::to_string(min_size));
}

Matrix transform(const Projection& p, const Matrix& features) {
  if (features.cols() != p.in_dim())
    throw DimensionError("projection expects " + std::to_string(p.in_dim()) + " features, got " +
                         std::to_string(features.cols()));
  return (features.rowwise() - p.center) * p.weights;
}

int max_out_dim(Method method, const FeatureDataset& train) {
  switch (method) {
    case Method::full:
      return static_cast<int>(train.dim());
    case Method::pca:
      return static_cast<int>(std::min<Eigen::Index>(train.size() - 1, train.dim()));
    case Method::nca:
      return static_cast<int>(std::min<Eigen::Index>(train.size() - 1, train.dim()));
    case Method::rda:
      return lda_max_dim(train) + default_rda_components(train.dim());
    default:
      return lda_max_dim(train);
  }
}

Projection fit_full(Eigen::Index dim) {
  Projection p;
  p.weights = Matrix::Identity(dim, dim);
  p.center = RowVector::Zero(dim);
  p.discriminant_values = Vector::Ones(dim);
  p.method_name = "full";
  return p;
}

Projection fit_pca(const Matrix& features, int d) {
  const Eigen::Index n = features.rows();
  const int cap = static_cast<int>(std::min<Eigen::Index>(n - 1, features.cols()));
  resolve_dim(d, cap, "pca");
  const RowVector mean = features.colwise().mean();
  const Matrix centered = features.rowwise() - mean;
  Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  if (!cov.allFinite()) throw NumericError("pca: covariance overflowed; standardize features first");
  const SymEigResult eig = sym_eig(cov);
  return make_projection(eig.eigenvectors.leftCols(d), mean, eig.eigenvalues.head(d).cwiseMax(0.0),
                         Method::pca);
}

DiscriminantSolution solve_discriminant_factors(const Matrix& within_factor, const Matrix& between_factor,
                                                int d) {
  if (within_factor.cols() != between_factor.cols())
    throw DimensionError("within and between factors disagree on dimension");
  // Only the right singular vectors are needed; a QR pass first keeps the SVD at D x D when N > D.
  Vector singular;
  Matrix v;
  if (within_factor.rows() > within_factor.cols()) {
    Eigen::HouseholderQR<Matrix> qr(within_factor);
    const Matrix r = qr.matrixQR().topRows(within_factor.cols()).triangularView<Eigen::Upper>();
    const SvdResult svd = thin_svd(r);
    singular = svd.singular;
    v = svd.vt.transpose();
  } else {
    const SvdResult svd = thin_svd(within_factor);
    singular = svd.singular;
    v = svd.vt.transpose();
  }
  if (singular.size() == 0 || !(singular(0) > 0.0))
    throw RankCollapseError("within-class scatter is zero; no direction can be whitened");
  Eigen::Index rank = 0;
  while (rank < singular.size() && singular(rank) > kWhiteningCutoff * singular(0)) ++rank;
  if (rank < d)
    throw CapacityError("within-class scatter has rank " + std::to_string(rank) + ", cannot extract " +
                        std::to_string(d) + " discriminant directions");

  const Matrix whiten = v.leftCols(rank) * singular.head(rank).cwiseInverse().asDiagonal();
  const SvdResult between = thin_svd(between_factor * whiten);
  if (between.singular.size() < d)
    throw CapacityError("between-class scatter supports fewer than " + std::to_string(d) + " directions");

  DiscriminantSolution out;
  out.directions = whiten * between.vt.topRows(d).transpose();
  out.values = between.singular.head(d).cwiseAbs2();
  return out;
}

DiscriminantSolution solve_discriminant_matrices(const Matrix& s_b, const Matrix& s_w, int d) {
  if (s_b.rows() != s_w.rows() || s_b.cols() != s_w.cols())
    throw DimensionError("scatter matrices disagree on shape");
  const SymEigResult within = sym_eig(s_w);
  if (!(within.eigenvalues(0) > 0.0))
    throw RankCollapseError("within-class scatter is zero; no direction can be whitened");
  Eigen::Index rank = 0;
  const Vector& ev = within.eigenvalues;
  while (rank < ev.size() && ev(rank) > kWhiteningCutoff * ev(0)) ++rank;
  if (rank < d)
    throw CapacityError("within-class scatter has rank " + std::to_string(rank) + ", cannot extract " +
                        std::to_string(d) + " discriminant directions");

  const Matrix whiten = within.eigenvectors.leftCols(rank) * ev.head(rank).cwiseSqrt().cwiseInverse().asDiagonal();
  Matrix whitened = whiten.transpose() * s_b * whiten;
  whitened = 0.5 * (whitened + whitened.transpose()).eval();
  const SymEigResult between = sym_eig(whitened);

  DiscriminantSolution out;
  out.directions = whiten * between.eigenvectors.leftCols(d);
  out.values = between.eigenvalues.head(d).cwiseMax(0.0);
  return out;
}

Projection fit_lda(const FeatureDataset& train, std::optional<int> d, std::optional<std::span<const double>> weights) {
  train.validate();
  require_class_sizes(train, 2);
  const int dim = resolve_dim(d, lda_max_dim(train), "lda");
  const ClassStats stats = compute_class_stats(train, weights);
  const DiscriminantSolution sol =
      solve_discriminant_factors(within_class_centered(train, stats, weights), between_class_factor(stats), dim);
  return make_projection(sol.directions, stats.global_mean, sol.values, Method::lda);
}

Projection fit_pca_lda(const FeatureDataset& train, std::optional<int> d) {
  train.validate();
  require_class_sizes(train, 2);
  const int dim = resolve_dim(d, lda_max_dim(train), "pca_lda");
  const int inner = static_cast<int>(
      std::min<Eigen::Index>({static_cast<Eigen::Index>(train.num_classes - 1), train.dim(), train.size() - 1}));
  const Projection pca = fit_pca(train.features, inner);

  FeatureDataset reduced = train;
  reduced.features = transform(pca, train.features);
  const Projection lda = fit_lda(reduced, dim);

  // ((x - m_p) W_p - m_l) W_l == (x - (m_p + m_l W_p^T)) W_p W_l because W_p^T W_p = I.
  return make_projection(pca.weights * lda.weights, pca.center + lda.center * pca.weights.transpose(),
                         lda.discriminant_values, Method::pca_lda);
}

Projection fit_rlda(const FeatureDataset& train, std::optional<int> d, std::optional<double> alpha_override) {
  train.validate();
  require_class_sizes(train, 2);
  const int dim = resolve_dim(d, lda_max_dim(train), "rlda");
  const ClassStats stats = compute_class_stats(train);
  const Matrix centered = within_class_centered(train, stats);
  const double n = static_cast<double>(train.size());
  Matrix cov = centered.transpose() * centered / n;
  cov = 0.5 * (cov + cov.transpose()).eval();

  Matrix shrunk;
  if (alpha_override) {
    if (*alpha_override < 0.0 || *alpha_override > 1.0) throw ArgumentError("shrinkage must lie in [0, 1]");
    shrunk = shrink_toward_identity(cov, *alpha_override);
  } else {
    shrunk = ledoit_wolf_shrink(cov, centered).shrunk_sw;
  }
  const Matrix hb = between_class_factor(stats);
  const DiscriminantSolution sol = solve_discriminant_matrices(hb.transpose() * hb, n * shrunk, dim);
  return make_projection(sol.directions, stats.global_mean, sol.values, Method::rlda);
}

Projection fit(const ReducerConfig& config, const FeatureDataset& train) {
  config.validate();
  train.validate();
  switch (config.method) {
    case Method::full: {
      resolve_dim(config.out_dim, static_cast<int>(train.dim()), "full");
      if (config.out_dim && *config.out_dim != train.dim())
        throw CapacityError("full: output dimension is fixed at D = " + std::to_string(train.dim()));
      return fit_full(train.dim());
    }
    case Method::pca:
      return fit_pca(train.features, resolve_dim(config.out_dim, max_out_dim(Method::pca, train), "pca"));
    case Method::lda:
      return fit_lda(train, config.out_dim);
    case Method::pca_lda:
      return fit_pca_lda(train, config.out_dim);
    case Method::rlda:
      return fit_rlda(train, config.out_dim, config.rlda_shrinkage);
    case Method::lfda:
      return fit_lfda(train, config.out_dim, config.lfda_neighbors);
    case Method::nca:
      return fit_nca(train, config.out_dim, config.nca_max_iter, config.seed);
    case Method::rda: {
      Projection p = fit_rda(train, config.rda);
      if (config.out_dim && *config.out_dim != p.out_dim())
        throw CapacityError("rda: output dimension is fixed at (C-1)+k = " + std::to_string(p.out_dim()));
      return p;
    }
    case Method::dsb:
      return fit_dsb(train, config.dsb, config.out_dim);
  }
  throw ArgumentError("unhandled method");
}

}  // namespace discbench
