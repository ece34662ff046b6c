#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mlcl/labels.hpp"
#include "mlcl/matrix.hpp"

namespace mlcl {

// ============================================================================
// Multi-head supervised contrastive losses and their analytical gradients
// ============================================================================

// Batch of projection vectors for one head, one row per view. Loss inputs are
// expected unit-norm per row; checked() enforces that contract at the network
// boundary, unchecked() admits free rows (finite-difference probes step off
// the unit sphere, and the loss itself is defined on free variables).
struct ProjectionBatch {
  Matrix z;

  std::size_t size() const { return z.rows(); }
  std::size_t dim() const { return z.cols(); }

  static ProjectionBatch checked(Matrix m);
  static ProjectionBatch unchecked(Matrix m);
};

// How a head defines positives: label agreement at one level, or Jaccard
// similarity above a threshold (the global head).
struct HeadCriterion {
  enum class Kind { Level, Global };
  Kind kind = Kind::Level;
  std::size_t level = 0;
  double threshold = 0.0;

  static HeadCriterion level_match(std::size_t level) {
    return HeadCriterion{Kind::Level, level, 0.0};
  }
  static HeadCriterion global(double threshold) {
    return HeadCriterion{Kind::Global, 0, threshold};
  }
};

struct HeadConfig {
  HeadCriterion criterion;
  double temperature = 0.1;
  double weight = 1.0;

  void validate() const;
};

// Per-batch (or per-epoch) loss bookkeeping: one entry per head plus the
// optional cross-entropy term and the combined total.
struct LossReport {
  std::vector<std::pair<std::size_t, double>> per_head;  // (head id, loss)
  std::optional<double> ce;
  double total = 0.0;
};

// Contrastive loss of one head: for every anchor, mean over its positives of
// -log softmax similarity, summed over anchors. Log-sum-exp stabilized.
// Anchors with no positives contribute zero.
double head_loss(const ProjectionBatch& z, const PositiveSet& pos, double temperature);

// Global-head variant: each positive term scaled by its Jaccard weight so
// pairs with higher label overlap pull harder. Reduces to head_loss when all
// weights are 1.
double global_head_loss(const ProjectionBatch& z, const PositiveSet& pos, double temperature);

// Weighted combination of per-head losses. Without a cross-entropy term the
// head weights must sum to 1; with one, the cross-entropy receives the
// residual weight 1 - sum(alpha).
double combined_loss(const std::vector<std::pair<HeadConfig, double>>& heads,
                     std::optional<double> ce = std::nullopt);

// Relative similarity S[m][n] = softmax over the contrast set A(m) of
// z_m.z_n / tau; diagonal defined 0. Row m sums to 1.
Matrix relative_similarity(const ProjectionBatch& z, double temperature);

// Closed-form full-batch gradient of head_loss with respect to the rows of z,
// treating them as free variables (the unit-norm Jacobian lives in the
// network module). Anchors with no positives receive zero rows and anchor no
// similarity-mediated terms.
Matrix head_loss_gradient(const ProjectionBatch& z, const PositiveSet& pos, double temperature);

// Same for the Jaccard-weighted global head loss.
Matrix global_head_loss_gradient(const ProjectionBatch& z, const PositiveSet& pos,
                                 double temperature);

// Per-anchor bracket of the tau -> 0+ limit: |P(i)| * z_i.z_i_max minus the
// summed positive similarities, with the argmax over the full contrast set
// and ties broken by lowest index. Every anchor needs >= 1 positive and
// >= 1 negative.
std::vector<double> tau_zero_limit_form(const ProjectionBatch& z, const PositiveSet& pos);

// Per-anchor coefficients of the tau -> +infinity expansion of |P(i)|*L^i:
// constant term |P(i)|*log(2N-1) and the 1/tau coefficient.
struct TauInfForm {
  double constant = 0.0;
  double inv_tau_coeff = 0.0;
};
std::vector<TauInfForm> tau_inf_limit_form(const ProjectionBatch& z, const PositiveSet& pos);

// Mean softmax cross-entropy over rows plus its gradient (softmax - onehot)/B.
struct CrossEntropyResult {
  double loss = 0.0;
  Matrix grad;
};
CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& targets);

}  // namespace mlcl
