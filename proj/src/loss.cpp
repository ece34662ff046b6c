#include "mlcl/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mlcl/common.hpp"

namespace mlcl {

namespace {

constexpr double kUnitNormTol = 1e-6;
constexpr double kWeightSumTol = 1e-9;

void check_batch(const ProjectionBatch& z, const char* where) {
  MLCL_CHECK(z.size() >= 2 && z.dim() >= 1,
             "[" << where << "] projection batch needs >= 2 rows and >= 1 column, got "
                 << z.size() << "x" << z.dim());
  MLCL_CHECK(z.z.all_finite(), "[" << where << "] non-finite projection values");
}

void check_pair(const ProjectionBatch& z, const PositiveSet& pos, const char* where) {
  check_batch(z, where);
  MLCL_CHECK(pos.n == z.size(), "[" << where << "] positive set over " << pos.n
                                    << " views, batch has " << z.size());
  MLCL_CHECK(pos.mask_data.size() == pos.n * pos.n, "[" << where << "] malformed mask");
  for (std::size_t i = 0; i < pos.n; ++i) {
    MLCL_CHECK(!pos.mask(i, i), "[" << where << "] mask diagonal must be false (row " << i << ")");
  }
}

// Per-anchor logits z_i.z_a / tau over the contrast set, with the max logit
// for log-sum-exp stabilization. The diagonal slot is left untouched.
struct AnchorLogits {
  std::vector<double> logits;
  double max_logit = -std::numeric_limits<double>::infinity();
  double lse = 0.0;  // log sum_{a != i} exp(logit_a)
};

AnchorLogits anchor_logits(const ProjectionBatch& z, std::size_t i, double temperature) {
  const std::size_t n = z.size();
  AnchorLogits out;
  out.logits.resize(n, 0.0);
  const double* zi = z.z.row(i);
  for (std::size_t a = 0; a < n; ++a) {
    if (a == i) continue;
    const double l = dot(zi, z.z.row(a), z.dim()) / temperature;
    out.logits[a] = l;
    out.max_logit = std::max(out.max_logit, l);
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (a == i) continue;
    sum += std::exp(out.logits[a] - out.max_logit);
  }
  out.lse = out.max_logit + std::log(sum);
  return out;
}

double contrastive_loss(const ProjectionBatch& z, const PositiveSet& pos, double temperature,
                        bool weighted, const char* where) {
  check_pair(z, pos, where);
  MLCL_CHECK(temperature > 0.0, "[" << where << "] temperature must be positive, got "
                                    << temperature);
  if (weighted) {
    MLCL_CHECK(pos.has_weights(), "[" << where << "] positive set carries no weights");
  }
  const std::size_t n = z.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t n_pos = pos.positive_count(i);
    if (n_pos == 0) continue;
    const AnchorLogits al = anchor_logits(z, i, temperature);
    double anchor_term = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      if (p == i || !pos.mask(i, p)) continue;
      const double term = al.lse - al.logits[p];  // -log softmax, always >= 0
      anchor_term += weighted ? pos.weight(i, p) * term : term;
    }
    total += anchor_term / static_cast<double>(n_pos);
  }
  return total;
}

Matrix contrastive_gradient(const ProjectionBatch& z, const PositiveSet& pos, double temperature,
                            bool weighted, const char* where) {
  check_pair(z, pos, where);
  MLCL_CHECK(temperature > 0.0, "[" << where << "] temperature must be positive, got "
                                    << temperature);
  if (weighted) {
    MLCL_CHECK(pos.has_weights(), "[" << where << "] positive set carries no weights");
  }
  const std::size_t n = z.size();
  const std::size_t d = z.dim();
  const Matrix S = relative_similarity(z, temperature);
  Matrix grad(n, d, 0.0);

  // Accumulate, per anchor t with positives, the derivative of its loss term
  // L^t with respect to every row. For anchor t itself:
  //   dL^t/dz_t = (1 / (tau |P(t)|)) (W_t sum_a S[t][a] z_a - sum_p w_tp z_p)
  // and for every other row i:
  //   dL^t/dz_i = (1 / (tau |P(t)|)) (W_t S[t][i] - w_ti [i in P(t)]) z_t
  // where W_t is the anchor's total positive weight (|P(t)| unweighted). For
  // level masks, where positive counts agree within a class, the sum over
  // anchors collapses to the symmetric (S[i][a] + S[a][i]) / 2 form.
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t n_pos = pos.positive_count(t);
    if (n_pos == 0) continue;
    double total_w = 0.0;
    if (weighted) {
      for (std::size_t p = 0; p < n; ++p) {
        if (pos.mask(t, p)) total_w += pos.weight(t, p);
      }
    } else {
      total_w = static_cast<double>(n_pos);
    }
    const double inv = 1.0 / (temperature * static_cast<double>(n_pos));
    const double* zt = z.z.row(t);
    double* gt = grad.row(t);
    for (std::size_t a = 0; a < n; ++a) {
      if (a == t) continue;
      const double w_ta = pos.mask(t, a) ? (weighted ? pos.weight(t, a) : 1.0) : 0.0;
      // Shared coefficient: dL^t/dz_t picks up coeff * z_a, dL^t/dz_a picks
      // up coeff * z_t.
      const double coeff = inv * (total_w * S(t, a) - w_ta);
      const double* za = z.z.row(a);
      double* ga = grad.row(a);
      for (std::size_t c = 0; c < d; ++c) {
        gt[c] += coeff * za[c];
        ga[c] += coeff * zt[c];
      }
    }
  }
  return grad;
}

void check_anchor_coverage(const PositiveSet& pos, const char* where) {
  for (std::size_t i = 0; i < pos.n; ++i) {
    const std::size_t n_pos = pos.positive_count(i);
    MLCL_CHECK(n_pos >= 1, "[" << where << "] anchor " << i << " has no positives");
    MLCL_CHECK(n_pos <= pos.n - 2, "[" << where << "] anchor " << i << " has no negatives");
  }
}

}  // namespace

ProjectionBatch ProjectionBatch::checked(Matrix m) {
  ProjectionBatch b{std::move(m)};
  check_batch(b, "ProjectionBatch");
  for (std::size_t r = 0; r < b.size(); ++r) {
    const double norm = row_norm(b.z, r);
    MLCL_CHECK(std::abs(norm - 1.0) <= kUnitNormTol,
               "[ProjectionBatch] row " << r << " has norm " << norm
                                        << ", expected unit within " << kUnitNormTol);
  }
  return b;
}

ProjectionBatch ProjectionBatch::unchecked(Matrix m) { return ProjectionBatch{std::move(m)}; }

void HeadConfig::validate() const {
  MLCL_CHECK(temperature > 0.0, "[HeadConfig] temperature must be positive, got " << temperature);
  MLCL_CHECK(weight >= 0.0, "[HeadConfig] weight must be non-negative, got " << weight);
  if (criterion.kind == HeadCriterion::Kind::Global) {
    MLCL_CHECK(criterion.threshold >= 0.0 && criterion.threshold < 1.0,
               "[HeadConfig] global threshold " << criterion.threshold << " outside [0,1)");
  }
}

double head_loss(const ProjectionBatch& z, const PositiveSet& pos, double temperature) {
  return contrastive_loss(z, pos, temperature, /*weighted=*/false, "head_loss");
}

double global_head_loss(const ProjectionBatch& z, const PositiveSet& pos, double temperature) {
  return contrastive_loss(z, pos, temperature, /*weighted=*/true, "global_head_loss");
}

double combined_loss(const std::vector<std::pair<HeadConfig, double>>& heads,
                     std::optional<double> ce) {
  double alpha_sum = 0.0;
  double total = 0.0;
  for (const auto& [cfg, value] : heads) {
    cfg.validate();
    alpha_sum += cfg.weight;
    total += cfg.weight * value;
  }
  if (ce.has_value()) {
    MLCL_CHECK(alpha_sum <= 1.0 + kWeightSumTol,
               "[combined_loss] head weights sum to " << alpha_sum
                                                      << ", must be <= 1 in cross-entropy mode");
    total += (1.0 - alpha_sum) * *ce;
  } else {
    MLCL_CHECK(std::abs(alpha_sum - 1.0) <= kWeightSumTol,
               "[combined_loss] head weights sum to " << alpha_sum
                                                      << ", must be 1 without cross-entropy");
  }
  return total;
}

Matrix relative_similarity(const ProjectionBatch& z, double temperature) {
  check_batch(z, "relative_similarity");
  MLCL_CHECK(temperature > 0.0,
             "[relative_similarity] temperature must be positive, got " << temperature);
  const std::size_t n = z.size();
  Matrix S(n, n, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const AnchorLogits al = anchor_logits(z, m, temperature);
    for (std::size_t a = 0; a < n; ++a) {
      if (a == m) continue;
      S(m, a) = std::exp(al.logits[a] - al.lse);
    }
  }
  return S;
}

Matrix head_loss_gradient(const ProjectionBatch& z, const PositiveSet& pos, double temperature) {
  return contrastive_gradient(z, pos, temperature, /*weighted=*/false, "head_loss_gradient");
}

Matrix global_head_loss_gradient(const ProjectionBatch& z, const PositiveSet& pos,
                                 double temperature) {
  return contrastive_gradient(z, pos, temperature, /*weighted=*/true,
                              "global_head_loss_gradient");
}

std::vector<double> tau_zero_limit_form(const ProjectionBatch& z, const PositiveSet& pos) {
  check_pair(z, pos, "tau_zero_limit_form");
  check_anchor_coverage(pos, "tau_zero_limit_form");
  const std::size_t n = z.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* zi = z.z.row(i);
    double max_sim = -std::numeric_limits<double>::infinity();
    double pos_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == i) continue;
      const double sim = dot(zi, z.z.row(a), z.dim());
      if (sim > max_sim) max_sim = sim;  // strict > keeps the lowest index on ties
      if (pos.mask(i, a)) {
        pos_sum += sim;
        ++n_pos;
      }
    }
    out[i] = static_cast<double>(n_pos) * max_sim - pos_sum;
  }
  return out;
}

std::vector<TauInfForm> tau_inf_limit_form(const ProjectionBatch& z, const PositiveSet& pos) {
  check_pair(z, pos, "tau_inf_limit_form");
  check_anchor_coverage(pos, "tau_inf_limit_form");
  const std::size_t n = z.size();
  const double log_contrast = std::log(static_cast<double>(n - 1));
  std::vector<TauInfForm> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* zi = z.z.row(i);
    double all_sum = 0.0;
    double pos_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (a == i) continue;
      const double sim = dot(zi, z.z.row(a), z.dim());
      all_sum += sim;
      if (pos.mask(i, a)) {
        pos_sum += sim;
        ++n_pos;
      }
    }
    out[i].constant = static_cast<double>(n_pos) * log_contrast;
    out[i].inv_tau_coeff =
        static_cast<double>(n_pos) * all_sum / static_cast<double>(n - 1) - pos_sum;
  }
  return out;
}

CrossEntropyResult cross_entropy(const Matrix& logits, const std::vector<int>& targets) {
  const std::size_t b = logits.rows();
  const std::size_t c = logits.cols();
  MLCL_CHECK(b >= 1 && c >= 1, "[cross_entropy] empty logits");
  MLCL_CHECK(targets.size() == b, "[cross_entropy] " << targets.size() << " targets for " << b
                                                     << " rows");
  MLCL_CHECK(logits.all_finite(), "[cross_entropy] non-finite logits");
  CrossEntropyResult res;
  res.grad = Matrix(b, c, 0.0);
  for (std::size_t r = 0; r < b; ++r) {
    MLCL_CHECK(targets[r] >= 0 && static_cast<std::size_t>(targets[r]) < c,
               "[cross_entropy] target " << targets[r] << " out of range at row " << r);
    const double* lr = logits.row(r);
    double max_l = lr[0];
    for (std::size_t j = 1; j < c; ++j) max_l = std::max(max_l, lr[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) sum += std::exp(lr[j] - max_l);
    const double lse = max_l + std::log(sum);
    res.loss += (lse - lr[targets[r]]) / static_cast<double>(b);
    double* gr = res.grad.row(r);
    for (std::size_t j = 0; j < c; ++j) {
      gr[j] = std::exp(lr[j] - lse) / static_cast<double>(b);
    }
    gr[targets[r]] -= 1.0 / static_cast<double>(b);
  }
  return res;
}

}  // namespace mlcl
