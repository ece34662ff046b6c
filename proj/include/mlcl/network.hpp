#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlcl/data.hpp"
#include "mlcl/loss.hpp"
#include "mlcl/matrix.hpp"
#include "mlcl/rng.hpp"

namespace mlcl {

// ============================================================================
// Feed-forward encoder, projection heads, manual backprop, SGD training loop
// ============================================================================

struct DenseLayer {
  Matrix w;  // in x out
  std::vector<double> b;
  Matrix grad_w;
  std::vector<double> grad_b;
  Matrix mom_w;
  std::vector<double> mom_b;

  void init(std::size_t in, std::size_t out, Rng& rng);
  void zero_grad();
};

struct NetShape {
  std::size_t input_dim = 0;
  std::size_t encoder_hidden = 128;
  std::size_t embed_dim = 64;
  std::size_t head_hidden = 64;
  std::size_t proj_dim = 32;
  std::size_t n_heads = 0;
  // Cardinality of each level the linear classifier predicts (grouped
  // softmax); empty for a contrastive-only model.
  std::vector<int> classifier_groups;

  std::size_t classifier_dim() const;
  bool operator==(const NetShape&) const = default;
};

// Encoder (two dense layers, tanh hidden, linear output), one two-layer MLP
// per projection head with unit-norm output, and a linear classifier over the
// embedding. tanh keeps the whole model smooth for finite-difference checks.
struct ModelParams {
  NetShape shape;
  std::uint64_t init_seed = 0;
  DenseLayer enc1, enc2;
  struct ProjectionHead {
    DenseLayer l1, l2;
  };
  std::vector<ProjectionHead> heads;
  DenseLayer classifier;

  static ModelParams init(const NetShape& shape, std::uint64_t seed);
  void zero_grad();
  // Visits every layer in declaration order (also the checkpoint order).
  template <typename Fn>
  void for_each_layer(Fn&& fn) {
    fn(enc1);
    fn(enc2);
    for (auto& h : heads) {
      fn(h.l1);
      fn(h.l2);
    }
    if (shape.classifier_dim() > 0) fn(classifier);
  }
  template <typename Fn>
  void for_each_layer(Fn&& fn) const {
    const_cast<ModelParams*>(this)->for_each_layer(
        [&](DenseLayer& l) { fn(const_cast<const DenseLayer&>(l)); });
  }
};

// Row normalization with its backprop closure: upstream gradients map through
// (I - u u^T) / ||v|| per row.
struct RowNormalized {
  Matrix unit;
  std::vector<double> norms;

  Matrix backprop(const Matrix& upstream) const;
};
RowNormalized normalize_rows(const Matrix& m);

struct ForwardCache {
  Matrix x;
  Matrix enc_h1;  // tanh activations of the encoder hidden layer
  Matrix emb;     // 2N x E
  struct HeadCache {
    Matrix h1;  // tanh activations of the head hidden layer
    RowNormalized norm;
  };
  std::vector<HeadCache> heads;
  Matrix logits;
  bool valid = false;

  const Matrix& projection(std::size_t h) const { return heads[h].norm.unit; }
};

ForwardCache forward(const ModelParams& params, const Matrix& x);

// Fills the model's gradient buffers from upstream gradients. head_gradients
// are d(loss)/d(projection rows), already weighted by the head coefficients;
// ce_gradient (optional) is d(loss)/d(logits) and flows into the encoder only
// when ce_into_encoder is set (the simultaneous-training mode).
void backward(ModelParams& params, const ForwardCache& cache,
              const std::vector<Matrix>& head_gradients, const Matrix* ce_gradient,
              bool ce_into_encoder);

// v <- momentum * v + g;  p <- p - lr * v. Aborts on non-finite gradients.
void sgd_step(ModelParams& params, double lr, double momentum);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  std::vector<HeadConfig> heads;
  // Cross-entropy mode: classifier trained simultaneously with residual
  // weight 1 - sum(alpha) and its gradient flows into the encoder. Otherwise
  // head weights must sum to 1 and the classifier stays untouched.
  bool ce_mode = false;
  std::vector<std::size_t> classifier_levels;  // levels the classifier predicts
  double aug_noise = 0.3;
  double aug_dropout = 0.1;
  // Two augmented views per sample (the standard pipeline). Off, each sample
  // contributes a single augmented view.
  bool two_views = true;
  std::size_t encoder_hidden = 128;
  std::size_t embed_dim = 64;
  std::size_t head_hidden = 64;
  std::size_t proj_dim = 32;

  void validate() const;
};

struct TrainResult {
  ModelParams params;
  std::vector<LossReport> history;  // one report per epoch, batch-averaged
};

// Full training loop: per batch, augment views, forward, per-head positive
// sets and losses, combined objective, backprop, SGD step. Single-threaded
// and bit-reproducible for a fixed (seed, config, data).
TrainResult train(const Dataset& data, const TrainConfig& cfg);
TrainResult train_from(ModelParams params, const Dataset& data, const TrainConfig& cfg);

// Per-batch objective evaluation shared by train() and the gradient checks:
// builds positive sets, per-head losses, optional grouped cross-entropy, and
// (optionally) the upstream gradients for backward(). view_labels has one
// entry per row of the forwarded batch.
struct BatchObjective {
  LossReport report;
  std::vector<Matrix> head_gradients;
  Matrix ce_gradient;
  bool has_ce = false;
};
BatchObjective batch_objective(const ForwardCache& cache,
                               const std::vector<MultiLevelLabel>& view_labels,
                               const TrainConfig& cfg, bool with_gradients);

// Grouped softmax cross-entropy over the classifier's level blocks; the loss
// is the mean of per-level cross-entropies.
CrossEntropyResult grouped_cross_entropy(const Matrix& logits, const std::vector<int>& groups,
                                         const std::vector<MultiLevelLabel>& labels,
                                         const std::vector<std::size_t>& levels);

// Embeddings of raw feature rows (no augmentation), e.g. for probing.
Matrix embed(const ModelParams& params, const Matrix& x);

// Flat binary checkpoint: "MLCLCKPT" magic, version, shape header (dims,
// head count, classifier groups, init seed), then every layer's weights and
// biases as little-endian 64-bit floats in declaration order.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace mlcl
