#include "mlcl/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "mlcl/common.hpp"

namespace mlcl {

namespace {

constexpr std::uint64_t kTrainLoopStream = 0x7261696e;  // shuffle + augmentation draws

Matrix dense_forward(const Matrix& x, const DenseLayer& l) {
  const std::size_t n = x.rows(), in = x.cols(), out = l.w.cols();
  Matrix y(n, out);
  for (std::size_t r = 0; r < n; ++r) {
    double* yr = y.row(r);
    std::copy(l.b.begin(), l.b.end(), yr);
    const double* xr = x.row(r);
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = xr[k];
      const double* wk = l.w.row(k);
      for (std::size_t c = 0; c < out; ++c) yr[c] += xv * wk[c];
    }
  }
  return y;
}

// Accumulates parameter gradients for y = x.w + b given dL/dy, optionally
// adding dL/dx into input_grad.
void dense_backward(const Matrix& x, const Matrix& out_grad, DenseLayer& l,
                    Matrix* input_grad) {
  const std::size_t n = x.rows(), in = x.cols(), out = l.w.cols();
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = x.row(r);
    const double* gr = out_grad.row(r);
    for (std::size_t k = 0; k < in; ++k) {
      const double xv = xr[k];
      double* gw = l.grad_w.row(k);
      for (std::size_t c = 0; c < out; ++c) gw[c] += xv * gr[c];
    }
    for (std::size_t c = 0; c < out; ++c) l.grad_b[c] += gr[c];
    if (input_grad) {
      double* ig = input_grad->row(r);
      for (std::size_t k = 0; k < in; ++k) {
        const double* wk = l.w.row(k);
        double acc = 0.0;
        for (std::size_t c = 0; c < out; ++c) acc += wk[c] * gr[c];
        ig[k] += acc;
      }
    }
  }
}

Matrix tanh_matrix(const Matrix& m) {
  Matrix out = m;
  for (auto& v : out.data()) v = std::tanh(v);
  return out;
}

// dL/d(pre-activation) from dL/d(tanh output), using the cached activations.
Matrix tanh_backward(const Matrix& h, const Matrix& g) {
  Matrix out = g;
  for (std::size_t i = 0; i < out.data().size(); ++i) {
    out.data()[i] *= 1.0 - h.data()[i] * h.data()[i];
  }
  return out;
}

void fisher_yates(std::vector<std::size_t>& order, Rng& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform_index(i)]);
  }
}

}  // namespace

void DenseLayer::init(std::size_t in, std::size_t out, Rng& rng) {
  w = Matrix(in, out);
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  for (auto& v : w.data()) v = rng.uniform(-bound, bound);
  b.assign(out, 0.0);
  grad_w = Matrix(in, out);
  grad_b.assign(out, 0.0);
  mom_w = Matrix(in, out);
  mom_b.assign(out, 0.0);
}

void DenseLayer::zero_grad() {
  grad_w.fill(0.0);
  grad_b.assign(grad_b.size(), 0.0);
}

std::size_t NetShape::classifier_dim() const {
  std::size_t d = 0;
  for (int g : classifier_groups) d += static_cast<std::size_t>(g);
  return d;
}

ModelParams ModelParams::init(const NetShape& shape, std::uint64_t seed) {
  MLCL_CHECK(shape.input_dim >= 1 && shape.encoder_hidden >= 1 && shape.embed_dim >= 1 &&
                 shape.head_hidden >= 1 && shape.proj_dim >= 1,
             "[ModelParams] all layer dimensions must be >= 1");
  for (int g : shape.classifier_groups) {
    MLCL_CHECK(g >= 2, "[ModelParams] classifier group cardinality must be >= 2, got " << g);
  }
  ModelParams p;
  p.shape = shape;
  p.init_seed = seed;
  Rng rng(seed);
  p.enc1.init(shape.input_dim, shape.encoder_hidden, rng);
  p.enc2.init(shape.encoder_hidden, shape.embed_dim, rng);
  p.heads.resize(shape.n_heads);
  for (auto& h : p.heads) {
    h.l1.init(shape.embed_dim, shape.head_hidden, rng);
    h.l2.init(shape.head_hidden, shape.proj_dim, rng);
  }
  if (shape.classifier_dim() > 0) {
    p.classifier.init(shape.embed_dim, shape.classifier_dim(), rng);
  }
  return p;
}

void ModelParams::zero_grad() {
  for_each_layer([](DenseLayer& l) { l.zero_grad(); });
}

RowNormalized normalize_rows(const Matrix& m) {
  RowNormalized out;
  out.unit = m;
  out.norms.resize(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double norm = row_norm(m, r);
    MLCL_CHECK(norm >= 1e-12,
               "[normalize_rows] row " << r << " has near-zero norm " << norm);
    out.norms[r] = norm;
    double* row = out.unit.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] /= norm;
  }
  return out;
}

Matrix RowNormalized::backprop(const Matrix& upstream) const {
  MLCL_CHECK(upstream.rows() == unit.rows() && upstream.cols() == unit.cols(),
             "[RowNormalized] upstream gradient shape mismatch");
  Matrix out(unit.rows(), unit.cols());
  for (std::size_t r = 0; r < unit.rows(); ++r) {
    const double* u = unit.row(r);
    const double* g = upstream.row(r);
    const double proj = dot(u, g, unit.cols());
    double* o = out.row(r);
    for (std::size_t c = 0; c < unit.cols(); ++c) {
      o[c] = (g[c] - proj * u[c]) / norms[r];
    }
  }
  return out;
}

ForwardCache forward(const ModelParams& params, const Matrix& x) {
  MLCL_CHECK(x.cols() == params.shape.input_dim,
             "[forward] input dim " << x.cols() << " != model input dim "
                                    << params.shape.input_dim);
  MLCL_CHECK(x.all_finite(), "[forward] non-finite input");
  ForwardCache cache;
  cache.x = x;
  cache.enc_h1 = tanh_matrix(dense_forward(x, params.enc1));
  cache.emb = dense_forward(cache.enc_h1, params.enc2);
  cache.heads.resize(params.heads.size());
  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    auto& hc = cache.heads[h];
    hc.h1 = tanh_matrix(dense_forward(cache.emb, params.heads[h].l1));
    hc.norm = normalize_rows(dense_forward(hc.h1, params.heads[h].l2));
  }
  if (params.shape.classifier_dim() > 0) {
    cache.logits = dense_forward(cache.emb, params.classifier);
  }
  cache.valid = true;
  return cache;
}

void backward(ModelParams& params, const ForwardCache& cache,
              const std::vector<Matrix>& head_gradients, const Matrix* ce_gradient,
              bool ce_into_encoder) {
  MLCL_CHECK(cache.valid, "[backward] missing forward cache");
  MLCL_CHECK(head_gradients.size() == params.heads.size(),
             "[backward] " << head_gradients.size() << " head gradients for "
                           << params.heads.size() << " heads");
  params.zero_grad();
  const std::size_t n = cache.x.rows();
  Matrix emb_grad(n, params.shape.embed_dim);

  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    MLCL_CHECK(head_gradients[h].rows() == n &&
                   head_gradients[h].cols() == params.shape.proj_dim,
               "[backward] head " << h << " gradient shape mismatch");
    const auto& hc = cache.heads[h];
    const Matrix pre_grad = hc.norm.backprop(head_gradients[h]);
    Matrix h1_grad(n, params.shape.head_hidden);
    dense_backward(hc.h1, pre_grad, params.heads[h].l2, &h1_grad);
    const Matrix a1_grad = tanh_backward(hc.h1, h1_grad);
    dense_backward(cache.emb, a1_grad, params.heads[h].l1, &emb_grad);
  }

  if (ce_gradient) {
    MLCL_CHECK(params.shape.classifier_dim() > 0, "[backward] model has no classifier");
    MLCL_CHECK(ce_gradient->rows() == n && ce_gradient->cols() == params.shape.classifier_dim(),
               "[backward] cross-entropy gradient shape mismatch");
    dense_backward(cache.emb, *ce_gradient, params.classifier,
                   ce_into_encoder ? &emb_grad : nullptr);
  }

  Matrix h1_grad(n, params.shape.encoder_hidden);
  dense_backward(cache.enc_h1, emb_grad, params.enc2, &h1_grad);
  const Matrix a1_grad = tanh_backward(cache.enc_h1, h1_grad);
  dense_backward(cache.x, a1_grad, params.enc1, nullptr);
}

void sgd_step(ModelParams& params, double lr, double momentum) {
  MLCL_CHECK(lr > 0.0, "[sgd_step] learning rate must be positive, got " << lr);
  MLCL_CHECK(momentum >= 0.0 && momentum < 1.0,
             "[sgd_step] momentum " << momentum << " outside [0,1)");
  std::size_t layer_idx = 0;
  params.for_each_layer([&](DenseLayer& l) {
    MLCL_RUNTIME_CHECK(l.grad_w.all_finite() &&
                           std::all_of(l.grad_b.begin(), l.grad_b.end(),
                                       [](double v) { return std::isfinite(v); }),
                       "[sgd_step] non-finite gradient in layer " << layer_idx);
    for (std::size_t i = 0; i < l.w.data().size(); ++i) {
      l.mom_w.data()[i] = momentum * l.mom_w.data()[i] + l.grad_w.data()[i];
      l.w.data()[i] -= lr * l.mom_w.data()[i];
    }
    for (std::size_t i = 0; i < l.b.size(); ++i) {
      l.mom_b[i] = momentum * l.mom_b[i] + l.grad_b[i];
      l.b[i] -= lr * l.mom_b[i];
    }
    ++layer_idx;
  });
}

void TrainConfig::validate() const {
  MLCL_CHECK(batch_size >= 2, "[TrainConfig] batch_size must be >= 2, got " << batch_size);
  MLCL_CHECK(learning_rate > 0.0, "[TrainConfig] learning rate must be positive");
  MLCL_CHECK(momentum >= 0.0 && momentum < 1.0,
             "[TrainConfig] momentum " << momentum << " outside [0,1)");
  MLCL_CHECK(aug_noise >= 0.0, "[TrainConfig] aug_noise must be >= 0");
  MLCL_CHECK(aug_dropout >= 0.0 && aug_dropout < 1.0,
             "[TrainConfig] aug_dropout " << aug_dropout << " outside [0,1)");
  double alpha_sum = 0.0;
  for (const auto& h : heads) {
    h.validate();
    alpha_sum += h.weight;
  }
  if (ce_mode) {
    MLCL_CHECK(alpha_sum <= 1.0 + 1e-9,
               "[TrainConfig] head weights sum to " << alpha_sum
                                                    << "; must be <= 1 in cross-entropy mode");
    MLCL_CHECK(!classifier_levels.empty(),
               "[TrainConfig] cross-entropy mode needs classifier_levels");
  } else {
    MLCL_CHECK(!heads.empty(), "[TrainConfig] contrastive mode needs at least one head");
    MLCL_CHECK(std::abs(alpha_sum - 1.0) <= 1e-9,
               "[TrainConfig] head weights sum to "
                   << alpha_sum << "; must be 1 without cross-entropy (Eq. 2 rule)");
  }
}

CrossEntropyResult grouped_cross_entropy(const Matrix& logits, const std::vector<int>& groups,
                                         const std::vector<MultiLevelLabel>& labels,
                                         const std::vector<std::size_t>& levels) {
  MLCL_CHECK(groups.size() == levels.size(),
             "[grouped_cross_entropy] group/level count mismatch");
  MLCL_CHECK(!groups.empty(), "[grouped_cross_entropy] no classifier groups");
  MLCL_CHECK(logits.rows() == labels.size(),
             "[grouped_cross_entropy] logits rows vs label count mismatch");
  CrossEntropyResult out;
  out.grad = Matrix(logits.rows(), logits.cols());
  const double group_w = 1.0 / static_cast<double>(groups.size());
  std::size_t offset = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::size_t width = static_cast<std::size_t>(groups[g]);
    Matrix sub(logits.rows(), width);
    std::vector<int> targets(logits.rows());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
      std::copy(logits.row(r) + offset, logits.row(r) + offset + width, sub.row(r));
      MLCL_CHECK(levels[g] < labels[r].n_levels(),
                 "[grouped_cross_entropy] level " << levels[g] << " out of range");
      targets[r] = labels[r].levels[levels[g]];
    }
    const CrossEntropyResult part = cross_entropy(sub, targets);
    out.loss += group_w * part.loss;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
      for (std::size_t c = 0; c < width; ++c) {
        out.grad(r, offset + c) = group_w * part.grad(r, c);
      }
    }
    offset += width;
  }
  MLCL_CHECK(offset == logits.cols(), "[grouped_cross_entropy] logits width "
                                          << logits.cols() << " != group total " << offset);
  return out;
}

BatchObjective batch_objective(const ForwardCache& cache,
                               const std::vector<MultiLevelLabel>& view_labels,
                               const TrainConfig& cfg, bool with_gradients) {
  MLCL_CHECK(cache.valid, "[batch_objective] missing forward cache");
  MLCL_CHECK(view_labels.size() == cache.x.rows(),
             "[batch_objective] " << view_labels.size() << " labels for " << cache.x.rows()
                                  << " views");
  BatchObjective out;
  double alpha_sum = 0.0;
  std::vector<std::pair<HeadConfig, double>> head_values;
  for (std::size_t h = 0; h < cfg.heads.size(); ++h) {
    const HeadConfig& hc = cfg.heads[h];
    alpha_sum += hc.weight;
    const auto batch = ProjectionBatch::unchecked(cache.projection(h));
    PositiveSet pos;
    double value = 0.0;
    if (hc.criterion.kind == HeadCriterion::Kind::Level) {
      pos = level_positive_set(view_labels, hc.criterion.level);
      value = head_loss(batch, pos, hc.temperature);
    } else {
      pos = global_positive_set(view_labels, hc.criterion.threshold);
      value = global_head_loss(batch, pos, hc.temperature);
    }
    out.report.per_head.emplace_back(h, value);
    head_values.emplace_back(hc, value);
    if (with_gradients) {
      Matrix g = hc.criterion.kind == HeadCriterion::Kind::Level
                     ? head_loss_gradient(batch, pos, hc.temperature)
                     : global_head_loss_gradient(batch, pos, hc.temperature);
      for (auto& v : g.data()) v *= hc.weight;
      out.head_gradients.push_back(std::move(g));
    }
  }
  std::optional<double> ce_value;
  if (cfg.ce_mode) {
    std::vector<int> groups;
    for (std::size_t level : cfg.classifier_levels) {
      groups.push_back(view_labels.front().cardinalities[level]);
    }
    CrossEntropyResult ce =
        grouped_cross_entropy(cache.logits, groups, view_labels, cfg.classifier_levels);
    ce_value = ce.loss;
    out.report.ce = ce.loss;
    if (with_gradients) {
      const double ce_w = 1.0 - alpha_sum;
      for (auto& v : ce.grad.data()) v *= ce_w;
      out.ce_gradient = std::move(ce.grad);
      out.has_ce = true;
    }
  }
  out.report.total = combined_loss(head_values, ce_value);
  return out;
}

Matrix embed(const ModelParams& params, const Matrix& x) {
  MLCL_CHECK(x.cols() == params.shape.input_dim,
             "[embed] input dim " << x.cols() << " != model input dim "
                                  << params.shape.input_dim);
  return dense_forward(tanh_matrix(dense_forward(x, params.enc1)), params.enc2);
}

namespace {

NetShape shape_for(const Dataset& data, const TrainConfig& cfg) {
  NetShape shape;
  shape.input_dim = data.dim();
  shape.encoder_hidden = cfg.encoder_hidden;
  shape.embed_dim = cfg.embed_dim;
  shape.head_hidden = cfg.head_hidden;
  shape.proj_dim = cfg.proj_dim;
  shape.n_heads = cfg.heads.size();
  if (cfg.ce_mode) {
    for (std::size_t level : cfg.classifier_levels) {
      MLCL_CHECK(level < data.labels.front().n_levels(),
                 "[train] classifier level " << level << " out of range");
      shape.classifier_groups.push_back(data.labels.front().cardinalities[level]);
    }
  }
  return shape;
}

}  // namespace

TrainResult train_from(ModelParams params, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  MLCL_CHECK(!data.labels.empty(), "[train] empty dataset");
  MLCL_CHECK(data.dim() == params.shape.input_dim,
             "[train] dataset dim " << data.dim() << " != model input dim "
                                    << params.shape.input_dim);
  const std::size_t n_levels = data.labels.front().n_levels();
  for (const auto& h : cfg.heads) {
    if (h.criterion.kind == HeadCriterion::Kind::Level) {
      MLCL_CHECK(h.criterion.level < n_levels,
                 "[train] head level " << h.criterion.level << " out of range (L=" << n_levels
                                       << ")");
    }
  }

  TrainResult result{std::move(params), {}};
  Rng rng(Rng::mix(cfg.seed, kTrainLoopStream));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    fisher_yates(order, rng);
    std::vector<double> head_sums(cfg.heads.size(), 0.0);
    double ce_sum = 0.0;
    std::size_t n_batches = 0;

    for (std::size_t start = 0; start < data.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, data.size() - start);
      if (count < 2) break;  // short remainder dropped

      // Views of sample j land in rows 2j, 2j+1 (or row j single-view); both
      // augmentation draws for a sample are consecutive.
      const std::size_t views_per = cfg.two_views ? 2 : 1;
      Matrix x(count * views_per, data.dim());
      std::vector<MultiLevelLabel> batch_labels;
      batch_labels.reserve(count);
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t src = order[start + j];
        for (std::size_t v = 0; v < views_per; ++v) {
          const auto view =
              augment(data.features.row(src), data.dim(), cfg.aug_noise, cfg.aug_dropout, rng);
          std::copy(view.begin(), view.end(), x.row(views_per * j + v));
        }
        batch_labels.push_back(data.labels[src]);
      }
      const std::vector<MultiLevelLabel> view_labels =
          cfg.two_views ? expand_to_views(batch_labels).labels : batch_labels;

      const ForwardCache cache = forward(result.params, x);
      BatchObjective obj = batch_objective(cache, view_labels, cfg, /*with_gradients=*/true);
      backward(result.params, cache, obj.head_gradients,
               obj.has_ce ? &obj.ce_gradient : nullptr,
               /*ce_into_encoder=*/cfg.ce_mode);
      sgd_step(result.params, cfg.learning_rate, cfg.momentum);

      for (std::size_t h = 0; h < cfg.heads.size(); ++h) {
        head_sums[h] += obj.report.per_head[h].second;
      }
      if (obj.report.ce) ce_sum += *obj.report.ce;
      ++n_batches;
    }

    MLCL_CHECK(n_batches > 0, "[train] no trainable batch (dataset smaller than 2 samples)");
    LossReport epoch_report;
    std::vector<std::pair<HeadConfig, double>> head_values;
    for (std::size_t h = 0; h < cfg.heads.size(); ++h) {
      const double mean = head_sums[h] / static_cast<double>(n_batches);
      epoch_report.per_head.emplace_back(h, mean);
      head_values.emplace_back(cfg.heads[h], mean);
    }
    std::optional<double> ce_mean;
    if (cfg.ce_mode) {
      ce_mean = ce_sum / static_cast<double>(n_batches);
      epoch_report.ce = ce_mean;
    }
    epoch_report.total = combined_loss(head_values, ce_mean);
    result.history.push_back(std::move(epoch_report));
  }
  return result;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  data.validate();
  MLCL_CHECK(!data.labels.empty(), "[train] empty dataset");
  return train_from(ModelParams::init(shape_for(data, cfg), cfg.seed), data, cfg);
}

// ---------------------------------------------------------------------------
// Checkpoint I/O. Raw doubles are written as-is; this targets little-endian
// hosts, which is the documented on-disk layout.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'M', 'L', 'C', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  MLCL_RUNTIME_CHECK(in.good(), "[load_checkpoint] truncated checkpoint " << path);
  return v;
}

void write_layer(std::ofstream& out, const DenseLayer& l) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(l.w.rows()));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(l.w.cols()));
  out.write(reinterpret_cast<const char*>(l.w.data().data()),
            static_cast<std::streamsize>(l.w.data().size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(l.b.data()),
            static_cast<std::streamsize>(l.b.size() * sizeof(double)));
}

void read_layer(std::ifstream& in, DenseLayer& l, const std::string& path) {
  const auto rows = read_pod<std::uint32_t>(in, path);
  const auto cols = read_pod<std::uint32_t>(in, path);
  MLCL_RUNTIME_CHECK(rows == l.w.rows() && cols == l.w.cols(),
                     "[load_checkpoint] layer shape " << rows << "x" << cols
                                                      << " does not match model ("
                                                      << l.w.rows() << "x" << l.w.cols()
                                                      << ") in " << path);
  in.read(reinterpret_cast<char*>(l.w.data().data()),
          static_cast<std::streamsize>(l.w.data().size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(l.b.data()),
          static_cast<std::streamsize>(l.b.size() * sizeof(double)));
  MLCL_RUNTIME_CHECK(in.good(), "[load_checkpoint] truncated checkpoint " << path);
}

}  // namespace

void save_checkpoint(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  MLCL_RUNTIME_CHECK(out.good(), "[save_checkpoint] cannot open " << path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.input_dim));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.encoder_hidden));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.embed_dim));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.head_hidden));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.proj_dim));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.shape.n_heads));
  write_pod<std::uint32_t>(out,
                           static_cast<std::uint32_t>(params.shape.classifier_groups.size()));
  for (int g : params.shape.classifier_groups) {
    write_pod<std::int32_t>(out, static_cast<std::int32_t>(g));
  }
  write_pod<std::uint64_t>(out, params.init_seed);
  params.for_each_layer([&](const DenseLayer& l) { write_layer(out, l); });
  MLCL_RUNTIME_CHECK(out.good(), "[save_checkpoint] write failed for " << path);
}

ModelParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  MLCL_RUNTIME_CHECK(in.good(), "[load_checkpoint] cannot open " << path);
  char magic[8];
  in.read(magic, sizeof(magic));
  MLCL_RUNTIME_CHECK(in.good() && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0,
                     "[load_checkpoint] " << path << " is not an MLCL checkpoint");
  const auto version = read_pod<std::uint32_t>(in, path);
  MLCL_RUNTIME_CHECK(version == kVersion,
                     "[load_checkpoint] unsupported checkpoint version " << version);
  NetShape shape;
  shape.input_dim = read_pod<std::uint32_t>(in, path);
  shape.encoder_hidden = read_pod<std::uint32_t>(in, path);
  shape.embed_dim = read_pod<std::uint32_t>(in, path);
  shape.head_hidden = read_pod<std::uint32_t>(in, path);
  shape.proj_dim = read_pod<std::uint32_t>(in, path);
  shape.n_heads = read_pod<std::uint32_t>(in, path);
  const auto n_groups = read_pod<std::uint32_t>(in, path);
  for (std::uint32_t g = 0; g < n_groups; ++g) {
    shape.classifier_groups.push_back(read_pod<std::int32_t>(in, path));
  }
  const auto seed = read_pod<std::uint64_t>(in, path);
  ModelParams params = ModelParams::init(shape, seed);
  params.for_each_layer([&](DenseLayer& l) { read_layer(in, l, path); });
  return params;
}

}  // namespace mlcl
