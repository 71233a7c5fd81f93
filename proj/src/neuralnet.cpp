// Copyright 2026 The Amity Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy at
// http://www.apache.org/licenses/LICENSE-2.0

#include "amity/neuralnet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amity/error.hpp"

namespace amity::nn {
namespace {

constexpr double kProbabilityFloor = 1e-12;

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Activations of one sequence, kept for the backward pass. Per-timestep
// quantities are flattened as [t * lstm_units + k].
struct SampleTrace {
  std::vector<textpipe::TokenId> ids;
  std::size_t steps = 0;
  std::vector<double> gate_i, gate_f, gate_g, gate_o;
  std::vector<double> cell, cell_tanh, hidden;
  std::vector<double> normalized;  // layer-norm output before gain/shift
  double inv_std = 0.0;
  std::vector<double> readout;  // gain * normalized + shift
  std::vector<double> dense_pre;
  std::vector<double> dense_out;  // relu, then dropout multipliers
  std::vector<double> probabilities;
};

void check_sequence(const ModelParams& p, const PaddedSequence& seq) {
  if (seq.true_len == 0) {
    fail(ErrorCode::AllPadding, "sequence has no tokens after padding");
  }
  if (seq.true_len > seq.ids.size()) {
    fail(ErrorCode::ShapeMismatch, "true_len exceeds sequence length");
  }
  const auto rows = p.embedding.rows();
  for (std::size_t t = 0; t < seq.true_len; ++t) {
    if (seq.ids[t] < 0 || static_cast<std::size_t>(seq.ids[t]) >= rows) {
      fail(ErrorCode::ShapeMismatch,
           "token id " + std::to_string(seq.ids[t]) + " outside embedding table of " +
               std::to_string(rows) + " rows");
    }
  }
}

// z[k] += sum_r v[r] * m(r, k)
void accumulate_vec_mat(std::span<const double> v, const Matrix& m, std::span<double> z) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double a = v[r];
    if (a == 0.0) continue;
    const auto row = m.row(r);
    for (std::size_t k = 0; k < m.cols(); ++k) z[k] += a * row[k];
  }
}

// out[r] += sum_k m(r, k) * d[k]
void accumulate_mat_vec(const Matrix& m, std::span<const double> d, std::span<double> out) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    double s = 0.0;
    for (std::size_t k = 0; k < m.cols(); ++k) s += row[k] * d[k];
    out[r] += s;
  }
}

// g(r, k) += a[r] * b[k]
void accumulate_outer(std::span<const double> a, std::span<const double> b, Matrix& g) {
  for (std::size_t r = 0; r < g.rows(); ++r) {
    if (a[r] == 0.0) continue;
    auto row = g.row(r);
    for (std::size_t k = 0; k < g.cols(); ++k) row[k] += a[r] * b[k];
  }
}

void add_into(std::span<const double> v, Matrix& bias) {
  auto dst = bias.values();
  for (std::size_t k = 0; k < v.size(); ++k) dst[k] += v[k];
}

void softmax_in_place(std::vector<double>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (auto& z : logits) {
    z = std::exp(z - peak);
    sum += z;
  }
  for (auto& z : logits) z /= sum;
}

void forward_sample(const ModelParams& p, const PaddedSequence& seq,
                    std::span<const double> dropout_row, SampleTrace& tr) {
  const auto& cfg = p.config;
  const std::size_t H = cfg.lstm_units;
  const std::size_t D = cfg.dense_units;
  const std::size_t L = seq.true_len;

  tr.ids.assign(seq.ids.begin(), seq.ids.begin() + static_cast<std::ptrdiff_t>(L));
  tr.steps = L;
  for (auto* v : {&tr.gate_i, &tr.gate_f, &tr.gate_g, &tr.gate_o, &tr.cell, &tr.cell_tanh,
                  &tr.hidden}) {
    v->assign(L * H, 0.0);
  }

  std::vector<double> zi(H), zf(H), zg(H), zo(H);
  const std::vector<double> zeros(H, 0.0);
  // Padded positions (t >= true_len) are never visited, so they cannot touch
  // the recurrent state.
  for (std::size_t t = 0; t < L; ++t) {
    const auto x = p.embedding.row(static_cast<std::size_t>(tr.ids[t]));
    std::span<const double> h_prev =
        t == 0 ? std::span<const double>(zeros)
               : std::span<const double>(tr.hidden.data() + (t - 1) * H, H);
    std::span<const double> c_prev =
        t == 0 ? std::span<const double>(zeros)
               : std::span<const double>(tr.cell.data() + (t - 1) * H, H);

    std::copy_n(p.b_input.values().begin(), H, zi.begin());
    std::copy_n(p.b_forget.values().begin(), H, zf.begin());
    std::copy_n(p.b_cell.values().begin(), H, zg.begin());
    std::copy_n(p.b_output.values().begin(), H, zo.begin());
    accumulate_vec_mat(x, p.w_input, zi);
    accumulate_vec_mat(x, p.w_forget, zf);
    accumulate_vec_mat(x, p.w_cell, zg);
    accumulate_vec_mat(x, p.w_output, zo);
    accumulate_vec_mat(h_prev, p.u_input, zi);
    accumulate_vec_mat(h_prev, p.u_forget, zf);
    accumulate_vec_mat(h_prev, p.u_cell, zg);
    accumulate_vec_mat(h_prev, p.u_output, zo);

    for (std::size_t k = 0; k < H; ++k) {
      const std::size_t at = t * H + k;
      const double i = sigmoid(zi[k]);
      const double f = sigmoid(zf[k]);
      const double g = std::tanh(zg[k]);
      const double o = sigmoid(zo[k]);
      const double c = f * c_prev[k] + i * g;
      const double tc = std::tanh(c);
      tr.gate_i[at] = i;
      tr.gate_f[at] = f;
      tr.gate_g[at] = g;
      tr.gate_o[at] = o;
      tr.cell[at] = c;
      tr.cell_tanh[at] = tc;
      tr.hidden[at] = o * tc;
    }
  }

  // Layer norm is per timestep; only the last real timestep feeds the head,
  // so it is the only one evaluated.
  const std::span<const double> h_last(tr.hidden.data() + (L - 1) * H, H);
  tr.normalized.resize(H);
  tr.readout.resize(H);
  tr.inv_std = layer_norm(h_last, p.ln_gain.values(), p.ln_shift.values(), cfg.layer_norm_epsilon,
                          tr.normalized, tr.readout);

  tr.dense_pre.assign(p.dense_b.values().begin(), p.dense_b.values().end());
  accumulate_vec_mat(tr.readout, p.dense_w, tr.dense_pre);
  tr.dense_out.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    const double a = std::max(0.0, tr.dense_pre[d]);
    tr.dense_out[d] = dropout_row.empty() ? a : a * dropout_row[d];
  }

  tr.probabilities.assign(p.out_b.values().begin(), p.out_b.values().end());
  accumulate_vec_mat(tr.dense_out, p.out_w, tr.probabilities);
  softmax_in_place(tr.probabilities);
}

void backward_sample(const ModelParams& p, const SampleTrace& tr, std::size_t label,
                     std::span<const double> dropout_row, double scale, ModelParams& g) {
  const auto& cfg = p.config;
  const std::size_t E = cfg.embedding_dim;
  const std::size_t H = cfg.lstm_units;
  const std::size_t D = cfg.dense_units;
  const std::size_t T = cfg.num_tags;

  std::vector<double> d_logits(T);
  for (std::size_t t = 0; t < T; ++t) {
    d_logits[t] = scale * (tr.probabilities[t] - (t == label ? 1.0 : 0.0));
  }
  add_into(d_logits, g.out_b);
  accumulate_outer(tr.dense_out, d_logits, g.out_w);

  std::vector<double> d_dense(D, 0.0);
  accumulate_mat_vec(p.out_w, d_logits, d_dense);
  for (std::size_t d = 0; d < D; ++d) {
    if (!dropout_row.empty()) d_dense[d] *= dropout_row[d];
    if (tr.dense_pre[d] <= 0.0) d_dense[d] = 0.0;
  }
  add_into(d_dense, g.dense_b);
  accumulate_outer(tr.readout, d_dense, g.dense_w);

  std::vector<double> d_readout(H, 0.0);
  accumulate_mat_vec(p.dense_w, d_dense, d_readout);

  std::vector<double> d_norm(H);
  double mean_dn = 0.0;
  double mean_dn_n = 0.0;
  for (std::size_t k = 0; k < H; ++k) {
    g.ln_gain(0, k) += d_readout[k] * tr.normalized[k];
    g.ln_shift(0, k) += d_readout[k];
    d_norm[k] = d_readout[k] * p.ln_gain(0, k);
    mean_dn += d_norm[k];
    mean_dn_n += d_norm[k] * tr.normalized[k];
  }
  mean_dn /= static_cast<double>(H);
  mean_dn_n /= static_cast<double>(H);

  std::vector<double> dh(H);
  for (std::size_t k = 0; k < H; ++k) {
    dh[k] = tr.inv_std * (d_norm[k] - mean_dn - tr.normalized[k] * mean_dn_n);
  }

  std::vector<double> dc(H, 0.0), dzi(H), dzf(H), dzg(H), dzo(H), dx(E), dh_prev(H);
  const std::vector<double> zeros(H, 0.0);
  for (std::size_t step = tr.steps; step-- > 0;) {
    const std::size_t base = step * H;
    std::span<const double> c_prev =
        step == 0 ? std::span<const double>(zeros)
                  : std::span<const double>(tr.cell.data() + base - H, H);
    std::span<const double> h_prev =
        step == 0 ? std::span<const double>(zeros)
                  : std::span<const double>(tr.hidden.data() + base - H, H);

    for (std::size_t k = 0; k < H; ++k) {
      const double i = tr.gate_i[base + k];
      const double f = tr.gate_f[base + k];
      const double gg = tr.gate_g[base + k];
      const double o = tr.gate_o[base + k];
      const double tc = tr.cell_tanh[base + k];
      const double d_o = dh[k] * tc;
      const double d_c = dc[k] + dh[k] * o * (1.0 - tc * tc);
      dzi[k] = d_c * gg * i * (1.0 - i);
      dzf[k] = d_c * c_prev[k] * f * (1.0 - f);
      dzg[k] = d_c * i * (1.0 - gg * gg);
      dzo[k] = d_o * o * (1.0 - o);
      dc[k] = d_c * f;
    }

    add_into(dzi, g.b_input);
    add_into(dzf, g.b_forget);
    add_into(dzg, g.b_cell);
    add_into(dzo, g.b_output);

    const auto id = static_cast<std::size_t>(tr.ids[step]);
    const auto x = p.embedding.row(id);
    accumulate_outer(x, dzi, g.w_input);
    accumulate_outer(x, dzf, g.w_forget);
    accumulate_outer(x, dzg, g.w_cell);
    accumulate_outer(x, dzo, g.w_output);
    accumulate_outer(h_prev, dzi, g.u_input);
    accumulate_outer(h_prev, dzf, g.u_forget);
    accumulate_outer(h_prev, dzg, g.u_cell);
    accumulate_outer(h_prev, dzo, g.u_output);

    std::fill(dx.begin(), dx.end(), 0.0);
    accumulate_mat_vec(p.w_input, dzi, dx);
    accumulate_mat_vec(p.w_forget, dzf, dx);
    accumulate_mat_vec(p.w_cell, dzg, dx);
    accumulate_mat_vec(p.w_output, dzo, dx);
    auto emb_row = g.embedding.row(id);
    for (std::size_t e = 0; e < E; ++e) emb_row[e] += dx[e];

    std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
    accumulate_mat_vec(p.u_input, dzi, dh_prev);
    accumulate_mat_vec(p.u_forget, dzf, dh_prev);
    accumulate_mat_vec(p.u_cell, dzg, dh_prev);
    accumulate_mat_vec(p.u_output, dzo, dh_prev);
    dh.swap(dh_prev);
  }
}

std::span<const double> mask_row(const Matrix* mask, std::size_t b) {
  if (mask == nullptr) return {};
  return mask->row(b);
}

void check_mask(const ModelParams& p, std::size_t batch, const Matrix* mask) {
  if (mask != nullptr && (mask->rows() != batch || mask->cols() != p.config.dense_units)) {
    fail(ErrorCode::ShapeMismatch, "dropout mask shape does not match batch x dense_units");
  }
}

void glorot_fill(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (auto& v : m.values()) v = rng.uniform(-limit, limit);
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size < 1 || embedding_dim < 1 || lstm_units < 1 || dense_units < 1 ||
      num_tags < 1) {
    fail(ErrorCode::SchemaError, "model dimensions must all be >= 1");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    fail(ErrorCode::SchemaError, "dropout_rate must lie in [0, 1)");
  }
  if (!(layer_norm_epsilon > 0.0)) {
    fail(ErrorCode::SchemaError, "layer_norm_epsilon must be positive");
  }
}

void TrainConfig::validate() const {
  if (batch_size < 1) fail(ErrorCode::SchemaError, "batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorCode::SchemaError, "learning_rate must be positive");
}

const std::array<ModelParams::TensorSlot, 19>& ModelParams::tensor_order() {
  static const std::array<TensorSlot, 19> order = {{
      {"embedding", &ModelParams::embedding},
      {"w_input", &ModelParams::w_input},
      {"w_forget", &ModelParams::w_forget},
      {"w_cell", &ModelParams::w_cell},
      {"w_output", &ModelParams::w_output},
      {"u_input", &ModelParams::u_input},
      {"u_forget", &ModelParams::u_forget},
      {"u_cell", &ModelParams::u_cell},
      {"u_output", &ModelParams::u_output},
      {"b_input", &ModelParams::b_input},
      {"b_forget", &ModelParams::b_forget},
      {"b_cell", &ModelParams::b_cell},
      {"b_output", &ModelParams::b_output},
      {"ln_gain", &ModelParams::ln_gain},
      {"ln_shift", &ModelParams::ln_shift},
      {"dense_w", &ModelParams::dense_w},
      {"dense_b", &ModelParams::dense_b},
      {"out_w", &ModelParams::out_w},
      {"out_b", &ModelParams::out_b},
  }};
  return order;
}

ModelParams ModelParams::zeros(const ModelConfig& c) {
  c.validate();
  ModelParams p;
  p.config = c;
  const std::size_t E = c.embedding_dim, H = c.lstm_units, D = c.dense_units, T = c.num_tags;
  p.embedding = Matrix(c.embedding_rows(), E);
  for (auto* m : {&p.w_input, &p.w_forget, &p.w_cell, &p.w_output}) *m = Matrix(E, H);
  for (auto* m : {&p.u_input, &p.u_forget, &p.u_cell, &p.u_output}) *m = Matrix(H, H);
  for (auto* m : {&p.b_input, &p.b_forget, &p.b_cell, &p.b_output, &p.ln_gain, &p.ln_shift}) {
    *m = Matrix(1, H);
  }
  p.dense_w = Matrix(H, D);
  p.dense_b = Matrix(1, D);
  p.out_w = Matrix(D, T);
  p.out_b = Matrix(1, T);
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each_tensor([&](std::string_view, const Matrix& m) { n += m.size(); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each_tensor([&](std::string_view, const Matrix& m) {
    for (double v : m.values()) ok = ok && std::isfinite(v);
  });
  return ok;
}

double layer_norm(std::span<const double> x, std::span<const double> gain,
                  std::span<const double> shift, double epsilon, std::span<double> normalized,
                  std::span<double> out) {
  const auto n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv_std = 1.0 / std::sqrt(var + epsilon);
  for (std::size_t k = 0; k < x.size(); ++k) {
    normalized[k] = (x[k] - mean) * inv_std;
    out[k] = gain[k] * normalized[k] + shift[k];
  }
  return inv_std;
}

ModelParams init_model(const ModelConfig& config, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(config);
  Rng rng(seed);
  for (auto* m : {&p.embedding, &p.w_input, &p.w_forget, &p.w_cell, &p.w_output, &p.u_input,
                  &p.u_forget, &p.u_cell, &p.u_output, &p.dense_w, &p.out_w}) {
    glorot_fill(*m, rng);
  }
  for (auto& v : p.embedding.row(textpipe::kPadId)) v = 0.0;
  p.b_forget.fill(1.0);
  p.ln_gain.fill(1.0);
  return p;
}

Matrix sample_dropout_mask(const ModelConfig& config, std::size_t batch, Rng& rng) {
  Matrix mask(batch, config.dense_units, 1.0);
  if (config.dropout_rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - config.dropout_rate);
  for (auto& v : mask.values()) v = rng.uniform01() < config.dropout_rate ? 0.0 : keep_scale;
  return mask;
}

Matrix forward_with_mask(const ModelParams& params, std::span<const PaddedSequence> batch,
                         const Matrix* dropout_mask) {
  check_mask(params, batch.size(), dropout_mask);
  Matrix probs(batch.size(), params.config.num_tags);
  SampleTrace trace;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    check_sequence(params, batch[b]);
    forward_sample(params, batch[b], mask_row(dropout_mask, b), trace);
    std::copy(trace.probabilities.begin(), trace.probabilities.end(), probs.row(b).begin());
  }
  return probs;
}

Matrix forward(const ModelParams& params, std::span<const PaddedSequence> batch, Mode mode,
               Rng* rng) {
  if (mode == Mode::infer) return forward_with_mask(params, batch, nullptr);
  if (rng == nullptr) fail(ErrorCode::BadRequest, "train-mode forward needs a generator");
  const Matrix mask = sample_dropout_mask(params.config, batch.size(), *rng);
  return forward_with_mask(params, batch, &mask);
}

double loss(const Matrix& probabilities, std::span<const std::size_t> labels) {
  if (probabilities.rows() != labels.size() || probabilities.rows() == 0) {
    fail(ErrorCode::ShapeMismatch, "loss: one label per probability row required");
  }
  double total = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (labels[b] >= probabilities.cols()) {
      fail(ErrorCode::ShapeMismatch, "loss: label outside tag range");
    }
    total -= std::log(std::max(probabilities(b, labels[b]), kProbabilityFloor));
  }
  return total / static_cast<double>(labels.size());
}

BackwardResult backward(const ModelParams& params, std::span<const PaddedSequence> batch,
                        std::span<const std::size_t> labels, const Matrix* dropout_mask) {
  if (batch.size() != labels.size() || batch.empty()) {
    fail(ErrorCode::ShapeMismatch, "backward: one label per sequence required");
  }
  check_mask(params, batch.size(), dropout_mask);
  BackwardResult result;
  result.gradients = ModelParams::zeros(params.config);
  result.probabilities = Matrix(batch.size(), params.config.num_tags);
  const double scale = 1.0 / static_cast<double>(batch.size());
  SampleTrace trace;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (labels[b] >= params.config.num_tags) {
      fail(ErrorCode::ShapeMismatch, "backward: label outside tag range");
    }
    check_sequence(params, batch[b]);
    const auto row = mask_row(dropout_mask, b);
    forward_sample(params, batch[b], row, trace);
    std::copy(trace.probabilities.begin(), trace.probabilities.end(),
              result.probabilities.row(b).begin());
    backward_sample(params, trace, labels[b], row, scale, result.gradients);
  }
  for (auto& v : result.gradients.embedding.row(textpipe::kPadId)) v = 0.0;
  result.loss = loss(result.probabilities, labels);
  return result;
}

AdamState AdamState::for_params(const ModelParams& params) {
  return {ModelParams::zeros(params.config), ModelParams::zeros(params.config), 0};
}

void apply_update(ModelParams& params, const ModelParams& gradients, AdamState& state,
                  const TrainConfig& config) {
  for (const auto& slot : ModelParams::tensor_order()) {
    const Matrix& g = gradients.*slot.member;
    if (!g.same_shape(params.*slot.member) || !g.same_shape(state.first_moment.*slot.member)) {
      fail(ErrorCode::ShapeMismatch, "apply_update: shape mismatch in " + std::string(slot.name));
    }
    for (double v : g.values()) {
      if (!std::isfinite(v)) {
        fail(ErrorCode::NonFiniteGradient, "non-finite gradient in " + std::string(slot.name));
      }
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (const auto& slot : ModelParams::tensor_order()) {
    auto w = (params.*slot.member).values();
    auto m = (state.first_moment.*slot.member).values();
    auto v = (state.second_moment.*slot.member).values();
    const auto g = (gradients.*slot.member).values();
    // The padding row of the embedding never moves.
    const std::size_t start =
        slot.member == &ModelParams::embedding ? params.config.embedding_dim : 0;
    for (std::size_t k = start; k < w.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      w[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

std::size_t TrainedModel::tag_index(std::string_view tag) const {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag) return i;
  }
  fail(ErrorCode::UnknownTag, "unknown tag \"" + std::string(tag) + "\"");
}

std::size_t argmax(std::span<const double> row) noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < row.size(); ++k) {
    if (row[k] > row[best]) best = k;
  }
  return best;
}

TrainResult train(const corpus::IntentCorpus& corpus, ModelConfig model_config,
                  const TrainConfig& train_config) {
  train_config.validate();
  const auto samples = corpus::explode_patterns(corpus);
  if (samples.empty()) fail(ErrorCode::EmptyCorpus, "corpus has no patterns to train on");
  corpus::validate(corpus);

  TrainResult result;
  TrainedModel& model = result.model;
  model.vocab = textpipe::fit_vocabulary(std::span<const corpus::LabeledSample>(samples));
  for (const auto& intent : corpus.intents) {
    model.tags.push_back(intent.tag);
    model.responses.push_back(intent.responses);
  }
  model_config.vocab_size = model.vocab.vocab_size();
  model_config.num_tags = model.tags.size();
  model.params = init_model(model_config, train_config.seed);

  std::vector<std::string> texts;
  std::vector<std::size_t> labels;
  for (const auto& s : samples) {
    texts.push_back(s.text);
    labels.push_back(s.tag_index);
  }
  const auto encoded = textpipe::encode_batch(model.vocab, texts);

  AdamState adam = AdamState::for_params(model.params);
  Rng rng(derive_seed(train_config.seed, 1));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<PaddedSequence> batch;
  std::vector<std::size_t> batch_labels;
  for (std::size_t epoch = 0; epoch < train_config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), start + train_config.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t k = start; k < end; ++k) {
        batch.push_back(encoded[order[k]]);
        batch_labels.push_back(labels[order[k]]);
      }
      const Matrix mask = sample_dropout_mask(model_config, batch.size(), rng);
      auto step = backward(model.params, batch, batch_labels, &mask);
      loss_sum += step.loss * static_cast<double>(batch.size());
      apply_update(model.params, step.gradients, adam, train_config);
    }

    const Matrix probs = forward_with_mask(model.params, encoded, nullptr);
    std::size_t correct = 0;
    for (std::size_t b = 0; b < labels.size(); ++b) {
      if (argmax(probs.row(b)) == labels[b]) ++correct;
    }
    result.history.push_back({loss_sum / static_cast<double>(samples.size()),
                              static_cast<double>(correct) / static_cast<double>(labels.size())});
  }
  return result;
}

Prediction predict(const TrainedModel& model, std::string_view text) {
  const auto ids = textpipe::encode(model.vocab, text);
  const std::array<PaddedSequence, 1> batch{textpipe::pad(ids, model.vocab.max_len())};
  const Matrix probs = forward_with_mask(model.params, batch, nullptr);
  Prediction out;
  out.probabilities.assign(probs.row(0).begin(), probs.row(0).end());
  out.tag_index = argmax(out.probabilities);
  out.confidence = out.probabilities[out.tag_index];
  return out;
}

double training_accuracy(const TrainedModel& model, const corpus::IntentCorpus& corpus) {
  const auto samples = corpus::explode_patterns(corpus);
  if (samples.empty()) fail(ErrorCode::EmptyCorpus, "corpus has no patterns");
  std::vector<std::string> texts;
  for (const auto& s : samples) texts.push_back(s.text);
  const Matrix probs =
      forward_with_mask(model.params, textpipe::encode_batch(model.vocab, texts), nullptr);
  std::size_t correct = 0;
  for (std::size_t b = 0; b < samples.size(); ++b) {
    if (model.tags.at(argmax(probs.row(b))) == corpus.intents.at(samples[b].tag_index).tag) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace amity::nn
