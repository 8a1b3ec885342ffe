#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stegduel/bits.hpp"
#include "stegduel/data.hpp"
#include "stegduel/errors.hpp"
#include "stegduel/image.hpp"
#include "stegduel/metrics.hpp"
#include "stegduel/networks.hpp"
#include "stegduel/optim.hpp"
#include "stegduel/parallel.hpp"
#include "stegduel/rng.hpp"
#include "stegduel/stego.hpp"
#include "stegduel/tensor.hpp"

namespace stegduel {

struct TrainConfig {
  double lambda_g = 0.7;
  double lambda_d = 1.0;
  double lambda_s = 0.1;
  double learning_rate = 2e-4;
  int batch_size = 4;
  int total_steps = 600;
  double embedding_rate_bpp = 0.1;
  std::uint64_t seed = 0;
  int eval_every = 100;

  void validate() const {
    for (double l : {lambda_g, lambda_d, lambda_s})
      if (!(l >= 0.0) || l > 1.0)
        throw ContractError("TrainConfig: lambda weights must be in [0,1]");
    if (!(learning_rate >= 0.0))
      throw ContractError("TrainConfig: learning_rate must be nonnegative");
    if (batch_size <= 0) throw ContractError("TrainConfig: batch_size must be positive");
    if (total_steps < 0) throw ContractError("TrainConfig: total_steps must be >= 0");
    if (!(embedding_rate_bpp > 0.0) || embedding_rate_bpp > 1.0)
      throw ContractError("TrainConfig: embedding_rate_bpp must be in (0,1]");
    if (eval_every <= 0) throw ContractError("TrainConfig: eval_every must be positive");
  }
};

/// One round-robin step: exactly one of the three networks was updated.
struct StepReport {
  int step = 0;
  char updated = '?';  // 'D', 'S' or 'G'
  double loss_g = 0.0;
  double loss_d = 0.0;  // decoder distance (the reported L_D)
  double loss_s = 0.0;
  double wall_seconds = 0.0;
};

// ---------------------------------------------------------------------------
// Losses. The graph-building forms are what training differentiates; the
// plain-double overloads are the same computations evaluated on constants.
// Probabilities are clamped to [1e-12, 1-1e-12] before any logarithm.
// ---------------------------------------------------------------------------

constexpr double kProbClamp = 1e-12;

namespace detail {

/// mean over elements of -( t*ln(p) + (1-t)*ln(1-p) ) with constant targets.
inline Tensor bce_t(const Tensor& probs, const Tensor& targets) {
  Tensor pc = clamp(probs, kProbClamp, 1.0 - kProbClamp);
  Tensor one = Tensor::scalar(1.0);
  Tensor term = add(mul(targets, log(pc)), mul(sub(one, targets), log(sub(one, pc))));
  return mul(mean(term), Tensor::scalar(-1.0));
}

inline Tensor bce_uniform_t(const Tensor& probs, double target) {
  return bce_t(probs, Tensor::full(probs.shape(), target));
}

/// Euclidean norm of a tensor.
inline Tensor l2_norm_t(const Tensor& v) { return sqrt(sum(mul(v, v))); }

/// Chain scalar-ish tensors into a single [1,n] row.
inline Tensor row_concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ContractError("row_concat: empty batch");
  Tensor out = reshape(parts[0], {1, parts[0].numel()});
  for (std::size_t i = 1; i < parts.size(); ++i)
    out = concat(out, reshape(parts[i], {1, parts[i].numel()}), 1);
  return out;
}

inline Tensor mean_of(const std::vector<Tensor>& scalars) {
  return mean(row_concat(scalars));
}

}  // namespace detail

/// Eq.-style decoder distance ||m - m'||_2 between the {0,1} message vector
/// and the decoded probability vector.
inline Tensor loss_decoder_t(const Tensor& message01, const Tensor& decoded) {
  detail::check_same_shape(message01, decoded, "loss_decoder");
  return detail::l2_norm_t(sub(message01, decoded));
}

inline double loss_decoder(const BitMessage& message,
                           const std::vector<double>& decoded) {
  if (message.size() != decoded.size())
    throw DimensionError("loss_decoder: " + std::to_string(message.size()) +
                         " message bits vs " + std::to_string(decoded.size()) +
                         " decoded values");
  NoGradGuard no_grad;
  std::vector<double> m(message.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = message[i];
  return loss_decoder_t(Tensor::from_data({1, m.size()}, m),
                        Tensor::from_data({1, m.size()}, decoded))
      .item();
}

/// Binary cross-entropy over the combined batch, covers labelled 1 and
/// stego images labelled 0.
inline Tensor loss_steganalyzer_t(const Tensor& cover_probs,
                                  const Tensor& stego_probs) {
  const std::size_t nc = cover_probs.numel(), ns = stego_probs.numel();
  if (nc == 0 || ns == 0)
    throw ContractError("loss_steganalyzer: both batches must be nonempty");
  Tensor probs = concat(reshape(cover_probs, {1, nc}),
                        reshape(stego_probs, {1, ns}), 1);
  std::vector<double> t(nc + ns, 0.0);
  for (std::size_t i = 0; i < nc; ++i) t[i] = 1.0;
  return detail::bce_t(probs, Tensor::from_data({1, nc + ns}, std::move(t)));
}

inline double loss_steganalyzer(const std::vector<double>& cover_probs,
                                const std::vector<double>& stego_probs) {
  if (cover_probs.empty() || stego_probs.empty())
    throw ContractError("loss_steganalyzer: both batches must be nonempty");
  NoGradGuard no_grad;
  return loss_steganalyzer_t(
             Tensor::from_data({1, cover_probs.size()}, cover_probs),
             Tensor::from_data({1, stego_probs.size()}, stego_probs))
      .item();
}

/// Binary cross-entropy for the real/fake head: real images labelled 1,
/// generated images labelled 0.
inline Tensor loss_realfake_t(const Tensor& probs_on_real,
                              const Tensor& probs_on_generated) {
  return loss_steganalyzer_t(probs_on_real, probs_on_generated);
}

inline double loss_realfake(const std::vector<double>& probs_on_real,
                            const std::vector<double>& probs_on_generated) {
  if (probs_on_real.empty() || probs_on_generated.empty())
    throw ContractError("loss_realfake: both batches must be nonempty");
  return loss_steganalyzer(probs_on_real, probs_on_generated);
}

/// Generator objective: lambda_g * ||C - S||_2 (internal pixel domain)
/// + lambda_d * decoder loss + lambda_s * (steganalyzer fool + real/fake fool).
/// The fool terms push stego toward the "cover"/"real" targets, the
/// non-saturating reading of the game.
inline double loss_generator(const Tensor& cover, const Tensor& stego,
                             double decoder_loss,
                             double steganalyzer_fool_loss,
                             double realfake_fool_loss, double lambda_g,
                             double lambda_d, double lambda_s) {
  detail::check_same_shape(cover, stego, "loss_generator");
  NoGradGuard no_grad;
  const double dist = detail::l2_norm_t(sub(cover, stego)).item();
  return lambda_g * dist + lambda_d * decoder_loss +
         lambda_s * (steganalyzer_fool_loss + realfake_fool_loss);
}

// ---------------------------------------------------------------------------
// The alternating three-party game.
// ---------------------------------------------------------------------------

namespace detail {

constexpr std::uint64_t kMsgSalt = 0x6d736773ULL;    // "msgs"
constexpr std::uint64_t kBatchSalt = 0x62617463ULL;  // "batc"
constexpr std::uint64_t kEvalSalt = 0x6576616cULL;   // "eval"
constexpr std::uint64_t kStegoSalt = 0x7374656bULL;  // supervised stego keys

/// Everything one game step needs, already wired into whatever graph mode the
/// round-robin slot requires.
struct BatchGraph {
  Tensor dec_loss;    // mean decoder distance over the batch
  Tensor rf_loss;     // real/fake BCE (covers real, stegos generated)
  Tensor steg_loss;   // Eq.-6 BCE (covers vs stegos)
  Tensor gen_loss;    // full generator objective
  double dist_value = 0.0;
  double steg_fool_value = 0.0;
  double rf_fool_value = 0.0;
};

template <class Fn>
auto run_with_grad(bool grad, Fn&& fn) {
  if (grad) return fn();
  NoGradGuard no_grad;
  return fn();
}

inline BatchGraph build_game_graph(Checkpoint& state,
                                   const std::vector<const GrayImage*>& batch,
                                   const TrainConfig& cfg, int step_index,
                                   int mode) {
  const NetConfig& net = state.config;
  const std::size_t k = payload_bits(net.image_side, cfg.embedding_rate_bpp);
  if (k > static_cast<std::size_t>(net.message_len))
    throw ContractError("train_step: embedding rate needs " + std::to_string(k) +
                        " bits but the model decodes only " +
                        std::to_string(net.message_len));

  const bool gen_grad = mode == 2;
  const bool disc_grad = mode == 0 || mode == 2;
  const bool steg_grad = mode == 1 || mode == 2;

  std::vector<Tensor> dec_losses, dist_norms;
  std::vector<Tensor> p_real_on_cover, p_rf_on_stego;
  std::vector<Tensor> p_steg_on_cover, p_steg_on_stego;

  const std::uint64_t step_seed =
      derive_seed(cfg.seed, kMsgSalt + static_cast<std::uint64_t>(step_index));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const BitMessage msg = sample_message(k, derive_seed(step_seed, i));
    Tensor cover = image_to_tensor(*batch[i]);
    Tensor msg_pm1 = message_to_tensor(msg, net.message_len);

    Tensor stego = run_with_grad(gen_grad, [&] {
      return generator_forward(net, state.gen, cover, msg_pm1);
    });
    DiscriminatorOut on_stego = run_with_grad(disc_grad, [&] {
      return discriminator_forward(net, state.disc, stego);
    });
    DiscriminatorOut on_cover = run_with_grad(disc_grad, [&] {
      return discriminator_forward(net, state.disc, cover);
    });
    Tensor s_cover = run_with_grad(steg_grad, [&] {
      return steganalyzer_forward(net, state.steg, cover);
    });
    Tensor s_stego = run_with_grad(steg_grad, [&] {
      return steganalyzer_forward(net, state.steg, stego);
    });

    // Active-prefix mask: bits beyond the embedding rate do not contribute.
    std::vector<double> m01(static_cast<std::size_t>(net.message_len), 0.0);
    std::vector<double> mask(static_cast<std::size_t>(net.message_len), 0.0);
    for (std::size_t b = 0; b < k; ++b) {
      m01[b] = msg[b];
      mask[b] = 1.0;
    }
    const std::size_t msg_len = m01.size();
    Tensor mask_t = Tensor::from_data({1, msg_len}, std::move(mask));
    Tensor m01_t = Tensor::from_data({1, msg_len}, std::move(m01));
    dec_losses.push_back(
        l2_norm_t(mul(mask_t, sub(m01_t, on_stego.decoded))));
    dist_norms.push_back(l2_norm_t(sub(cover, stego)));
    p_real_on_cover.push_back(on_cover.p_real);
    p_rf_on_stego.push_back(on_stego.p_real);
    p_steg_on_cover.push_back(s_cover);
    p_steg_on_stego.push_back(s_stego);
  }

  BatchGraph g;
  g.dec_loss = mean_of(dec_losses);
  g.rf_loss = loss_realfake_t(row_concat(p_real_on_cover), row_concat(p_rf_on_stego));
  g.steg_loss =
      loss_steganalyzer_t(row_concat(p_steg_on_cover), row_concat(p_steg_on_stego));

  Tensor dist = mean_of(dist_norms);
  Tensor steg_fool = bce_uniform_t(row_concat(p_steg_on_stego), 1.0);
  Tensor rf_fool = bce_uniform_t(row_concat(p_rf_on_stego), 1.0);
  g.dist_value = dist.item();
  g.steg_fool_value = steg_fool.item();
  g.rf_fool_value = rf_fool.item();
  g.gen_loss = add(add(mul(dist, Tensor::scalar(cfg.lambda_g)),
                       mul(g.dec_loss, Tensor::scalar(cfg.lambda_d))),
                   mul(add(steg_fool, rf_fool), Tensor::scalar(cfg.lambda_s)));
  return g;
}

}  // namespace detail

/// Round-robin by step_index mod 3: (0) discriminator on decoder + real/fake
/// loss, (1) steganalyzer on the cover-vs-stego BCE, (2) generator on the
/// weighted objective. Exactly one network's parameters change.
inline StepReport train_step(Checkpoint& state,
                             const std::vector<const GrayImage*>& batch,
                             const TrainConfig& cfg, int step_index) {
  const auto t0 = std::chrono::steady_clock::now();
  if (batch.empty()) throw ContractError("train_step: empty batch");
  cfg.validate();
  const int mode = step_index % 3;

  auto zero_all = [&state] {
    for (auto& t : state.gen.trainable()) t.zero_grad();
    for (auto& t : state.disc.trainable()) t.zero_grad();
    for (auto& t : state.steg.trainable()) t.zero_grad();
  };
  zero_all();

  detail::BatchGraph g = detail::build_game_graph(state, batch, cfg, step_index, mode);

  StepReport report;
  report.step = step_index;
  report.loss_d = g.dec_loss.item();
  report.loss_s = g.steg_loss.item();
  report.loss_g = g.gen_loss.item();

  if (mode == 0) {
    report.updated = 'D';
    backward(add(g.dec_loss, g.rf_loss));
    auto params = state.disc.trainable();
    rmsprop_step(params, state.opt_disc, cfg.learning_rate);
  } else if (mode == 1) {
    report.updated = 'S';
    backward(g.steg_loss);
    auto params = state.steg.trainable();
    rmsprop_step(params, state.opt_steg, cfg.learning_rate);
  } else {
    report.updated = 'G';
    backward(g.gen_loss);
    auto params = state.gen.trainable();
    rmsprop_step(params, state.opt_gen, cfg.learning_rate);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

/// Pure evaluation pass over a held-out set: mean PSNR between covers and
/// their generated stegos, decode-head bit accuracy and exact-message rate at
/// the active embedding rate, and steganalyzer detection accuracy at 0.5.
inline MetricsRecord evaluate(const Checkpoint& state, const Dataset& dataset,
                              const TrainConfig& cfg) {
  if (dataset.size() == 0) throw ContractError("evaluate: empty dataset");
  const NetConfig& net = state.config;
  const std::size_t k = payload_bits(net.image_side, cfg.embedding_rate_bpp);
  if (k > static_cast<std::size_t>(net.message_len))
    throw ContractError("evaluate: embedding rate needs " + std::to_string(k) +
                        " bits but the model decodes only " +
                        std::to_string(net.message_len));

  const std::size_t n = dataset.size();
  std::vector<double> psnrs(n), s_on_cover(n), s_on_stego(n);
  std::vector<std::size_t> bit_errors(n);
  std::vector<std::uint8_t> exact(n);

  const std::uint64_t eval_seed = derive_seed(cfg.seed, detail::kEvalSalt);
  parallel_for(n, [&](std::size_t i) {
    NoGradGuard no_grad;
    const GrayImage& cover_img = dataset.images[i];
    const BitMessage msg = sample_message(k, derive_seed(eval_seed, i));
    Tensor cover = image_to_tensor(cover_img);
    Tensor stego = generator_forward(net, state.gen, cover,
                                     message_to_tensor(msg, net.message_len));
    const GrayImage stego_img = tensor_to_image(stego);
    psnrs[i] = psnr(cover_img, stego_img);

    const auto decoded = discriminator_forward(net, state.disc, stego).decoded;
    std::size_t errors = 0;
    for (std::size_t b = 0; b < k; ++b)
      errors += (decoded.data()[b] >= 0.5 ? 1 : 0) != msg[b];
    bit_errors[i] = errors;
    exact[i] = errors == 0;

    s_on_cover[i] = steganalyzer_forward(net, state.steg, cover).item();
    s_on_stego[i] = steganalyzer_forward(net, state.steg, stego).item();
  });

  MetricsRecord rec;
  rec.embedding_rate_bpp = cfg.embedding_rate_bpp;
  double psnr_sum = 0.0;
  std::size_t total_errors = 0, total_exact = 0;
  for (std::size_t i = 0; i < n; ++i) {
    psnr_sum += psnrs[i];
    total_errors += bit_errors[i];
    total_exact += exact[i];
  }
  rec.psnr_db = psnr_sum / static_cast<double>(n);  // stays +inf if any pair is
  rec.bit_accuracy =
      1.0 - static_cast<double>(total_errors) / static_cast<double>(n * k);
  rec.message_exact_rate = static_cast<double>(total_exact) / static_cast<double>(n);

  std::vector<bool> labels(2 * n);
  std::vector<double> probs(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = true;
    probs[i] = s_on_cover[i];
    labels[n + i] = false;
    probs[n + i] = s_on_stego[i];
  }
  rec.detection_accuracy = detection_accuracy(labels, probs, 0.5);
  return rec;
}

/// Full alternating run. Snapshots (checkpoint deep copies) are taken at
/// every evaluation point so an overflow abort still leaves a good state.
struct TrainArtifacts {
  Checkpoint final_state;
  std::vector<StepReport> reports;
  std::vector<std::pair<int, MetricsRecord>> evals;  // (step, metrics)
  bool aborted = false;
  std::string abort_reason;
};

inline Checkpoint clone_checkpoint(const Checkpoint& src) {
  Checkpoint dst;
  dst.config = src.config;
  std::tie(dst.gen, dst.disc, dst.steg) = init_params(src.config, 0);
  dst.opt_gen = OptimState(dst.gen.trainable(), src.opt_gen.decay, src.opt_gen.epsilon);
  dst.opt_disc =
      OptimState(dst.disc.trainable(), src.opt_disc.decay, src.opt_disc.epsilon);
  dst.opt_steg =
      OptimState(dst.steg.trainable(), src.opt_steg.decay, src.opt_steg.epsilon);
  auto src_manifest = detail::checkpoint_manifest(src);
  auto dst_manifest = detail::checkpoint_manifest(dst);
  for (std::size_t i = 0; i < src_manifest.size(); ++i)
    dst_manifest[i].second.mutable_data() = src_manifest[i].second.data();
  dst.opt_gen.sq_avg = src.opt_gen.sq_avg;
  dst.opt_disc.sq_avg = src.opt_disc.sq_avg;
  dst.opt_steg.sq_avg = src.opt_steg.sq_avg;
  return dst;
}

inline TrainArtifacts run_training(const Dataset& train_set,
                                   const Dataset& test_set, const NetConfig& net,
                                   const TrainConfig& cfg) {
  net.validate();
  cfg.validate();
  if (train_set.size() == 0) throw ContractError("run_training: empty train set");
  if (train_set.side() != net.image_side)
    throw DimensionError("run_training: dataset side " +
                         std::to_string(train_set.side()) +
                         " != configured side " + std::to_string(net.image_side));

  TrainArtifacts art;
  art.final_state.config = net;
  std::tie(art.final_state.gen, art.final_state.disc, art.final_state.steg) =
      init_params(net, cfg.seed);
  art.final_state.opt_gen = OptimState(art.final_state.gen.trainable());
  art.final_state.opt_disc = OptimState(art.final_state.disc.trainable());
  art.final_state.opt_steg = OptimState(art.final_state.steg.trainable());

  Checkpoint last_good = clone_checkpoint(art.final_state);
  Rng batch_rng(derive_seed(cfg.seed, detail::kBatchSalt));

  for (int step = 0; step < cfg.total_steps; ++step) {
    std::vector<const GrayImage*> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    for (int b = 0; b < cfg.batch_size; ++b)
      batch.push_back(
          &train_set.images[batch_rng.next_below(train_set.size())]);
    try {
      art.reports.push_back(train_step(art.final_state, batch, cfg, step));
    } catch (const OverflowError& e) {
      art.aborted = true;
      art.abort_reason = e.what();
      art.final_state = std::move(last_good);
      return art;
    }
    const bool last = step + 1 == cfg.total_steps;
    if ((step + 1) % cfg.eval_every == 0 || last) {
      if (test_set.size() > 0)
        art.evals.emplace_back(step + 1, evaluate(art.final_state, test_set, cfg));
      last_good = clone_checkpoint(art.final_state);
    }
  }
  return art;
}

// ---------------------------------------------------------------------------
// Supervised steganalyzer training against a classical embedder (the
// comparison-detector regime): covers vs their LSB ±1 stegos.
// ---------------------------------------------------------------------------

/// One LSB ±1 stego per cover, fresh keyed message per image.
inline std::vector<GrayImage> make_lsb_stego_corpus(
    const std::vector<GrayImage>& covers, double bpp, std::uint64_t seed) {
  std::vector<GrayImage> stegos;
  stegos.reserve(covers.size());
  for (std::size_t i = 0; i < covers.size(); ++i) {
    if (!(bpp > 0.0) || bpp > 1.0)
      throw ContractError("make_lsb_stego_corpus: bpp must be in (0,1]");
    const auto k = static_cast<std::size_t>(
        std::floor(bpp * static_cast<double>(covers[i].pixel_count()) + 1e-9));
    const StegoKey key{derive_seed(seed, detail::kStegoSalt + i)};
    const BitMessage msg = sample_message(k, derive_seed(seed, i));
    stegos.push_back(lsb_matching_embed(covers[i], msg, key));
  }
  return stegos;
}

struct DetectorTrainArtifacts {
  Checkpoint state;
  std::vector<std::pair<int, double>> losses;  // (step, L_S)
  bool aborted = false;
  std::string abort_reason;
};

/// Detection accuracy of the trained steganalyzer over covers + stegos at
/// threshold 0.5.
inline double evaluate_detector(const Checkpoint& state,
                                const std::vector<GrayImage>& covers,
                                const std::vector<GrayImage>& stegos) {
  if (covers.empty() && stegos.empty())
    throw ContractError("evaluate_detector: empty input");
  const std::size_t n = covers.size() + stegos.size();
  std::vector<double> probs(n);
  std::vector<bool> labels(n);
  parallel_for(n, [&](std::size_t i) {
    NoGradGuard no_grad;
    const bool is_cover = i < covers.size();
    const GrayImage& img = is_cover ? covers[i] : stegos[i - covers.size()];
    probs[i] =
        steganalyzer_forward(state.config, state.steg, image_to_tensor(img)).item();
    labels[i] = is_cover;
  });
  return detection_accuracy(labels, probs, 0.5);
}

/// Train only the steganalyzer, Eq.-6 BCE on half-cover/half-stego batches.
inline DetectorTrainArtifacts train_steganalyzer_supervised(
    const std::vector<GrayImage>& covers, const std::vector<GrayImage>& stegos,
    const NetConfig& net, const TrainConfig& cfg) {
  net.validate();
  cfg.validate();
  if (covers.empty() || stegos.empty())
    throw ContractError("train_steganalyzer_supervised: empty corpus");

  DetectorTrainArtifacts art;
  art.state.config = net;
  std::tie(art.state.gen, art.state.disc, art.state.steg) =
      init_params(net, cfg.seed);
  art.state.opt_gen = OptimState(art.state.gen.trainable());
  art.state.opt_disc = OptimState(art.state.disc.trainable());
  art.state.opt_steg = OptimState(art.state.steg.trainable());

  Rng batch_rng(derive_seed(cfg.seed, detail::kBatchSalt));
  const int half = std::max(1, cfg.batch_size / 2);
  for (int step = 0; step < cfg.total_steps; ++step) {
    try {
      std::vector<Tensor> p_cover, p_stego;
      for (int b = 0; b < half; ++b) {
        const auto& c = covers[batch_rng.next_below(covers.size())];
        p_cover.push_back(
            steganalyzer_forward(net, art.state.steg, image_to_tensor(c)));
      }
      for (int b = 0; b < half; ++b) {
        const auto& s = stegos[batch_rng.next_below(stegos.size())];
        p_stego.push_back(
            steganalyzer_forward(net, art.state.steg, image_to_tensor(s)));
      }
      Tensor loss = loss_steganalyzer_t(detail::row_concat(p_cover),
                                        detail::row_concat(p_stego));
      art.losses.emplace_back(step, loss.item());
      for (auto& t : art.state.steg.trainable()) t.zero_grad();
      backward(loss);
      auto params = art.state.steg.trainable();
      rmsprop_step(params, art.state.opt_steg, cfg.learning_rate);
    } catch (const OverflowError& e) {
      art.aborted = true;
      art.abort_reason = e.what();
      return art;
    }
  }
  return art;
}

}  // namespace stegduel
