#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stegduel/bits.hpp"
#include "stegduel/errors.hpp"
#include "stegduel/optim.hpp"
#include "stegduel/rng.hpp"
#include "stegduel/tensor.hpp"

namespace stegduel {

/// Shared architecture knobs for all three networks. Four stride-2 stages fix
/// image_side to a multiple of 16; the deepest spatial block is side/16.
struct NetConfig {
  int image_side = 32;      // 64 mirrors the evaluation regime, 32 is desk scale
  int message_len = 102;    // capacity of the generator/decoder in bits
  int base_channels = 16;
  double leaky_slope = 0.2;

  int deep_side() const { return image_side / 16; }
  int pixels() const { return image_side * image_side; }

  void validate() const {
    if (image_side < 16 || image_side % 16 != 0)
      throw ContractError("NetConfig: image_side must be a positive multiple of 16");
    if (message_len <= 0 || message_len > pixels())
      throw ContractError("NetConfig: message_len must be in [1, side^2]");
    if (base_channels <= 0)
      throw ContractError("NetConfig: base_channels must be positive");
    if (!(leaky_slope > 0.0) || leaky_slope >= 1.0)
      throw ContractError("NetConfig: leaky_slope must be in (0,1)");
  }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

// The 5x5 "KV" high-pass residual kernel, coefficients over 12. It sums to
// zero, so constant images produce an exactly zero residual.
inline const std::array<double, 25>& kv_kernel_coefficients() {
  static const std::array<double, 25> k = {
      -1 / 12.0, 2 / 12.0,  -2 / 12.0,  2 / 12.0,  -1 / 12.0,
      2 / 12.0,  -6 / 12.0, 8 / 12.0,   -6 / 12.0, 2 / 12.0,
      -2 / 12.0, 8 / 12.0,  -12 / 12.0, 8 / 12.0,  -2 / 12.0,
      2 / 12.0,  -6 / 12.0, 8 / 12.0,   -6 / 12.0, 2 / 12.0,
      -1 / 12.0, 2 / 12.0,  -2 / 12.0,  2 / 12.0,  -1 / 12.0};
  return k;
}

/// Generator: FC over [flattened cover || message] into a deep feature block,
/// then four stride-2 transposed convolutions, tanh output.
struct GeneratorParams {
  Tensor fc_w, fc_b;
  Tensor t1_k, t1_b, t2_k, t2_b, t3_k, t3_b, t4_k, t4_b;

  std::vector<Tensor> trainable() {
    return {fc_w, fc_b, t1_k, t1_b, t2_k, t2_b, t3_k, t3_b, t4_k, t4_b};
  }
  std::vector<std::pair<std::string, Tensor>> named() const {
    return {{"g.fc_w", fc_w}, {"g.fc_b", fc_b}, {"g.t1_k", t1_k}, {"g.t1_b", t1_b},
            {"g.t2_k", t2_k}, {"g.t2_b", t2_b}, {"g.t3_k", t3_k}, {"g.t3_b", t3_b},
            {"g.t4_k", t4_k}, {"g.t4_b", t4_b}};
  }
};

/// Discriminator: four stride-2 convolutions, shared FC trunk, and two heads:
/// one real/fake logit and message_len decode logits.
struct DiscriminatorParams {
  Tensor c1_k, c1_b, c2_k, c2_b, c3_k, c3_b, c4_k, c4_b;
  Tensor fc_w, fc_b;
  Tensor rf_w, rf_b;
  Tensor dec_w, dec_b;

  std::vector<Tensor> trainable() {
    return {c1_k, c1_b, c2_k, c2_b, c3_k, c3_b, c4_k, c4_b,
            fc_w, fc_b, rf_w,  rf_b, dec_w, dec_b};
  }
  std::vector<std::pair<std::string, Tensor>> named() const {
    return {{"d.c1_k", c1_k}, {"d.c1_b", c1_b}, {"d.c2_k", c2_k}, {"d.c2_b", c2_b},
            {"d.c3_k", c3_k}, {"d.c3_b", c3_b}, {"d.c4_k", c4_k}, {"d.c4_b", c4_b},
            {"d.fc_w", fc_w}, {"d.fc_b", fc_b}, {"d.rf_w", rf_w}, {"d.rf_b", rf_b},
            {"d.dec_w", dec_w}, {"d.dec_b", dec_b}};
  }
};

/// Steganalyzer: fixed KV high-pass front end, four stride-2 convolutions,
/// two classification FC layers ending in one cover-vs-stego logit.
struct SteganalyzerParams {
  Tensor hp_kernel;  // fixed, never trained
  Tensor c1_k, c1_b, c2_k, c2_b, c3_k, c3_b, c4_k, c4_b;
  Tensor fc1_w, fc1_b, fc2_w, fc2_b;

  std::vector<Tensor> trainable() {
    return {c1_k, c1_b, c2_k, c2_b, c3_k, c3_b, c4_k, c4_b,
            fc1_w, fc1_b, fc2_w, fc2_b};
  }
  std::vector<std::pair<std::string, Tensor>> named() const {
    return {{"s.hp", hp_kernel}, {"s.c1_k", c1_k}, {"s.c1_b", c1_b},
            {"s.c2_k", c2_k},    {"s.c2_b", c2_b}, {"s.c3_k", c3_k},
            {"s.c3_b", c3_b},    {"s.c4_k", c4_k}, {"s.c4_b", c4_b},
            {"s.fc1_w", fc1_w},  {"s.fc1_b", fc1_b}, {"s.fc2_w", fc2_w},
            {"s.fc2_b", fc2_b}};
  }
};

namespace detail {

inline Tensor normal_tensor(Shape shape, Rng& rng, double stddev) {
  std::vector<double> d(shape_numel(shape));
  for (double& v : d) v = rng.next_normal(0.0, stddev);
  return Tensor::from_data(std::move(shape), std::move(d), true);
}

inline Tensor zeros_param(Shape shape) {
  return Tensor::zeros(std::move(shape), true);
}

}  // namespace detail

/// Weights ~ Normal(0, 0.02), biases 0, deterministic per seed.
inline std::tuple<GeneratorParams, DiscriminatorParams, SteganalyzerParams>
init_params(const NetConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  constexpr double kInitStd = 0.02;
  const std::size_t bc = static_cast<std::size_t>(cfg.base_channels);
  const std::size_t s0 = static_cast<std::size_t>(cfg.deep_side());
  const std::size_t deep = 8 * bc * s0 * s0;
  const std::size_t px = static_cast<std::size_t>(cfg.pixels());
  const std::size_t msg = static_cast<std::size_t>(cfg.message_len);
  const std::size_t hidden = 32 * bc;
  Rng rng(derive_seed(seed, 0x696e6974ULL));  // "init"

  GeneratorParams g;
  g.fc_w = detail::normal_tensor({px + msg, deep}, rng, kInitStd);
  g.fc_b = detail::zeros_param({1, deep});
  g.t1_k = detail::normal_tensor({8 * bc, 4 * bc, 4, 4}, rng, kInitStd);
  g.t1_b = detail::zeros_param({4 * bc});
  g.t2_k = detail::normal_tensor({4 * bc, 2 * bc, 4, 4}, rng, kInitStd);
  g.t2_b = detail::zeros_param({2 * bc});
  g.t3_k = detail::normal_tensor({2 * bc, bc, 4, 4}, rng, kInitStd);
  g.t3_b = detail::zeros_param({bc});
  g.t4_k = detail::normal_tensor({bc, 1, 4, 4}, rng, kInitStd);
  g.t4_b = detail::zeros_param({1});

  DiscriminatorParams d;
  d.c1_k = detail::normal_tensor({bc, 1, 4, 4}, rng, kInitStd);
  d.c1_b = detail::zeros_param({bc});
  d.c2_k = detail::normal_tensor({2 * bc, bc, 4, 4}, rng, kInitStd);
  d.c2_b = detail::zeros_param({2 * bc});
  d.c3_k = detail::normal_tensor({4 * bc, 2 * bc, 4, 4}, rng, kInitStd);
  d.c3_b = detail::zeros_param({4 * bc});
  d.c4_k = detail::normal_tensor({8 * bc, 4 * bc, 4, 4}, rng, kInitStd);
  d.c4_b = detail::zeros_param({8 * bc});
  d.fc_w = detail::normal_tensor({deep, hidden}, rng, kInitStd);
  d.fc_b = detail::zeros_param({1, hidden});
  d.rf_w = detail::normal_tensor({hidden, 1}, rng, kInitStd);
  d.rf_b = detail::zeros_param({1, 1});
  d.dec_w = detail::normal_tensor({hidden, msg}, rng, kInitStd);
  d.dec_b = detail::zeros_param({1, msg});

  SteganalyzerParams s;
  s.hp_kernel = Tensor::from_data(
      {1, 1, 5, 5},
      std::vector<double>(kv_kernel_coefficients().begin(),
                          kv_kernel_coefficients().end()),
      false);
  s.c1_k = detail::normal_tensor({bc, 1, 4, 4}, rng, kInitStd);
  s.c1_b = detail::zeros_param({bc});
  s.c2_k = detail::normal_tensor({2 * bc, bc, 4, 4}, rng, kInitStd);
  s.c2_b = detail::zeros_param({2 * bc});
  s.c3_k = detail::normal_tensor({4 * bc, 2 * bc, 4, 4}, rng, kInitStd);
  s.c3_b = detail::zeros_param({4 * bc});
  s.c4_k = detail::normal_tensor({8 * bc, 4 * bc, 4, 4}, rng, kInitStd);
  s.c4_b = detail::zeros_param({8 * bc});
  s.fc1_w = detail::normal_tensor({deep, hidden}, rng, kInitStd);
  s.fc1_b = detail::zeros_param({1, hidden});
  s.fc2_w = detail::normal_tensor({hidden, 1}, rng, kInitStd);
  s.fc2_b = detail::zeros_param({1, 1});

  return {std::move(g), std::move(d), std::move(s)};
}

/// Total trainable parameter count (the fixed high-pass kernel is excluded).
inline std::size_t parameter_count(const NetConfig& cfg) {
  auto [g, d, s] = init_params(cfg, 0);
  std::size_t total = 0;
  for (auto& t : g.trainable()) total += t.numel();
  for (auto& t : d.trainable()) total += t.numel();
  for (auto& t : s.trainable()) total += t.numel();
  return total;
}

namespace detail {

/// Fixed architectural gain per layer. The nets carry no batch normalization,
/// so the small DCGAN-style init would shrink activations to nothing through
/// four layers; scaling each pre-activation by roughly 1/(init_std*sqrt(fan_in))
/// keeps signal variance near unity end to end. The extra factor compensates
/// the variance lost to the leaky rectifier (He-style, slope 0.2). Pure
/// function of the architecture, never trained or persisted.
inline double layer_gain(std::size_t fan_in) {
  const double leaky_correction = std::sqrt(2.0 / (1.0 + 0.2 * 0.2));
  return leaky_correction / (0.02 * std::sqrt(static_cast<double>(fan_in)));
}

inline Tensor scaled(const Tensor& pre, std::size_t fan_in) {
  return mul(pre, Tensor::scalar(layer_gain(fan_in)));
}

inline void check_image_shape(const Tensor& image, const NetConfig& cfg,
                              const char* op) {
  const std::size_t side = static_cast<std::size_t>(cfg.image_side);
  const Shape expected{1, 1, side, side};
  if (image.shape() != expected)
    throw DimensionError(std::string(op) + ": image shape " +
                         shape_str(image.shape()) + " does not match config " +
                         shape_str(expected));
}

}  // namespace detail

/// Map bits to {-1,+1} in a [1,message_len] tensor; slots beyond the message
/// carry the neutral value 0, which is how sub-capacity embedding rates ride
/// a full-capacity model.
inline Tensor message_to_tensor(const BitMessage& message, int message_len) {
  if (message.size() > static_cast<std::size_t>(message_len))
    throw DimensionError("message_to_tensor: message of " +
                         std::to_string(message.size()) +
                         " bits exceeds model capacity " +
                         std::to_string(message_len));
  std::vector<double> d(static_cast<std::size_t>(message_len), 0.0);
  for (std::size_t i = 0; i < message.size(); ++i)
    d[i] = message[i] ? 1.0 : -1.0;
  return Tensor::from_data({1, static_cast<std::size_t>(message_len)},
                           std::move(d));
}

inline Tensor generator_forward(const NetConfig& cfg, const GeneratorParams& p,
                                const Tensor& cover, const Tensor& message_pm1) {
  detail::check_image_shape(cover, cfg, "generator_forward");
  if (message_pm1.shape() !=
      Shape{1, static_cast<std::size_t>(cfg.message_len)})
    throw DimensionError("generator_forward: message shape " +
                         shape_str(message_pm1.shape()) + " != [1," +
                         std::to_string(cfg.message_len) + "]");
  const std::size_t bc = static_cast<std::size_t>(cfg.base_channels);
  const std::size_t s0 = static_cast<std::size_t>(cfg.deep_side());

  const std::size_t fc_fan = static_cast<std::size_t>(cfg.pixels()) +
                             static_cast<std::size_t>(cfg.message_len);
  // Transposed stride-2 4x4 kernels hit each output from (k/stride)^2 taps.
  const std::size_t taps = 4;

  Tensor x = concat(reshape(cover, {1, static_cast<std::size_t>(cfg.pixels())}),
                    message_pm1, 1);
  Tensor h = leaky_relu(
      detail::scaled(add(matmul(x, p.fc_w), p.fc_b), fc_fan), cfg.leaky_slope);
  h = reshape(h, {1, 8 * bc, s0, s0});
  h = leaky_relu(detail::scaled(bias_add(conv2d_transpose(h, p.t1_k, 2, 1), p.t1_b),
                                8 * bc * taps),
                 cfg.leaky_slope);
  h = leaky_relu(detail::scaled(bias_add(conv2d_transpose(h, p.t2_k, 2, 1), p.t2_b),
                                4 * bc * taps),
                 cfg.leaky_slope);
  h = leaky_relu(detail::scaled(bias_add(conv2d_transpose(h, p.t3_k, 2, 1), p.t3_b),
                                2 * bc * taps),
                 cfg.leaky_slope);
  return tanh(detail::scaled(bias_add(conv2d_transpose(h, p.t4_k, 2, 1), p.t4_b),
                             bc * taps));
}

struct DiscriminatorOut {
  Tensor p_real;   // [1,1] probability the image is a real (non-generated) one
  Tensor decoded;  // [1,message_len] per-bit probabilities; threshold at 0.5
};

inline DiscriminatorOut discriminator_forward(const NetConfig& cfg,
                                              const DiscriminatorParams& p,
                                              const Tensor& image) {
  detail::check_image_shape(image, cfg, "discriminator_forward");
  const std::size_t bc = static_cast<std::size_t>(cfg.base_channels);
  const std::size_t s0 = static_cast<std::size_t>(cfg.deep_side());

  Tensor h = leaky_relu(
      detail::scaled(bias_add(conv2d(image, p.c1_k, 2, 1), p.c1_b), 16),
      cfg.leaky_slope);
  h = leaky_relu(detail::scaled(bias_add(conv2d(h, p.c2_k, 2, 1), p.c2_b), 16 * bc),
                 cfg.leaky_slope);
  h = leaky_relu(
      detail::scaled(bias_add(conv2d(h, p.c3_k, 2, 1), p.c3_b), 16 * 2 * bc),
      cfg.leaky_slope);
  h = leaky_relu(
      detail::scaled(bias_add(conv2d(h, p.c4_k, 2, 1), p.c4_b), 16 * 4 * bc),
      cfg.leaky_slope);
  h = reshape(h, {1, 8 * bc * s0 * s0});
  h = leaky_relu(
      detail::scaled(add(matmul(h, p.fc_w), p.fc_b), 8 * bc * s0 * s0),
      cfg.leaky_slope);
  return {sigmoid(detail::scaled(add(matmul(h, p.rf_w), p.rf_b), 32 * bc)),
          sigmoid(detail::scaled(add(matmul(h, p.dec_w), p.dec_b), 32 * bc))};
}

/// Output is the probability the image is a cover (1 = cover, 0 = stego).
inline Tensor steganalyzer_forward(const NetConfig& cfg,
                                   const SteganalyzerParams& p,
                                   const Tensor& image) {
  detail::check_image_shape(image, cfg, "steganalyzer_forward");
  const std::size_t bc = static_cast<std::size_t>(cfg.base_channels);
  const std::size_t s0 = static_cast<std::size_t>(cfg.deep_side());

  Tensor h = conv2d(image, p.hp_kernel, 1, 2);  // size-preserving residual
  h = leaky_relu(detail::scaled(bias_add(conv2d(h, p.c1_k, 2, 1), p.c1_b), 16),
                 cfg.leaky_slope);
  h = leaky_relu(detail::scaled(bias_add(conv2d(h, p.c2_k, 2, 1), p.c2_b), 16 * bc),
                 cfg.leaky_slope);
  h = leaky_relu(
      detail::scaled(bias_add(conv2d(h, p.c3_k, 2, 1), p.c3_b), 16 * 2 * bc),
      cfg.leaky_slope);
  h = leaky_relu(
      detail::scaled(bias_add(conv2d(h, p.c4_k, 2, 1), p.c4_b), 16 * 4 * bc),
      cfg.leaky_slope);
  h = reshape(h, {1, 8 * bc * s0 * s0});
  h = leaky_relu(
      detail::scaled(add(matmul(h, p.fc1_w), p.fc1_b), 8 * bc * s0 * s0),
      cfg.leaky_slope);
  return sigmoid(detail::scaled(add(matmul(h, p.fc2_w), p.fc2_b), 32 * bc));
}

// ---------------------------------------------------------------------------
// Checkpoint persistence.
//
// Layout: magic "ADVSTEG1" (8 bytes) | u32 version (LE) | u64 header length
// (LE) | JSON header (config + optimizer hyperparameters + tensor shape
// manifest) | raw little-endian float64 payload in manifest order.
// ---------------------------------------------------------------------------

struct Checkpoint {
  NetConfig config;
  GeneratorParams gen;
  DiscriminatorParams disc;
  SteganalyzerParams steg;
  OptimState opt_gen, opt_disc, opt_steg;
};

namespace detail {

constexpr char kCheckpointMagic[8] = {'A', 'D', 'V', 'S', 'T', 'E', 'G', '1'};
constexpr std::uint32_t kCheckpointVersion = 1;

inline std::vector<std::pair<std::string, Tensor>> checkpoint_manifest(
    const Checkpoint& ck) {
  std::vector<std::pair<std::string, Tensor>> entries;
  for (auto& e : ck.gen.named()) entries.push_back(e);
  for (auto& e : ck.disc.named()) entries.push_back(e);
  for (auto& e : ck.steg.named()) entries.push_back(e);
  return entries;
}

inline void append_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void append_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  nlohmann::json header;
  header["config"] = {{"image_side", ck.config.image_side},
                      {"message_len", ck.config.message_len},
                      {"base_channels", ck.config.base_channels},
                      {"leaky_slope", ck.config.leaky_slope}};
  header["optim"] = {
      {"g", {{"decay", ck.opt_gen.decay}, {"epsilon", ck.opt_gen.epsilon}}},
      {"d", {{"decay", ck.opt_disc.decay}, {"epsilon", ck.opt_disc.epsilon}}},
      {"s", {{"decay", ck.opt_steg.decay}, {"epsilon", ck.opt_steg.epsilon}}}};

  auto manifest = detail::checkpoint_manifest(ck);
  nlohmann::json tensors = nlohmann::json::array();
  for (auto& [name, t] : manifest)
    tensors.push_back({{"name", name}, {"shape", t.shape()}});
  header["tensors"] = tensors;

  std::string blob;
  blob.append(detail::kCheckpointMagic, 8);
  detail::append_u32(blob, detail::kCheckpointVersion);
  const std::string header_text = header.dump();
  detail::append_u64(blob, header_text.size());
  blob += header_text;

  auto append_doubles = [&blob](const std::vector<double>& v) {
    const std::size_t at = blob.size();
    blob.resize(at + v.size() * sizeof(double));
    std::memcpy(blob.data() + at, v.data(), v.size() * sizeof(double));
  };
  for (auto& [name, t] : manifest) append_doubles(t.data());
  auto states = {&ck.opt_gen, &ck.opt_disc, &ck.opt_steg};
  for (const OptimState* st : states)
    for (const auto& buf : st->sq_avg) append_doubles(buf);

  // Write-then-rename so an aborted run never clobbers the last good file.
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(tmp + ": cannot open for writing");
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw IoError(tmp + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::string blob((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());

  if (blob.size() < 8 || std::memcmp(blob.data(), detail::kCheckpointMagic, 8) != 0)
    throw CheckpointBadMagicError(path + ": bad checkpoint magic");
  if (blob.size() < 12)
    throw CheckpointTruncatedError(path + ": truncated before version");
  std::uint32_t version = 0;
  for (int i = 3; i >= 0; --i)
    version = (version << 8) | static_cast<std::uint8_t>(blob[8 + i]);
  if (version != detail::kCheckpointVersion)
    throw CheckpointVersionError(path + ": unsupported checkpoint version " +
                                 std::to_string(version));
  if (blob.size() < 20)
    throw CheckpointTruncatedError(path + ": truncated before header length");
  std::uint64_t header_len = 0;
  for (int i = 7; i >= 0; --i)
    header_len = (header_len << 8) | static_cast<std::uint8_t>(blob[12 + i]);
  if (header_len > blob.size() || blob.size() < 20 + header_len)
    throw CheckpointTruncatedError(path + ": truncated inside header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(20, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": malformed header: " + e.what());
  }

  Checkpoint ck;
  try {
    const auto& c = header.at("config");
    ck.config.image_side = c.at("image_side").get<int>();
    ck.config.message_len = c.at("message_len").get<int>();
    ck.config.base_channels = c.at("base_channels").get<int>();
    ck.config.leaky_slope = c.at("leaky_slope").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": malformed config: " + e.what());
  }
  ck.config.validate();

  // Materialize tensors with the right shapes, then overwrite from payload.
  std::tie(ck.gen, ck.disc, ck.steg) = init_params(ck.config, 0);
  ck.opt_gen = OptimState(ck.gen.trainable());
  ck.opt_disc = OptimState(ck.disc.trainable());
  ck.opt_steg = OptimState(ck.steg.trainable());
  try {
    ck.opt_gen.decay = header.at("optim").at("g").at("decay").get<double>();
    ck.opt_gen.epsilon = header.at("optim").at("g").at("epsilon").get<double>();
    ck.opt_disc.decay = header.at("optim").at("d").at("decay").get<double>();
    ck.opt_disc.epsilon = header.at("optim").at("d").at("epsilon").get<double>();
    ck.opt_steg.decay = header.at("optim").at("s").at("decay").get<double>();
    ck.opt_steg.epsilon = header.at("optim").at("s").at("epsilon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path + ": malformed optimizer section: " + e.what());
  }

  auto manifest = detail::checkpoint_manifest(ck);
  const auto& tensors = header.at("tensors");
  if (!tensors.is_array() || tensors.size() != manifest.size())
    throw CheckpointError(path + ": tensor manifest does not match config");
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& entry = tensors.at(i);
    if (entry.at("name").get<std::string>() != manifest[i].first ||
        entry.at("shape").get<Shape>() != manifest[i].second.shape())
      throw CheckpointError(path + ": manifest mismatch at tensor '" +
                            manifest[i].first + "'");
  }

  std::size_t offset = 20 + header_len;
  auto read_doubles = [&](std::vector<double>& dst) {
    const std::size_t bytes = dst.size() * sizeof(double);
    if (offset + bytes > blob.size())
      throw CheckpointTruncatedError(path + ": truncated tensor payload");
    std::memcpy(dst.data(), blob.data() + offset, bytes);
    offset += bytes;
  };
  for (auto& [name, t] : manifest) read_doubles(t.mutable_data());
  for (OptimState* st : {&ck.opt_gen, &ck.opt_disc, &ck.opt_steg})
    for (auto& buf : st->sq_avg) read_doubles(buf);
  if (offset != blob.size())
    throw CheckpointError(path + ": trailing data after payload");
  return ck;
}

}  // namespace stegduel
