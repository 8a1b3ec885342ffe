// stegduel: adversarial steganography laboratory.
//
// Subcommands: synth, train, train-detector, embed, extract, detect, eval,
// gradcheck. Every command is deterministic given its flags, seeds and input
// files; reruns produce byte-identical outputs.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric abort.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stegduel/csv.hpp"
#include "stegduel/data.hpp"
#include "stegduel/game.hpp"
#include "stegduel/gradcheck.hpp"
#include "stegduel/metrics.hpp"
#include "stegduel/networks.hpp"
#include "stegduel/pgm.hpp"
#include "stegduel/stego.hpp"
#include "stegduel/version.hpp"

namespace fs = std::filesystem;
using namespace stegduel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

std::string zero_pad(int value, int width) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%0*d", width, value);
  return buf;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const nlohmann::json& config,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json m;
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  m["artifacts"] = artifacts;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw IoError((dir / "manifest.json").string() + ": cannot write");
  out << m.dump(2) << "\n";
}

BitMessage read_message_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open message file");
  std::vector<std::uint8_t> bits;
  char c = 0;
  while (in.get(c)) {
    if (c == '0') bits.push_back(0);
    else if (c == '1') bits.push_back(1);
    else if (c == '\n' || c == '\r' || c == ' ' || c == '\t') continue;
    else throw ContractError(path + ": message files hold only '0'/'1' characters");
  }
  return BitMessage(std::move(bits));
}

void write_message_file(const BitMessage& msg, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path + ": cannot open for writing");
  for (std::size_t i = 0; i < msg.size(); ++i) out.put(msg[i] ? '1' : '0');
  out.put('\n');
  if (!out) throw IoError(path + ": write failed");
}

// ---------------------------------------------------------------------------

int cmd_synth(int n, int side, std::uint64_t seed, const std::string& out_dir) {
  if (n <= 0) throw ContractError("synth: --n must be positive");
  Dataset ds = synth_dataset(n, side, seed);
  fs::create_directories(out_dir);
  std::vector<std::string> artifacts;
  for (int i = 0; i < n; ++i) {
    const std::string name = "img_" + zero_pad(i, 5) + ".pgm";
    save_pgm(ds.images[static_cast<std::size_t>(i)], (fs::path(out_dir) / name).string());
    artifacts.push_back(name);
  }
  write_manifest(out_dir, "synth",
                 {{"n", n}, {"side", side}, {"seed", seed}}, artifacts);
  std::printf("wrote %d images to %s\n", n, out_dir.c_str());
  return kExitOk;
}

void write_step_csv(const std::string& path, const std::vector<StepReport>& reports) {
  CsvWriter csv(path, {"step", "updated_net", "L_G", "L_D", "L_S"});
  for (const auto& r : reports)
    csv.row({std::to_string(r.step), std::string(1, r.updated),
             csv_double(r.loss_g), csv_double(r.loss_d), csv_double(r.loss_s)});
}

void write_eval_csv(const std::string& path,
                    const std::vector<std::pair<int, MetricsRecord>>& evals) {
  CsvWriter csv(path, {"step", "psnr_mean", "bit_acc", "msg_exact_rate", "det_acc"});
  for (const auto& [step, m] : evals)
    csv.row({std::to_string(step), csv_double(m.psnr_db),
             csv_double(m.bit_accuracy), csv_double(m.message_exact_rate),
             csv_double(m.detection_accuracy)});
}

int cmd_train(const std::string& data_dir, const std::string& out_dir,
              const TrainConfig& cfg, int side, int base_channels) {
  Dataset all = load_dataset(data_dir);
  if (side != 0 && all.side() != side)
    throw ContractError("train: dataset side " + std::to_string(all.side()) +
                        " does not match --side " + std::to_string(side));
  NetConfig net;
  net.image_side = all.side();
  net.base_channels = base_channels;
  net.message_len =
      static_cast<int>(payload_bits(net.image_side, cfg.embedding_rate_bpp));
  net.validate();
  cfg.validate();

  auto [train_set, test_set] = split(all, 0.5, cfg.seed);
  TrainArtifacts art = run_training(train_set, test_set, net, cfg);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_step_csv((dir / "steps.csv").string(), art.reports);
  write_eval_csv((dir / "eval.csv").string(), art.evals);
  save_checkpoint((dir / "checkpoint.bin").string(), art.final_state);
  write_manifest(dir, "train",
                 {{"data", data_dir},
                  {"steps", cfg.total_steps},
                  {"lr", cfg.learning_rate},
                  {"bpp", cfg.embedding_rate_bpp},
                  {"lambda_g", cfg.lambda_g},
                  {"lambda_d", cfg.lambda_d},
                  {"lambda_s", cfg.lambda_s},
                  {"batch", cfg.batch_size},
                  {"eval_every", cfg.eval_every},
                  {"seed", cfg.seed},
                  {"side", net.image_side},
                  {"base_channels", net.base_channels},
                  {"message_len", net.message_len}},
                 {"steps.csv", "eval.csv", "checkpoint.bin"});

  if (art.aborted) {
    std::fprintf(stderr, "numeric abort: %s (last good checkpoint written)\n",
                 art.abort_reason.c_str());
    return kExitNumeric;
  }
  if (!art.evals.empty()) {
    const auto& m = art.evals.back().second;
    std::printf("final: psnr=%s bit_acc=%.4f msg_exact=%.4f det_acc=%.4f\n",
                csv_double(m.psnr_db).c_str(), m.bit_accuracy,
                m.message_exact_rate, m.detection_accuracy);
  }
  return kExitOk;
}

int cmd_train_detector(const std::string& data_dir, const std::string& out_dir,
                       const TrainConfig& cfg, int base_channels) {
  Dataset covers = load_dataset(data_dir);
  NetConfig net;
  net.image_side = covers.side();
  net.base_channels = base_channels;
  net.message_len = 1;  // decoder unused in the supervised regime
  net.validate();
  cfg.validate();

  auto [train_covers, test_covers] = split(covers, 0.5, cfg.seed);
  const auto train_stegos =
      make_lsb_stego_corpus(train_covers.images, cfg.embedding_rate_bpp, cfg.seed);
  const auto test_stegos = make_lsb_stego_corpus(
      test_covers.images, cfg.embedding_rate_bpp, derive_seed(cfg.seed, 1));

  DetectorTrainArtifacts art = train_steganalyzer_supervised(
      train_covers.images, train_stegos, net, cfg);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  {
    CsvWriter csv((dir / "steps.csv").string(), {"step", "L_S"});
    for (const auto& [step, loss] : art.losses)
      csv.row({std::to_string(step), csv_double(loss)});
  }
  save_checkpoint((dir / "checkpoint.bin").string(), art.state);

  double train_acc = 0.0, test_acc = 0.0;
  if (!art.aborted) {
    train_acc = evaluate_detector(art.state, train_covers.images, train_stegos);
    test_acc = evaluate_detector(art.state, test_covers.images, test_stegos);
    CsvWriter csv((dir / "eval.csv").string(), {"split", "det_acc"});
    csv.row({"train", csv_double(train_acc)});
    csv.row({"test", csv_double(test_acc)});
  }
  write_manifest(dir, "train-detector",
                 {{"data", data_dir},
                  {"steps", cfg.total_steps},
                  {"lr", cfg.learning_rate},
                  {"bpp", cfg.embedding_rate_bpp},
                  {"batch", cfg.batch_size},
                  {"seed", cfg.seed},
                  {"side", net.image_side},
                  {"base_channels", net.base_channels}},
                 {"steps.csv", "eval.csv", "checkpoint.bin"});
  if (art.aborted) {
    std::fprintf(stderr, "numeric abort: %s\n", art.abort_reason.c_str());
    return kExitNumeric;
  }
  std::printf("detector accuracy: train=%.4f test=%.4f\n", train_acc, test_acc);
  return kExitOk;
}

int cmd_embed(const std::string& method, const std::string& cover_path,
              const std::string& out_path, const std::string& message_path,
              double bpp, std::uint64_t key_seed, bool key_given,
              std::uint64_t seed, const std::string& cost_kind,
              const std::string& checkpoint_path) {
  GrayImage cover = load_pgm(cover_path);
  const StegoKey key{key_given ? key_seed : derive_seed(seed, 0x6b6579ULL)};

  if (method == "lsb" || method == "adaptive") {
    if (method == "lsb") {
      BitMessage msg;
      bool generated = false;
      if (!message_path.empty()) {
        msg = read_message_file(message_path);
      } else {
        if (!(bpp > 0.0))
          throw ContractError("embed: give --message or --bpp for method lsb");
        const auto k = static_cast<std::size_t>(
            bpp * static_cast<double>(cover.pixel_count()) + 1e-9);
        msg = sample_message(k, seed);
        generated = true;
      }
      GrayImage stego = lsb_matching_embed(cover, msg, key);
      save_pgm(stego, out_path);
      if (generated) write_message_file(msg, out_path + ".msg");
      std::ofstream kf(out_path + ".key", std::ios::trunc);
      kf << key.seed << "\n";
      std::printf("embedded %zu bits (lsb) into %s\n", msg.size(), out_path.c_str());
    } else {
      if (!(bpp > 0.0)) throw ContractError("embed: --bpp required for adaptive");
      CostMap costs = cost_kind == "uniform" ? cost_uniform(cover)
                                             : cost_texture(cover);
      GrayImage stego = adaptive_embed_simulate(cover, bpp, costs, key);
      save_pgm(stego, out_path);
      std::ofstream kf(out_path + ".key", std::ios::trunc);
      kf << key.seed << "\n";
      std::printf("simulated %s-cost adaptive embedding at %g bpp into %s\n",
                  cost_kind.c_str(), bpp, out_path.c_str());
    }
    return kExitOk;
  }

  if (method == "gan") {
    if (checkpoint_path.empty())
      throw ContractError("embed: --checkpoint required for method gan");
    Checkpoint ck = load_checkpoint(checkpoint_path);
    if (cover.width != ck.config.image_side || cover.height != ck.config.image_side)
      throw DimensionError("embed: cover is " + std::to_string(cover.width) + "x" +
                           std::to_string(cover.height) + " but model expects " +
                           std::to_string(ck.config.image_side) + " square");
    BitMessage msg;
    bool generated = false;
    if (!message_path.empty()) {
      msg = read_message_file(message_path);
    } else if (bpp > 0.0) {
      msg = sample_message(payload_bits(ck.config.image_side, bpp), seed);
      generated = true;
    } else {
      throw ContractError("embed: give --message or --bpp for method gan");
    }
    if (msg.size() > static_cast<std::size_t>(ck.config.message_len))
      throw CapacityError("embed: message of " + std::to_string(msg.size()) +
                              " bits exceeds model capacity of " +
                              std::to_string(ck.config.message_len) + " bits",
                          static_cast<std::size_t>(ck.config.message_len));
    NoGradGuard no_grad;
    Tensor stego_t = generator_forward(
        ck.config, ck.gen, image_to_tensor(cover),
        message_to_tensor(msg, ck.config.message_len));
    save_pgm(tensor_to_image(stego_t), out_path);
    if (generated) write_message_file(msg, out_path + ".msg");
    std::printf("embedded %zu bits (gan) into %s\n", msg.size(), out_path.c_str());
    return kExitOk;
  }
  throw ContractError("embed: unknown method '" + method + "'");
}

int cmd_extract(const std::string& method, const std::string& stego_path,
                const std::string& out_path, std::uint64_t key_seed,
                bool key_given, std::size_t length,
                const std::string& checkpoint_path) {
  if (method == "adaptive")
    throw UnsupportedOperationError(
        "extract: the adaptive method is an embedding simulator; blind "
        "extraction is not supported");
  GrayImage stego = load_pgm(stego_path);

  if (method == "lsb") {
    if (!key_given) throw ContractError("extract: --key required for method lsb");
    if (length == 0) throw ContractError("extract: --len required for method lsb");
    BitMessage msg = lsb_extract(stego, StegoKey{key_seed}, length);
    write_message_file(msg, out_path);
    std::printf("extracted %zu bits (lsb) to %s\n", msg.size(), out_path.c_str());
    return kExitOk;
  }
  if (method == "gan") {
    if (checkpoint_path.empty())
      throw ContractError("extract: --checkpoint required for method gan");
    Checkpoint ck = load_checkpoint(checkpoint_path);
    if (stego.width != ck.config.image_side || stego.height != ck.config.image_side)
      throw DimensionError("extract: image does not match model side");
    NoGradGuard no_grad;
    const auto decoded =
        discriminator_forward(ck.config, ck.disc, image_to_tensor(stego)).decoded;
    const std::size_t n =
        length ? length : static_cast<std::size_t>(ck.config.message_len);
    if (n > static_cast<std::size_t>(ck.config.message_len))
      throw CapacityError("extract: --len exceeds model capacity",
                          static_cast<std::size_t>(ck.config.message_len));
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = decoded.data()[i] >= 0.5;
    write_message_file(BitMessage(std::move(bits)), out_path);
    std::printf("decoded %zu bits (gan) to %s\n", n, out_path.c_str());
    return kExitOk;
  }
  throw ContractError("extract: unknown method '" + method + "'");
}

int cmd_detect(const std::string& data_dir, const std::string& checkpoint_path,
               const std::string& out_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  if (!fs::is_directory(data_dir)) throw IoError(data_dir + ": not a directory");
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(data_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw IoError(data_dir + ": no .pgm files found");

  std::vector<double> p_cover(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) {
    NoGradGuard no_grad;
    GrayImage img = load_pgm(paths[i]);
    if (img.width != ck.config.image_side || img.height != ck.config.image_side)
      throw DimensionError(paths[i] + ": image does not match model side");
    p_cover[i] =
        steganalyzer_forward(ck.config, ck.steg, image_to_tensor(img)).item();
  });

  // Ground truth from the cover_/stego_ filename convention, when present.
  std::vector<bool> labels;
  std::vector<double> labeled_probs;
  CsvWriter csv(out_path, {"file", "label", "p_stego"});
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string name = fs::path(paths[i]).filename().string();
    std::string label = "unknown";
    if (name.rfind("cover_", 0) == 0) label = "cover";
    if (name.rfind("stego_", 0) == 0) label = "stego";
    if (label != "unknown") {
      labels.push_back(label == "cover");
      labeled_probs.push_back(p_cover[i]);
    }
    csv.row({name, label, csv_double(1.0 - p_cover[i])});
  }
  if (!labels.empty()) {
    const double acc = detection_accuracy(labels, labeled_probs, 0.5);
    csv.row({"summary", "accuracy", csv_double(acc)});
    std::printf("detection accuracy over %zu labeled images: %.4f\n",
                labels.size(), acc);
  }
  return kExitOk;
}

int cmd_eval(const std::string& data_dir, const std::string& checkpoint_path,
             double bpp, std::uint64_t seed, const std::string& out_path) {
  Checkpoint ck = load_checkpoint(checkpoint_path);
  Dataset ds = load_dataset(data_dir);
  if (ds.side() != ck.config.image_side)
    throw DimensionError("eval: dataset side does not match model");
  TrainConfig cfg;
  cfg.embedding_rate_bpp = bpp;
  cfg.seed = seed;
  MetricsRecord m = evaluate(ck, ds, cfg);
  write_eval_csv(out_path, {{0, m}});
  std::printf("psnr=%s bit_acc=%.4f msg_exact=%.4f det_acc=%.4f\n",
              csv_double(m.psnr_db).c_str(), m.bit_accuracy, m.message_exact_rate,
              m.detection_accuracy);
  return kExitOk;
}

int cmd_gradcheck() {
  const auto reports = run_gradcheck(1, 20, 1e-4);
  bool all_ok = true;
  for (const auto& r : reports) {
    std::printf("%-18s max_rel_err=%.3e  %s\n", r.op.c_str(), r.max_rel_err,
                r.passed ? "pass" : "FAIL");
    all_ok = all_ok && r.passed;
  }
  std::printf("%zu primitives checked: %s\n", reports.size(),
              all_ok ? "all pass" : "FAILURES");
  return all_ok ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolVersion) +
               " - adversarial steganography laboratory"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic PGM dataset");
  int synth_n = 0, synth_side = 32;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--n", synth_n, "image count")->required();
  synth->add_option("--side", synth_side, "image side (multiple of 16)");
  synth->add_option("--seed", synth_seed, "seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // train
  auto* train = app.add_subcommand("train", "run the three-network game");
  std::string train_data, train_out;
  TrainConfig tc;
  int train_side = 0, train_bc = 16;
  train->add_option("--data", train_data, "PGM dataset directory")->required();
  train->add_option("--out", train_out, "output directory")->required();
  train->add_option("--steps", tc.total_steps, "total round-robin steps");
  train->add_option("--lr", tc.learning_rate, "RMSProp learning rate");
  train->add_option("--bpp", tc.embedding_rate_bpp, "embedding rate");
  train->add_option("--lambda-g", tc.lambda_g, "distortion weight");
  train->add_option("--lambda-d", tc.lambda_d, "decoder weight");
  train->add_option("--lambda-s", tc.lambda_s, "steganalyzer weight");
  train->add_option("--seed", tc.seed, "seed");
  train->add_option("--batch", tc.batch_size, "batch size");
  train->add_option("--eval-every", tc.eval_every, "evaluation stride");
  train->add_option("--side", train_side, "expected image side (check only)");
  train->add_option("--base-channels", train_bc, "width multiplier");

  // train-detector
  auto* traind = app.add_subcommand(
      "train-detector", "supervised steganalyzer vs LSB +/-1 stegos");
  std::string traind_data, traind_out;
  TrainConfig dc;
  dc.embedding_rate_bpp = 0.4;
  dc.batch_size = 8;
  int traind_bc = 16;
  traind->add_option("--data", traind_data, "PGM cover directory")->required();
  traind->add_option("--out", traind_out, "output directory")->required();
  traind->add_option("--steps", dc.total_steps, "training steps");
  traind->add_option("--lr", dc.learning_rate, "RMSProp learning rate");
  traind->add_option("--bpp", dc.embedding_rate_bpp, "LSB embedding rate");
  traind->add_option("--seed", dc.seed, "seed");
  traind->add_option("--batch", dc.batch_size, "batch size");
  traind->add_option("--base-channels", traind_bc, "width multiplier");

  // embed
  auto* embed = app.add_subcommand("embed", "hide a message in a cover image");
  std::string em_method = "lsb", em_data, em_out, em_msg, em_cost = "texture",
              em_ck;
  double em_bpp = 0.0;
  std::uint64_t em_key = 0, em_seed = 0;
  bool em_key_given = false;
  embed->add_option("--method", em_method, "lsb | adaptive | gan");
  embed->add_option("--data", em_data, "cover PGM")->required();
  embed->add_option("--out", em_out, "stego PGM path")->required();
  embed->add_option("--message", em_msg, "file of '0'/'1' characters");
  embed->add_option("--bpp", em_bpp, "random-message rate (alternative to --message)");
  embed->add_option("--key", em_key, "stego key")->each([&](const std::string&) {
    em_key_given = true;
  });
  embed->add_option("--seed", em_seed, "seed for generated key/message");
  embed->add_option("--cost", em_cost, "adaptive cost map: uniform | texture");
  embed->add_option("--checkpoint", em_ck, "trained model (method gan)");

  // extract
  auto* extract = app.add_subcommand("extract", "recover a message from a stego image");
  std::string ex_method = "lsb", ex_data, ex_out, ex_ck;
  std::uint64_t ex_key = 0;
  bool ex_key_given = false;
  std::size_t ex_len = 0;
  extract->add_option("--method", ex_method, "lsb | gan (adaptive unsupported)");
  extract->add_option("--data", ex_data, "stego PGM")->required();
  extract->add_option("--out", ex_out, "recovered bits path")->required();
  extract->add_option("--key", ex_key, "stego key")->each([&](const std::string&) {
    ex_key_given = true;
  });
  extract->add_option("--len", ex_len, "bit count");
  extract->add_option("--checkpoint", ex_ck, "trained model (method gan)");

  // detect
  auto* detect = app.add_subcommand("detect", "steganalyzer probabilities per image");
  std::string de_data, de_ck, de_out;
  detect->add_option("--data", de_data, "PGM directory")->required();
  detect->add_option("--checkpoint", de_ck, "trained model")->required();
  detect->add_option("--out", de_out, "report CSV path")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a trained model on a dataset");
  std::string ev_data, ev_ck, ev_out;
  double ev_bpp = 0.1;
  std::uint64_t ev_seed = 0;
  ev->add_option("--data", ev_data, "PGM directory")->required();
  ev->add_option("--checkpoint", ev_ck, "trained model")->required();
  ev->add_option("--bpp", ev_bpp, "embedding rate");
  ev->add_option("--seed", ev_seed, "seed");
  ev->add_option("--out", ev_out, "eval CSV path")->required();

  app.add_subcommand("gradcheck",
                     "finite-difference check of every autodiff primitive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_n, synth_side, synth_seed, synth_out);
    if (train->parsed()) return cmd_train(train_data, train_out, tc, train_side, train_bc);
    if (traind->parsed()) return cmd_train_detector(traind_data, traind_out, dc, traind_bc);
    if (embed->parsed())
      return cmd_embed(em_method, em_data, em_out, em_msg, em_bpp, em_key,
                       em_key_given, em_seed, em_cost, em_ck);
    if (extract->parsed())
      return cmd_extract(ex_method, ex_data, ex_out, ex_key, ex_key_given,
                         ex_len, ex_ck);
    if (detect->parsed()) return cmd_detect(de_data, de_ck, de_out);
    if (ev->parsed()) return cmd_eval(ev_data, ev_ck, ev_bpp, ev_seed, ev_out);
    return cmd_gradcheck();
  } catch (const OverflowError& e) {
    std::fprintf(stderr, "numeric abort: %s\n", e.what());
    return kExitNumeric;
  } catch (const ContractError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return kExitUsage;
  } catch (const UnsupportedOperationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  }
}
