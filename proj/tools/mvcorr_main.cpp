// mvcorr command-line front end: dataset generation, training, evaluation,
// and gradient checking for the multi-view correlation methods.
//
// Exit codes: 0 success, 1 config error, 2 runtime/numerical failure,
// 3 gradcheck failure.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mvcorr/config.hpp"
#include "mvcorr/corr.hpp"
#include "mvcorr/data.hpp"
#include "mvcorr/eval.hpp"
#include "mvcorr/gradcheck.hpp"
#include "mvcorr/io.hpp"
#include "mvcorr/model_io.hpp"
#include "mvcorr/train.hpp"

namespace fs = std::filesystem;
using namespace mvcorr;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir = "out";
  long seed = -1;  // -1 = keep the config's seed
};

Config load_config(const CommonArgs& args) {
  Config cfg = args.config_path.empty() ? Config() : Config::from_file(args.config_path);
  for (const std::string& assignment : args.overrides) cfg.set(assignment);
  return cfg;
}

SynthSpec synth_spec_from(const Config& cfg, long seed_override) {
  SynthSpec spec;
  spec.latent_dim = cfg.get_int("synth.latent_dim", spec.latent_dim);
  spec.d1 = cfg.get_int("synth.d1", spec.d1);
  spec.d2 = cfg.get_int("synth.d2", spec.d2);
  const std::string mixing = cfg.get_string("synth.mixing", "linear");
  if (mixing == "linear") {
    spec.mixing = Mixing::linear;
  } else if (mixing == "nonlinear") {
    spec.mixing = Mixing::nonlinear;
  } else {
    throw ConfigError("config key 'synth.mixing': expected linear|nonlinear, got '" + mixing +
                      "'");
  }
  const std::string temporal = cfg.get_string("synth.temporal", "smoothed");
  if (temporal == "iid") {
    spec.temporal = Temporal::iid;
  } else if (temporal == "smoothed") {
    spec.temporal = Temporal::smoothed;
  } else {
    throw ConfigError("config key 'synth.temporal': expected iid|smoothed, got '" + temporal +
                      "'");
  }
  spec.ar_coeff = cfg.get_double("synth.ar_coeff", spec.ar_coeff);
  spec.noise_std1 = cfg.get_double("synth.noise_std1", spec.noise_std1);
  spec.noise_std2 = cfg.get_double("synth.noise_std2", spec.noise_std2);
  spec.n_classes = cfg.get_int("synth.n_classes", spec.n_classes);
  spec.class_sep = cfg.get_double("synth.class_sep", spec.class_sep);
  spec.utterance_count = cfg.get_int("synth.utterance_count", spec.utterance_count);
  spec.length_min = cfg.get_int("synth.length_min", spec.length_min);
  spec.length_max = cfg.get_int("synth.length_max", spec.length_max);
  spec.n_speakers = cfg.get_int("synth.n_speakers", spec.n_speakers);
  spec.silence_prob = cfg.get_double("synth.silence_prob", spec.silence_prob);
  spec.seed = static_cast<std::uint64_t>(
      seed_override >= 0 ? seed_override : cfg.get_int("synth.seed", 1));
  return spec;
}

TrainConfig train_config_from(const Config& cfg, long seed_override) {
  TrainConfig t;
  t.batch_size = cfg.get_int("train.batch_size", t.batch_size);
  t.epochs = cfg.get_int("train.epochs", t.epochs);
  t.learning_rate = cfg.get_double("train.learning_rate", t.learning_rate);
  const std::string opt = cfg.get_string("train.optimizer", "adam");
  if (opt == "plain") {
    t.optimizer = OptimizerKind::plain;
  } else if (opt == "momentum") {
    t.optimizer = OptimizerKind::momentum;
  } else if (opt == "adam") {
    t.optimizer = OptimizerKind::adam;
  } else {
    throw ConfigError("config key 'train.optimizer': expected plain|momentum|adam, got '" +
                      opt + "'");
  }
  t.momentum = cfg.get_double("train.momentum", t.momentum);
  t.adam_beta1 = cfg.get_double("train.adam_beta1", t.adam_beta1);
  t.adam_beta2 = cfg.get_double("train.adam_beta2", t.adam_beta2);
  t.clip_threshold = cfg.get_double("train.clip_threshold", t.clip_threshold);
  t.seq_len_min = cfg.get_int("train.seq_len_min", t.seq_len_min);
  t.seq_len_max = cfg.get_int("train.seq_len_max", t.seq_len_max);
  t.tbptt_window = cfg.get_int("train.tbptt_window", t.tbptt_window);
  const std::string init = cfg.get_string("train.init", "uniform");
  if (init == "uniform") {
    t.init = InitScheme::uniform;
  } else if (init == "orthogonal") {
    t.init = InitScheme::orthogonal;
  } else {
    throw ConfigError("config key 'train.init': expected uniform|orthogonal, got '" + init +
                      "'");
  }
  t.steps_per_epoch = cfg.get_int("train.steps_per_epoch", 0);
  t.eval_batch = cfg.get_int("train.eval_batch", 0);
  t.seed = static_cast<std::uint64_t>(seed_override >= 0 ? seed_override
                                                         : cfg.get_int("train.seed", 1));
  return t;
}

Activation activation_from(const Config& cfg) {
  const std::string act = cfg.get_string("model.activation", "sigmoid");
  if (act == "sigmoid") return Activation::sigmoid;
  if (act == "tanh") return Activation::tanh;
  throw ConfigError("config key 'model.activation': expected sigmoid|tanh, got '" + act + "'");
}

KernelSpec kernel_from(const Config& cfg, const std::string& key, const Matrix& data) {
  const std::string kind = cfg.get_string(key, "gaussian");
  if (kind == "linear") return KernelSpec::linear();
  if (kind == "polynomial") {
    return KernelSpec::polynomial(static_cast<int>(cfg.get_int(key + ".degree", 2)),
                                  cfg.get_double(key + ".offset", 1.0));
  }
  if (kind == "gaussian") {
    const std::string sigma = cfg.get_string(key + ".sigma", "median");
    if (sigma == "median") return KernelSpec::gaussian(median_pairwise_distance(data));
    return KernelSpec::gaussian(cfg.get_double(key + ".sigma", 1.0));
  }
  throw ConfigError("config key '" + key + "': expected linear|polynomial|gaussian, got '" +
                    kind + "'");
}

std::vector<int> train_speaker_ids(const Config& cfg, const SequenceDataset& data) {
  std::vector<int> speakers = data.speakers();
  std::vector<long> listed = cfg.get_int_list("data.train_speakers", {});
  std::vector<int> ids;
  if (listed.empty()) {
    // First quarter of the speakers (at least one), echoing the 4-of-16 split.
    const size_t count = std::max<size_t>(1, speakers.size() / 4);
    ids.assign(speakers.begin(), speakers.begin() + static_cast<long>(count));
  } else {
    for (long s : listed) ids.push_back(static_cast<int>(s));
  }
  return ids;
}

std::vector<int> complement_ids(const SequenceDataset& data, const std::vector<int>& train) {
  std::vector<int> rest;
  for (int s : data.speakers()) {
    if (std::find(train.begin(), train.end(), s) == train.end()) rest.push_back(s);
  }
  return rest;
}

std::uint64_t fingerprint_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes.data(), bytes.size());
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// ----------------------------------------------------------------------
// generate

int cmd_generate(const CommonArgs& args) {
  Config cfg = load_config(args);
  SynthSpec spec = synth_spec_from(cfg, args.seed);
  SequenceDataset data = generate_synthetic(spec);

  fs::create_directories(args.out_dir);
  const std::string path =
      cfg.get_string("dataset", (fs::path(args.out_dir) / "dataset.mvseq").string());
  save_dataset(data, path);

  std::map<int, long> class_counts;
  for (const Utterance& u : data.utterances) {
    for (int label : u.labels) class_counts[label]++;
  }
  std::cout << "wrote " << path << "\n"
            << "utterances: " << data.utterances.size() << ", frames: " << data.total_frames()
            << ", d1: " << data.d1() << ", d2: " << data.d2()
            << ", speakers: " << data.speakers().size() << "\n";
  std::cout << "class histogram:";
  for (const auto& [label, count] : class_counts) std::cout << ' ' << label << ':' << count;
  std::cout << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// train

int cmd_train(const CommonArgs& args) {
  Config cfg = load_config(args);
  const std::string method = cfg.get_string("method");
  const std::string dataset_path = cfg.get_string("dataset");
  SequenceDataset full = load_dataset(dataset_path);

  const std::vector<int> train_ids = train_speaker_ids(cfg, full);
  SequenceDataset train_set =
      split_speakers(full, train_ids, complement_ids(full, train_ids)).first;
  std::cout << "training on " << train_set.utterances.size() << " utterances ("
            << train_set.total_frames() << " frames) from " << train_ids.size()
            << " speakers\n";

  TrainConfig tcfg = train_config_from(cfg, args.seed);
  const Index context = cfg.get_int("data.context", 3);
  const Index k = cfg.get_int("model.k", 20);
  const double r_x = cfg.get_double("model.r_x", 1e-4);
  const double r_y = cfg.get_double("model.r_y", 1e-4);

  ModelFile file;
  file.method = method;
  file.config_echo = cfg.to_text();
  file.data_fingerprint = fingerprint_file(dataset_path);

  TrainHistory history;
  std::mt19937_64 init_rng(mix_seed(tcfg.seed, 0x1417));

  if (method == "baseline") {
    file.model = BaselineModel{};
  } else if (method == "cca") {
    FrameDataset frames = to_frames(train_set, context);
    CcaModel model = fit_cca(frames.x, frames.y,
                             std::min({k, frames.x.rows(), frames.y.rows()}), r_x, r_y);
    std::cout << "cca total correlation: " << model.corrs.sum() << "\n";
    file.model = model;
  } else if (method == "kcca") {
    FrameDataset frames = to_frames(train_set, context);
    // Exact dual solve is O(n^3) time / O(n^2) space: subsample frames.
    const Index cap = cfg.get_int("model.kcca_max_train", 1000);
    Matrix x = frames.x, y = frames.y;
    if (x.cols() > cap) {
      std::mt19937_64 rng(mix_seed(tcfg.seed, 0x5ca1e));
      std::vector<Index> idx(static_cast<size_t>(x.cols()));
      std::iota(idx.begin(), idx.end(), Index{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      Matrix xs(x.rows(), cap), ys(y.rows(), cap);
      for (Index j = 0; j < cap; ++j) {
        xs.col(j) = x.col(idx[static_cast<size_t>(j)]);
        ys.col(j) = y.col(idx[static_cast<size_t>(j)]);
      }
      x = xs;
      y = ys;
      std::cout << "kcca: subsampled to " << cap << " frames\n";
    }
    KernelSpec kx = kernel_from(cfg, "model.kernel_x", x);
    KernelSpec ky = kernel_from(cfg, "model.kernel_y", y);
    // Scale-aware default regularizer 1e-3 tr(K)/n from the kernel diagonal.
    auto diag_mean = [](const KernelSpec& spec, const Matrix& d) {
      double sum = 0;
      for (Index j = 0; j < d.cols(); ++j) sum += kernel_eval(spec, d.col(j), d.col(j));
      return sum / static_cast<double>(d.cols());
    };
    const double rk_x = cfg.get_double("model.r_x", 1e-3 * diag_mean(kx, x));
    const double rk_y = cfg.get_double("model.r_y", 1e-3 * diag_mean(ky, y));
    KccaModel model = fit_kcca(x, y, std::min<Index>(k, x.cols()), rk_x, rk_y, kx, ky);
    std::cout << "kcca total correlation: " << model.corrs.sum() << "\n";
    file.model = model;
  } else if (method == "splitae") {
    FrameDataset frames = to_frames(train_set, context);
    const std::string arch = cfg.get_string("model.arch", "shared");
    SplitAeArch ae_arch;
    if (arch == "shared") {
      ae_arch = SplitAeArch::shared_encoder_pair;
    } else if (arch == "single") {
      ae_arch = SplitAeArch::single_view_encoder;
    } else {
      throw ConfigError("config key 'model.arch': expected shared|single, got '" + arch + "'");
    }
    std::vector<long> widths = cfg.get_int_list("model.widths1", {128});
    std::vector<Index> enc_widths(widths.begin(), widths.end());
    SplitAeModel model =
        make_splitae(ae_arch, frames.x.rows(), frames.y.rows(), enc_widths,
                     cfg.get_int("model.shared_dim", 50), activation_from(cfg));
    init_params(model, tcfg.init, init_rng);
    history = train_splitae(model, frames, tcfg);
    std::cout << "splitae final per-sample loss: " << history.objective.back() << "\n";
    file.model = model;
  } else if (method == "dcca") {
    FrameDataset frames = to_frames(train_set, context);
    auto net_dims = [&](const char* key, Index in) {
      std::vector<Index> dims{in};
      for (long w : cfg.get_int_list(key, {256})) dims.push_back(w);
      dims.push_back(k);
      return dims;
    };
    DccaModel model;
    model.net1 = make_mlp(net_dims("model.widths1", frames.x.rows()), activation_from(cfg),
                          Activation::identity);
    model.net2 = make_mlp(net_dims("model.widths2", frames.y.rows()), activation_from(cfg),
                          Activation::identity);
    init_params(model.net1, tcfg.init, init_rng);
    init_params(model.net2, tcfg.init, init_rng);
    CorrConfig corr_cfg;
    corr_cfg.r_x = r_x;
    corr_cfg.r_y = r_y;
    history = train_dcca(model.net1, model.net2, frames, tcfg, corr_cfg);
    std::cout << "dcca final validation correlation: " << history.validation.back() << "\n";
    file.model = model;
  } else if (method == "dcclstm") {
    const Index lstm_context = cfg.get_int("data.context_lstm", 0);
    SequenceDataset seq_set = train_set;
    if (lstm_context > 0) {
      for (Utterance& u : seq_set.utterances) {
        u.view1 = stack_frames(u.view1, lstm_context);
        u.view2 = stack_frames(u.view2, lstm_context);
      }
    }
    const Index layers = cfg.get_int("model.layers", 1);
    const Index hidden1 = cfg.get_int("model.hidden1", 40);
    const Index hidden2 = cfg.get_int("model.hidden2", 40);
    const bool peephole = cfg.get_bool("model.peephole", true);
    auto build_stack = [&](Index input, Index hidden) {
      std::vector<LstmParams> stack;
      Index in = input;
      for (Index l = 0; l + 1 < layers; ++l) {
        stack.push_back(make_lstm(in, hidden, peephole));
        in = hidden;
      }
      stack.push_back(make_lstm(in, k, peephole));  // top layer width = output dim
      return stack;
    };
    DcclstmModel model;
    model.stack1 = build_stack(seq_set.d1(), hidden1);
    model.stack2 = build_stack(seq_set.d2(), hidden2);
    init_params(model.stack1, tcfg.init, init_rng);
    init_params(model.stack2, tcfg.init, init_rng);
    if (!cfg.has("train.batch_size")) tcfg.batch_size = 32;  // sequence-batch default
    CorrConfig corr_cfg;
    corr_cfg.r_x = r_x;
    corr_cfg.r_y = r_y;
    history = train_dcclstm(model.stack1, model.stack2, seq_set, tcfg, corr_cfg);
    std::cout << "dcclstm final validation correlation: " << history.validation.back() << "\n";
    file.model = model;
  } else {
    throw ConfigError("config key 'method': unknown method '" + method + "'");
  }

  fs::create_directories(args.out_dir);
  const fs::path model_path = fs::path(args.out_dir) / "model.mvmdl";
  save_model(file, model_path.string());
  write_text_file(fs::path(args.out_dir) / "history.csv", history.to_csv());
  std::cout << "wrote " << model_path.string() << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// evaluate

ViewTransform stacked_identity(Index context) {
  return [context](const Matrix& v) { return stack_frames(v, context); };
}

int cmd_evaluate(const CommonArgs& args, const std::string& model_path_arg) {
  Config cfg = load_config(args);
  const std::string dataset_path = cfg.get_string("dataset");
  const std::string model_path =
      !model_path_arg.empty()
          ? model_path_arg
          : cfg.get_string("model_file", (fs::path(args.out_dir) / "model.mvmdl").string());

  SequenceDataset full = load_dataset(dataset_path);
  ModelFile file = load_model(model_path);
  if (file.data_fingerprint != 0 && file.data_fingerprint != fingerprint_file(dataset_path)) {
    std::cerr << "note: dataset fingerprint differs from the one the model was trained on\n";
  }

  const std::vector<int> train_ids = train_speaker_ids(cfg, full);
  SequenceDataset downstream =
      split_speakers(full, train_ids, complement_ids(full, train_ids)).second;
  if (downstream.utterances.empty()) {
    throw ConfigError("evaluate: no downstream speakers left by data.train_speakers");
  }

  EvalConfig ecfg;
  ecfg.cca_k_class = cfg.get_int("eval.k_class", ecfg.cca_k_class);
  ecfg.cca_k_recon = cfg.get_int("eval.k_recon", ecfg.cca_k_recon);
  ecfg.knn_neighbors = cfg.get_int("eval.neighbors", ecfg.knn_neighbors);
  ecfg.r_x = cfg.get_double("eval.r_x", ecfg.r_x);
  ecfg.r_y = cfg.get_double("eval.r_y", ecfg.r_y);
  ecfg.max_test_samples = cfg.get_int("eval.max_test", ecfg.max_test_samples);
  ecfg.recon_context = cfg.get_int("eval.context", ecfg.recon_context);
  ecfg.seed = static_cast<std::uint64_t>(args.seed >= 0 ? args.seed
                                                        : cfg.get_int("eval.seed", 11));
  ecfg.method_name = file.method;

  const Index context = cfg.get_int("eval.context", 3);
  ViewTransform repr1 = stacked_identity(context);
  ViewTransform repr2 = stacked_identity(context);

  if (const auto* cca = std::get_if<CcaModel>(&file.model)) {
    repr1 = [cca, context](const Matrix& v) {
      return Matrix(cca_transform(*cca, Matrix(stack_frames(v, context).transpose()), 1)
                        .transpose());
    };
    repr2 = [cca, context](const Matrix& v) {
      return Matrix(cca_transform(*cca, Matrix(stack_frames(v, context).transpose()), 2)
                        .transpose());
    };
  } else if (const auto* kcca = std::get_if<KccaModel>(&file.model)) {
    repr1 = [kcca, context](const Matrix& v) {
      return Matrix(kcca_transform(*kcca, Matrix(stack_frames(v, context).transpose()), 1)
                        .transpose());
    };
    repr2 = [kcca, context](const Matrix& v) {
      return Matrix(kcca_transform(*kcca, Matrix(stack_frames(v, context).transpose()), 2)
                        .transpose());
    };
  } else if (const auto* dcca = std::get_if<DccaModel>(&file.model)) {
    repr1 = [dcca, context](const Matrix& v) {
      return Matrix(
          mlp_forward(dcca->net1, Matrix(stack_frames(v, context).transpose())).transpose());
    };
    repr2 = [dcca, context](const Matrix& v) {
      return Matrix(
          mlp_forward(dcca->net2, Matrix(stack_frames(v, context).transpose())).transpose());
    };
  } else if (const auto* sae = std::get_if<SplitAeModel>(&file.model)) {
    repr1 = [sae, context](const Matrix& v) {
      return Matrix(
          splitae_encode(*sae, Matrix(stack_frames(v, context).transpose())).transpose());
    };
    if (sae->arch == SplitAeArch::shared_encoder_pair) {
      // View-2 pathway of the shared layer; view 1 is absent at test time.
      repr2 = [sae, context](const Matrix& v) {
        SplitAeModel swapped;
        swapped.arch = SplitAeArch::single_view_encoder;
        swapped.enc_x = sae->enc_y;
        return Matrix(
            splitae_encode(swapped, Matrix(stack_frames(v, context).transpose())).transpose());
      };
    }
  } else if (const auto* lstm = std::get_if<DcclstmModel>(&file.model)) {
    const Index lstm_context = cfg.get_int("data.context_lstm", 0);
    repr1 = [lstm, lstm_context](const Matrix& v) {
      return deep_lstm_forward(lstm->stack1, stack_frames(v, lstm_context)).layers.back().h_all;
    };
    repr2 = [lstm, lstm_context](const Matrix& v) {
      return deep_lstm_forward(lstm->stack2, stack_frames(v, lstm_context)).layers.back().h_all;
    };
  }

  EvalReport report = evaluate_pipeline(downstream, repr1, repr2, ecfg);
  report.print_table(std::cout);

  fs::create_directories(args.out_dir);
  write_text_file(fs::path(args.out_dir) / "metrics.txt", report.to_metrics());
  std::cout << "wrote " << (fs::path(args.out_dir) / "metrics.txt").string() << "\n";
  return 0;
}

// ----------------------------------------------------------------------
// gradcheck

int cmd_gradcheck(const std::string& method, long seed_arg, bool perturb) {
  const std::uint64_t seed = seed_arg >= 0 ? static_cast<std::uint64_t>(seed_arg) : 7;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto fill = [&](Matrix& m) {
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) m(i, j) = gauss(rng);
    }
  };

  GradCheckReport report;
  if (method == "corr") {
    const Index o = 4, m = 32;
    Matrix f(o, m), g(o, m);
    fill(f);
    fill(g);
    g += 0.5 * f;
    CorrConfig cfg;
    CorrResult res = corr_objective(f, g, cfg);
    if (perturb) res.grad_f(0, 0) += 1e-2;
    std::vector<ParamBlock> params{{f.data(), f.size()}, {g.data(), g.size()}};
    std::vector<ParamBlock> analytic{{res.grad_f.data(), res.grad_f.size()},
                                     {res.grad_g.data(), res.grad_g.size()}};
    report = finite_diff_check(params, [&]() { return corr_objective(f, g, cfg).corr; },
                               analytic);
  } else if (method == "mlp") {
    MlpParams net = make_mlp({4, 6, 3}, Activation::sigmoid, Activation::identity);
    init_params(net, InitScheme::uniform, rng);
    Matrix x(4, 8), w(3, 8);
    fill(x);
    fill(w);
    MlpCache cache;
    mlp_forward(net, x, &cache);
    MlpGrads grads = mlp_backward(net, cache, w);
    if (perturb) grads.w[0](0, 0) += 1e-2;
    report = finite_diff_check(
        param_blocks(net),
        [&]() { return (mlp_forward(net, x).array() * w.array()).sum(); },
        param_blocks(grads));
  } else if (method == "lstm") {
    LstmParams p = make_lstm(3, 4);
    init_params(p, InitScheme::uniform, rng);
    Matrix seq(5, 3);
    fill(seq);
    Matrix head(1, 4);
    fill(head);
    LstmSequence fwd = lstm_forward(p, seq);
    Matrix dh = Matrix::Zero(5, 4);
    dh.row(4) = head.row(0);
    LstmGrads grads = LstmGrads::zeros_like(p);
    lstm_backward(p, fwd, dh, grads);
    if (perturb) grads.w_f(0, 0) += 1e-2;
    report = finite_diff_check(
        param_blocks(p),
        [&]() { return head.row(0).dot(lstm_forward(p, seq).h_final); },
        param_blocks(grads));
  } else if (method == "bilstm") {
    BiLstmParams p = make_bilstm(3, 4, 2);
    init_params(p, InitScheme::uniform, rng);
    Matrix seq(5, 3), w(5, 2);
    fill(seq);
    fill(w);
    BiLstmSequence fwd;
    bilstm_forward(p, seq, &fwd);
    BiLstmGrads grads = BiLstmGrads::zeros_like(p);
    bilstm_backward(p, fwd, w, grads);
    if (perturb) grads.w_fwd(0, 0) += 1e-2;
    report = finite_diff_check(
        param_blocks(p),
        [&]() { return (bilstm_forward(p, seq).array() * w.array()).sum(); },
        param_blocks(grads));
  } else if (method == "splitae") {
    SplitAeModel model =
        make_splitae(SplitAeArch::shared_encoder_pair, 4, 3, {5}, 3, Activation::sigmoid);
    init_params(model, InitScheme::uniform, rng);
    Matrix x(4, 6), y(3, 6);
    fill(x);
    fill(y);
    SplitAeEval eval = splitae_loss(model, x, y);
    if (perturb) eval.grads.enc_x.w[0](0, 0) += 1e-2;
    report = finite_diff_check(param_blocks(model),
                               [&]() { return splitae_loss(model, x, y).loss; },
                               param_blocks(eval.grads));
  } else {
    throw ConfigError("gradcheck: unknown method '" + method +
                      "' (expected corr|mlp|lstm|bilstm|splitae)");
  }

  const bool pass = report.max_rel_err < 1e-4;
  std::cout << "gradcheck " << method << ": max relative error " << report.max_rel_err
            << (pass ? " PASS" : " FAIL") << "\n";
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-view correlation methods: CCA, KCCA, SplitAE, DCCA, DCC-LSTM"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string gradcheck_method = "corr";
  std::string model_path;
  bool perturb = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "experiment config file");
    sub->add_option("--set", args.overrides, "override KEY=VALUE (repeatable)");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "seed override");
  };

  CLI::App* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  add_common(gen);
  CLI::App* train = app.add_subcommand("train", "train a model");
  add_common(train);
  CLI::App* evaluate = app.add_subcommand("evaluate", "run the downstream evaluation");
  add_common(evaluate);
  evaluate->add_option("--model", model_path, "model file (default OUT/model.mvmdl)");
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--method", gradcheck_method, "corr|mlp|lstm|bilstm|splitae");
  gradcheck->add_option("--seed", args.seed, "seed override");
  gradcheck->add_flag("--perturb", perturb, "perturb the analytic gradient (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_generate(args);
    if (train->parsed()) return cmd_train(args);
    if (evaluate->parsed()) return cmd_evaluate(args, model_path);
    if (gradcheck->parsed()) return cmd_gradcheck(gradcheck_method, args.seed, perturb);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
