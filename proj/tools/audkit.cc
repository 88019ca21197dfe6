// tools/audkit.cc
//
// Copyright 2026  audkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Single driver binary: subcommands cover corpus synthesis, VB
// training, decoding, posteriorgrams, self-trained LDA, the chained
// second pass, and all evaluations.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"

#include "aud/corpus.hpp"
#include "aud/decoder.hpp"
#include "aud/eval_docs.hpp"
#include "aud/eval_nmi.hpp"
#include "aud/eval_samediff.hpp"
#include "aud/inference.hpp"
#include "aud/lda.hpp"
#include "aud/manifest.hpp"
#include "aud/model.hpp"
#include "aud/synth.hpp"

namespace {

using namespace aud;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitValidation = 3;
constexpr int kExitNumeric = 4;

struct FeatureInput {
  std::string features;
  std::string sides;
  double frame_period_s = 0.010;
  bool cmvn = true;
};

void AddFeatureOptions(CLI::App *cmd, FeatureInput *in) {
  cmd->add_option("--features", in->features, "FEAT1 feature archive")
      ->required();
  cmd->add_option("--sides", in->sides, "utt->side map for CMVN grouping");
  cmd->add_option("--frame-period", in->frame_period_s,
                  "frame period in seconds");
  cmd->add_flag("!--no-cmvn", in->cmvn, "skip per-side CMVN");
}

FeatureSet LoadFeatures(const FeatureInput &in) {
  FeatureSet fs = ReadFeatureArchive(in.features);
  fs.frame_period_s = in.frame_period_s;
  if (!in.sides.empty()) fs.side_of = ReadSideMap(in.sides);
  fs.Validate();
  if (in.cmvn) {
    std::vector<std::string> warnings;
    fs = ApplyCmvn(fs, &warnings);
    for (const auto &w : warnings) std::cerr << "warning: " << w << '\n';
  }
  return fs;
}

void DataMoments(const FeatureSet &fs, Eigen::VectorXd *mean,
                 Eigen::VectorXd *var) {
  const int dim = fs.Dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd sumsq = Eigen::VectorXd::Zero(dim);
  double n = 0.0;
  for (const auto &u : fs.utterances) {
    sum += u.features.colwise().sum().transpose();
    sumsq += u.features.array().square().colwise().sum().matrix().transpose();
    n += static_cast<double>(u.features.rows());
  }
  *mean = sum / n;
  *var = (sumsq / n - mean->array().square().matrix()).cwiseMax(1e-8);
}

void WriteReport(const std::string &path,
                 const std::vector<std::pair<std::string, std::string>> &kv) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path);
  for (const auto &[k, v] : kv) out << k << '\t' << v << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  SynthSpec spec;
  std::uint64_t seed = 0;
};

int RunSynth(const SynthArgs &a) {
  SynthCorpus corpus = SynthesizeCorpus(a.spec, a.seed);
  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  const std::string dir = a.out_dir + "/";
  WriteFeatureArchive(dir + "features.feat1", corpus.features);
  WriteTranscript(dir + "reference.tsv", corpus.reference);
  WriteWordSegments(dir + "words.tsv", corpus.words);
  WriteDocuments(dir + "documents.tsv", corpus.documents);
  WriteSideMap(dir + "sides.tsv", corpus.features.side_of);
  std::ofstream manifest(dir + "manifest.conf", std::ios::trunc);
  manifest << "features = " << dir << "features.feat1\n"
           << "sides = " << dir << "sides.tsv\n"
           << "reference = " << dir << "reference.tsv\n"
           << "words = " << dir << "words.tsv\n"
           << "documents = " << dir << "documents.tsv\n"
           << "frame_period_s = " << corpus.features.frame_period_s << "\n";
  std::cout << "synth: " << corpus.features.utterances.size()
            << " utterances, " << corpus.features.TotalFrames() << " frames, "
            << corpus.words.size() << " word segments -> " << a.out_dir
            << '\n';
  return 0;
}

struct TrainArgs {
  FeatureInput input;
  std::string model_out;
  std::string log_path;
  int truncation = 200, states = 3, gaussians = 2;
  double stick_concentration = 1.0, prior_weight = 1.0;
  int iters = 10, jobs = 0;
  std::uint64_t seed = 0;
};

int RunTrain(const TrainArgs &a) {
  FeatureSet fs = LoadFeatures(a.input);
  Eigen::VectorXd mean, var;
  DataMoments(fs, &mean, &var);
  ModelConfig cfg =
      ModelConfig::Defaults(a.truncation, a.states, a.gaussians, mean, var);
  cfg.stick_concentration = a.stick_concentration;
  cfg.dirichlet_prior_weight = a.prior_weight;
  PhoneLoopModel model = InitModel(cfg, a.seed);

  const std::string log_path =
      a.log_path.empty() ? a.model_out + ".log" : a.log_path;
  std::ofstream log(log_path, std::ios::trunc);
  if (!log) throw IoError("cannot write training log: " + log_path);
  TrainOptions opts;
  opts.n_iters = a.iters;
  opts.jobs = a.jobs;
  TrainReport report = TrainVb(std::move(model), fs, opts, &log);
  SaveModel(a.model_out, report.model);
  std::cout << "train: " << a.iters << " iterations, final elbo "
            << Fmt(report.elbo.back()) << " -> " << a.model_out << '\n';
  return 0;
}

struct DecodeArgs {
  FeatureInput input;
  std::string model;
  std::string out;
  std::string state_labels_out;
  int jobs = 0;
};

int RunDecode(const DecodeArgs &a) {
  PhoneLoopModel model = LoadModel(a.model);
  FeatureSet fs = LoadFeatures(a.input);
  Tokenization tok = ViterbiTokenize(model, fs, a.jobs);
  WriteTokenization(a.out, tok);
  if (!a.state_labels_out.empty()) WriteStateLabels(a.state_labels_out, tok);
  const auto [n_units, histogram] = UnitInventory(tok);
  std::size_t n_tokens = 0;
  for (const auto &[unit, count] : histogram)
    n_tokens += static_cast<std::size_t>(count);
  std::cout << "decode: " << n_tokens << " tokens over " << n_units
            << " distinct units -> " << a.out << '\n';
  return 0;
}

struct PostgramArgs {
  FeatureInput input;
  std::string model;
  std::string out;
  std::string level = "unit";
  int jobs = 0;
};

int RunPostgram(const PostgramArgs &a) {
  if (a.level != "unit" && a.level != "state")
    throw UsageError("--level must be 'unit' or 'state'");
  PhoneLoopModel model = LoadModel(a.model);
  FeatureSet fs = LoadFeatures(a.input);
  Posteriorgram post = ComputePosteriorgram(
      model, fs,
      a.level == "unit" ? PosteriorLevel::kUnit : PosteriorLevel::kState,
      a.jobs);
  FeatureSet out;
  out.frame_period_s = fs.frame_period_s;
  for (auto &u : post.utterances)
    out.utterances.push_back({u.id, std::move(u.posteriors)});
  WriteFeatureArchive(a.out, out);
  std::cout << "postgram: " << out.utterances.size() << " utterances at "
            << a.level << " level -> " << a.out << '\n';
  return 0;
}

struct LdaEstimateArgs {
  FeatureInput input;
  std::string state_labels;
  std::string out;
  int context = 5;
  int dim_out = 40;
  double ridge = -1.0;
  int states_per_unit = 3;
};

int RunLdaEstimate(const LdaEstimateArgs &a) {
  FeatureSet fs = LoadFeatures(a.input);
  FeatureSet spliced = SpliceFeatures(fs, a.context);
  Tokenization tok = ReadTokenization(a.state_labels);
  auto labels = FrameStateClasses(tok, a.states_per_unit);
  LdaTransform t = EstimateLda(spliced, labels, a.dim_out, a.ridge);
  SaveLdaTransform(a.out, t);
  std::cout << "lda-estimate: " << t.class_count << " classes, "
            << t.projection.rows() << "x" << t.projection.cols()
            << " projection -> " << a.out << '\n';
  return 0;
}

struct LdaApplyArgs {
  FeatureInput input;
  std::string transform;
  std::string out;
  int context = 5;
  bool cmvn_out = true;
};

int RunLdaApply(const LdaApplyArgs &a) {
  FeatureSet fs = LoadFeatures(a.input);
  FeatureSet spliced = SpliceFeatures(fs, a.context);
  LdaTransform t = LoadLdaTransform(a.transform);
  FeatureSet projected = ApplyLda(t, spliced);
  if (a.cmvn_out) projected = ApplyCmvn(projected);
  WriteFeatureArchive(a.out, projected);
  std::cout << "lda-apply: projected to dim " << projected.Dim() << " -> "
            << a.out << '\n';
  return 0;
}

struct SecondPassArgs {
  FeatureInput input;
  std::string first_model;
  std::string out_dir;
  int context = 5;
  int dim_out = 40;
  double ridge = -1.0;
  int iters = 10, jobs = 0;
  std::uint64_t seed = 0;
  bool cmvn_out = true;
};

int RunSecondPass(const SecondPassArgs &a) {
  namespace fsys = std::filesystem;
  fsys::create_directories(a.out_dir);
  const std::string dir = a.out_dir + "/";

  PhoneLoopModel first = LoadModel(a.first_model);
  FeatureSet fs_raw = LoadFeatures(a.input);

  // First-pass state labels on the raw features.
  Tokenization tok = ViterbiTokenize(first, fs_raw, a.jobs);
  WriteStateLabels(dir + "state_labels.tsv", tok);
  auto labels = FrameStateClasses(tok, first.config.states_per_unit);

  // LDA on spliced context windows with those labels.
  FeatureSet spliced = SpliceFeatures(fs_raw, a.context);
  int dim_out = a.dim_out;
  const int max_dim =
      std::min(spliced.Dim(),
               static_cast<int>([&] {
                 std::set<int> cls;
                 for (const auto &[utt, v] : labels) cls.insert(v.begin(), v.end());
                 return cls.size();
               }()) - 1);
  if (dim_out > max_dim) {
    std::cerr << "second-pass: clamping lda dim " << dim_out << " -> "
              << max_dim << '\n';
    dim_out = max_dim;
  }
  LdaTransform t = EstimateLda(spliced, labels, dim_out, a.ridge);
  SaveLdaTransform(dir + "lda.json", t);

  FeatureSet fs_lda = ApplyLda(t, spliced);
  if (a.cmvn_out) fs_lda = ApplyCmvn(fs_lda);
  WriteFeatureArchive(dir + "features_lda.feat1", fs_lda);

  // Seed the second pass by transferring first-pass posterior stats.
  SufficientStats stats = TransferStats(first, fs_raw, fs_lda, a.jobs);
  Eigen::VectorXd mean, var;
  DataMoments(fs_lda, &mean, &var);
  ModelConfig cfg2 = ModelConfig::Defaults(
      first.config.truncation, first.config.states_per_unit,
      first.config.gaussians_per_state, mean, var);
  cfg2.stick_concentration = first.config.stick_concentration;
  cfg2.dirichlet_prior_weight = first.config.dirichlet_prior_weight;
  PhoneLoopModel second = MStep(InitModel(cfg2, a.seed), stats);

  std::ofstream log(dir + "train.log", std::ios::trunc);
  TrainOptions opts;
  opts.n_iters = a.iters;
  opts.jobs = a.jobs;
  TrainReport report = TrainVb(std::move(second), fs_lda, opts, &log);
  SaveModel(dir + "model_second.json", report.model);
  std::cout << "second-pass: lda dim " << fs_lda.Dim() << ", final elbo "
            << Fmt(report.elbo.back()) << " -> " << a.out_dir << '\n';
  return 0;
}

struct EvalNmiArgs {
  std::string hyp, ref, out;
};

int RunEvalNmi(const EvalNmiArgs &a) {
  Tokenization hyp = ReadTokenization(a.hyp);
  ReferenceTranscript ref = ReadTranscript(a.ref);
  NmiResult res = Nmi(AlignTokens(hyp, ref));
  WriteReport(a.out, {{"mi", Fmt(res.mi)},
                      {"h_ref", Fmt(res.h_ref)},
                      {"h_hyp", Fmt(res.h_hyp)},
                      {"nmi", Fmt(res.nmi)},
                      {"nmi_percent", Fmt(100.0 * res.nmi)},
                      {"n_pairs", std::to_string(res.n_pairs)},
                      {"n_hyp_units", std::to_string(res.n_hyp_units)},
                      {"n_ref_labels", std::to_string(res.n_ref_labels)}});
  std::cout << "eval-nmi: nmi " << Fmt(res.nmi) << " over " << res.n_pairs
            << " pairs -> " << a.out << '\n';
  return 0;
}

struct EvalSamediffArgs {
  std::string segments, postgram, out, pairs_out;
  double floor = 1e-8;
  double min_dur_s = 0.0;
  int min_chars = 0;
  double frame_period_s = 0.010;
  int band = -1;
  int jobs = 0;
};

int RunEvalSamediff(const EvalSamediffArgs &a) {
  std::vector<WordSegment> segments = ReadWordSegments(a.segments);
  if (a.min_dur_s > 0.0 || a.min_chars > 0) {
    std::vector<WordSegment> kept;
    for (const auto &s : segments) {
      const double dur =
          (s.end_frame - s.start_frame) * a.frame_period_s;
      if (dur + 1e-12 < a.min_dur_s) continue;
      if (static_cast<int>(s.word_type.size()) < a.min_chars) continue;
      kept.push_back(s);
    }
    segments = std::move(kept);
  }
  FeatureSet archive = ReadFeatureArchive(a.postgram);
  Posteriorgram post;
  post.level = PosteriorLevel::kUnit;
  for (auto &u : archive.utterances)
    post.utterances.push_back({u.id, std::move(u.features)});
  SameDiffResult res = SameDifferentEval(segments, post, a.floor, a.jobs,
                                         a.band);
  WriteReport(a.out,
              {{"ap", Fmt(res.average_precision)},
               {"positives", std::to_string(res.positives)},
               {"negatives", std::to_string(res.total_pairs - res.positives)},
               {"pairs", std::to_string(res.total_pairs)}});
  if (!a.pairs_out.empty()) {
    std::ofstream pairs(a.pairs_out, std::ios::trunc);
    if (!pairs) throw IoError("cannot write pair scores: " + a.pairs_out);
    for (const auto &p : res.pairs)
      pairs << segments[static_cast<std::size_t>(p.a)].utterance_id << ':'
            << segments[static_cast<std::size_t>(p.a)].start_frame << '\t'
            << segments[static_cast<std::size_t>(p.b)].utterance_id << ':'
            << segments[static_cast<std::size_t>(p.b)].start_frame << '\t'
            << Fmt(p.distance) << '\t' << (p.same_type ? "same" : "diff")
            << '\n';
  }
  std::cout << "eval-samediff: ap " << Fmt(res.average_precision) << " ("
            << res.positives << '/' << res.total_pairs << " positive) -> "
            << a.out << '\n';
  return 0;
}

struct DocClassifyArgs {
  std::string documents, tokens, out;
  int n_lo = 3, n_hi = 3;
  int folds = 10;
  SvmConfig svm;
};

int RunDocClassify(const DocClassifyArgs &a) {
  DocumentSet docs = ReadDocuments(a.documents);
  Tokenization tok = ReadTokenization(a.tokens);
  std::vector<std::string> warnings;
  DocVectorSet vectors = NgramTfidf(docs, tok, a.n_lo, a.n_hi, &warnings);
  for (const auto &w : warnings) std::cerr << "warning: " << w << '\n';
  const auto [mean, std_dev] =
      CrossValidate(vectors.vectors, vectors.Dim(), a.folds, a.svm, a.svm.seed);
  WriteReport(a.out, {{"accuracy_mean", Fmt(mean)},
                      {"accuracy_std", Fmt(std_dev)},
                      {"folds", std::to_string(a.folds)},
                      {"n_docs", std::to_string(vectors.vectors.size())},
                      {"n_features", std::to_string(vectors.Dim())}});
  std::cout << "doc-classify: accuracy " << Fmt(mean) << " +/- "
            << Fmt(std_dev) << " -> " << a.out << '\n';
  return 0;
}

struct DocClusterArgs {
  std::string documents, tokens, out;
  int n_lo = 1, n_hi = 3;
  int k = 0;
  int n_init = 10;
  std::uint64_t seed = 0;
  int jobs = 0;
};

int RunDocCluster(const DocClusterArgs &a) {
  DocumentSet docs = ReadDocuments(a.documents);
  Tokenization tok = ReadTokenization(a.tokens);
  DocVectorSet vectors = NgramTfidf(docs, tok, a.n_lo, a.n_hi);
  std::vector<std::string> labels;
  for (const auto &v : vectors.vectors) labels.push_back(v.label);
  int k = a.k;
  if (k == 0) {
    std::set<std::string> topics(labels.begin(), labels.end());
    k = static_cast<int>(topics.size());
  }

  // The reported mean/std is over independent initializations, each a
  // single restart.
  std::vector<double> purities, b3f1s;
  for (int r = 0; r < a.n_init; ++r) {
    std::vector<int> assign = RepeatedBisectionCluster(
        vectors.vectors, vectors.Dim(), k, 1, MixSeed(a.seed, 7000 + r),
        a.jobs);
    purities.push_back(Purity(assign, labels));
    b3f1s.push_back(BcubedF1(assign, labels));
  }
  auto mean_std = [](const std::vector<double> &v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return std::pair<double, double>(mean,
                                     std::sqrt(var / static_cast<double>(v.size())));
  };
  const auto [pm, ps] = mean_std(purities);
  const auto [bm, bs] = mean_std(b3f1s);
  WriteReport(a.out, {{"purity_mean", Fmt(pm)},
                      {"purity_std", Fmt(ps)},
                      {"b3f1_mean", Fmt(bm)},
                      {"b3f1_std", Fmt(bs)},
                      {"k", std::to_string(k)},
                      {"n_init", std::to_string(a.n_init)}});
  std::cout << "doc-cluster: purity " << Fmt(pm) << " +/- " << Fmt(ps)
            << ", b3f1 " << Fmt(bm) << " +/- " << Fmt(bs) << " -> " << a.out
            << '\n';
  return 0;
}

struct ModelInfoArgs {
  std::string model;
};

int RunModelInfo(const ModelInfoArgs &a) {
  PhoneLoopModel model = LoadModel(a.model);
  const auto &cfg = model.config;
  std::cout << "model-info: T=" << cfg.truncation << " S=" << cfg.states_per_unit
            << " M=" << cfg.gaussians_per_state << " dim=" << cfg.dim
            << " gamma=" << cfg.stick_concentration
            << " kl_to_prior=" << Fmt(KlToPrior(model)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"audkit: acoustic unit discovery toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto *synth_cmd = app.add_subcommand(
      "synth", "generate a synthetic corpus with known ground truth");
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();
  synth_cmd->add_option("--units", synth.spec.n_true_units);
  synth_cmd->add_option("--states", synth.spec.states_per_unit);
  synth_cmd->add_option("--dim", synth.spec.dim);
  synth_cmd->add_option("--utts", synth.spec.n_utterances);
  synth_cmd->add_option("--frames-per-state", synth.spec.mean_frames_per_state);
  synth_cmd->add_option("--separation", synth.spec.mean_separation);
  synth_cmd->add_option("--topics", synth.spec.n_topics);
  synth_cmd->add_option("--docs-per-topic", synth.spec.docs_per_topic);
  synth_cmd->add_option("--units-per-utt", synth.spec.units_per_utterance);
  synth_cmd->add_option("--word-types", synth.spec.n_word_types);
  synth_cmd->add_option("--word-prob", synth.spec.word_probability);
  synth_cmd->add_option("--seed", synth.seed);

  TrainArgs train;
  auto *train_cmd = app.add_subcommand("train", "first-pass VB training");
  AddFeatureOptions(train_cmd, &train.input);
  train_cmd->add_option("--model-out", train.model_out)->required();
  train_cmd->add_option("--log", train.log_path);
  train_cmd->add_option("-T,--truncation", train.truncation);
  train_cmd->add_option("-S,--states", train.states);
  train_cmd->add_option("-M,--gaussians", train.gaussians);
  train_cmd->add_option("--gamma", train.stick_concentration);
  train_cmd->add_option("--prior-weight", train.prior_weight);
  train_cmd->add_option("--iters", train.iters);
  train_cmd->add_option("--jobs", train.jobs);
  train_cmd->add_option("--seed", train.seed);

  DecodeArgs decode;
  auto *decode_cmd =
      app.add_subcommand("decode", "Viterbi unit tokenization");
  AddFeatureOptions(decode_cmd, &decode.input);
  decode_cmd->add_option("--model", decode.model)->required();
  decode_cmd->add_option("--out", decode.out)->required();
  decode_cmd->add_option("--state-labels", decode.state_labels_out);
  decode_cmd->add_option("--jobs", decode.jobs);

  PostgramArgs postgram;
  auto *postgram_cmd =
      app.add_subcommand("postgram", "forward-backward posteriorgrams");
  AddFeatureOptions(postgram_cmd, &postgram.input);
  postgram_cmd->add_option("--model", postgram.model)->required();
  postgram_cmd->add_option("--out", postgram.out)->required();
  postgram_cmd->add_option("--level", postgram.level);
  postgram_cmd->add_option("--jobs", postgram.jobs);

  LdaEstimateArgs lda_est;
  auto *lda_est_cmd = app.add_subcommand(
      "lda-estimate", "estimate LDA from state-level tokenization labels");
  AddFeatureOptions(lda_est_cmd, &lda_est.input);
  lda_est_cmd->add_option("--state-labels", lda_est.state_labels)->required();
  lda_est_cmd->add_option("--out", lda_est.out)->required();
  lda_est_cmd->add_option("--context", lda_est.context);
  lda_est_cmd->add_option("--dim-out", lda_est.dim_out);
  lda_est_cmd->add_option("--ridge", lda_est.ridge);
  lda_est_cmd->add_option("--states", lda_est.states_per_unit);

  LdaApplyArgs lda_apply;
  auto *lda_apply_cmd =
      app.add_subcommand("lda-apply", "project features through an LDA");
  AddFeatureOptions(lda_apply_cmd, &lda_apply.input);
  lda_apply_cmd->add_option("--transform", lda_apply.transform)->required();
  lda_apply_cmd->add_option("--out", lda_apply.out)->required();
  lda_apply_cmd->add_option("--context", lda_apply.context);
  lda_apply_cmd->add_flag("!--no-cmvn-out", lda_apply.cmvn_out,
                          "skip CMVN after projection");

  SecondPassArgs second;
  auto *second_cmd = app.add_subcommand(
      "second-pass",
      "tokenize, estimate+apply LDA, transfer stats, retrain");
  AddFeatureOptions(second_cmd, &second.input);
  second_cmd->add_option("--model", second.first_model)->required();
  second_cmd->add_option("--out-dir", second.out_dir)->required();
  second_cmd->add_option("--context", second.context);
  second_cmd->add_option("--dim-out", second.dim_out);
  second_cmd->add_option("--ridge", second.ridge);
  second_cmd->add_option("--iters", second.iters);
  second_cmd->add_option("--jobs", second.jobs);
  second_cmd->add_option("--seed", second.seed);
  second_cmd->add_flag("!--no-cmvn-out", second.cmvn_out,
                       "skip CMVN after projection");

  EvalNmiArgs nmi;
  auto *nmi_cmd = app.add_subcommand(
      "eval-nmi", "score a tokenization against a reference transcript");
  nmi_cmd->add_option("--hyp", nmi.hyp)->required();
  nmi_cmd->add_option("--ref", nmi.ref)->required();
  nmi_cmd->add_option("--out", nmi.out)->required();

  EvalSamediffArgs samediff;
  auto *samediff_cmd = app.add_subcommand(
      "eval-samediff", "same-different average precision over DTW distances");
  samediff_cmd->add_option("--segments", samediff.segments)->required();
  samediff_cmd->add_option("--postgram", samediff.postgram)->required();
  samediff_cmd->add_option("--out", samediff.out)->required();
  samediff_cmd->add_option("--pairs-out", samediff.pairs_out);
  samediff_cmd->add_option("--floor", samediff.floor);
  samediff_cmd->add_option("--min-dur", samediff.min_dur_s);
  samediff_cmd->add_option("--min-chars", samediff.min_chars);
  samediff_cmd->add_option("--frame-period", samediff.frame_period_s);
  samediff_cmd->add_option("--band", samediff.band);
  samediff_cmd->add_option("--jobs", samediff.jobs);

  DocClassifyArgs classify;
  auto *classify_cmd = app.add_subcommand(
      "doc-classify", "cross-validated topic classification");
  classify_cmd->add_option("--documents", classify.documents)->required();
  classify_cmd->add_option("--tokens", classify.tokens)->required();
  classify_cmd->add_option("--out", classify.out)->required();
  classify_cmd->add_option("--n-lo", classify.n_lo);
  classify_cmd->add_option("--n-hi", classify.n_hi);
  classify_cmd->add_option("--folds", classify.folds);
  classify_cmd->add_option("--epochs", classify.svm.epochs);
  classify_cmd->add_option("--lambda", classify.svm.lambda_l1);
  classify_cmd->add_option("--eta0", classify.svm.eta0);
  classify_cmd->add_option("--seed", classify.svm.seed);

  DocClusterArgs cluster;
  auto *cluster_cmd =
      app.add_subcommand("doc-cluster", "repeated-bisection topic clustering");
  cluster_cmd->add_option("--documents", cluster.documents)->required();
  cluster_cmd->add_option("--tokens", cluster.tokens)->required();
  cluster_cmd->add_option("--out", cluster.out)->required();
  cluster_cmd->add_option("--n-lo", cluster.n_lo);
  cluster_cmd->add_option("--n-hi", cluster.n_hi);
  cluster_cmd->add_option("--k", cluster.k);
  cluster_cmd->add_option("--n-init", cluster.n_init);
  cluster_cmd->add_option("--seed", cluster.seed);
  cluster_cmd->add_option("--jobs", cluster.jobs);

  ModelInfoArgs info;
  auto *info_cmd = app.add_subcommand("model-info", "print a model summary");
  info_cmd->add_option("--model", info.model)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth_cmd->parsed()) return RunSynth(synth);
    if (train_cmd->parsed()) return RunTrain(train);
    if (decode_cmd->parsed()) return RunDecode(decode);
    if (postgram_cmd->parsed()) return RunPostgram(postgram);
    if (lda_est_cmd->parsed()) return RunLdaEstimate(lda_est);
    if (lda_apply_cmd->parsed()) return RunLdaApply(lda_apply);
    if (second_cmd->parsed()) return RunSecondPass(second);
    if (nmi_cmd->parsed()) return RunEvalNmi(nmi);
    if (samediff_cmd->parsed()) return RunEvalSamediff(samediff);
    if (classify_cmd->parsed()) return RunDocClassify(classify);
    if (cluster_cmd->parsed()) return RunDocCluster(cluster);
    if (info_cmd->parsed()) return RunModelInfo(info);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError &e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError &e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError &e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
