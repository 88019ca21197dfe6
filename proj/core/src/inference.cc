// core/src/inference.cc
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

#include "aud/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <ostream>

namespace aud {

namespace {

// Per-state emission log-likelihoods: fold the M components of each
// state with log-sum-exp.
Eigen::MatrixXd StateLogliks(const Eigen::MatrixXd &comp_logliks, int M) {
  const Eigen::Index n = comp_logliks.rows();
  const Eigen::Index n_states = comp_logliks.cols() / M;
  Eigen::MatrixXd state_ll(n, n_states);
  Eigen::RowVectorXd row(comp_logliks.cols());
  for (Eigen::Index t = 0; t < n; ++t) {
    row = comp_logliks.row(t);
    for (Eigen::Index j = 0; j < n_states; ++j)
      state_ll(t, j) =
          LogSumExp(row.data() + j * M, static_cast<std::size_t>(M));
  }
  return state_ll;
}

double DirichletKl(const Eigen::VectorXd &q, const Eigen::VectorXd &p) {
  const double q0 = q.sum(), p0 = p.sum();
  double kl = std::lgamma(q0) - std::lgamma(p0);
  const double psi_q0 = Digamma(q0);
  for (Eigen::Index k = 0; k < q.size(); ++k) {
    kl += std::lgamma(p(k)) - std::lgamma(q(k)) +
          (q(k) - p(k)) * (Digamma(q(k)) - psi_q0);
  }
  return kl;
}

double BetaKl(const BetaParams &q, const BetaParams &p) {
  Eigen::Vector2d qv(q.a, q.b), pv(p.a, p.b);
  return DirichletKl(qv, pv);
}

// KL between Normal-Gamma posteriors q=(m,kappa,a,b) and prior p, summed
// over dimensions (shared kappa and shape, per-dimension mean and rate).
double NormalGammaKl(const NormalGammaParams &q, const NormalGammaParams &p) {
  const Eigen::Index D = q.mean.size();
  const double psi_a = Digamma(q.shape);
  double kl = 0.0;
  for (Eigen::Index d = 0; d < D; ++d) {
    const double elambda = q.shape / q.rate(d);
    // Conditional-normal part.
    kl += 0.5 * std::log(q.kappa / p.kappa) - 0.5 +
          0.5 * p.kappa *
              (1.0 / q.kappa +
               (q.mean(d) - p.mean(d)) * (q.mean(d) - p.mean(d)) * elambda);
    // Gamma part.
    kl += (q.shape - p.shape) * psi_a - std::lgamma(q.shape) +
          std::lgamma(p.shape) + p.shape * std::log(q.rate(d) / p.rate(d)) +
          q.shape * (p.rate(d) - q.rate(d)) / q.rate(d);
  }
  return kl;
}

}  // namespace

SufficientStats SufficientStats::Zeros(const PhoneLoopModel &model, int dim) {
  const int T = model.config.truncation, S = model.config.states_per_unit;
  const int M = model.config.gaussians_per_state;
  SufficientStats st;
  st.unit_entry = Eigen::VectorXd::Zero(T);
  st.trans_self = Eigen::MatrixXd::Zero(T, S);
  st.trans_adv = Eigen::MatrixXd::Zero(T, S);
  st.comp_occ = Eigen::MatrixXd::Zero(T * S, M);
  st.s1 = Eigen::MatrixXd::Zero(T * S * M, dim);
  st.s2 = Eigen::MatrixXd::Zero(T * S * M, dim);
  return st;
}

void SufficientStats::MergeFrom(const SufficientStats &other) {
  if (unit_entry.size() != other.unit_entry.size() ||
      s1.rows() != other.s1.rows() || s1.cols() != other.s1.cols())
    throw ValidationError("sufficient stats shape mismatch in merge");
  unit_entry += other.unit_entry;
  trans_self += other.trans_self;
  trans_adv += other.trans_adv;
  comp_occ += other.comp_occ;
  s1 += other.s1;
  s2 += other.s2;
  log_evidence += other.log_evidence;
  n_frames += other.n_frames;
}

SufficientStats MergeStats(const SufficientStats &a, const SufficientStats &b) {
  SufficientStats out = a;
  out.MergeFrom(b);
  return out;
}

FbResult ForwardBackward(const UnifiedHmmView &view,
                         const Eigen::MatrixXd &frame_logliks,
                         int gaussians_per_state) {
  const int T = view.num_units, S = view.states_per_unit;
  const int M = gaussians_per_state;
  const Eigen::Index n = frame_logliks.rows();
  if (n < 1) throw ValidationError("forward-backward needs at least 1 frame");
  if (frame_logliks.cols() != static_cast<Eigen::Index>(T) * S * M)
    throw ValidationError("frame loglik width does not match T*S*M");
  if (!frame_logliks.allFinite())
    throw NumericError("non-finite frame log-likelihoods");

  const Eigen::MatrixXd state_ll = StateLogliks(frame_logliks, M);
  const Eigen::Index n_states = state_ll.cols();

  Eigen::MatrixXd alpha(n, n_states), beta(n, n_states);
  Eigen::VectorXd exit_score(n);  // logsumexp over final states + exit term

  // Forward.
  alpha.row(0).setConstant(kLogZero);
  for (int t = 0; t < T; ++t)
    alpha(0, t * S) = view.entry_logw(t) + state_ll(0, t * S);
  for (Eigen::Index tau = 0; tau + 1 < n; ++tau) {
    double ex = kLogZero;
    for (int t = 0; t < T; ++t)
      ex = LogAdd(ex, alpha(tau, t * S + S - 1) + view.log_adv(t, S - 1));
    exit_score(tau) = ex;
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < S; ++s) {
        const int j = t * S + s;
        double pre = alpha(tau, j) + view.log_self(t, s);
        if (s == 0) {
          pre = LogAdd(pre, ex + view.entry_logw(t));
        } else {
          pre = LogAdd(pre, alpha(tau, j - 1) + view.log_adv(t, s - 1));
        }
        alpha(tau + 1, j) = pre + state_ll(tau + 1, j);
      }
    }
  }
  const Eigen::RowVectorXd last_alpha = alpha.row(n - 1);
  const double log_z =
      LogSumExp(last_alpha.data(), static_cast<std::size_t>(n_states));
  if (!std::isfinite(log_z))
    throw NumericError("forward pass produced non-finite log-evidence");

  // Backward, plus the per-frame entry sums needed for loop-back stats.
  Eigen::VectorXd entry_sum(n);
  beta.row(n - 1).setZero();
  for (Eigen::Index tau = n - 2; tau >= 0; --tau) {
    double es = kLogZero;
    for (int t = 0; t < T; ++t)
      es = LogAdd(es, view.entry_logw(t) + state_ll(tau + 1, t * S) +
                          beta(tau + 1, t * S));
    entry_sum(tau + 1) = es;
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < S; ++s) {
        const int j = t * S + s;
        double v = view.log_self(t, s) + state_ll(tau + 1, j) + beta(tau + 1, j);
        if (s < S - 1) {
          v = LogAdd(v, view.log_adv(t, s) + state_ll(tau + 1, j + 1) +
                            beta(tau + 1, j + 1));
        } else {
          v = LogAdd(v, view.log_adv(t, s) + es);
        }
        beta(tau, j) = v;
      }
    }
  }

  FbResult fb;
  fb.log_evidence = log_z;
  fb.gamma = (alpha + beta).array() - log_z;
  fb.gamma = fb.gamma.array().exp();

  // Component posteriors: state posterior times within-state
  // responsibility.
  fb.comp_post.resize(n, n_states * M);
  for (Eigen::Index tau = 0; tau < n; ++tau)
    for (Eigen::Index j = 0; j < n_states; ++j)
      for (int m = 0; m < M; ++m)
        fb.comp_post(tau, j * M + m) =
            fb.gamma(tau, j) *
            std::exp(frame_logliks(tau, j * M + m) - state_ll(tau, j));

  // Transition and entry statistics.
  fb.xi_self = Eigen::MatrixXd::Zero(T, S);
  fb.xi_adv = Eigen::MatrixXd::Zero(T, S);
  fb.unit_entry = Eigen::VectorXd::Zero(T);
  for (int t = 0; t < T; ++t) fb.unit_entry(t) = fb.gamma(0, t * S);
  for (Eigen::Index tau = 0; tau + 1 < n; ++tau) {
    for (int t = 0; t < T; ++t) {
      for (int s = 0; s < S; ++s) {
        const int j = t * S + s;
        fb.xi_self(t, s) += std::exp(alpha(tau, j) + view.log_self(t, s) +
                                     state_ll(tau + 1, j) + beta(tau + 1, j) -
                                     log_z);
        if (s < S - 1) {
          fb.xi_adv(t, s) += std::exp(alpha(tau, j) + view.log_adv(t, s) +
                                      state_ll(tau + 1, j + 1) +
                                      beta(tau + 1, j + 1) - log_z);
        } else {
          fb.xi_adv(t, s) += std::exp(alpha(tau, j) + view.log_adv(t, s) +
                                      entry_sum(tau + 1) - log_z);
        }
      }
      fb.unit_entry(t) +=
          std::exp(exit_score(tau) + view.entry_logw(t) +
                   state_ll(tau + 1, t * S) + beta(tau + 1, t * S) - log_z);
    }
  }
  return fb;
}

void AccumulateStats(const FbResult &fb, const Eigen::MatrixXd &frames,
                     SufficientStats *into) {
  if (fb.comp_post.rows() != frames.rows())
    throw ValidationError("posterior/frame count mismatch");
  if (into->s1.rows() != fb.comp_post.cols() ||
      into->s1.cols() != frames.cols())
    throw ValidationError("stats shape mismatch in accumulation");
  into->unit_entry += fb.unit_entry;
  into->trans_self += fb.xi_self;
  into->trans_adv += fb.xi_adv;
  Eigen::VectorXd occ = fb.comp_post.colwise().sum().transpose();
  const int M = static_cast<int>(into->comp_occ.cols());
  for (Eigen::Index j = 0; j < into->comp_occ.rows(); ++j)
    for (int m = 0; m < M; ++m) into->comp_occ(j, m) += occ(j * M + m);
  into->s1.noalias() += fb.comp_post.transpose() * frames;
  into->s2.noalias() +=
      fb.comp_post.transpose() * frames.array().square().matrix();
  into->log_evidence += fb.log_evidence;
  into->n_frames += static_cast<double>(frames.rows());
}

PhoneLoopModel MStep(const PhoneLoopModel &model, const SufficientStats &stats) {
  if (stats.unit_entry.minCoeff() < -1e-9 || stats.comp_occ.minCoeff() < -1e-9 ||
      stats.trans_self.minCoeff() < -1e-9 || stats.trans_adv.minCoeff() < -1e-9)
    throw ValidationError("negative counts in sufficient stats");

  const ModelConfig &cfg = model.config;
  const int T = cfg.truncation, S = cfg.states_per_unit;
  const int M = cfg.gaussians_per_state;
  PhoneLoopModel out = model;

  // Stick-breaking Betas from expected unit entry counts.
  for (int t = 0; t + 1 < T; ++t) {
    double tail = 0.0;
    for (int u = t + 1; u < T; ++u) tail += stats.unit_entry(u);
    out.stick[static_cast<std::size_t>(t)] = {
        1.0 + std::max(0.0, stats.unit_entry(t)),
        cfg.stick_concentration + std::max(0.0, tail)};
  }

  out.trans_self = (stats.trans_self.array().max(0.0) +
                    cfg.dirichlet_prior_weight)
                       .matrix();
  out.trans_adv =
      (stats.trans_adv.array().max(0.0) + cfg.dirichlet_prior_weight).matrix();
  out.gmm_weight =
      (stats.comp_occ.array().max(0.0) + cfg.dirichlet_prior_weight).matrix();

  const auto &prior = cfg.normal_gamma_prior;
  for (int c = 0; c < T * S * M; ++c) {
    const double occ = stats.comp_occ(c / M, c % M);
    auto &g = out.gaussians[static_cast<std::size_t>(c)];
    if (occ < 1e-12) {
      g = prior;
      continue;
    }
    const Eigen::VectorXd sample_mean = stats.s1.row(c).transpose() / occ;
    g.kappa = prior.kappa + occ;
    g.shape = prior.shape + 0.5 * occ;
    g.mean = (prior.kappa * prior.mean + stats.s1.row(c).transpose()) / g.kappa;
    const Eigen::VectorXd within =
        (stats.s2.row(c).transpose() -
         stats.s1.row(c).transpose().cwiseProduct(sample_mean))
            .cwiseMax(0.0);
    const Eigen::VectorXd shift =
        (sample_mean - prior.mean).array().square().matrix() *
        (prior.kappa * occ / (2.0 * g.kappa));
    g.rate = prior.rate + 0.5 * within + shift;
  }
  return out;
}

double KlToPrior(const PhoneLoopModel &model) {
  const ModelConfig &cfg = model.config;
  const int T = cfg.truncation, S = cfg.states_per_unit;
  const int M = cfg.gaussians_per_state;
  const BetaParams stick_prior{1.0, cfg.stick_concentration};
  double kl = 0.0;
  for (const auto &s : model.stick) kl += BetaKl(s, stick_prior);
  const Eigen::Vector2d trans_prior =
      Eigen::Vector2d::Constant(cfg.dirichlet_prior_weight);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < S; ++s) {
      Eigen::Vector2d q(model.trans_self(t, s), model.trans_adv(t, s));
      kl += DirichletKl(q, trans_prior);
    }
  const Eigen::VectorXd weight_prior =
      Eigen::VectorXd::Constant(M, cfg.dirichlet_prior_weight);
  for (int j = 0; j < T * S; ++j)
    kl += DirichletKl(model.gmm_weight.row(j).transpose(), weight_prior);
  for (const auto &g : model.gaussians)
    kl += NormalGammaKl(g, cfg.normal_gamma_prior);
  return kl;
}

double Elbo(const PhoneLoopModel &model, double total_log_evidence) {
  return total_log_evidence - KlToPrior(model);
}

SufficientStats EStep(const PhoneLoopModel &model, const FeatureSet &fs,
                      int jobs) {
  fs.Validate();
  if (fs.utterances.empty())
    throw ValidationError("E-step on empty feature set");
  if (fs.Dim() != model.config.dim)
    throw ValidationError("feature dim does not match model dim");

  const UnifiedHmmView view = MakeUnifiedView(model);
  const int M = model.config.gaussians_per_state;
  const std::size_t n_utts = fs.utterances.size();

  // One stats block per chunk, merged afterwards in index order so the
  // reduction is reproducible for a fixed job count.
  const auto ranges = ChunkRanges(n_utts, jobs);
  std::vector<SufficientStats> partial(ranges.size());

  ParallelChunks(ranges.size(), static_cast<int>(ranges.size()),
                 [&](std::size_t rb, std::size_t re) {
                   for (std::size_t r = rb; r < re; ++r) {
                     SufficientStats local =
                         SufficientStats::Zeros(model, fs.Dim());
                     for (std::size_t i = ranges[r].first;
                          i < ranges[r].second; ++i) {
                       const auto &frames = fs.utterances[i].features;
                       Eigen::MatrixXd ll = ExpectedFrameLoglik(model, frames);
                       FbResult fb = ForwardBackward(view, ll, M);
                       AccumulateStats(fb, frames, &local);
                     }
                     partial[r] = std::move(local);
                   }
                 });

  SufficientStats total = SufficientStats::Zeros(model, fs.Dim());
  for (const auto &p : partial) total.MergeFrom(p);
  return total;
}

TrainReport TrainVb(PhoneLoopModel model, const FeatureSet &fs,
                    const TrainOptions &opts, std::ostream *log) {
  if (opts.n_iters < 1) throw ValidationError("n_iters must be >= 1");
  if (fs.utterances.empty())
    throw ValidationError("cannot train on an empty feature set");

  TrainReport report;
  for (int iter = 0; iter < opts.n_iters; ++iter) {
    const auto start = std::chrono::steady_clock::now();
    SufficientStats stats = EStep(model, fs, opts.jobs);
    const double elbo = Elbo(model, stats.log_evidence);
    model = MStep(model, stats);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    report.elbo.push_back(elbo);
    report.seconds.push_back(seconds);
    if (log != nullptr) {
      char line[96];
      std::snprintf(line, sizeof(line), "%d\t%.17g\t%.3f\n", iter, elbo,
                    seconds);
      (*log) << line;
    }
  }
  report.model = std::move(model);
  return report;
}

}  // namespace aud
