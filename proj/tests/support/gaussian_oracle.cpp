#include "support/gaussian_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace foscan::testing {
namespace {

MatR to_real(const Eigen::MatrixXd& m) { return m.cast<Real>(); }

}  // namespace

JointGaussian::JointGaussian(const ModelDef& model, int total_steps)
    : d_(static_cast<int>(model.F.rows())), steps_(total_steps) {
  const int d = d_;
  const int T = steps_;
  // Noise layout: e0 (d) | v(1..T-1) | w(0..T-1).
  const int n_noise = d + (T - 1) + T;
  const int n_vars = d * T + T;
  const int v_off = d;
  const int w_off = d + (T - 1);

  const MatR F = to_real(model.F);
  const MatR G = to_real(model.G);
  const MatR H = to_real(model.H);

  MatR load = MatR::Zero(n_vars, n_noise);
  mean_ = VecR::Zero(n_vars);

  VecR state_mean = model.prior_mean.cast<Real>();
  MatR state_load = MatR::Zero(d, n_noise);
  state_load.block(0, 0, d, d) = MatR::Identity(d, d);
  for (int n = 0; n < T; ++n) {
    if (n > 0) {
      state_mean = F * state_mean;
      state_load = F * state_load;
      state_load.col(v_off + n - 1) += G.col(0);
    }
    mean_.segment(n * d, d) = state_mean;
    load.block(n * d, 0, d, n_noise) = state_load;
    mean_(obs_index(n)) = (H * state_mean)(0);
    load.row(obs_index(n)) = H * state_load;
    load(obs_index(n), w_off + n) += 1;
  }

  MatR noise = MatR::Zero(n_noise, n_noise);
  noise.block(0, 0, d, d) = to_real(model.prior_var);
  for (int k = 0; k < T - 1; ++k) noise(v_off + k, v_off + k) = model.q;
  for (int k = 0; k < T; ++k) noise(w_off + k, w_off + k) = model.r;
  cov_ = load * noise * load.transpose();
}

JointGaussian::Moments JointGaussian::condition(const std::vector<int>& obs_steps,
                                                const std::vector<double>& values) const {
  if (obs_steps.empty()) return {mean_, cov_};
  const auto k = static_cast<int>(obs_steps.size());
  MatR cross(cov_.rows(), k);
  MatR s(k, k);
  VecR resid(k);
  for (int a = 0; a < k; ++a) {
    const int ia = obs_index(obs_steps[static_cast<std::size_t>(a)]);
    cross.col(a) = cov_.col(ia);
    resid(a) = static_cast<Real>(values[static_cast<std::size_t>(a)]) - mean_(ia);
    for (int b = 0; b < k; ++b) {
      s(a, b) = cov_(ia, obs_index(obs_steps[static_cast<std::size_t>(b)]));
    }
  }
  Eigen::LDLT<MatR> ldlt(s);
  Moments out;
  out.mean = mean_ + cross * ldlt.solve(resid);
  out.cov = cov_ - cross * ldlt.solve(MatR(cross.transpose()));
  return out;
}

Real JointGaussian::log_density(const std::vector<int>& obs_steps,
                                const std::vector<double>& values) const {
  const auto k = static_cast<int>(obs_steps.size());
  if (k == 0) return 0;
  MatR s(k, k);
  VecR resid(k);
  for (int a = 0; a < k; ++a) {
    const int ia = obs_index(obs_steps[static_cast<std::size_t>(a)]);
    resid(a) = static_cast<Real>(values[static_cast<std::size_t>(a)]) - mean_(ia);
    for (int b = 0; b < k; ++b) {
      s(a, b) = cov_(ia, obs_index(obs_steps[static_cast<std::size_t>(b)]));
    }
  }
  Eigen::LLT<MatR> llt(s);
  const MatR L = llt.matrixL();
  Real log_det = 0;
  for (int a = 0; a < k; ++a) log_det += 2 * std::log(L(a, a));
  const VecR white = L.triangularView<Eigen::Lower>().solve(resid);
  const Real log_2pi = std::log(2 * std::numbers::pi_v<Real>);
  return -0.5L * (k * log_2pi + log_det + white.squaredNorm());
}

OracleResult oracle_moments(const ModelDef& model,
                            const std::vector<std::optional<double>>& y,
                            int horizon, int burn_in) {
  const int N = static_cast<int>(y.size());
  JointGaussian joint(model, N + horizon);
  const int d = joint.order();
  OracleResult out;

  std::vector<int> steps;
  std::vector<double> values;
  auto state_block = [&](const JointGaussian::Moments& m, int n) {
    return std::pair<VecR, MatR>{m.mean.segment(n * d, d),
                                 m.cov.block(n * d, n * d, d, d)};
  };

  for (int n = 0; n < N; ++n) {
    const auto before = joint.condition(steps, values);
    auto [pm, pv] = state_block(before, n);
    out.predicted_mean.push_back(pm);
    out.predicted_var.push_back(pv);
    if (y[static_cast<std::size_t>(n)]) {
      steps.push_back(n);
      values.push_back(*y[static_cast<std::size_t>(n)]);
    }
    const auto after = joint.condition(steps, values);
    auto [fm, fv] = state_block(after, n);
    out.filtered_mean.push_back(fm);
    out.filtered_var.push_back(fv);
  }

  const auto all = joint.condition(steps, values);
  for (int n = 0; n < N; ++n) {
    auto [sm, sv] = state_block(all, n);
    out.smoothed_mean.push_back(sm);
    out.smoothed_var.push_back(sv);
  }
  for (int j = 1; j <= horizon; ++j) {
    const int idx = joint.obs_index(N + j - 1);
    out.forecast_mean.push_back(all.mean(idx));
    out.forecast_var.push_back(all.cov(idx, idx));
  }

  const auto burn = static_cast<std::size_t>(std::min<int>(burn_in, static_cast<int>(steps.size())));
  const std::vector<int> head(steps.begin(), steps.begin() + static_cast<long>(burn));
  const std::vector<double> head_values(values.begin(), values.begin() + static_cast<long>(burn));
  out.log_lik = joint.log_density(steps, values) - joint.log_density(head, head_values);
  return out;
}

}  // namespace foscan::testing
