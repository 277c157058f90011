#include "sigrisk/market_models.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "sigrisk/rng.hpp"

namespace sigrisk {

void ModelSpec::validate() const {
  const std::size_t n = static_cast<std::size_t>(n_assets);
  if (n_assets < 1) throw std::invalid_argument("ModelSpec: n_assets must be >= 1");
  if (drift.size() != n || vol.size() != n || initial.size() != n)
    throw std::invalid_argument("ModelSpec: drift/vol/initial must have n_assets entries");
  if (correlation.size() != n * n)
    throw std::invalid_argument("ModelSpec: correlation must be n_assets x n_assets");
  for (double v : vol)
    if (!(v >= 0.0)) throw std::invalid_argument("ModelSpec: vol must be >= 0");
  if (!(jump_intensity >= 0.0))
    throw std::invalid_argument("ModelSpec: jump_intensity must be >= 0");
  if (!(jump_std >= 0.0)) throw std::invalid_argument("ModelSpec: jump_std must be >= 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("ModelSpec: horizon must be > 0");
  if (steps < 1) throw std::invalid_argument("ModelSpec: steps must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (correlation[i * n + i] != 1.0)
      throw std::invalid_argument("ModelSpec: correlation diagonal must be 1");
    for (std::size_t j = 0; j < i; ++j)
      if (correlation[i * n + j] != correlation[j * n + i])
        throw std::invalid_argument("ModelSpec: correlation must be symmetric");
  }
}

namespace {

Eigen::MatrixXd cholesky_factor(const ModelSpec& spec) {
  const int n = spec.n_assets;
  Eigen::MatrixXd corr(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) corr(i, j) = spec.correlation[static_cast<std::size_t>(i) * n + j];
  Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument(
        "ModelSpec: correlation matrix is not positive definite (Cholesky failure)");
  return llt.matrixL();
}

void generate_one_path(const ModelSpec& spec, const Eigen::MatrixXd& chol, std::uint64_t seed,
                       std::uint64_t member, TimedPath& out) {
  const int n = spec.n_assets;
  const int steps = spec.steps;
  const double dt = spec.horizon / steps;
  const double sqrt_dt = std::sqrt(dt);
  CounterRng rng(seed, member);

  out.n_assets = n;
  out.times.resize(static_cast<std::size_t>(steps) + 1);
  out.values.resize((static_cast<std::size_t>(steps) + 1) * n);
  for (int a = 0; a < n; ++a) out.values[static_cast<std::size_t>(a)] = spec.initial[a];
  out.times[0] = 0.0;

  Eigen::VectorXd z(n);
  Eigen::VectorXd eps(n);
  for (int s = 1; s <= steps; ++s) {
    out.times[static_cast<std::size_t>(s)] = dt * s;
    for (int a = 0; a < n; ++a) z(a) = rng.next_normal();
    eps.noalias() = chol * z;
    const int jumps = rng.next_poisson(spec.jump_intensity * dt);
    const std::size_t prev = static_cast<std::size_t>(s - 1) * n;
    const std::size_t cur = static_cast<std::size_t>(s) * n;
    for (int a = 0; a < n; ++a) {
      const double mu = spec.drift[a] - 0.5 * spec.vol[a] * spec.vol[a];
      out.values[cur + a] = out.values[prev + a] + mu * dt + spec.vol[a] * sqrt_dt * eps(a);
    }
    // Market-wide jump events: every asset gaps on each event, with
    // independently drawn log-normal sizes.
    for (int e = 0; e < jumps; ++e)
      for (int a = 0; a < n; ++a)
        out.values[cur + a] += spec.jump_mean + spec.jump_std * rng.next_normal();
  }
}

}  // namespace

std::vector<TimedPath> generate_paths(const ModelSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("generate_paths: n must be >= 1");
  const Eigen::MatrixXd chol = cholesky_factor(spec);
  std::vector<TimedPath> paths(static_cast<std::size_t>(n));

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(hw, (n + 255) / 256));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i)
      generate_one_path(spec, chol, seed, static_cast<std::uint64_t>(i), paths[i]);
    return paths;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers))
        generate_one_path(spec, chol, seed, static_cast<std::uint64_t>(i), paths[i]);
    });
  }
  for (auto& t : pool) t.join();
  return paths;
}

GroupElement prefix_signature(const TimedPath& path, const AlgebraShape& shape, double up_to) {
  path.validate();
  if (up_to < path.times.front() || up_to > path.times.back())
    throw std::invalid_argument("prefix_signature: time outside path horizon");
  TruncatedTensor acc(shape);
  acc.set_scalar(1.0);
  TruncatedTensor seg(shape);
  std::vector<double> inc(static_cast<std::size_t>(shape.dim()));
  for (std::size_t m = 1; m < path.size() && path.times[m - 1] < up_to; ++m) {
    const double t0 = path.times[m - 1];
    const double t1 = path.times[m];
    const double frac = (std::min(t1, up_to) - t0) / (t1 - t0);
    inc[0] = (std::min(t1, up_to) - t0);
    auto prev = path.row(m - 1);
    auto cur = path.row(m);
    for (int a = 0; a < path.n_assets; ++a)
      inc[static_cast<std::size_t>(a) + 1] = (cur[a] - prev[a]) * frac;
    segment_exp_into(seg, inc);
    multiply_inplace(acc, seg);
  }
  return GroupElement(std::move(acc));
}

SignatureEnsemble build_ensemble(const std::vector<TimedPath>& paths, const AlgebraShape& shape,
                                 const std::vector<double>& flow_grid, std::uint64_t seed) {
  if (paths.empty()) throw std::invalid_argument("build_ensemble: empty path set");
  const int n_assets = paths.front().n_assets;
  for (const auto& p : paths) {
    if (p.n_assets != n_assets)
      throw std::invalid_argument("build_ensemble: paths disagree on asset count");
  }
  if (shape.dim() != n_assets + 1)
    throw std::invalid_argument("build_ensemble: shape.dim must equal 1 + asset count");
  for (std::size_t g = 1; g < flow_grid.size(); ++g)
    if (!(flow_grid[g] > flow_grid[g - 1]))
      throw std::invalid_argument("build_ensemble: flow grid must be strictly increasing");
  for (double s : flow_grid)
    for (const auto& p : paths)
      if (s < p.times.front() || s > p.times.back())
        throw std::invalid_argument("build_ensemble: flow grid outside path horizon");

  SignatureEnsemble ens{shape, {}, flow_grid, {}, seed};
  ens.members.reserve(paths.size());
  if (!flow_grid.empty()) ens.flows.reserve(paths.size());

  TruncatedTensor seg(shape);
  std::vector<double> inc(static_cast<std::size_t>(shape.dim()));
  for (const auto& path : paths) {
    path.validate();
    if (flow_grid.empty()) {
      ens.members.push_back(compute_signature(path, shape));
      continue;
    }
    // One sweep per path: advance the running prefix across full segments,
    // snapshotting (with an exact partial segment) at each grid time.
    std::vector<GroupElement> snapshots;
    snapshots.reserve(flow_grid.size());
    TruncatedTensor acc(shape);
    acc.set_scalar(1.0);
    std::size_t m = 1;
    auto consume_segment_to = [&](std::size_t seg_idx, double up_to) {
      const double t0 = path.times[seg_idx - 1];
      const double t1 = path.times[seg_idx];
      const double frac = (up_to - t0) / (t1 - t0);
      inc[0] = up_to - t0;
      auto prev = path.row(seg_idx - 1);
      auto cur = path.row(seg_idx);
      for (int a = 0; a < path.n_assets; ++a)
        inc[static_cast<std::size_t>(a) + 1] = (cur[a] - prev[a]) * frac;
      segment_exp_into(seg, inc);
    };
    for (double s : flow_grid) {
      while (m < path.size() && path.times[m] <= s) {
        consume_segment_to(m, path.times[m]);
        multiply_inplace(acc, seg);
        ++m;
      }
      if (path.times[m - 1] < s) {
        TruncatedTensor partial = acc;
        consume_segment_to(m, s);
        multiply_inplace(partial, seg);
        snapshots.emplace_back(GroupElement(std::move(partial)));
      } else {
        snapshots.emplace_back(GroupElement(acc));
      }
    }
    while (m < path.size()) {
      consume_segment_to(m, path.times[m]);
      multiply_inplace(acc, seg);
      ++m;
    }
    ens.members.emplace_back(GroupElement(std::move(acc)));
    ens.flows.push_back(std::move(snapshots));
  }
  return ens;
}

TruncatedTensor expected_signature(const SignatureEnsemble& ens) {
  if (ens.members.empty()) throw std::invalid_argument("expected_signature: empty ensemble");
  TruncatedTensor mean(ens.shape);
  for (const auto& m : ens.members) mean += m.tensor();
  mean *= 1.0 / static_cast<double>(ens.members.size());
  return mean;
}

TruncatedTensor mean_flow(const SignatureEnsemble& ens, std::size_t grid_index) {
  if (!ens.has_flows()) throw std::invalid_argument("mean_flow: ensemble carries no flows");
  if (grid_index >= ens.flow_grid.size())
    throw std::invalid_argument("mean_flow: grid index out of range");
  TruncatedTensor mean(ens.shape);
  for (const auto& member_flows : ens.flows) mean += member_flows[grid_index].tensor();
  mean *= 1.0 / static_cast<double>(ens.flows.size());
  return mean;
}

}  // namespace sigrisk
