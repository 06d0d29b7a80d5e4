#include "movebench/policy.h"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <set>

#include "movebench/io.h"
#include "movebench/motion.h"

namespace movebench {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian");

constexpr int kCheckpointVersion = 1;

void require_keys(const json& obj, const std::set<std::string>& expected,
                  const char* what) {
  for (const auto& item : obj.items()) {
    if (!expected.count(item.key())) {
      throw FormatError(std::string(what) + ": unknown field '" + item.key() +
                        "' (format_version mismatch?)");
    }
  }
  for (const auto& key : expected) {
    if (!obj.contains(key)) {
      throw FormatError(std::string(what) + ": missing field '" + key + "'");
    }
  }
}

double schedule_value(int t, int T, double s) {
  const double arg =
      (static_cast<double>(t) / T + s) / (1.0 + s) * (std::numbers::pi / 2.0);
  const double c = std::cos(arg);
  return c * c;
}

}  // namespace

void PolicyConfig::validate() const {
  if (arch != "diffusion" && arch != "bc") {
    throw std::invalid_argument("policy arch must be 'diffusion' or 'bc'");
  }
  if (prediction_horizon < 1 || action_horizon < 1 ||
      action_horizon > prediction_horizon) {
    throw std::invalid_argument(
        "horizons: need 1 <= action_horizon <= prediction_horizon");
  }
  if (observation_horizon < 1) {
    throw std::invalid_argument("observation_horizon must be >= 1");
  }
  if (hidden.empty()) {
    throw std::invalid_argument("policy needs at least one hidden layer");
  }
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden sizes must be >= 1");
  }
  if (time_embed_dim < 2 || time_embed_dim % 2 != 0) {
    throw std::invalid_argument("time_embed_dim must be even and >= 2");
  }
  if (train_denoise_steps < 1) {
    throw std::invalid_argument("train_denoise_steps must be >= 1");
  }
  if (val_denoise_steps < 1 || val_denoise_steps > train_denoise_steps) {
    throw std::invalid_argument(
        "val_denoise_steps must be in [1, train_denoise_steps]");
  }
  if (!(schedule_s > 0.0)) {
    throw std::invalid_argument("schedule_s must be positive");
  }
  if (train_steps < 1 || batch_size < 1) {
    throw std::invalid_argument("train_steps and batch_size must be >= 1");
  }
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be positive");
  }
}

int PolicyConfig::input_dim() const {
  return arch == "bc" ? obs_dim() : chunk_dim() + obs_dim() + time_embed_dim;
}

NormStats compute_norm_stats(const Dataset& ds) {
  if (ds.trajectories.empty()) {
    throw std::invalid_argument("cannot compute stats of an empty dataset");
  }
  NormStats st;
  st.obs_min.fill(std::numeric_limits<double>::infinity());
  st.obs_max.fill(-std::numeric_limits<double>::infinity());
  st.act_min.fill(std::numeric_limits<double>::infinity());
  st.act_max.fill(-std::numeric_limits<double>::infinity());
  for (const auto& t : ds.trajectories) {
    for (const auto& obs : t.observations) {
      for (int j = 0; j < kObservationDim; ++j) {
        st.obs_min[j] = std::min(st.obs_min[j], obs[j]);
        st.obs_max[j] = std::max(st.obs_max[j], obs[j]);
      }
    }
    for (const auto& a : t.actions) {
      const double vals[3] = {a.vx, a.vy, a.grasp};
      for (int j = 0; j < kActionDim; ++j) {
        st.act_min[j] = std::min(st.act_min[j], vals[j]);
        st.act_max[j] = std::max(st.act_max[j], vals[j]);
      }
    }
  }
  return st;
}

double normalize_value(double v, double lo, double hi) {
  if (hi - lo < 1e-12) return 0.0;
  return 2.0 * (v - lo) / (hi - lo) - 1.0;
}

double denormalize_value(double n, double lo, double hi) {
  if (hi - lo < 1e-12) return lo;
  return lo + (n + 1.0) * 0.5 * (hi - lo);
}

std::vector<double> make_noise_schedule(int T, double s) {
  if (T < 1) throw std::invalid_argument("noise schedule needs T >= 1");
  if (!(s > 0.0)) throw std::invalid_argument("schedule s must be positive");
  std::vector<double> abar(T + 1);
  abar[0] = 1.0;
  const double f0 = schedule_value(0, T, s);
  for (int t = 1; t <= T; ++t) {
    abar[t] = std::clamp(schedule_value(t, T, s) / f0, 1e-5, 1.0);
  }
  return abar;
}

Eigen::VectorXd forward_noise(const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& eps, double abar_t) {
  if (x0.size() != eps.size()) {
    throw std::invalid_argument("forward_noise: shape mismatch");
  }
  if (!(abar_t > 0.0) || abar_t > 1.0) {
    throw std::invalid_argument("forward_noise: abar_t outside (0, 1]");
  }
  return std::sqrt(abar_t) * x0 + std::sqrt(1.0 - abar_t) * eps;
}

Eigen::VectorXd ddim_step(const Eigen::VectorXd& x_t,
                          const Eigen::VectorXd& eps_pred, double abar_t,
                          double abar_prev) {
  if (x_t.size() != eps_pred.size()) {
    throw std::invalid_argument("ddim_step: shape mismatch");
  }
  // Rearranged from the textbook update so that equal abar values give the
  // exact identity: ratio = 1 and the noise coefficient cancels to 0.
  const double ratio = std::sqrt(abar_prev) / std::sqrt(abar_t);
  const double coef = std::sqrt(1.0 - abar_prev) - ratio * std::sqrt(1.0 - abar_t);
  return ratio * x_t + coef * eps_pred;
}

std::vector<int> ddim_strides(int T, int num_steps) {
  if (num_steps < 1 || num_steps > T) {
    throw std::invalid_argument("ddim_strides: need 1 <= num_steps <= T");
  }
  std::vector<int> ts(num_steps + 1);
  for (int k = 0; k <= num_steps; ++k) {
    ts[k] = static_cast<int>(
        std::lround(static_cast<double>(T) * (num_steps - k) / num_steps));
  }
  return ts;
}

Eigen::VectorXd ddim_chain(Eigen::VectorXd x, const std::vector<double>& abar,
                           int num_steps, const DenoiseFn& denoise) {
  const int T = static_cast<int>(abar.size()) - 1;
  const std::vector<int> ts = ddim_strides(T, num_steps);
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const Eigen::VectorXd eps = denoise(x, ts[k]);
    x = ddim_step(x, eps, abar[ts[k]], abar[ts[k + 1]]);
  }
  return x;
}

void time_embedding(int t, int dim, double* out) {
  const int half = dim / 2;
  for (int i = 0; i < half; ++i) {
    const double freq = std::exp(-std::log(10000.0) * i / half);
    out[i] = std::sin(t * freq);
    out[half + i] = std::cos(t * freq);
  }
}

std::vector<Action> Policy::sample_chunk(
    const std::vector<Observation>& history, Rng& rng) const {
  if (static_cast<int>(history.size()) != cfg.observation_horizon) {
    throw std::invalid_argument(
        "sample_chunk: history length must equal the observation horizon");
  }
  const int chunk = cfg.chunk_dim();
  Eigen::VectorXd obs(cfg.obs_dim());
  for (int h = 0; h < cfg.observation_horizon; ++h) {
    for (int j = 0; j < kObservationDim; ++j) {
      obs[h * kObservationDim + j] =
          normalize_value(history[h][j], norm.obs_min[j], norm.obs_max[j]);
    }
  }

  using Mat = Mlp<float>::Mat;
  Eigen::VectorXd x(chunk);
  if (cfg.arch == "bc") {
    Mat in(1, cfg.input_dim());
    for (int j = 0; j < obs.size(); ++j) in(0, j) = static_cast<float>(obs[j]);
    const Mat out = net.forward(in);
    for (int j = 0; j < chunk; ++j) x[j] = out(0, j);
  } else {
    for (int j = 0; j < chunk; ++j) x[j] = rng.normal();
    std::vector<double> embed(cfg.time_embed_dim);
    Mat in(1, cfg.input_dim());
    auto denoise = [&](const Eigen::VectorXd& xt, int t) {
      int at = 0;
      for (int j = 0; j < chunk; ++j) in(0, at++) = static_cast<float>(xt[j]);
      for (int j = 0; j < obs.size(); ++j) {
        in(0, at++) = static_cast<float>(obs[j]);
      }
      time_embedding(t, cfg.time_embed_dim, embed.data());
      for (double e : embed) in(0, at++) = static_cast<float>(e);
      const Mat out = net.forward(in);
      Eigen::VectorXd eps(chunk);
      for (int j = 0; j < chunk; ++j) eps[j] = out(0, j);
      return eps;
    };
    x = ddim_chain(std::move(x), abar, cfg.val_denoise_steps, denoise);
  }

  std::vector<Action> actions(cfg.prediction_horizon);
  for (int k = 0; k < cfg.prediction_horizon; ++k) {
    double vals[3];
    for (int j = 0; j < kActionDim; ++j) {
      const double n = std::clamp(x[k * kActionDim + j], -1.0, 1.0);
      vals[j] = denormalize_value(n, norm.act_min[j], norm.act_max[j]);
    }
    actions[k] = {vals[0], vals[1], vals[2]};
  }
  return actions;
}

Policy train_policy(const Dataset& ds, const PolicyConfig& cfg,
                    const TrainOptions& opts) {
  cfg.validate();
  if (ds.trajectories.empty() || ds.total_timesteps < 1) {
    throw std::invalid_argument("train_policy: dataset is empty");
  }
  const NormStats norm = compute_norm_stats(ds);
  const int To = cfg.observation_horizon;
  const int Tp = cfg.prediction_horizon;
  const int chunk = cfg.chunk_dim();
  const bool diffusion = cfg.arch == "diffusion";

  // Normalized copies, flat per trajectory.
  const std::size_t n_traj = ds.trajectories.size();
  std::vector<std::vector<double>> obs_n(n_traj), act_n(n_traj);
  std::vector<std::int64_t> cum(n_traj + 1, 0);
  for (std::size_t i = 0; i < n_traj; ++i) {
    const Trajectory& t = ds.trajectories[i];
    obs_n[i].resize(t.observations.size() * kObservationDim);
    for (std::size_t r = 0; r < t.observations.size(); ++r) {
      for (int j = 0; j < kObservationDim; ++j) {
        obs_n[i][r * kObservationDim + j] = normalize_value(
            t.observations[r][j], norm.obs_min[j], norm.obs_max[j]);
      }
    }
    act_n[i].resize(t.actions.size() * kActionDim);
    for (std::size_t r = 0; r < t.actions.size(); ++r) {
      const double vals[3] = {t.actions[r].vx, t.actions[r].vy,
                              t.actions[r].grasp};
      for (int j = 0; j < kActionDim; ++j) {
        act_n[i][r * kActionDim + j] =
            normalize_value(vals[j], norm.act_min[j], norm.act_max[j]);
      }
    }
    cum[i + 1] = cum[i] + t.length();
  }
  const std::int64_t total = cum.back();

  std::vector<int> sizes;
  sizes.push_back(cfg.input_dim());
  for (int h : cfg.hidden) sizes.push_back(h);
  sizes.push_back(chunk);

  Rng init_rng(split_seed(opts.seed, 0));
  Rng rng(split_seed(opts.seed, 1));
  Mlp<float> net(sizes, init_rng);
  Adam<float> adam(net, cfg.learning_rate);
  const std::vector<double> abar =
      make_noise_schedule(cfg.train_denoise_steps, cfg.schedule_s);

  using Mat = Mlp<float>::Mat;
  const int B = cfg.batch_size;
  Mat X(B, cfg.input_dim());
  Mat Y(B, chunk);
  std::vector<double> embed(cfg.time_embed_dim);
  std::vector<double> x0(chunk);
  Mlp<float>::Cache cache;
  Mlp<float>::Grads grads;

  for (int step = 1; step <= cfg.train_steps; ++step) {
    for (int b = 0; b < B; ++b) {
      const std::int64_t pick = static_cast<std::int64_t>(
          rng.below(static_cast<std::uint64_t>(total)));
      const std::size_t ti =
          std::upper_bound(cum.begin(), cum.end(), pick) - cum.begin() - 1;
      const int j = static_cast<int>(pick - cum[ti]);
      const int len = ds.trajectories[ti].length();

      // Observation history, front-padded at the episode start.
      int at = diffusion ? chunk : 0;
      for (int h = 0; h < To; ++h) {
        const int r = std::max(0, j - (To - 1) + h);
        for (int d = 0; d < kObservationDim; ++d) {
          X(b, at++) =
              static_cast<float>(obs_n[ti][r * kObservationDim + d]);
        }
      }
      // Clean action chunk, back-padded at the episode end.
      for (int k = 0; k < Tp; ++k) {
        const int r = std::min(len - 1, j + k);
        for (int d = 0; d < kActionDim; ++d) {
          x0[k * kActionDim + d] = act_n[ti][r * kActionDim + d];
        }
      }
      if (diffusion) {
        const int t = 1 + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(cfg.train_denoise_steps)));
        const double a = abar[t];
        const double sa = std::sqrt(a);
        const double sn = std::sqrt(1.0 - a);
        for (int d = 0; d < chunk; ++d) {
          const double eps = rng.normal();
          X(b, d) = static_cast<float>(sa * x0[d] + sn * eps);
          Y(b, d) = static_cast<float>(eps);
        }
        time_embedding(t, cfg.time_embed_dim, embed.data());
        for (int d = 0; d < cfg.time_embed_dim; ++d) {
          X(b, at++) = static_cast<float>(embed[d]);
        }
      } else {
        for (int d = 0; d < chunk; ++d) {
          Y(b, d) = static_cast<float>(x0[d]);
        }
      }
    }

    const Mat pred = net.forward(X, cache);
    const Mat diff = pred - Y;
    const double loss = diff.cast<double>().squaredNorm() / (B * chunk);
    if (!std::isfinite(loss)) {
      throw std::runtime_error("training diverged: non-finite loss at step " +
                               std::to_string(step));
    }
    const Mat dy = diff * static_cast<float>(2.0 / (B * chunk));
    net.backward(cache, dy, grads);
    adam.step(net, grads);

    if (opts.log_every > 0 && opts.on_log &&
        (step % opts.log_every == 0 || step == cfg.train_steps)) {
      opts.on_log(step, loss);
    }
  }

  Policy p{cfg, norm, std::move(net), abar, opts.seed, ds.world_config_digest};
  return p;
}

RolloutResult rollout(const Policy& policy, const WorldConfig& world,
                      const SpatialConfig& config, int max_steps,
                      std::uint64_t seed) {
  Rng rng(seed);
  const AugmentationSchedule none = AugmentationSchedule::none();
  const MotionParams params;
  WorldState st = make_world(world, config, MotionInit::zero());
  std::vector<Observation> history(policy.cfg.observation_horizon,
                                   observe(world, st));
  RolloutResult out;
  while (st.phase != Phase::kDone && st.step_count < max_steps) {
    const std::vector<Action> chunk = policy.sample_chunk(history, rng);
    for (int k = 0; k < policy.cfg.action_horizon &&
                    st.phase != Phase::kDone && st.step_count < max_steps;
         ++k) {
      step(world, none, params, st, chunk[k]);
      history.erase(history.begin());
      history.push_back(observe(world, st));
    }
  }
  out.events = st.events;
  out.score = score_episode(st.events);
  out.steps = st.step_count;
  return out;
}

namespace {

json norm_to_json(const NormStats& n) {
  json j;
  j["obs_min"] = n.obs_min;
  j["obs_max"] = n.obs_max;
  j["act_min"] = n.act_min;
  j["act_max"] = n.act_max;
  return j;
}

template <std::size_t N>
void array_from_json(const json& arr, std::array<double, N>& out,
                     const char* what) {
  if (!arr.is_array() || arr.size() != N) {
    throw FormatError(std::string("checkpoint: bad ") + what);
  }
  for (std::size_t i = 0; i < N; ++i) out[i] = arr[i].get<double>();
}

}  // namespace

std::string serialize_policy(const Policy& policy) {
  json meta;
  meta["format_version"] = kCheckpointVersion;
  meta["arch"] = policy.cfg.arch;
  meta["layers"] = policy.net.sizes();
  meta["param_count"] = policy.net.param_count();
  meta["prediction_horizon"] = policy.cfg.prediction_horizon;
  meta["action_horizon"] = policy.cfg.action_horizon;
  meta["observation_horizon"] = policy.cfg.observation_horizon;
  meta["time_embed_dim"] = policy.cfg.time_embed_dim;
  meta["train_denoise_steps"] = policy.cfg.train_denoise_steps;
  meta["val_denoise_steps"] = policy.cfg.val_denoise_steps;
  meta["schedule_s"] = policy.cfg.schedule_s;
  meta["train_steps"] = policy.cfg.train_steps;
  meta["batch_size"] = policy.cfg.batch_size;
  meta["learning_rate"] = policy.cfg.learning_rate;
  meta["seed"] = policy.seed;
  meta["dataset_digest"] = policy.dataset_digest;
  meta["norm"] = norm_to_json(policy.norm);

  std::string out = meta.dump();
  out += '\n';
  const std::vector<float> params = policy.net.flatten();
  const std::size_t blob_at = out.size();
  out.resize(out.size() + params.size() * sizeof(float));
  std::memcpy(out.data() + blob_at, params.data(),
              params.size() * sizeof(float));
  const std::uint32_t crc = crc32(out);
  char trailer[4] = {static_cast<char>(crc & 0xFF),
                     static_cast<char>((crc >> 8) & 0xFF),
                     static_cast<char>((crc >> 16) & 0xFF),
                     static_cast<char>((crc >> 24) & 0xFF)};
  out.append(trailer, 4);
  return out;
}

Policy parse_policy(const std::string& bytes) {
  if (bytes.size() < 5) throw FormatError("checkpoint: file too short");
  const std::string body = bytes.substr(0, bytes.size() - 4);
  std::uint32_t declared = 0;
  for (int i = 0; i < 4; ++i) {
    declared |= static_cast<std::uint32_t>(
                    static_cast<unsigned char>(bytes[bytes.size() - 4 + i]))
                << (8 * i);
  }
  if (crc32(body) != declared) {
    throw FormatError("checkpoint: checksum mismatch (truncated or corrupted)");
  }
  const std::size_t nl = body.find('\n');
  if (nl == std::string::npos) throw FormatError("checkpoint: missing header");
  json meta;
  try {
    meta = json::parse(body.substr(0, nl));
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header: bad JSON: ") + e.what());
  }
  require_keys(meta,
               {"format_version", "arch", "layers", "param_count",
                "prediction_horizon", "action_horizon", "observation_horizon",
                "time_embed_dim", "train_denoise_steps", "val_denoise_steps",
                "schedule_s", "train_steps", "batch_size", "learning_rate",
                "seed", "dataset_digest", "norm"},
               "checkpoint header");
  if (meta["format_version"].get<int>() != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported format_version " +
                      meta["format_version"].dump());
  }

  PolicyConfig cfg;
  cfg.arch = meta["arch"].get<std::string>();
  cfg.prediction_horizon = meta["prediction_horizon"].get<int>();
  cfg.action_horizon = meta["action_horizon"].get<int>();
  cfg.observation_horizon = meta["observation_horizon"].get<int>();
  cfg.time_embed_dim = meta["time_embed_dim"].get<int>();
  cfg.train_denoise_steps = meta["train_denoise_steps"].get<int>();
  cfg.val_denoise_steps = meta["val_denoise_steps"].get<int>();
  cfg.schedule_s = meta["schedule_s"].get<double>();
  cfg.train_steps = meta["train_steps"].get<int>();
  cfg.batch_size = meta["batch_size"].get<int>();
  cfg.learning_rate = meta["learning_rate"].get<double>();

  const std::vector<int> sizes = meta["layers"].get<std::vector<int>>();
  if (sizes.size() < 2) throw FormatError("checkpoint: bad layer list");
  cfg.hidden.assign(sizes.begin() + 1, sizes.end() - 1);
  cfg.validate();
  if (sizes.front() != cfg.input_dim() || sizes.back() != cfg.chunk_dim()) {
    throw FormatError("checkpoint: layer sizes inconsistent with horizons");
  }

  Rng dummy(0);
  Policy p{cfg, NormStats{}, Mlp<float>(sizes, dummy), {}, 0, ""};
  const std::size_t n_params = meta["param_count"].get<std::size_t>();
  if (n_params != p.net.param_count()) {
    throw FormatError("checkpoint: param_count does not match layers");
  }
  const std::size_t blob_size = n_params * sizeof(float);
  if (body.size() != nl + 1 + blob_size) {
    throw FormatError("checkpoint: parameter blob size mismatch");
  }
  std::vector<float> params(n_params);
  std::memcpy(params.data(), body.data() + nl + 1, blob_size);
  p.net.unflatten(params);

  require_keys(meta["norm"], {"obs_min", "obs_max", "act_min", "act_max"},
               "checkpoint norm");
  array_from_json(meta["norm"]["obs_min"], p.norm.obs_min, "norm.obs_min");
  array_from_json(meta["norm"]["obs_max"], p.norm.obs_max, "norm.obs_max");
  array_from_json(meta["norm"]["act_min"], p.norm.act_min, "norm.act_min");
  array_from_json(meta["norm"]["act_max"], p.norm.act_max, "norm.act_max");
  p.seed = meta["seed"].get<std::uint64_t>();
  p.dataset_digest = meta["dataset_digest"].get<std::string>();
  p.abar = make_noise_schedule(cfg.train_denoise_steps, cfg.schedule_s);
  return p;
}

void save_policy(const Policy& policy, const std::string& path) {
  write_file(path, serialize_policy(policy));
}

Policy load_policy(const std::string& path) {
  return parse_policy(read_file(path));
}

}  // namespace movebench
