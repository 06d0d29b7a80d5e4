#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "movebench/dataset.h"
#include "movebench/nn.h"
#include "movebench/world.h"

namespace movebench {

// Architecture + training hyperparameters of the action-chunk policy.
struct PolicyConfig {
  std::string arch = "diffusion";  // "diffusion" or "bc"
  int prediction_horizon = 4;
  int action_horizon = 3;
  int observation_horizon = 2;
  std::vector<int> hidden{256, 256};
  int time_embed_dim = 32;
  int train_denoise_steps = 100;  // T
  int val_denoise_steps = 10;     // DDIM inference strides
  double schedule_s = 0.008;
  int train_steps = 30000;
  int batch_size = 128;
  double learning_rate = 3e-4;  // tuned to the 30k-step budget

  void validate() const;
  int chunk_dim() const { return prediction_horizon * kActionDim; }
  int obs_dim() const { return observation_horizon * kObservationDim; }
  int input_dim() const;  // network input width for this arch
};

// Per-dimension min/max over a dataset; maps values into [-1, 1].
struct NormStats {
  std::array<double, kObservationDim> obs_min{}, obs_max{};
  std::array<double, kActionDim> act_min{}, act_max{};
};

NormStats compute_norm_stats(const Dataset& ds);

// Degenerate dimensions (max == min) normalize to 0 and denormalize to the
// stored constant.
double normalize_value(double v, double lo, double hi);
double denormalize_value(double n, double lo, double hi);

// Cumulative noise-retention products abar[0..T] of the cosine schedule,
// abar[0] = 1 exactly, clamped to (1e-5, 1].
std::vector<double> make_noise_schedule(int T, double s = 0.008);

// x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
Eigen::VectorXd forward_noise(const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& eps, double abar_t);

// One deterministic denoising update from abar_t to abar_prev. Written so
// equal abar values give the identity map exactly, bit for bit.
Eigen::VectorXd ddim_step(const Eigen::VectorXd& x_t,
                          const Eigen::VectorXd& eps_pred, double abar_t,
                          double abar_prev);

// Evenly strided descending schedule indices T = ts[0] > ... > ts[n] = 0.
std::vector<int> ddim_strides(int T, int num_steps);

// Runs the strided chain with an injectable denoiser eps(x, t); the seam the
// oracle-denoiser tests use.
using DenoiseFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, int)>;
Eigen::VectorXd ddim_chain(Eigen::VectorXd x, const std::vector<double>& abar,
                           int num_steps, const DenoiseFn& denoise);

// Sinusoidal embedding of an integer timestep.
void time_embedding(int t, int dim, double* out);

// A trained policy: the denoiser (or regressor) plus everything needed to
// run it.
struct Policy {
  PolicyConfig cfg;
  NormStats norm;
  Mlp<float> net;
  std::vector<double> abar;
  std::uint64_t seed = 0;
  std::string dataset_digest;  // world/motion digest of the training data

  // One action chunk given the newest `observation_horizon` observations
  // (oldest first). Actions come back denormalized and clamped.
  std::vector<Action> sample_chunk(const std::vector<Observation>& history,
                                   Rng& rng) const;
};

struct TrainOptions {
  std::uint64_t seed = 0;
  int log_every = 0;  // 0 = silent
  std::function<void(int step, double loss)> on_log;
};

// Fixed-budget MSE training of the noise predictor ("diffusion") or the
// direct chunk regressor ("bc"). Deterministic in opts.seed.
Policy train_policy(const Dataset& ds, const PolicyConfig& cfg,
                    const TrainOptions& opts);

// Checkpoint container: JSON metadata line, float32 little-endian parameter
// blob in declared order, 4-byte little-endian CRC32 trailer.
void save_policy(const Policy& policy, const std::string& path);
Policy load_policy(const std::string& path);

std::string serialize_policy(const Policy& policy);
Policy parse_policy(const std::string& bytes);

struct RolloutResult {
  EventLog events;
  int score = 0;
  int steps = 0;
};

// Receding-horizon execution on a fresh static world: sample a chunk,
// execute the first action_horizon actions, re-observe, repeat.
RolloutResult rollout(const Policy& policy, const WorldConfig& world,
                      const SpatialConfig& config, int max_steps,
                      std::uint64_t seed);

}  // namespace movebench
