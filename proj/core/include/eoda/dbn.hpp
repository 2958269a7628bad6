#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <utility>
#include <vector>

#include "eoda/encoding.hpp"
#include "eoda/rng.hpp"

namespace eoda {

// ---------------------------------------------------------------------------
// Binary RBMs stacked into a DBN. The top RBM's visible (data) layer is the
// previous layer's code augmented with the ILP feature bits and one separator
// bit: [code | features | separator]. Lower layers are pretrained greedily;
// sampling runs alternating Gibbs sweeps on the top RBM with clamps re-imposed
// after every visible update, then propagates the code down by sampling each
// layer's conditional.
// ---------------------------------------------------------------------------

struct Rbm {
  Eigen::MatrixXf W;  // hidden x visible
  Eigen::VectorXf b;  // visible bias
  Eigen::VectorXf c;  // hidden bias

  int visible() const { return static_cast<int>(W.cols()); }
  int hidden() const { return static_cast<int>(W.rows()); }

  static Rbm init(int visible, int hidden, float weight_scale, Rng& rng);
};

struct TrainConfig {
  int cd_steps = 1;
  float learning_rate = 0.05f;
  int epochs = 40;
  int batch_size = 32;
  float weight_init_scale = 0.01f;
  int gibbs_steps_sampling = 6;
};

struct DbnModel {
  std::vector<Rbm> layers;   // bottom to top
  int ilp_feature_count = 0;

  // layer_sizes = {v0, h0, ..., hTop}; the top RBM's visible is layer_sizes[L-1]
  // (the code width) + ilp_feature_count + 1.
  static DbnModel create(const std::vector<int>& layer_sizes, int ilp_feature_count,
                         float weight_init_scale, Rng& rng);

  int bottom_visible() const { return layers.front().visible(); }
  int top_visible() const { return layers.back().visible(); }
  // Width of the code part of the top data layer.
  int code_size() const { return top_visible() - ilp_feature_count - 1; }
  int separator_index() const { return top_visible() - 1; }
  // Top-layer unit index of feature j.
  int feature_unit(int j) const { return code_size() + j; }

  std::vector<int> layer_sizes() const;
};

// F(v) = -b.v - sum_h softplus(c_h + W_h.v); p(v) proportional to exp(-F(v)).
// Accumulates in double.
double rbm_free_energy(const Rbm& r, const BitVec& v);

// One CD-k minibatch update, exposed for gradient tests. batch is visible x B.
// Positive hidden statistics use probabilities; the negative phase uses sampled
// visible states and hidden probabilities (standard practice).
void rbm_cd_batch(Rbm& r, const Eigen::MatrixXf& batch, int cd_steps, float learning_rate,
                  Rng& rng);

// Mini-batched CD-k over a fixed epoch count, shuffling row order each epoch.
// Throws if parameters go non-finite, naming epoch and batch.
Rbm rbm_train_cd(Rbm r, const std::vector<BitVec>& data, const TrainConfig& cfg, Rng& rng);

// Deterministic one-step mean-field reconstruction error, mean |v - v_hat| over
// rows and units. Used for warm-start comparisons.
double rbm_reconstruction_error(const Rbm& r, const std::vector<BitVec>& data);

struct DbnTrainRow {
  BitVec visible;      // bottom layer bits
  BitVec ilp;          // feature bits, length = ilp_feature_count
  std::uint8_t label;  // separator bit
};

// Greedy layer-wise pretraining: each lower RBM trains on the previous layer's
// sampled hidden activations; the top RBM trains on [code | ilp | label].
DbnModel dbn_train(DbnModel m, const std::vector<DbnTrainRow>& rows, const TrainConfig& cfg,
                   Rng& rng);

// Mean |label - p(label)| under deterministic mean-field up-propagation and one
// top-layer reconstruction.
double dbn_label_reconstruction_error(const DbnModel& m, const std::vector<DbnTrainRow>& rows);

struct RawSample {
  BitVec bits;               // bottom visible bits
  std::vector<float> probs;  // per-bit visible activation probabilities
};

using ClampSet = std::vector<std::pair<int, std::uint8_t>>;

// Called after each full Gibbs sweep with the top-layer visible state.
using SweepObserver = std::function<void(int sweep, const BitVec& top_visible)>;

std::vector<RawSample> dbn_sample(const DbnModel& m, const ClampSet& clamps, int n,
                                  const TrainConfig& cfg, Rng& rng,
                                  const SweepObserver& observer = {});

// Deep copy for the next iteration's training. The architecture may grow only in
// ilp_feature_count; rows of fresh feature-unit weights are initialized from the
// given scale. Shrinking any dimension is an error.
DbnModel dbn_warm_start(const DbnModel& prev, int new_ilp_feature_count, float weight_init_scale,
                        Rng& rng);

// Versioned binary container: magic EODBN1, layer dims, little-endian f32
// row-major weights per layer.
void save_dbn(const DbnModel& m, const std::filesystem::path& p);
DbnModel load_dbn(const std::filesystem::path& p);

}  // namespace eoda
