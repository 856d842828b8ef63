#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "fwis/scenario.hpp"

namespace fwis {

struct MaskSet {
  int width = 0, height = 0;
  std::vector<uint8_t> init_mask, goal_mask, obs_mask;
  long n_init = 0, n_goal = 0, n_obs = 0;
};

MaskSet compute_masks(const SceneImage& img);

struct PixelRatios {
  double r_init = 0.0, r_goal = 0.0, r_obs = 0.0;
};

PixelRatios pixel_ratios(const MaskSet& m);

// Feature widths: the image encoding plus two state encodings and three
// ratio encodings concatenate to the 672-wide fusion input.
constexpr int kImageFeatureDim = 512;
constexpr int kStateFeatureDim = 56;
constexpr int kRatioFeatureDim = 16;
constexpr int kPoolSize = 24;
constexpr int kFusedDim = kImageFeatureDim + 2 * kStateFeatureDim + 3 * kRatioFeatureDim;
static_assert(kFusedDim == 672);

// Deterministic frozen encoder: grayscale, average-pool to 24x24, flatten,
// project through a fixed seeded affine map.
Eigen::VectorXd image_features(const SceneImage& img);

// Block means of the grayscale image (exposed for oracle checks).
Eigen::VectorXd pooled_grayscale(const SceneImage& img);

struct Linear {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
};

struct Encoder {  // linear - relu - linear
  Linear l1, l2;
};

struct MlpModel {
  Encoder ratio_init, ratio_goal, ratio_obs;  // 1 -> 16 -> 16
  Encoder state_init, state_goal;             // 3 -> 64 -> 56
  Linear color_init, color_goal;              // 3 -> 56, alignment embeddings
  Encoder fusion;                             // 672 -> 128 -> 1, sigmoid output

  static MlpModel initialized(uint64_t seed);
  static MlpModel zeros_like(const MlpModel& shape);

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& v);
  long parameter_count() const;
};

// Everything the trainable part consumes, extracted once per sample.
struct SampleFeatures {
  Eigen::VectorXd f_img;       // kImageFeatureDim
  double r_init = 0.0, r_goal = 0.0, r_obs = 0.0;
  Eigen::Vector3d c_init = Eigen::Vector3d::Zero();  // mean RGB in [0,1], zero when empty
  Eigen::Vector3d c_goal = Eigen::Vector3d::Zero();
  Eigen::Vector3d xs = Eigen::Vector3d::Zero();  // normalized (x, y, theta)
  Eigen::Vector3d xf = Eigen::Vector3d::Zero();
  double label = 0.0;  // 1 = hard
};

SampleFeatures extract_features(const SceneImage& img, const VehicleState& xs,
                                const VehicleState& xf, const Workspace& ws);

struct ForwardResult {
  double y_hat = 0.5;
  bool hard = false;  // y_hat > 0.5
  Eigen::VectorXd f_init_color, f_goal_color, f_init_state, f_goal_state;
};

ForwardResult forward(const MlpModel& model, const SampleFeatures& f);
ForwardResult forward(const MlpModel& model, const SceneImage& img, const VehicleState& xs,
                      const VehicleState& xf, const Workspace& ws);

struct TrainConfig {
  double lambda_ce = 0.1;
  double lambda_align = 0.1;
  double learning_rate = 1e-4;
  int batch_size = 32;
  int epochs = 100;
  uint64_t seed = 0;
};

double loss(const ForwardResult& out, double label, const TrainConfig& cfg);

// Loss value plus analytic gradients for every trainable group.
double loss_and_gradients(const MlpModel& model, const SampleFeatures& f, const TrainConfig& cfg,
                          MlpModel& grad);

struct TrainHistory {
  std::vector<double> train_loss;  // per epoch
  std::vector<double> val_loss;
  std::vector<double> val_accuracy;
};

struct TrainResult {
  MlpModel model;  // best validation-accuracy checkpoint
  TrainHistory history;
  double test_accuracy = 0.0;
  int best_epoch = -1;
};

// Adam over an 8:1:1 split, deterministic in cfg.seed.
TrainResult train(const std::vector<SampleFeatures>& dataset, const TrainConfig& cfg);

void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

struct LabeledScenario {
  Scenario scenario;
  bool hard = false;
  double t_direct = 0.0;  // wall seconds, search without guided points
  double t_guided = 0.0;  // wall seconds, guided pipeline
  bool dropped = false;   // both runs failed
};

// Auto-labeling: a task is easy when the direct search succeeds and beats
// the guided pipeline on wall time; scenarios where both fail are dropped.
std::vector<LabeledScenario> label_dataset(const std::vector<Scenario>& scenarios,
                                           const VehicleParams& params);

void save_dataset_index(const std::vector<LabeledScenario>& labeled,
                        const std::vector<std::string>& scenario_paths, const std::string& path);

}  // namespace fwis
