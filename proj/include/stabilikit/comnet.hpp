#pragma once

/// \file comnet.hpp
/// \brief CoMNet: a fully connected regressor from a flattened, hip-centred 3D
/// pose to the hip-relative centre of mass, with its Adam/RMSE training loop.
///
/// Architecture (width W, F input features):
///
///     x -> Linear(F, W) -> BatchNorm -> ReLU -> Dropout
///       -> Linear(W, W) -> BatchNorm -> ReLU -> Dropout
///       -> Linear(W, 3)
///
/// Inputs are z-scored per feature and targets are centred and divided by a
/// single isotropic scale, so the RMSE in normalised units times that scale is
/// the RMSE in millimetres. Statistics come from the training set only.
///
/// Everything is templated on the scalar type; training uses float, the
/// gradient check uses double.

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "stabilikit/geometry.hpp"
#include "stabilikit/pose.hpp"

namespace stabilikit {

enum ParamGroup : std::size_t {
  kW1, kB1, kGamma1, kBeta1,
  kW2, kB2, kGamma2, kBeta2,
  kW3, kB3,
  kParamGroupCount,
};

std::string_view param_group_name(std::size_t group);

inline constexpr double kBatchNormEpsilon = 1e-5;

/// Hip-centred joint coordinates, flattened in layout order (x, y, z per
/// joint). Throws MissingObservation if any layout joint is invalid.
Eigen::VectorXd pose_features(const Pose3dFrame& pose);

template <typename Scalar>
struct MlpParams {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LayoutKind layout = LayoutKind::HP;
  int width = 0;
  double dropout = 0.5;

  /// Trainable tensors, indexed by ParamGroup. Vectors are stored as n x 1.
  std::array<Matrix, kParamGroupCount> weights;
  std::array<Vector, 2> running_mean;
  std::array<Vector, 2> running_var;

  Vector input_mean;
  Vector input_std;
  Eigen::Vector3d target_mean = Eigen::Vector3d::Zero();
  double target_scale = 1.0;

  int input_features() const { return static_cast<int>(weights[kW1].cols()); }
  std::size_t parameter_count() const;

  /// All-zero weights and biases, unit batch-norm scale, identity
  /// normalisation. Predicts the hip centre for every pose.
  static MlpParams zeros(LayoutKind layout, int width, double dropout);
  /// He-normal hidden layers, Xavier output head, zero biases.
  static MlpParams initialized(LayoutKind layout, int width, double dropout,
                               std::uint64_t seed);

  /// Throws InvalidArgument on non-finite values, non-positive running
  /// variances or a dropout rate outside [0, 1).
  void validate() const;

  template <typename Other>
  MlpParams<Other> cast() const;
};

enum class ForwardMode { train, eval };

enum class BatchNormMode { batch_statistics, running_statistics };

struct ForwardOptions {
  BatchNormMode batch_norm = BatchNormMode::running_statistics;
  double dropout = 0.0;  ///< 0 disables dropout
  std::mt19937_64* rng = nullptr;
};

/// Intermediate activations kept for backpropagation.
template <typename Scalar>
struct ForwardCache {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  using Vector = typename MlpParams<Scalar>::Vector;
  Matrix input;
  std::array<Matrix, 2> xhat;     ///< normalised pre-activations
  std::array<Matrix, 2> act;      ///< post-ReLU
  std::array<Matrix, 2> mask;     ///< dropout scale (0 or 1 / (1 - p)), empty when off
  std::array<Matrix, 2> dropped;  ///< input to the next linear layer
  std::array<Vector, 2> batch_mean;
  std::array<Vector, 2> batch_var;
  std::array<Vector, 2> inv_std;
};

/// Forward pass on normalised features (one column per sample); returns
/// normalised outputs (3 x batch).
template <typename Scalar>
typename MlpParams<Scalar>::Matrix mlp_forward(const MlpParams<Scalar>& params,
                                               const typename MlpParams<Scalar>::Matrix& x,
                                               const ForwardOptions& opts,
                                               ForwardCache<Scalar>* cache = nullptr);

/// Root of the mean squared error over all output elements.
template <typename Scalar>
Scalar rmse_loss(const typename MlpParams<Scalar>::Matrix& prediction,
                 const typename MlpParams<Scalar>::Matrix& target);

/// Gradients of rmse_loss with respect to every trainable group, given the
/// cache of the forward pass that produced prediction. At exactly zero loss
/// all gradients are zero.
template <typename Scalar>
std::array<typename MlpParams<Scalar>::Matrix, kParamGroupCount> mlp_backward(
    const MlpParams<Scalar>& params, const ForwardCache<Scalar>& cache,
    const ForwardOptions& opts, const typename MlpParams<Scalar>::Matrix& prediction,
    const typename MlpParams<Scalar>::Matrix& target);

/// Normalises features with the stored input statistics (one column per sample).
template <typename Scalar>
typename MlpParams<Scalar>::Matrix normalize_features(const MlpParams<Scalar>& params,
                                                      const Eigen::MatrixXd& features);

/// World-frame CoM prediction: hip centre plus the de-normalised network
/// output. Eval mode is deterministic; train mode uses batch statistics of a
/// one-sample batch and samples dropout from rng.
template <typename Scalar>
Point3 comnet_forward(const Pose3dFrame& pose, const MlpParams<Scalar>& params,
                      ForwardMode mode = ForwardMode::eval, std::mt19937_64* rng = nullptr);

/// Batched eval-mode prediction.
template <typename Scalar>
std::vector<Point3> comnet_predict(std::span<const Pose3dFrame> poses,
                                   const MlpParams<Scalar>& params);

struct TrainConfig {
  int epochs = 25;
  double initial_lr = 5e-4;
  double lr_drop_factor = 0.25;
  int lr_drop_every = 5;
  int batch_size = 256;
  std::uint64_t seed = 0;
  int width = 3072;
  double dropout = 0.5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double bn_momentum = 0.1;

  void validate() const;
};

/// Piecewise-constant schedule: initial_lr * factor^floor(epoch / every),
/// epoch counted from zero.
double learning_rate_at(const TrainConfig& cfg, int epoch);

struct TrainSample {
  Pose3dFrame pose;
  Point3 com;
};

struct EpochLog {
  int epoch = 0;  ///< 1-based
  double learning_rate = 0.0;
  double mean_batch_loss_mm = 0.0;  ///< average training-mode RMSE
  double eval_rmse_mm = 0.0;        ///< eval-mode RMSE over the training set
};

template <typename Scalar>
struct TrainResult {
  MlpParams<Scalar> params;
  double initial_eval_rmse_mm = 0.0;
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

/// Mini-batch Adam on the RMSE loss. Deterministic given cfg.seed: the shuffle
/// order, initialisation and dropout masks all derive from it. Throws
/// EmptyDataset, MissingObservation for incomplete poses, ShapeMismatch for
/// mixed layouts and NonFiniteLoss if training diverges.
template <typename Scalar>
TrainResult<Scalar> comnet_train(std::span<const TrainSample> dataset, const TrainConfig& cfg,
                                 const EpochCallback& on_epoch = {});

/// Eval-mode RMSE (mm, over all coordinates) on a labelled set.
template <typename Scalar>
double comnet_rmse_mm(std::span<const TrainSample> dataset, const MlpParams<Scalar>& params);

using ComNetParams = MlpParams<float>;

}  // namespace stabilikit
