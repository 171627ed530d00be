#include "stabilikit/comnet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "stabilikit/error.hpp"

namespace stabilikit {

namespace {

constexpr std::array<std::string_view, kParamGroupCount> kGroupNames = {
    "w1", "b1", "gamma1", "beta1", "w2", "b2", "gamma2", "beta2", "w3", "b3"};

constexpr std::array<std::size_t, 2> kLinear = {kW1, kW2};
constexpr std::array<std::size_t, 2> kBias = {kB1, kB2};
constexpr std::array<std::size_t, 2> kGamma = {kGamma1, kGamma2};
constexpr std::array<std::size_t, 2> kBeta = {kBeta1, kBeta2};

int features_for(LayoutKind layout) {
  return static_cast<int>(JointSetLayout::get(layout).size() * 3);
}

template <typename Matrix>
bool all_finite(const Matrix& m) {
  return m.allFinite();
}

}  // namespace

std::string_view param_group_name(std::size_t group) { return kGroupNames.at(group); }

Eigen::VectorXd pose_features(const Pose3dFrame& pose) {
  if (!pose.all_valid()) {
    throw Error(ErrorCode::MissingObservation,
                "CoMNet needs every joint of the layout (frame " +
                    std::to_string(pose.frame_index) + ")");
  }
  const Point3 hip = hip_center(pose);
  Eigen::VectorXd f(static_cast<Eigen::Index>(pose.joints.size() * 3));
  for (std::size_t i = 0; i < pose.joints.size(); ++i) {
    const Point3 rel = pose.joints[i].position - hip;
    f(static_cast<Eigen::Index>(3 * i)) = rel.x;
    f(static_cast<Eigen::Index>(3 * i + 1)) = rel.y;
    f(static_cast<Eigen::Index>(3 * i + 2)) = rel.z;
  }
  return f;
}

template <typename Scalar>
std::size_t MlpParams<Scalar>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  return n;
}

template <typename Scalar>
MlpParams<Scalar> MlpParams<Scalar>::zeros(LayoutKind layout, int width, double dropout) {
  if (width <= 0) throw Error(ErrorCode::InvalidArgument, "width must be positive");
  MlpParams p;
  p.layout = layout;
  p.width = width;
  p.dropout = dropout;
  const int in = features_for(layout);
  p.weights[kW1] = Matrix::Zero(width, in);
  p.weights[kW2] = Matrix::Zero(width, width);
  p.weights[kW3] = Matrix::Zero(3, width);
  p.weights[kB3] = Matrix::Zero(3, 1);
  for (int l = 0; l < 2; ++l) {
    p.weights[kBias[l]] = Matrix::Zero(width, 1);
    p.weights[kGamma[l]] = Matrix::Ones(width, 1);
    p.weights[kBeta[l]] = Matrix::Zero(width, 1);
    p.running_mean[l] = Vector::Zero(width);
    p.running_var[l] = Vector::Ones(width);
  }
  p.input_mean = Vector::Zero(in);
  p.input_std = Vector::Ones(in);
  return p;
}

template <typename Scalar>
MlpParams<Scalar> MlpParams<Scalar>::initialized(LayoutKind layout, int width, double dropout,
                                                 std::uint64_t seed) {
  MlpParams p = zeros(layout, width, dropout);
  std::mt19937_64 rng(seed);
  auto fill = [&rng](Matrix& m, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = static_cast<Scalar>(dist(rng));
    }
  };
  fill(p.weights[kW1], std::sqrt(2.0 / static_cast<double>(p.weights[kW1].cols())));
  fill(p.weights[kW2], std::sqrt(2.0 / static_cast<double>(width)));
  fill(p.weights[kW3], std::sqrt(1.0 / static_cast<double>(width)));
  return p;
}

template <typename Scalar>
void MlpParams<Scalar>::validate() const {
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "dropout rate must lie in [0, 1)");
  }
  const int in = features_for(layout);
  const std::array<std::pair<Eigen::Index, Eigen::Index>, kParamGroupCount> shapes = {{
      {width, in}, {width, 1}, {width, 1}, {width, 1},
      {width, width}, {width, 1}, {width, 1}, {width, 1},
      {3, width}, {3, 1},
  }};
  for (std::size_t g = 0; g < kParamGroupCount; ++g) {
    if (weights[g].rows() != shapes[g].first || weights[g].cols() != shapes[g].second) {
      throw Error(ErrorCode::ShapeMismatch,
                  "parameter " + std::string(kGroupNames[g]) + " has the wrong shape");
    }
    if (!all_finite(weights[g])) {
      throw Error(ErrorCode::InvalidArgument,
                  "parameter " + std::string(kGroupNames[g]) + " is not finite");
    }
  }
  for (int l = 0; l < 2; ++l) {
    if (running_mean[l].size() != width || running_var[l].size() != width ||
        !all_finite(running_mean[l]) || !all_finite(running_var[l]) ||
        (running_var[l].array() <= Scalar(0)).any()) {
      throw Error(ErrorCode::InvalidArgument, "invalid batch-norm running statistics");
    }
  }
  if (input_mean.size() != in || input_std.size() != in || !all_finite(input_mean) ||
      !all_finite(input_std) || (input_std.array() <= Scalar(0)).any() ||
      !target_mean.allFinite() || !(target_scale > 0.0) || !std::isfinite(target_scale)) {
    throw Error(ErrorCode::InvalidArgument, "invalid normalisation statistics");
  }
}

template <typename Scalar>
template <typename Other>
MlpParams<Other> MlpParams<Scalar>::cast() const {
  MlpParams<Other> out;
  out.layout = layout;
  out.width = width;
  out.dropout = dropout;
  for (std::size_t g = 0; g < kParamGroupCount; ++g) {
    out.weights[g] = weights[g].template cast<Other>();
  }
  for (int l = 0; l < 2; ++l) {
    out.running_mean[l] = running_mean[l].template cast<Other>();
    out.running_var[l] = running_var[l].template cast<Other>();
  }
  out.input_mean = input_mean.template cast<Other>();
  out.input_std = input_std.template cast<Other>();
  out.target_mean = target_mean;
  out.target_scale = target_scale;
  return out;
}

template <typename Scalar>
typename MlpParams<Scalar>::Matrix mlp_forward(const MlpParams<Scalar>& params,
                                               const typename MlpParams<Scalar>::Matrix& x,
                                               const ForwardOptions& opts,
                                               ForwardCache<Scalar>* cache) {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  using Vector = typename MlpParams<Scalar>::Vector;
  if (x.rows() != params.input_features()) {
    throw Error(ErrorCode::ShapeMismatch, "feature count does not match the network input");
  }
  const Eigen::Index n = x.cols();
  const auto eps = static_cast<Scalar>(kBatchNormEpsilon);
  const bool use_dropout = opts.dropout > 0.0;
  if (use_dropout && opts.rng == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "dropout needs a random generator");
  }
  const auto keep_scale = static_cast<Scalar>(use_dropout ? 1.0 / (1.0 - opts.dropout) : 1.0);

  Matrix h = x;
  if (cache != nullptr) cache->input = x;
  for (int l = 0; l < 2; ++l) {
    Matrix z = params.weights[kLinear[l]] * h;
    z.colwise() += params.weights[kBias[l]].col(0);

    Vector mean;
    Vector var;
    if (opts.batch_norm == BatchNormMode::batch_statistics) {
      mean = z.rowwise().mean();
      var = (z.colwise() - mean).array().square().rowwise().mean().matrix();
    } else {
      mean = params.running_mean[l];
      var = params.running_var[l];
    }
    const Vector inv_std = (var.array() + eps).rsqrt().matrix();
    Matrix xhat = ((z.colwise() - mean).array().colwise() * inv_std.array()).matrix();
    Matrix y = (xhat.array().colwise() * params.weights[kGamma[l]].col(0).array()).matrix();
    y.colwise() += params.weights[kBeta[l]].col(0);
    Matrix act = y.cwiseMax(Scalar(0));

    Matrix mask;
    Matrix out;
    if (use_dropout) {
      std::bernoulli_distribution keep(1.0 - opts.dropout);
      mask.resize(act.rows(), n);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < act.rows(); ++i) {
          mask(i, j) = keep(*opts.rng) ? keep_scale : Scalar(0);
        }
      }
      out = act.cwiseProduct(mask);
    } else {
      out = act;
    }
    if (cache != nullptr) {
      cache->xhat[l] = std::move(xhat);
      cache->act[l] = std::move(act);
      cache->mask[l] = std::move(mask);
      cache->dropped[l] = out;
      cache->batch_mean[l] = mean;
      cache->batch_var[l] = var;
      cache->inv_std[l] = inv_std;
    }
    h = std::move(out);
  }
  Matrix y = params.weights[kW3] * h;
  y.colwise() += params.weights[kB3].col(0);
  return y;
}

template <typename Scalar>
Scalar rmse_loss(const typename MlpParams<Scalar>::Matrix& prediction,
                 const typename MlpParams<Scalar>::Matrix& target) {
  if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
  }
  return std::sqrt((prediction - target).squaredNorm() / static_cast<Scalar>(prediction.size()));
}

template <typename Scalar>
std::array<typename MlpParams<Scalar>::Matrix, kParamGroupCount> mlp_backward(
    const MlpParams<Scalar>& params, const ForwardCache<Scalar>& cache,
    const ForwardOptions& opts, const typename MlpParams<Scalar>::Matrix& prediction,
    const typename MlpParams<Scalar>::Matrix& target) {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  using Vector = typename MlpParams<Scalar>::Vector;
  std::array<Matrix, kParamGroupCount> grads;
  for (std::size_t g = 0; g < kParamGroupCount; ++g) {
    grads[g] = Matrix::Zero(params.weights[g].rows(), params.weights[g].cols());
  }
  const Scalar loss = rmse_loss<Scalar>(prediction, target);
  if (loss == Scalar(0)) return grads;
  const auto count = static_cast<Scalar>(prediction.size());
  const Matrix d_out = (prediction - target) / (count * loss);

  grads[kW3] = d_out * cache.dropped[1].transpose();
  grads[kB3] = d_out.rowwise().sum();
  Matrix d_h = params.weights[kW3].transpose() * d_out;

  const auto n = static_cast<Scalar>(prediction.cols());
  for (int l = 1; l >= 0; --l) {
    if (opts.dropout > 0.0) d_h = d_h.cwiseProduct(cache.mask[l]);
    const Matrix d_y = (cache.act[l].array() > Scalar(0)).select(d_h, Scalar(0));
    grads[kGamma[l]] = d_y.cwiseProduct(cache.xhat[l]).rowwise().sum();
    grads[kBeta[l]] = d_y.rowwise().sum();
    const Matrix d_xhat = (d_y.array().colwise() * params.weights[kGamma[l]].col(0).array()).matrix();

    Matrix d_z;
    if (opts.batch_norm == BatchNormMode::batch_statistics) {
      const Vector sum_dx = d_xhat.rowwise().sum();
      const Vector sum_dx_xhat = d_xhat.cwiseProduct(cache.xhat[l]).rowwise().sum();
      d_z = ((n * d_xhat.array()).colwise() - sum_dx.array()).matrix();
      d_z -= (cache.xhat[l].array().colwise() * sum_dx_xhat.array()).matrix();
      d_z = (d_z.array().colwise() * (cache.inv_std[l].array() / n)).matrix();
    } else {
      d_z = (d_xhat.array().colwise() * cache.inv_std[l].array()).matrix();
    }
    const Matrix& layer_in = l == 0 ? cache.input : cache.dropped[0];
    grads[kLinear[l]] = d_z * layer_in.transpose();
    grads[kBias[l]] = d_z.rowwise().sum();
    if (l == 1) d_h = params.weights[kW2].transpose() * d_z;
  }
  return grads;
}

template <typename Scalar>
typename MlpParams<Scalar>::Matrix normalize_features(const MlpParams<Scalar>& params,
                                                      const Eigen::MatrixXd& features) {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  if (features.rows() != params.input_features()) {
    throw Error(ErrorCode::ShapeMismatch, "feature count does not match the network input");
  }
  Matrix x = features.cast<Scalar>();
  x.colwise() -= params.input_mean;
  x = (x.array().colwise() / params.input_std.array()).matrix();
  return x;
}

namespace {

template <typename Scalar>
void check_layout(const Pose3dFrame& pose, const MlpParams<Scalar>& params) {
  if (pose.layout != params.layout) {
    throw Error(ErrorCode::ShapeMismatch, "pose layout " + std::string(layout_name(pose.layout)) +
                                              " does not match model layout " +
                                              std::string(layout_name(params.layout)));
  }
}

Point3 to_point(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

}  // namespace

template <typename Scalar>
Point3 comnet_forward(const Pose3dFrame& pose, const MlpParams<Scalar>& params, ForwardMode mode,
                      std::mt19937_64* rng) {
  check_layout(pose, params);
  const Eigen::VectorXd f = pose_features(pose);
  ForwardOptions opts;
  if (mode == ForwardMode::train) {
    opts.batch_norm = BatchNormMode::batch_statistics;
    opts.dropout = params.dropout;
    opts.rng = rng;
  }
  const auto out = mlp_forward(params, normalize_features(params, f), opts);
  const Eigen::Vector3d offset =
      params.target_mean + params.target_scale * out.col(0).template cast<double>();
  return hip_center(pose) + to_point(offset);
}

template <typename Scalar>
std::vector<Point3> comnet_predict(std::span<const Pose3dFrame> poses,
                                   const MlpParams<Scalar>& params) {
  std::vector<Point3> out;
  out.reserve(poses.size());
  constexpr std::size_t kChunk = 512;
  for (std::size_t start = 0; start < poses.size(); start += kChunk) {
    const std::size_t stop = std::min(poses.size(), start + kChunk);
    Eigen::MatrixXd f(params.input_features(), static_cast<Eigen::Index>(stop - start));
    for (std::size_t i = start; i < stop; ++i) {
      check_layout(poses[i], params);
      f.col(static_cast<Eigen::Index>(i - start)) = pose_features(poses[i]);
    }
    const auto y = mlp_forward(params, normalize_features(params, f), ForwardOptions{});
    for (std::size_t i = start; i < stop; ++i) {
      const Eigen::Vector3d offset =
          params.target_mean +
          params.target_scale * y.col(static_cast<Eigen::Index>(i - start)).template cast<double>();
      out.push_back(hip_center(poses[i]) + to_point(offset));
    }
  }
  return out;
}

void TrainConfig::validate() const {
  if (epochs <= 0 || !(initial_lr > 0.0) || !(lr_drop_factor > 0.0) || lr_drop_every <= 0 ||
      batch_size <= 0 || width <= 0 || !(dropout >= 0.0 && dropout < 1.0) ||
      !(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) ||
      !(adam_epsilon > 0.0) || !(bn_momentum > 0.0 && bn_momentum <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid training configuration");
  }
}

double learning_rate_at(const TrainConfig& cfg, int epoch) {
  return cfg.initial_lr * std::pow(cfg.lr_drop_factor, epoch / cfg.lr_drop_every);
}

namespace {

struct PreparedSet {
  Eigen::MatrixXd features;  // F x N
  Eigen::MatrixXd targets;   // 3 x N, hip-relative CoM in mm
};

PreparedSet prepare(std::span<const TrainSample> dataset, LayoutKind layout) {
  PreparedSet set;
  const auto n = static_cast<Eigen::Index>(dataset.size());
  set.features.resize(features_for(layout), n);
  set.targets.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = dataset[static_cast<std::size_t>(i)];
    if (s.pose.layout != layout) {
      throw Error(ErrorCode::ShapeMismatch, "training set mixes pose layouts");
    }
    set.features.col(i) = pose_features(s.pose);
    const Point3 rel = s.com - hip_center(s.pose);
    set.targets.col(i) = Eigen::Vector3d(rel.x, rel.y, rel.z);
  }
  return set;
}

template <typename Scalar>
typename MlpParams<Scalar>::Matrix normalize_targets(const MlpParams<Scalar>& params,
                                                     const Eigen::MatrixXd& targets) {
  const Eigen::MatrixXd centred = (targets.colwise() - params.target_mean) / params.target_scale;
  return centred.template cast<Scalar>();
}

template <typename Scalar>
double eval_rmse_mm(const MlpParams<Scalar>& params, const PreparedSet& set) {
  double sq = 0.0;
  constexpr Eigen::Index kChunk = 1024;
  for (Eigen::Index start = 0; start < set.features.cols(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, set.features.cols() - start);
    const auto y = mlp_forward(params, normalize_features(params, set.features.middleCols(start, len)),
                               ForwardOptions{});
    const Eigen::MatrixXd offset =
        (y.template cast<double>() * params.target_scale).colwise() + params.target_mean;
    sq += (offset - set.targets.middleCols(start, len)).squaredNorm();
  }
  return std::sqrt(sq / static_cast<double>(set.targets.size()));
}

}  // namespace

template <typename Scalar>
TrainResult<Scalar> comnet_train(std::span<const TrainSample> dataset, const TrainConfig& cfg,
                                 const EpochCallback& on_epoch) {
  using Matrix = typename MlpParams<Scalar>::Matrix;
  cfg.validate();
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "no training samples");
  const LayoutKind layout = dataset.front().pose.layout;
  const PreparedSet set = prepare(dataset, layout);
  const Eigen::Index n = set.features.cols();

  TrainResult<Scalar> result;
  MlpParams<Scalar>& params = result.params;
  params = MlpParams<Scalar>::initialized(layout, cfg.width, cfg.dropout, cfg.seed);

  // Normalisation statistics from the training set only.
  const Eigen::VectorXd mean = set.features.rowwise().mean();
  Eigen::VectorXd stddev =
      ((set.features.colwise() - mean).array().square().rowwise().mean()).sqrt().matrix();
  for (Eigen::Index i = 0; i < stddev.size(); ++i) {
    if (!(stddev(i) > 1e-6)) stddev(i) = 1.0;
  }
  params.input_mean = mean.cast<Scalar>();
  params.input_std = stddev.cast<Scalar>();
  params.target_mean = set.targets.rowwise().mean();
  const double spread =
      std::sqrt((set.targets.colwise() - params.target_mean).squaredNorm() /
                static_cast<double>(set.targets.size()));
  params.target_scale = spread > 1e-6 ? spread : 1.0;

  const Matrix x_all = normalize_features(params, set.features);
  const Matrix t_all = normalize_targets(params, set.targets);

  std::array<Matrix, kParamGroupCount> m1;
  std::array<Matrix, kParamGroupCount> m2;
  for (std::size_t g = 0; g < kParamGroupCount; ++g) {
    m1[g] = Matrix::Zero(params.weights[g].rows(), params.weights[g].cols());
    m2[g] = m1[g];
  }

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index batch = std::min<Eigen::Index>(cfg.batch_size, n);
  const auto momentum = static_cast<Scalar>(cfg.bn_momentum);
  long step = 0;

  result.initial_eval_rmse_mm = eval_rmse_mm(params, set);

  ForwardOptions fwd;
  fwd.batch_norm = BatchNormMode::batch_statistics;
  fwd.dropout = cfg.dropout;
  fwd.rng = &rng;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate_at(cfg, epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int batches = 0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index len = std::min(batch, n - start);
      if (len < 2 && n >= 2) continue;  // batch statistics need two samples
      Matrix xb(x_all.rows(), len);
      Matrix tb(3, len);
      for (Eigen::Index j = 0; j < len; ++j) {
        xb.col(j) = x_all.col(order[static_cast<std::size_t>(start + j)]);
        tb.col(j) = t_all.col(order[static_cast<std::size_t>(start + j)]);
      }
      ForwardCache<Scalar> cache;
      const Matrix pred = mlp_forward(params, xb, fwd, &cache);
      const Scalar loss = rmse_loss<Scalar>(pred, tb);
      if (!std::isfinite(static_cast<double>(loss))) {
        throw Error(ErrorCode::NonFiniteLoss,
                    "loss became non-finite at epoch " + std::to_string(epoch + 1) +
                        ", batch " + std::to_string(batches + 1) + ", lr " + std::to_string(lr));
      }
      const auto grads = mlp_backward(params, cache, fwd, pred, tb);

      ++step;
      const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
      const auto b1 = static_cast<Scalar>(cfg.adam_beta1);
      const auto b2 = static_cast<Scalar>(cfg.adam_beta2);
      const auto step_size = static_cast<Scalar>(lr * std::sqrt(bc2) / bc1);
      const auto eps_hat = static_cast<Scalar>(cfg.adam_epsilon * std::sqrt(bc2));
      for (std::size_t g = 0; g < kParamGroupCount; ++g) {
        m1[g] = b1 * m1[g] + (Scalar(1) - b1) * grads[g];
        m2[g] = b2 * m2[g] + (Scalar(1) - b2) * grads[g].cwiseAbs2();
        params.weights[g].array() -=
            step_size * m1[g].array() / (m2[g].array().sqrt() + eps_hat);
      }
      const Scalar unbias = len > 1 ? static_cast<Scalar>(len) / static_cast<Scalar>(len - 1)
                                    : Scalar(1);
      for (int l = 0; l < 2; ++l) {
        params.running_mean[l] =
            (Scalar(1) - momentum) * params.running_mean[l] + momentum * cache.batch_mean[l];
        params.running_var[l] = (Scalar(1) - momentum) * params.running_var[l] +
                                momentum * unbias * cache.batch_var[l];
      }
      loss_sum += static_cast<double>(loss) * params.target_scale;
      ++batches;
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.learning_rate = lr;
    log.mean_batch_loss_mm = batches > 0 ? loss_sum / batches : 0.0;
    log.eval_rmse_mm = eval_rmse_mm(params, set);
    if (!std::isfinite(log.eval_rmse_mm)) {
      throw Error(ErrorCode::NonFiniteLoss,
                  "evaluation loss non-finite after epoch " + std::to_string(epoch + 1));
    }
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

template <typename Scalar>
double comnet_rmse_mm(std::span<const TrainSample> dataset, const MlpParams<Scalar>& params) {
  if (dataset.empty()) throw Error(ErrorCode::EmptyDataset, "no samples");
  return eval_rmse_mm(params, prepare(dataset, params.layout));
}

#define STABILIKIT_INSTANTIATE(S)                                                               \
  template struct MlpParams<S>;                                                                 \
  template MlpParams<S>::Matrix mlp_forward<S>(const MlpParams<S>&, const MlpParams<S>::Matrix&, \
                                               const ForwardOptions&, ForwardCache<S>*);         \
  template S rmse_loss<S>(const MlpParams<S>::Matrix&, const MlpParams<S>::Matrix&);            \
  template std::array<MlpParams<S>::Matrix, kParamGroupCount> mlp_backward<S>(                  \
      const MlpParams<S>&, const ForwardCache<S>&, const ForwardOptions&,                       \
      const MlpParams<S>::Matrix&, const MlpParams<S>::Matrix&);                                \
  template MlpParams<S>::Matrix normalize_features<S>(const MlpParams<S>&,                      \
                                                      const Eigen::MatrixXd&);                  \
  template Point3 comnet_forward<S>(const Pose3dFrame&, const MlpParams<S>&, ForwardMode,       \
                                    std::mt19937_64*);                                          \
  template std::vector<Point3> comnet_predict<S>(std::span<const Pose3dFrame>,                  \
                                                 const MlpParams<S>&);                          \
  template TrainResult<S> comnet_train<S>(std::span<const TrainSample>, const TrainConfig&,     \
                                          const EpochCallback&);                                \
  template double comnet_rmse_mm<S>(std::span<const TrainSample>, const MlpParams<S>&);

STABILIKIT_INSTANTIATE(float)
STABILIKIT_INSTANTIATE(double)
#undef STABILIKIT_INSTANTIATE

template MlpParams<double> MlpParams<float>::cast<double>() const;
template MlpParams<float> MlpParams<double>::cast<float>() const;
template MlpParams<float> MlpParams<float>::cast<float>() const;
template MlpParams<double> MlpParams<double>::cast<double>() const;

}  // namespace stabilikit
