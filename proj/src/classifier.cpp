#include "fwis/classifier.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fwis/planner.hpp"

namespace fwis {

namespace {

constexpr double kClampEps = 1e-7;

bool pixel_is(const uint8_t* p, uint8_t r, uint8_t g, uint8_t b) {
  return p[0] == r && p[1] == g && p[2] == b;
}

}  // namespace

MaskSet compute_masks(const SceneImage& img) {
  MaskSet m;
  m.width = img.width;
  m.height = img.height;
  const size_t n = static_cast<size_t>(img.width) * img.height;
  m.init_mask.assign(n, 0);
  m.goal_mask.assign(n, 0);
  m.obs_mask.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    const uint8_t* p = &img.pixels[3 * i];
    if (pixel_is(p, 255, 0, 255)) {
      m.init_mask[i] = 1;
      ++m.n_init;
    } else if (pixel_is(p, 0, 255, 0)) {
      m.goal_mask[i] = 1;
      ++m.n_goal;
    } else if (pixel_is(p, 0, 0, 0)) {
      m.obs_mask[i] = 1;
      ++m.n_obs;
    }
  }
  return m;
}

PixelRatios pixel_ratios(const MaskSet& m) {
  const double total = static_cast<double>(m.width) * m.height;
  return {m.n_init / total, m.n_goal / total, m.n_obs / total};
}

Eigen::VectorXd pooled_grayscale(const SceneImage& img) {
  Eigen::VectorXd pooled(kPoolSize * kPoolSize);
  for (int by = 0; by < kPoolSize; ++by) {
    const int y0 = by * img.height / kPoolSize;
    const int y1 = (by + 1) * img.height / kPoolSize;
    for (int bx = 0; bx < kPoolSize; ++bx) {
      const int x0 = bx * img.width / kPoolSize;
      const int x1 = (bx + 1) * img.width / kPoolSize;
      double sum = 0.0;
      long count = 0;
      for (int y = y0; y < std::max(y1, y0 + 1); ++y) {
        for (int x = x0; x < std::max(x1, x0 + 1); ++x) {
          const uint8_t* p = img.at(x, y);
          sum += (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
          ++count;
        }
      }
      pooled[by * kPoolSize + bx] = sum / count;
    }
  }
  return pooled;
}

namespace {

// Fixed projection, generated once from a constant seed.
const Eigen::MatrixXd& image_projection() {
  static const Eigen::MatrixXd proj = [] {
    Rng rng(0x5eed1a6e);
    Eigen::MatrixXd w(kImageFeatureDim, kPoolSize * kPoolSize);
    const double scale = 1.0 / std::sqrt(static_cast<double>(kPoolSize * kPoolSize));
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) {
        w(i, j) = rng.uniform(-scale, scale);
      }
    }
    return w;
  }();
  return proj;
}

}  // namespace

Eigen::VectorXd image_features(const SceneImage& img) {
  return image_projection() * pooled_grayscale(img);
}

namespace {

Linear make_linear(int out, int in, Rng& rng) {
  Linear l;
  l.w.resize(out, in);
  const double a = 1.0 / std::sqrt(static_cast<double>(in));
  for (int i = 0; i < out; ++i) {
    for (int j = 0; j < in; ++j) l.w(i, j) = rng.uniform(-a, a);
  }
  l.b = Eigen::VectorXd::Zero(out);
  return l;
}

Linear zeros_linear(const Linear& shape) {
  Linear l;
  l.w = Eigen::MatrixXd::Zero(shape.w.rows(), shape.w.cols());
  l.b = Eigen::VectorXd::Zero(shape.b.size());
  return l;
}

Eigen::VectorXd encoder_forward(const Encoder& e, const Eigen::VectorXd& x,
                                Eigen::VectorXd* hidden_pre = nullptr) {
  Eigen::VectorXd h = e.l1.w * x + e.l1.b;
  if (hidden_pre != nullptr) *hidden_pre = h;
  return e.l2.w * h.cwiseMax(0.0) + e.l2.b;
}

// dL/dx given dL/dout; parameter gradients accumulate into grad.
Eigen::VectorXd encoder_backward(const Encoder& e, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& hidden_pre, const Eigen::VectorXd& dout,
                                 Encoder& grad) {
  const Eigen::VectorXd h = hidden_pre.cwiseMax(0.0);
  grad.l2.w += dout * h.transpose();
  grad.l2.b += dout;
  Eigen::VectorXd dh = e.l2.w.transpose() * dout;
  for (int i = 0; i < dh.size(); ++i) {
    if (hidden_pre[i] <= 0.0) dh[i] = 0.0;
  }
  grad.l1.w += dh * x.transpose();
  grad.l1.b += dh;
  return e.l1.w.transpose() * dh;
}

}  // namespace

MlpModel MlpModel::initialized(uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  MlpModel m;
  m.ratio_init = {make_linear(kRatioFeatureDim, 1, rng), make_linear(kRatioFeatureDim, kRatioFeatureDim, rng)};
  m.ratio_goal = {make_linear(kRatioFeatureDim, 1, rng), make_linear(kRatioFeatureDim, kRatioFeatureDim, rng)};
  m.ratio_obs = {make_linear(kRatioFeatureDim, 1, rng), make_linear(kRatioFeatureDim, kRatioFeatureDim, rng)};
  m.state_init = {make_linear(64, 3, rng), make_linear(kStateFeatureDim, 64, rng)};
  m.state_goal = {make_linear(64, 3, rng), make_linear(kStateFeatureDim, 64, rng)};
  m.color_init = make_linear(kStateFeatureDim, 3, rng);
  m.color_goal = make_linear(kStateFeatureDim, 3, rng);
  m.fusion = {make_linear(128, kFusedDim, rng), make_linear(1, 128, rng)};
  return m;
}

MlpModel MlpModel::zeros_like(const MlpModel& s) {
  MlpModel m;
  m.ratio_init = {zeros_linear(s.ratio_init.l1), zeros_linear(s.ratio_init.l2)};
  m.ratio_goal = {zeros_linear(s.ratio_goal.l1), zeros_linear(s.ratio_goal.l2)};
  m.ratio_obs = {zeros_linear(s.ratio_obs.l1), zeros_linear(s.ratio_obs.l2)};
  m.state_init = {zeros_linear(s.state_init.l1), zeros_linear(s.state_init.l2)};
  m.state_goal = {zeros_linear(s.state_goal.l1), zeros_linear(s.state_goal.l2)};
  m.color_init = zeros_linear(s.color_init);
  m.color_goal = zeros_linear(s.color_goal);
  m.fusion = {zeros_linear(s.fusion.l1), zeros_linear(s.fusion.l2)};
  return m;
}

namespace {

template <typename F>
void for_each_linear(MlpModel& m, F&& f) {
  f(m.ratio_init.l1);
  f(m.ratio_init.l2);
  f(m.ratio_goal.l1);
  f(m.ratio_goal.l2);
  f(m.ratio_obs.l1);
  f(m.ratio_obs.l2);
  f(m.state_init.l1);
  f(m.state_init.l2);
  f(m.state_goal.l1);
  f(m.state_goal.l2);
  f(m.color_init);
  f(m.color_goal);
  f(m.fusion.l1);
  f(m.fusion.l2);
}

template <typename F>
void for_each_linear(const MlpModel& m, F&& f) {
  for_each_linear(const_cast<MlpModel&>(m), [&](Linear& l) { f(static_cast<const Linear&>(l)); });
}

}  // namespace

long MlpModel::parameter_count() const {
  long n = 0;
  for_each_linear(*this, [&](const Linear& l) { n += l.w.size() + l.b.size(); });
  return n;
}

Eigen::VectorXd MlpModel::flatten() const {
  Eigen::VectorXd v(parameter_count());
  long at = 0;
  for_each_linear(*this, [&](const Linear& l) {
    for (int j = 0; j < l.w.cols(); ++j) {
      for (int i = 0; i < l.w.rows(); ++i) v[at++] = l.w(i, j);
    }
    for (int i = 0; i < l.b.size(); ++i) v[at++] = l.b[i];
  });
  return v;
}

void MlpModel::unflatten(const Eigen::VectorXd& v) {
  long at = 0;
  for_each_linear(*this, [&](Linear& l) {
    for (int j = 0; j < l.w.cols(); ++j) {
      for (int i = 0; i < l.w.rows(); ++i) l.w(i, j) = v[at++];
    }
    for (int i = 0; i < l.b.size(); ++i) l.b[i] = v[at++];
  });
}

SampleFeatures extract_features(const SceneImage& img, const VehicleState& xs,
                                const VehicleState& xf, const Workspace& ws) {
  SampleFeatures f;
  f.f_img = image_features(img);
  const MaskSet masks = compute_masks(img);
  const PixelRatios r = pixel_ratios(masks);
  f.r_init = r.r_init;
  f.r_goal = r.r_goal;
  f.r_obs = r.r_obs;

  const auto mean_color = [&](const std::vector<uint8_t>& mask, long count) -> Eigen::Vector3d {
    if (count == 0) return Eigen::Vector3d::Zero();
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      const uint8_t* p = &img.pixels[3 * i];
      sum += Eigen::Vector3d(p[0], p[1], p[2]) / 255.0;
    }
    return sum / static_cast<double>(count);
  };
  f.c_init = mean_color(masks.init_mask, masks.n_init);
  f.c_goal = mean_color(masks.goal_mask, masks.n_goal);

  const auto norm_state = [&](const VehicleState& s) -> Eigen::Vector3d {
    return {(s.x - ws.xmin) / ws.width(), (s.y - ws.ymin) / ws.height(), s.theta / M_PI};
  };
  f.xs = norm_state(xs);
  f.xf = norm_state(xf);
  return f;
}

namespace {

struct ForwardCache {
  Eigen::VectorXd ri_pre, rg_pre, ro_pre, si_pre, sg_pre, fu_pre;
  Eigen::VectorXd ri, rg, ro, si, sg;
  Eigen::VectorXd fused;
  double z = 0.0;
  ForwardResult out;
};

ForwardCache run_forward(const MlpModel& m, const SampleFeatures& f) {
  ForwardCache c;
  Eigen::VectorXd one(1);

  one[0] = f.r_init;
  c.ri = encoder_forward(m.ratio_init, one, &c.ri_pre);
  one[0] = f.r_goal;
  c.rg = encoder_forward(m.ratio_goal, one, &c.rg_pre);
  one[0] = f.r_obs;
  c.ro = encoder_forward(m.ratio_obs, one, &c.ro_pre);
  c.si = encoder_forward(m.state_init, f.xs, &c.si_pre);
  c.sg = encoder_forward(m.state_goal, f.xf, &c.sg_pre);

  c.fused.resize(kFusedDim);
  c.fused << f.f_img, c.si, c.sg, c.ri, c.rg, c.ro;

  Eigen::VectorXd zvec = encoder_forward(m.fusion, c.fused, &c.fu_pre);
  c.z = zvec[0];
  c.out.y_hat = 1.0 / (1.0 + std::exp(-c.z));
  c.out.hard = c.out.y_hat > 0.5;
  c.out.f_init_color = m.color_init.w * f.c_init + m.color_init.b;
  c.out.f_goal_color = m.color_goal.w * f.c_goal + m.color_goal.b;
  c.out.f_init_state = c.si;
  c.out.f_goal_state = c.sg;
  return c;
}

}  // namespace

ForwardResult forward(const MlpModel& model, const SampleFeatures& f) {
  return run_forward(model, f).out;
}

ForwardResult forward(const MlpModel& model, const SceneImage& img, const VehicleState& xs,
                      const VehicleState& xf, const Workspace& ws) {
  return forward(model, extract_features(img, xs, xf, ws));
}

double loss(const ForwardResult& out, double label, const TrainConfig& cfg) {
  const double y = std::clamp(out.y_hat, kClampEps, 1.0 - kClampEps);
  const double bce = -label * std::log(y) - (1.0 - label) * std::log(1.0 - y);
  const double align = (out.f_init_color - out.f_init_state).norm() +
                       (out.f_goal_color - out.f_goal_state).norm();
  return cfg.lambda_ce * bce + cfg.lambda_align * align;
}

double loss_and_gradients(const MlpModel& m, const SampleFeatures& f, const TrainConfig& cfg,
                          MlpModel& grad) {
  ForwardCache c = run_forward(m, f);
  const double label = f.label;
  const double y = std::clamp(c.out.y_hat, kClampEps, 1.0 - kClampEps);
  const double bce = -label * std::log(y) - (1.0 - label) * std::log(1.0 - y);

  const Eigen::VectorXd d_init = c.out.f_init_color - c.out.f_init_state;
  const Eigen::VectorXd d_goal = c.out.f_goal_color - c.out.f_goal_state;
  const double n_init = d_init.norm();
  const double n_goal = d_goal.norm();
  const double total = cfg.lambda_ce * bce + cfg.lambda_align * (n_init + n_goal);

  // dL/dz through the clamped cross-entropy.
  double dz = 0.0;
  if (c.out.y_hat > kClampEps && c.out.y_hat < 1.0 - kClampEps) {
    dz = cfg.lambda_ce * (y - label);
  }
  Eigen::VectorXd dzvec(1);
  dzvec[0] = dz;
  Eigen::VectorXd dfused = encoder_backward(m.fusion, c.fused, c.fu_pre, dzvec, grad.fusion);

  // Alignment loss gradients (subgradient zero at the kink).
  const Eigen::VectorXd gi =
      n_init > 1e-12 ? Eigen::VectorXd(cfg.lambda_align * d_init / n_init)
                     : Eigen::VectorXd(Eigen::VectorXd::Zero(d_init.size()));
  const Eigen::VectorXd gg =
      n_goal > 1e-12 ? Eigen::VectorXd(cfg.lambda_align * d_goal / n_goal)
                     : Eigen::VectorXd(Eigen::VectorXd::Zero(d_goal.size()));
  grad.color_init.w += gi * f.c_init.transpose();
  grad.color_init.b += gi;
  grad.color_goal.w += gg * f.c_goal.transpose();
  grad.color_goal.b += gg;

  // Slices of the fused gradient feed each encoder; state encoders also
  // receive the alignment term.
  long at = kImageFeatureDim;
  Eigen::VectorXd dsi = dfused.segment(at, kStateFeatureDim) - gi;
  at += kStateFeatureDim;
  Eigen::VectorXd dsg = dfused.segment(at, kStateFeatureDim) - gg;
  at += kStateFeatureDim;
  Eigen::VectorXd dri = dfused.segment(at, kRatioFeatureDim);
  at += kRatioFeatureDim;
  Eigen::VectorXd drg = dfused.segment(at, kRatioFeatureDim);
  at += kRatioFeatureDim;
  Eigen::VectorXd dro = dfused.segment(at, kRatioFeatureDim);

  encoder_backward(m.state_init, f.xs, c.si_pre, dsi, grad.state_init);
  encoder_backward(m.state_goal, f.xf, c.sg_pre, dsg, grad.state_goal);
  Eigen::VectorXd one(1);
  one[0] = f.r_init;
  encoder_backward(m.ratio_init, one, c.ri_pre, dri, grad.ratio_init);
  one[0] = f.r_goal;
  encoder_backward(m.ratio_goal, one, c.rg_pre, drg, grad.ratio_goal);
  one[0] = f.r_obs;
  encoder_backward(m.ratio_obs, one, c.ro_pre, dro, grad.ratio_obs);
  return total;
}

TrainResult train(const std::vector<SampleFeatures>& dataset, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::runtime_error("train: empty dataset");

  Rng rng(cfg.seed);
  std::vector<int> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.eng() % i]);
  }
  // 8:1:1 split; tiny datasets train on everything (overfit checks).
  size_t n_train = dataset.size() * 8 / 10;
  size_t n_val = dataset.size() / 10;
  if (dataset.size() < 10) {
    n_train = dataset.size();
    n_val = 0;
  }
  if (n_train == 0) throw std::runtime_error("train: empty training split");
  std::vector<int> train_idx(order.begin(), order.begin() + n_train);
  std::vector<int> val_idx(order.begin() + n_train, order.begin() + n_train + n_val);
  std::vector<int> test_idx(order.begin() + n_train + n_val, order.end());

  MlpModel model = MlpModel::initialized(cfg.seed);
  Eigen::VectorXd theta = model.flatten();
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  long step = 0;

  TrainResult result;
  result.model = model;
  double best_acc = -1.0;

  const auto eval_split = [&](const MlpModel& mdl, const std::vector<int>& idx, double& loss_out,
                              double& acc_out) {
    double l = 0.0;
    int correct = 0;
    for (int i : idx) {
      const ForwardResult out = forward(mdl, dataset[i]);
      l += loss(out, dataset[i].label, cfg);
      if ((out.y_hat > 0.5) == (dataset[i].label > 0.5)) ++correct;
    }
    loss_out = idx.empty() ? 0.0 : l / idx.size();
    acc_out = idx.empty() ? 0.0 : static_cast<double>(correct) / idx.size();
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (size_t i = train_idx.size(); i > 1; --i) {
      std::swap(train_idx[i - 1], train_idx[rng.eng() % i]);
    }
    double epoch_loss = 0.0;
    for (size_t start = 0; start < train_idx.size(); start += cfg.batch_size) {
      const size_t end = std::min(start + cfg.batch_size, train_idx.size());
      MlpModel grad = MlpModel::zeros_like(model);
      double batch_loss = 0.0;
      for (size_t k = start; k < end; ++k) {
        batch_loss += loss_and_gradients(model, dataset[train_idx[k]], cfg, grad);
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      batch_loss *= inv;
      epoch_loss += batch_loss * (end - start);

      Eigen::VectorXd g = grad.flatten() * inv;
      ++step;
      m1 = beta1 * m1 + (1.0 - beta1) * g;
      m2 = beta2 * m2 + (1.0 - beta2) * g.cwiseProduct(g);
      const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      theta -= (cfg.learning_rate / bc1) *
               (m1.array() / ((m2 / bc2).array().sqrt() + eps)).matrix();
      model.unflatten(theta);
    }
    epoch_loss /= static_cast<double>(train_idx.size());

    double val_loss = 0.0, val_acc = 0.0;
    eval_split(model, val_idx, val_loss, val_acc);
    result.history.train_loss.push_back(epoch_loss);
    result.history.val_loss.push_back(val_loss);
    result.history.val_accuracy.push_back(val_acc);
    if (val_idx.empty() || val_acc > best_acc) {
      best_acc = val_acc;
      result.model = model;
      result.best_epoch = epoch;
    }
  }

  double test_loss = 0.0;
  eval_split(result.model, test_idx, test_loss, result.test_accuracy);
  return result;
}

void save_model(const MlpModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << "fwis-mlp 1\n";
  char buf[32];
  for_each_linear(model, [&](const Linear& l) {
    out << "layer " << l.w.rows() << " " << l.w.cols() << "\n";
    for (int i = 0; i < l.w.rows(); ++i) {
      for (int j = 0; j < l.w.cols(); ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", l.w(i, j));
        out << buf << (j + 1 < l.w.cols() ? " " : "\n");
      }
    }
    for (int i = 0; i < l.b.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", l.b[i]);
      out << buf << (i + 1 < l.b.size() ? " " : "\n");
    }
  });
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "fwis-mlp" || version != 1)
    throw std::runtime_error("load_model: bad header in " + path);
  MlpModel model = MlpModel::initialized(0);
  for_each_linear(model, [&](Linear& l) {
    std::string tag;
    long rows = 0, cols = 0;
    in >> tag >> rows >> cols;
    if (!in || tag != "layer" || rows != l.w.rows() || cols != l.w.cols())
      throw std::runtime_error("load_model: layer shape mismatch in " + path);
    for (int i = 0; i < l.w.rows(); ++i) {
      for (int j = 0; j < l.w.cols(); ++j) in >> l.w(i, j);
    }
    for (int i = 0; i < l.b.size(); ++i) in >> l.b[i];
    if (!in) throw std::runtime_error("load_model: truncated weights in " + path);
  });
  return model;
}

std::vector<LabeledScenario> label_dataset(const std::vector<Scenario>& scenarios,
                                           const VehicleParams& params) {
  std::vector<LabeledScenario> out(scenarios.size());
  const PlannerConfig cfg;
  if (!scenarios.empty()) {
    // Untimed warm-up run so first-touch costs don't skew the first label.
    initial_path(scenarios.front(), params, cfg, PolicyOverride::ForceEasy);
  }
  for (size_t i = 0; i < scenarios.size(); ++i) {
    LabeledScenario& row = out[i];
    row.scenario = scenarios[i];

    double t0 = omp_get_wtime();
    const InitialPathResult direct =
        initial_path(scenarios[i], params, cfg, PolicyOverride::ForceEasy);
    row.t_direct = omp_get_wtime() - t0;

    t0 = omp_get_wtime();
    const InitialPathResult guided =
        initial_path(scenarios[i], params, cfg, PolicyOverride::ForceHard);
    row.t_guided = omp_get_wtime() - t0;

    const bool direct_ok = direct.path.has_value();
    const bool guided_ok = guided.path.has_value();
    if (!direct_ok && !guided_ok) {
      row.dropped = true;
      continue;
    }
    // Strict reading: a timing tie labels the task hard.
    row.hard = !(direct_ok && row.t_direct < row.t_guided);
  }
  return out;
}

void save_dataset_index(const std::vector<LabeledScenario>& labeled,
                        const std::vector<std::string>& scenario_paths, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_dataset_index: cannot open " + path);
  out << "path\tlabel\tt_direct\tt_guided\n";
  char buf[64];
  for (size_t i = 0; i < labeled.size(); ++i) {
    if (labeled[i].dropped) continue;
    out << (i < scenario_paths.size() ? scenario_paths[i] : "-") << "\t"
        << (labeled[i].hard ? "hard" : "easy") << "\t";
    std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\n", labeled[i].t_direct, labeled[i].t_guided);
    out << buf;
  }
}

}  // namespace fwis
