#include "lpbmm/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/QR>

namespace lpbmm {

void SynthConfig::validate() const {
  if (classes < 2) throw InputError("synth: need at least 2 classes");
  if (shots < 1) throw InputError("synth: need at least 1 shot");
  if (dim < classes) throw InputError("synth: dimension must be >= number of classes");
  if (!(separation > 0.0 && separation <= 1.0)) throw InputError("synth: separation must be in (0, 1]");
  if (separation < 1.0 && dim < classes + 1) {
    throw InputError("synth: separation < 1 needs dimension >= classes + 1 for a shared direction");
  }
  if (!(feature_noise >= 0.0) || !(text_noise >= 0.0)) throw InputError("synth: noise must be >= 0");
  if (test_per_class < 1) throw InputError("synth: need at least 1 test sample per class");
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Matrix gaussian(Index rows, Index cols, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) m(i, j) = dist(rng_);
    }
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

Matrix perturb(const Matrix& centers, const std::vector<std::uint32_t>& labels, double noise,
               Sampler& sampler) {
  const Index d = centers.cols();
  Matrix out = sampler.gaussian(static_cast<Index>(labels.size()), d, noise / std::sqrt(double(d)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.row(static_cast<Index>(i)) += centers.row(labels[i]);
    out.row(static_cast<Index>(i)).normalize();
  }
  return out;
}

std::vector<std::uint32_t> class_major_labels(std::size_t classes, std::size_t per_class) {
  std::vector<std::uint32_t> labels;
  labels.reserve(classes * per_class);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t s = 0; s < per_class; ++s) labels.push_back(static_cast<std::uint32_t>(k));
  }
  return labels;
}

}  // namespace

SynthTask synth_task(const SynthConfig& config) {
  config.validate();
  const auto k = static_cast<Index>(config.classes);
  const auto d = static_cast<Index>(config.dim);
  Sampler sampler(config.seed);

  // Orthonormal basis from the QR factor of a Gaussian matrix.
  const Index basis_size = config.separation < 1.0 ? k + 1 : k;
  const Matrix g = sampler.gaussian(d, basis_size, 1.0);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, basis_size);

  const double a = std::sqrt(1.0 - config.separation);
  const double b = std::sqrt(config.separation);
  Matrix centers(k, d);
  for (Index c = 0; c < k; ++c) {
    centers.row(c) = b * q.col(c).transpose();
    if (basis_size > k) centers.row(c) += a * q.col(k).transpose();
    centers.row(c).normalize();
  }

  std::vector<std::uint32_t> text_labels = class_major_labels(config.classes, 1);
  const auto shot_labels = class_major_labels(config.classes, config.shots);
  const auto test_labels = class_major_labels(config.classes, config.test_per_class);

  Matrix text = perturb(centers, text_labels, config.text_noise, sampler);
  Matrix support = perturb(centers, shot_labels, config.feature_noise, sampler);
  Matrix val = perturb(centers, shot_labels, config.feature_noise, sampler);
  Matrix test = perturb(centers, test_labels, config.feature_noise, sampler);

  return SynthTask{
      TextBank(std::move(text)),
      TaskSplit{SupportSet(FeatureMatrix(std::move(support)), LabelVector(shot_labels, config.classes)),
                LabeledSplit{FeatureMatrix(std::move(val)), LabelVector(shot_labels, config.classes)},
                LabeledSplit{FeatureMatrix(std::move(test)), LabelVector(test_labels, config.classes)}},
      std::move(centers)};
}

std::filesystem::path write_task(const std::filesystem::path& dir, const SynthTask& task,
                                 std::size_t shots, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  TaskManifest m;
  m.text = dir / "text.lpeb";
  m.support_features = dir / "support.lpeb";
  m.support_labels = dir / "support.lplb";
  m.val_features = dir / "val.lpeb";
  m.val_labels = dir / "val.lplb";
  m.shots = shots;
  m.seed = seed;
  write_features(m.text, task.text.data());
  write_features(m.support_features, task.split.support.features().data());
  write_labels(m.support_labels, task.split.support.labels());
  write_features(m.val_features, task.split.validation.features.data());
  write_labels(m.val_labels, task.split.validation.labels);
  if (task.split.test) {
    m.test_features = dir / "test.lpeb";
    m.test_labels = dir / "test.lplb";
    write_features(*m.test_features, task.split.test->features.data());
    write_labels(*m.test_labels, task.split.test->labels);
  }
  const auto path = dir / "task.manifest";
  write_manifest(path, m);
  return path;
}

}  // namespace lpbmm
