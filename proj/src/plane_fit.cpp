#include "rdlab/plane_fit.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace rdlab {

double PlaneFrame::dist(std::span<const double> x) const {
  double s = 0.0;
  for (int a = d; a < n; ++a) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += (x[i] - base[i]) * axes[a][i];
    s += c * c;
  }
  return std::sqrt(s);
}

VecN PlaneFrame::tangential(std::span<const double> x) const {
  VecN t{};
  for (int a = 0; a < d; ++a) {
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += (x[i] - base[i]) * axes[a][i];
    t[a] = c;
  }
  return t;
}

VecN PlaneFrame::embed(std::span<const double> t) const {
  VecN x = base;
  for (int a = 0; a < d; ++a)
    for (int i = 0; i < n; ++i) x[i] += t[a] * axes[a][i];
  return x;
}

PlaneFrame PlaneFrame::perturbed(std::span<const double> tilt,
                                 std::span<const double> shift) const {
  const int codim = n - d;
  Eigen::MatrixXd M(n, n);
  for (int a = 0; a < d; ++a) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = axes[a][i];
    for (int b = 0; b < codim; ++b) {
      const double t = tilt[a * codim + b];
      for (int i = 0; i < n; ++i) v[i] += t * axes[d + b][i];
    }
    M.col(a) = v;
  }
  for (int b = 0; b < codim; ++b)
    for (int i = 0; i < n; ++i) M(i, d + b) = axes[d + b][i];

  // Gram-Schmidt via thin QR keeps the tangent block leading.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  // Fix sign flips introduced by QR so a zero tilt is the identity.
  Eigen::MatrixXd R = Q.transpose() * M;
  for (int c = 0; c < n; ++c)
    if (R(c, c) < 0.0) Q.col(c) *= -1.0;

  PlaneFrame out;
  out.n = n;
  out.d = d;
  for (int c = 0; c < n; ++c)
    for (int i = 0; i < n; ++i) out.axes[c][i] = Q(i, c);
  out.base = base;
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int b = 0; b < codim; ++b) s += shift.empty() ? 0.0 : shift[b] * axes[d + b][i];
    out.base[i] += s;
  }
  return out;
}

double PlaneFrame::orthonormality_defect() const {
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      double dotv = 0.0;
      for (int i = 0; i < n; ++i) dotv += axes[a][i] * axes[b][i];
      worst = std::max(worst, std::abs(dotv - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

PcaFit pca_plane(const SpatialIndex& index, std::span<const std::uint32_t> ids, int d) {
  const int n = index.dim();
  if (ids.empty()) throw std::invalid_argument("pca_plane: empty point set");
  if (d < 1 || d >= n) throw std::invalid_argument("pca_plane: bad plane dimension");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  double wsum = 0.0;
  for (const auto k : ids) {
    const auto p = index.point(k);
    const double w = index.weight(k);
    wsum += w;
    for (int i = 0; i < n; ++i) mean[i] += w * p[i];
  }
  mean /= wsum;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (const auto k : ids) {
    const auto p = index.point(k);
    const double w = index.weight(k);
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = p[i] - mean[i];
    cov += w * u * u.transpose();
  }
  cov /= wsum;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw std::runtime_error("pca_plane: eigensolver failed");

  PcaFit fit;
  fit.frame.n = n;
  fit.frame.d = d;
  // Eigen returns ascending order; we want tangent = largest.
  for (int c = 0; c < n; ++c) {
    const int src = n - 1 - c;
    fit.eigenvalues[c] = es.eigenvalues()[src];
    for (int i = 0; i < n; ++i) fit.frame.axes[c][i] = es.eigenvectors()(i, src);
  }
  for (int i = 0; i < n; ++i) fit.frame.base[i] = mean[i];
  const double tiny = 1e-30 * std::max(1.0, fit.eigenvalues[0]);
  fit.eigengap = fit.eigenvalues[d - 1] / std::max(fit.eigenvalues[d], tiny);
  return fit;
}

}  // namespace rdlab
