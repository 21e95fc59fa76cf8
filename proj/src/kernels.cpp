#include "funcate/kernels.hpp"

#include <cmath>

#include "funcate/errors.hpp"
#include "funcate/parallel.hpp"

namespace funcate::kernels {

double sobolevKernel1d(double s, double t) {
  const double k1s = s - 0.5;
  const double k1t = t - 0.5;
  const double k2s = 0.5 * (k1s * k1s - 1.0 / 12.0);
  const double k2t = 0.5 * (k1t * k1t - 1.0 / 12.0);
  const double e = std::abs(s - t) - 0.5;
  const double e2 = e * e;
  const double k4 = (e2 * e2 - 0.5 * e2 + 7.0 / 240.0) / 24.0;
  return 1.0 + k1s * k1t + k2s * k2t - k4;
}

double sobolevKernel(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  if (u.size() != v.size())
    throw InvalidArgument("sobolevKernel dimension mismatch");
  if ((u.array() < 0.0).any() || (u.array() > 1.0).any() ||
      (v.array() < 0.0).any() || (v.array() > 1.0).any())
    throw InvalidArgument("sobolevKernel inputs must lie in [0, 1]");
  double prod = 1.0;
  for (Eigen::Index c = 0; c < u.size(); ++c)
    prod *= sobolevKernel1d(u(c), v(c));
  return prod;
}

namespace {

double gramEntry(const Eigen::MatrixXd& u, Eigen::Index i, Eigen::Index j) {
  double prod = 1.0;
  for (Eigen::Index c = 0; c < u.cols(); ++c)
    prod *= sobolevKernel1d(u(i, c), u(j, c));
  return prod;
}

void fillGramRow(const Eigen::MatrixXd& u, Eigen::MatrixXd& gram,
                 Eigen::Index i) {
  for (Eigen::Index j = i; j < u.rows(); ++j) {
    const double v = gramEntry(u, i, j);
    gram(i, j) = v;
    gram(j, i) = v;
  }
}

}  // namespace

Eigen::MatrixXd sobolevGramSerial(const Eigen::MatrixXd& u) {
  const Eigen::Index n = u.rows();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) fillGramRow(u, gram, i);
  return gram;
}

Eigen::MatrixXd sobolevGram(const Eigen::MatrixXd& u) {
  const Eigen::Index n = u.rows();
  Eigen::MatrixXd gram(n, n);
  parallelFor(static_cast<int>(n),
              [&](int i) { fillGramRow(u, gram, i); });
  return gram;
}

Eigen::VectorXd symMatvecSerial(const Eigen::MatrixXd& K,
                                const Eigen::VectorXd& x) {
  const Eigen::Index n = K.rows();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = K.col(i).dot(x);
  return y;
}

Eigen::VectorXd symMatvec(const Eigen::MatrixXd& K, const Eigen::VectorXd& x) {
  const Eigen::Index n = K.rows();
  Eigen::VectorXd y(n);
  parallelFor(static_cast<int>(n), [&](int i) { y(i) = K.col(i).dot(x); });
  return y;
}

}  // namespace funcate::kernels
