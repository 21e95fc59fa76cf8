#pragma once

#include <Eigen/Core>

namespace funcate::kernels {

// Univariate second-order Sobolev spline kernel on [0, 1]:
// k(s,t) = 1 + k1(s)k1(t) + k2(s)k2(t) - k4(|s-t|) with k1(t) = t - 1/2,
// k2(t) = (k1(t)^2 - 1/12)/2, k4(t) = (k1(t)^4 - k1(t)^2/2 + 7/240)/24
// (scaled Bernoulli polynomials).
double sobolevKernel1d(double s, double t);

// Product kernel over coordinates; entries must lie in [0, 1].
double sobolevKernel(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Gram matrix of the rows of u (n x d). The parallel version distributes
// rows across threads; every entry is computed by the same scalar code, so
// both versions agree bit for bit.
Eigen::MatrixXd sobolevGramSerial(const Eigen::MatrixXd& u);
Eigen::MatrixXd sobolevGram(const Eigen::MatrixXd& u);

// y = K x for symmetric K (columns are used for contiguous access).
// The parallel version splits output rows; each row is one dot product
// evaluated exactly as in the serial loop.
Eigen::VectorXd symMatvecSerial(const Eigen::MatrixXd& K,
                                const Eigen::VectorXd& x);
Eigen::VectorXd symMatvec(const Eigen::MatrixXd& K, const Eigen::VectorXd& x);

}  // namespace funcate::kernels
