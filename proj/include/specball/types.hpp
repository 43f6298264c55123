#pragma once

#include <Eigen/Dense>
#include <functional>

namespace specball {

template <int D> using Vec = Eigen::Matrix<double, D, 1>;
template <int D> using Mat = Eigen::Matrix<double, D, D>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

/* Coefficient fields of the PDE, given in physical coordinates. */
template <int D> using ScalarField = std::function<double(const Vec<D>&)>;
template <int D> using MatrixField = std::function<Mat<D>(const Vec<D>&)>;

/* Right-hand side f(s, z) and its partial in z; z is the solution value. */
template <int D> using PointwiseNonlinearity = std::function<double(const Vec<D>&, double)>;

}  // namespace specball
