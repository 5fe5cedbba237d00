#ifndef MRA_WIGNER_HPP
#define MRA_WIGNER_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <array>
#include <complex>

namespace mra {

/// Wigner small-d matrix d^l_{m',m}(beta), indices stored as m+l (row m',
/// col m). Explicit factorial sum; fine for the desk-scale l used here.
Eigen::MatrixXd wigner_d(int l, double beta);

/// Wigner D^l(alpha,beta,gamma) = e^{-i m' alpha} d^l_{m',m}(beta) e^{-i m gamma},
/// zyz Euler angles, acting on complex spherical-harmonic coefficients.
Eigen::MatrixXcd wigner_D(int l, double alpha, double beta, double gamma);

/// zyz Euler angles (alpha, beta, gamma) with R = Rz(alpha) Ry(beta) Rz(gamma).
std::array<double, 3> zyz_from_quaternion(const Eigen::Quaterniond& q);

Eigen::MatrixXcd wigner_D(int l, const Eigen::Quaterniond& q);

/// Unitary change of basis from complex to real spherical-harmonic
/// coefficients: real coefficients = C * complex coefficients.
Eigen::MatrixXcd complex_to_real_sh(int l);

/// Rotation matrix on real spherical-harmonic coefficients; real orthogonal.
Eigen::MatrixXd wigner_real(int l, const Eigen::Quaterniond& q);

/// Associated Legendre P_l^m(x) with Condon-Shortley phase, m >= 0.
double assoc_legendre(int l, int m, double x);

/// Legendre polynomial P_l(x).
double legendre(int l, double x);

/// Complex spherical harmonic Y_l^m(theta, phi), physics convention.
std::complex<double> sph_harm(int l, int m, double theta, double phi);

/// Real spherical harmonic S_{l,m}(theta, phi); m < 0 are the sin branch.
double real_sph_harm(int l, int m, double theta, double phi);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace mra

#endif
