#include "mra/wigner.hpp"

#include <cmath>

namespace mra {

namespace {

double log_fact(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

Eigen::MatrixXd wigner_d(int l, double beta) {
  const int n = 2 * l + 1;
  Eigen::MatrixXd d(n, n);
  const double c = std::cos(beta / 2);
  const double s = std::sin(beta / 2);
  for (int mp = -l; mp <= l; ++mp) {
    for (int m = -l; m <= l; ++m) {
      const double pref =
          0.5 * (log_fact(l + mp) + log_fact(l - mp) + log_fact(l + m) + log_fact(l - m));
      const int s_lo = std::max(0, m - mp);
      const int s_hi = std::min(l + m, l - mp);
      double sum = 0;
      for (int k = s_lo; k <= s_hi; ++k) {
        const double lden =
            log_fact(l + m - k) + log_fact(k) + log_fact(mp - m + k) + log_fact(l - mp - k);
        const int pc = 2 * l + m - mp - 2 * k;
        const int ps = mp - m + 2 * k;
        double term = std::exp(pref - lden);
        term *= std::pow(c, pc) * std::pow(s, ps);
        if ((mp - m + k) % 2 != 0) term = -term;
        sum += term;
      }
      d(mp + l, m + l) = sum;
    }
  }
  return d;
}

Eigen::MatrixXcd wigner_D(int l, double alpha, double beta, double gamma) {
  const int n = 2 * l + 1;
  const Eigen::MatrixXd d = wigner_d(l, beta);
  Eigen::MatrixXcd D(n, n);
  const std::complex<double> I(0, 1);
  for (int mp = -l; mp <= l; ++mp)
    for (int m = -l; m <= l; ++m)
      D(mp + l, m + l) =
          std::exp(-I * (alpha * mp)) * d(mp + l, m + l) * std::exp(-I * (gamma * m));
  return D;
}

std::array<double, 3> zyz_from_quaternion(const Eigen::Quaterniond& q) {
  const Eigen::Matrix3d R = q.normalized().toRotationMatrix();
  const double cb = std::clamp(R(2, 2), -1.0, 1.0);
  const double beta = std::acos(cb);
  double alpha, gamma;
  const double sb = std::sin(beta);
  if (sb > 1e-12) {
    alpha = std::atan2(R(1, 2), R(0, 2));
    gamma = std::atan2(R(2, 1), -R(2, 0));
  } else if (cb > 0) {  // beta ~ 0: pure z rotation by alpha+gamma
    alpha = std::atan2(R(1, 0), R(0, 0));
    gamma = 0;
  } else {  // beta ~ pi
    alpha = std::atan2(-R(1, 0), -R(0, 0));
    gamma = 0;
  }
  return {alpha, beta, gamma};
}

Eigen::MatrixXcd wigner_D(int l, const Eigen::Quaterniond& q) {
  const auto e = zyz_from_quaternion(q);
  return wigner_D(l, e[0], e[1], e[2]);
}

Eigen::MatrixXcd complex_to_real_sh(int l) {
  const int n = 2 * l + 1;
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
  const std::complex<double> I(0, 1);
  const double r = M_SQRT1_2;
  C(l, l) = 1.0;  // m = 0
  for (int m = 1; m <= l; ++m) {
    const double cs = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
    // cos branch (row +m) and sin branch (row -m)
    C(l + m, l - m) = r;
    C(l + m, l + m) = cs * r;
    C(l - m, l - m) = I * r;
    C(l - m, l + m) = -cs * I * r;
  }
  return C;
}

Eigen::MatrixXd wigner_real(int l, const Eigen::Quaterniond& q) {
  const Eigen::MatrixXcd C = complex_to_real_sh(l);
  const Eigen::MatrixXcd D = wigner_D(l, q);
  const Eigen::MatrixXcd W = C.conjugate() * D * C.transpose();
  return W.real();
}

double assoc_legendre(int l, int m, double x) {
  // Standard upward recurrence, Condon-Shortley phase included.
  double pmm = 1.0;
  if (m > 0) {
    const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= -fact * somx2;
      fact += 2.0;
    }
  }
  if (l == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (l == m + 1) return pmmp1;
  double pll = 0;
  for (int ll = m + 2; ll <= l; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

double legendre(int l, double x) { return assoc_legendre(l, 0, x); }

std::complex<double> sph_harm(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI) *
                                std::exp(log_fact(l - am) - log_fact(l + am)));
  const double p = assoc_legendre(l, am, std::cos(theta));
  std::complex<double> y =
      norm * p * std::exp(std::complex<double>(0, am * phi));
  if (m < 0) {
    y = std::conj(y);
    if (am % 2 != 0) y = -y;
  }
  return y;
}

double real_sph_harm(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * M_PI) *
                                std::exp(log_fact(l - am) - log_fact(l + am)));
  const double p = assoc_legendre(l, am, std::cos(theta));
  if (m == 0) return norm * p;
  const double cs = (am % 2 == 0) ? 1.0 : -1.0;
  if (m > 0) return cs * M_SQRT2 * norm * p * std::cos(am * phi);
  return cs * M_SQRT2 * norm * p * std::sin(am * phi);
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, Newton refinement.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[n - 1 - i] = x;
    weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace mra
