#include "xshock/hard_system.hpp"

#include <cmath>

namespace xs::hs {

namespace {
inline double S(SystemFlags f) { return f.matter ? 1.0 : 0.0; }
}  // namespace

double mu(const HardNode& p) { return 2.0 * p.m / p.r; }
double sigma2(const HardNode& p) { return p.zeta * p.eta; }
double omega2(const HardNode& p) { return 4.0 * p.nu * p.kappa; }

double r_u(const HardNode& p) { return -p.nu; }
double phi_u(const HardNode& p) { return p.nu * p.zeta; }
double zeta_u(const HardNode& p) { return p.nu * p.xi; }

double kappa_u(const HardNode& p, SystemFlags f) {
  return -4.0 * kPi * S(f) * p.r * p.nu * p.zeta * p.zeta * p.kappa;
}

double eta_u(const HardNode& p, SystemFlags f) {
  const double s = S(f);
  return (p.nu / p.r) *
         ((1.0 + 4.0 * kPi * s * p.r * p.r * p.zeta * p.zeta) * p.eta -
          (1.0 - mu(p)) * p.zeta);
}

double m_u(const HardNode& p, SystemFlags f) {
  return -2.0 * kPi * S(f) * p.r * p.r * p.nu *
         ((1.0 - mu(p)) * p.zeta * p.zeta + 1.0);
}

double r_v(const HardNode& p) { return (1.0 - mu(p)) * p.kappa; }
double phi_v(const HardNode& p) { return p.kappa * p.eta; }
double eta_v(const HardNode& p) { return p.kappa * p.psi; }

double nu_v(const HardNode& p, SystemFlags f) {
  return p.nu * p.kappa * (mu(p) - 4.0 * kPi * S(f) * p.r * p.r) / p.r;
}

double zeta_v(const HardNode& p, SystemFlags f) {
  return (p.kappa / p.r) *
         (p.eta - (1.0 - 4.0 * kPi * S(f) * p.r * p.r) * p.zeta);
}

double m_v(const HardNode& p, SystemFlags f) {
  return 2.0 * kPi * S(f) * p.r * p.r * p.kappa *
         ((1.0 - mu(p)) + p.eta * p.eta);
}

double mu_u(const HardNode& p, SystemFlags f) {
  return 2.0 * m_u(p, f) / p.r - 2.0 * p.m * r_u(p) / (p.r * p.r);
}

double mu_v(const HardNode& p, SystemFlags f) {
  return 2.0 * m_v(p, f) / p.r - 2.0 * p.m * r_v(p) / (p.r * p.r);
}

double n_integrand(const HardNode& p, SystemFlags f) {
  return p.kappa * (mu(p) - 4.0 * kPi * S(f) * p.r * p.r) / p.r;
}

double k_integrand(const HardNode& p, SystemFlags f) {
  return 4.0 * kPi * S(f) * p.r * p.nu * p.zeta * p.zeta;
}

// xi_v = (zeta_v)_u / nu - xi nu_v / nu, with the u-derivative of zeta_v
// expanded by the chain rule through the u-equations.
double xi_v(const HardNode& p, SystemFlags f) {
  const double s = S(f);
  const double r = p.r;
  const double B = p.eta - (1.0 - 4.0 * kPi * s * r * r) * p.zeta;
  const double ru = r_u(p);
  const double Bu = eta_u(p, f) + 8.0 * kPi * s * r * ru * p.zeta -
                    (1.0 - 4.0 * kPi * s * r * r) * zeta_u(p);
  const double zuv = (kappa_u(p, f) / r - p.kappa * ru / (r * r)) * B +
                     (p.kappa / r) * Bu;
  return zuv / p.nu - p.xi * nu_v(p, f) / p.nu;
}

// psi_u = (eta_u)_v / kappa - psi kappa_u / kappa.
double psi_u(const HardNode& p, SystemFlags f) {
  const double s = S(f);
  const double r = p.r;
  const double z2 = p.zeta * p.zeta;
  const double A = 1.0 + 4.0 * kPi * s * r * r * z2;
  const double B = A * p.eta - (1.0 - mu(p)) * p.zeta;
  const double rv = r_v(p);
  const double zv = zeta_v(p, f);
  const double Av = 8.0 * kPi * s * (r * rv * z2 + r * r * p.zeta * zv);
  const double Bv = Av * p.eta + A * eta_v(p) + mu_v(p, f) * p.zeta -
                    (1.0 - mu(p)) * zv;
  const double euv = (nu_v(p, f) / r - p.nu * rv / (r * r)) * B + (p.nu / r) * Bv;
  return euv / p.kappa - p.psi * kappa_u(p, f) / p.kappa;
}

double sigma2_u(const HardNode& p, SystemFlags f) {
  return zeta_u(p) * p.eta + p.zeta * eta_u(p, f);
}

double sigma2_v(const HardNode& p, SystemFlags f) {
  return zeta_v(p, f) * p.eta + p.zeta * eta_v(p);
}

double barrier(const HardNode& p) {
  const double z = p.zeta, r = p.r;
  return p.xi / (2.0 * z * z) +
         (1.0 / (2.0 * r)) * (1.0 / z - (1.0 - mu(p) - 4.0 * kPi * r * r) * z);
}

double xi_minus(double xi_u, const HardNode& p) { return xi_u / p.nu; }

double xi_plus(const HardNode& p) { return xi_v(p) / p.kappa; }

double barrier_minus(const HardNode& p, double xm) {
  const double z = p.zeta, r = p.r, m = mu(p), x = p.xi;
  const double w = 1.0 - m - 4.0 * kPi * r * r;
  return xm / (2.0 * z * z) - x * x / (z * z * z) -
         (x / (2.0 * r)) * (1.0 / (z * z) + w) +
         (1.0 / (2.0 * r * r)) *
             (1.0 / z + (2.0 * m - 1.0 - 8.0 * kPi * r * r) * z -
              4.0 * kPi * r * r * (1.0 - m) * z * z * z);
}

double barrier_plus(const HardNode& p) {
  const double z = p.zeta, r = p.r, m = mu(p), x = p.xi, et = p.eta;
  const double w = 1.0 - m - 4.0 * kPi * r * r;
  const double pr2 = 4.0 * kPi * r * r;
  return xi_plus(p) / (2.0 * z * z) -
         (1.0 / r) * (et - (1.0 - pr2) * z) *
             (x / (z * z * z) + (1.0 / (2.0 * r)) * (1.0 / (z * z) + w)) -
         ((1.0 - m) / (2.0 * r * r)) * (1.0 / z - w * z) +
         (z / (2.0 * r * r)) *
             ((1.0 - m) * (pr2 - m) + pr2 * et * et + 2.0 * pr2 * (1.0 - m));
}

double fluid_rdot(const HardNode& p) {
  const double s = std::sqrt(sigma2(p));
  return ((1.0 - mu(p)) * p.zeta - p.eta) / (2.0 * s);
}

double density(const HardNode& p) { return 0.5 * (1.0 + sigma2(p)); }

double alpha(const HardNode& p) { return p.r * p.zeta - p.phi; }

}  // namespace xs::hs
