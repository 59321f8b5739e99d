// Pointwise form of the hard-phase first-order system in double-null
// coordinates, with mu = 2m/r.  Fields:
//   nu = -r_u, kappa = r_v/(1-mu), zeta = phi_u/nu, eta = phi_v/kappa,
//   xi = zeta_u/nu, psi = eta_v/kappa.
#pragma once

namespace xs {

inline constexpr double kPi = 3.14159265358979323846;

struct HardNode {
  double r = 0, phi = 0, m = 0;
  double nu = 0, kappa = 0, zeta = 0, eta = 0;
  double xi = 0, psi = 0;
  double N = 0, K = 0;                    // log-integrals for nu and kappa
  double r_alt = 0, phi_alt = 0, m_alt = 0;  // second-route copies
};

// Test-only switch: drop every 4*pi*r^2 source (vacuum-like wave system).
struct SystemFlags {
  bool matter = true;
};

namespace hs {

double mu(const HardNode& p);
double sigma2(const HardNode& p);
double omega2(const HardNode& p);

// u-derivatives
double r_u(const HardNode& p);
double phi_u(const HardNode& p);
double kappa_u(const HardNode& p, SystemFlags f = {});
double eta_u(const HardNode& p, SystemFlags f = {});
double m_u(const HardNode& p, SystemFlags f = {});
double zeta_u(const HardNode& p);
double psi_u(const HardNode& p, SystemFlags f = {});
double mu_u(const HardNode& p, SystemFlags f = {});

// v-derivatives
double r_v(const HardNode& p);
double phi_v(const HardNode& p);
double nu_v(const HardNode& p, SystemFlags f = {});
double zeta_v(const HardNode& p, SystemFlags f = {});
double m_v(const HardNode& p, SystemFlags f = {});
double eta_v(const HardNode& p);
double xi_v(const HardNode& p, SystemFlags f = {});
double mu_v(const HardNode& p, SystemFlags f = {});

// Integrands: nu = nu(u,0) exp(int nu_int dv), kappa = kappa(v,v) exp(-int kappa_int du)
double n_integrand(const HardNode& p, SystemFlags f = {});
double k_integrand(const HardNode& p, SystemFlags f = {});

double sigma2_u(const HardNode& p, SystemFlags f = {});
double sigma2_v(const HardNode& p, SystemFlags f = {});

// Barrier e with d(sigma)/du = 2 nu zeta e, and its derivative chain.
double barrier(const HardNode& p);
double xi_minus(double xi_u, const HardNode& p);  // xi_u / nu
double xi_plus(const HardNode& p);                // xi_v / kappa
double barrier_minus(const HardNode& p, double xi_m);
double barrier_plus(const HardNode& p);

// Radial velocity of the fluid, U r, with U = -grad(phi)/sigma.
double fluid_rdot(const HardNode& p);
double density(const HardNode& p);  // (1 + sigma^2)/2
double alpha(const HardNode& p);    // r zeta - phi

}  // namespace hs
}  // namespace xs
