#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "contactlab/contact.hpp"
#include "contactlab/fibration.hpp"
#include "contactlab/smooth.hpp"

namespace contactlab {

// ---------------------------------------------------------------------------
// Charts

ChartPtr chart_r3_cart(double bound = 50.0);
// Cylindrical chart (r, theta, z) with a thin excluded tube around the axis.
ChartPtr chart_r3_cyl(double r_max = 9.0, double z_bound = 50.0);

// ---------------------------------------------------------------------------
// Three dimensional catalog forms

// dz - y dx on the cartesian chart.
ContactForm std_r3_form(double bound = 50.0);
// cos(r) dz + r sin(r) dtheta, tight near the axis, overtwisted in the large.
ContactForm ot_r3_form(double r_max = 9.0);
// The same germ written in cartesian coordinates, smooth through the axis.
ContactForm ot_r3_cart_form(double bound = 12.0);

// Closed-form Reeb components (R_r, R_theta, R_z) of ot_r3_form.
std::array<double, 3> ot_reeb_closed_form(double r);
// Radii where the z-component of that Reeb field changes sign, bisected from
// a scan of sin(r) + r cos(r) on (0, r_max).
std::vector<double> ot_reeb_sign_change_radii(double r_max = 9.0);

// ---------------------------------------------------------------------------
// Product-type fibrations over a disk base

// alpha0 + sign * r^2 dtheta over a polar base annulus (axis excluded).
ContactFibration std_product(const ContactForm& fiber, int sign = +1,
                             double base_radius = 1.2);
// alpha0 + sign * (bx dby - by dbx) over a cartesian base square, usable for
// loops through the base origin.
ContactFibration std_product_cart(const ContactForm& fiber, int sign = +1,
                                  double base_bound = 1.3);

// Base paths in polar coordinates (r, theta).
BasePath polar_circle(double radius, bool ccw = true);
BasePath polar_radial_segment(double r0, double r1, double theta);
// Smooth random loop r(theta) = base_r + wobble-sized Fourier perturbation.
BasePath polar_fourier_loop(std::uint64_t seed, double base_r, double wobble);

// ---------------------------------------------------------------------------
// Monodromy prescription over an annular base

// Family slot layout: H(fiber coords..., t) with t in [0, 1].
struct MonodromyPrescription {
  SmoothFn family;
  double delta = 1.0;   // radial support is [delta/4, 3*delta/4]
  double beta = 0.1;    // flat fraction of the clock reparametrization
  double scale = 1.0;   // multiplies the family
};

struct PrescribedFibration {
  ContactFibration fib;
  MonodromyPrescription presc;
  double sup_g = 0.0;   // measured over the twisting region
  double sup_dg = 0.0;  // fiber-gradient sup over the same region
};

// Deform alpha0 + r^2 dtheta by a compactly supported dr-term so that the
// radial monodromy across the support realises the time-one flow of the
// prescribed family.  Exact product form outside
// [delta/4, 3*delta/4] x [-pi/4, pi/4].
PrescribedFibration prescribe_monodromy(const MonodromyPrescription& presc,
                                        const ContactForm& fiber,
                                        double base_radius = 1.2,
                                        int region_samples = 512);

// Radial segment crossing the full support at theta = 0.
BasePath prescription_segment(double delta);

// Largest family scale for which the deformed total form still verifies as
// contact; bisected on [0, hi].
double eps_delta_bisect(const MonodromyPrescription& presc, const ContactForm& fiber,
                        int samples = 256, std::uint64_t seed = 7, double hi = 4.0,
                        int iters = 32);

// Convenience families on a 3-dimensional fiber.
SmoothFn family_constant(double c);
SmoothFn family_linear_x(double c);

// ---------------------------------------------------------------------------
// Round 5-manifold from an open book with a flat 2-torus

struct OpenBookData {
  ChartPtr chart;       // (eta, phi1, phi2), the round 3-sphere chart
  ContactForm base;     // cos^2(eta) dphi1 + sin^2(eta) dphi2
  SmoothFn rho;         // radius-like cutoff, equals cos(eta) near the binding
  SmoothFn phase;       // page angle (phi1 for the z1 projection)
  double rho_cap = 0.5;
};

OpenBookData s3_open_book(double rho_cap = 0.5);

// eps * (Phi1 dtheta1 + Phi2 dtheta2) + base on the 5-chart.  Rejects eps == 0.
ContactForm bourgeois_form(const OpenBookData& ob, double eps);
// Same construction without the eps guard, for degeneracy probes.
ContactForm bourgeois_form_unchecked(const OpenBookData& ob, double eps);
// Fibration of the above over the torus factor (theta1, theta2).
ContactFibration bourgeois_fibration(const OpenBookData& ob, double eps);

// Arc-length segment on the torus base: theta(t) = t * delta * (cos a, sin a).
BasePath torus_segment(double delta, double angle);

// ---------------------------------------------------------------------------
// Interpolation profile and the glued fibration

struct GluingProfile {
  double r0 = 0.25;  // waist radius
  double amp = 3.0;  // bump weight pushing b positive left of the waist

  template <class T>
  T b(const T& r) const {
    return (r - r0) + amp * bump_exp(0.5 - r);
  }
  // F(r, z) = (r - r0) - b(r) z^2; its zero set is the interpolation curve.
  template <class T>
  T F(const T& r, const T& z) const {
    return (r - r0) - b(r) * z * z;
  }
  // Upper branch z = zeta(r) of the zero set, identically 1 once r >= 1/2.
  double zeta(double r) const;

  // Smooth parametrization u in [-1, 1] of the full curve, u = 0 the waist.
  template <class T>
  T r_of_u(const T& u) const {
    return r0 + (1.0 - r0) * u * u;
  }
  template <class T>
  T z_of_u(const T& u) const {
    double uv = scalar_value(u);
    double rv = r0 + (1.0 - r0) * uv * uv;
    if (rv >= 0.5) return T(uv >= 0.0 ? 1.0 : -1.0);
    T r = r_of_u(u);
    return u * std::sqrt(1.0 - r0) / sqrt(b(r));
  }
};

struct ProfileGridReport {
  bool pass = false;
  double min_dFdr = 0.0;        // >= 0 everywhere on the grid
  double min_dFdr_axis = 0.0;   // > 0 along z = 0
  double max_z_dFdz = 0.0;      // z * dF/dz <= 0 everywhere
  double min_grad_near_zero = 0.0;  // |grad F| lower bound near the zero set
  double max_plane_defect = 0.0;    // |F(r, +-1)| for r >= 1/2, exact zero
  bool zeta_flat_exact = false;     // zeta == 1.0 bitwise on the plateau
  int grid = 0;
};

ProfileGridReport certify_profile(const GluingProfile& profile, int grid = 200);

struct GluedFibration {
  ContactFibration fib;
  GluingProfile profile;
  double rho_g = 0.05;
};

// alpha0 + rho_g z(u) r(u)^2 dtheta over the (u, theta) base.
GluedFibration geiges_glued(const ContactForm& fiber_cart3, double rho_g = 0.05);

// Normal half-model alpha0 + sign * rho r^2 dtheta on an annular base.
ContactFibration geiges_normal_model(const ContactForm& fiber, int sign, double rho,
                                     double r_min = 0.5, double r_max = 1.0);

// Max coefficient mismatch between the glued form on the side >= 1/2 plateau
// and the matching normal half-model pulled back through r = r(u).
double geiges_restriction_residual(const GluedFibration& gf, int side, int nsamples = 64);

// Crossing path u: -1 -> 1 with theta advancing by omega * pi.  omega = 0
// gives the radial crossing whose holonomy vanishes identically.
BasePath geiges_cross_path(double omega);

// ---------------------------------------------------------------------------
// Holonomy measurement along lifts

struct HolonomyMeasurement {
  double sup_H = 0.0;   // sup of the instantaneous Hamiltonian alpha0(v)
  double sup_dH = 0.0;  // sup of its fiber gradient norm
  bool complete = true;
};

HolonomyMeasurement measure_holonomy(const ContactFibration& fib, const BasePath& path,
                                     const std::vector<std::vector<double>>& fiber_starts,
                                     const LiftOptions& opts = {}, int time_samples = 48);

struct HolonomyFit {
  double slope = 0.0;
  double residual_rel = 0.0;  // rms deviation from the fit over rms of data
};

// Least squares fit y = slope * x through the origin.
HolonomyFit fit_linear_through_origin(std::span<const double> xs,
                                      std::span<const double> ys);

// ---------------------------------------------------------------------------
// Doubled-loop base path with an optional detour around the origin

// Point-symmetric double loop: radial run out to 3*delta/4, a bulged quarter
// arc, radial return, then the image under the antipode.  Passes through the
// base origin, so it only makes sense in cartesian base coordinates.
BasePath section5_path_symmetric(double delta);
// Same shape rerouted along a circle of radius max(delta/8, 1.2*rho) so the
// disk of radius rho around the origin is avoided.
BasePath section5_path(double delta, double rho);

// ---------------------------------------------------------------------------
// Catalog

std::vector<std::string> catalog_names();
ContactForm catalog_form(const std::string& name);
ContactFibration catalog_fibration(const std::string& name);

}  // namespace contactlab
