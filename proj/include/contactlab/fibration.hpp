#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "contactlab/contact.hpp"

namespace contactlab {

// Contact form fibered over a 2-dimensional base: the total chart splits
// into fiber and base coordinate indices, and the restriction to each fiber
// is itself a contact form (stored on its own fiber chart).
struct ContactFibration {
  std::string name;
  ContactForm total;
  ContactForm fiber;               // restriction model on the fiber chart
  std::vector<int> fiber_idx;      // positions of fiber coords in the total chart
  std::vector<int> base_idx;       // positions of the 2 base coords

  int fiber_dim() const { return static_cast<int>(fiber_idx.size()); }

  std::vector<double> embed(std::span<const double> fiber_coords,
                            std::span<const double> base_coords) const;
  std::vector<double> extract_fiber(std::span<const double> total_coords) const;
};

struct BasePath {
  std::string name;
  double t0 = 0.0, t1 = 1.0;
  bool closed = false;
  int grid_multiple = 1;  // step counts round up to a multiple (concat seams)
  std::function<std::array<double, 2>(double)> pos;
  std::function<std::array<double, 2>(double)> vel;  // optional, FD when absent
};

std::array<double, 2> path_velocity(const BasePath& path, double t);
double path_length(const BasePath& path, int nsamples = 512);
// Signed area enclosed by a closed path, shoelace integral by Simpson rule.
// With `polar` the coordinates are taken as (r, theta) and the integrand is
// r^2 theta' / 2, which is the same area form.
double path_signed_area(const BasePath& path, int panels = 4096, bool polar = false);

BasePath circle_path(std::array<double, 2> center, double radius, bool ccw = true);
BasePath gerono_path(double amplitude);  // figure-eight through the origin
BasePath segment_path(std::array<double, 2> a, std::array<double, 2> b);
BasePath concat_paths(std::string name, std::vector<BasePath> pieces);

// Same geometric curve traversed with an exponential speed profile
// sigma(t) = (e^{kt}-1)/(e^k-1).  The seam velocity mismatch removes the
// spectral exactness of uniform stepping on periodic integrands, so
// integrator order measurements see the true truncation term.
BasePath reparametrize_exp(BasePath path, double k);

// Horizontal lift: the unique vector X over base velocity u with
// alpha(X) = 0 and d-alpha(X, w) = 0 for every w in ker(alpha | fiber).
template <class T>
std::vector<T> horizontal_lift(const ContactFibration& fib, std::span<const T> x,
                               const std::array<double, 2>& u) {
  const ContactForm& cf = fib.total;
  int n = cf.chart()->dim();
  int m = fib.fiber_dim();
  std::vector<T> a = cf.alpha_frame(x);
  std::vector<T> M = cf.dalpha_matrix(x);

  std::vector<T> u_emb(static_cast<size_t>(n), T(0.0));
  u_emb[static_cast<size_t>(fib.base_idx[0])] = T(u[0]);
  u_emb[static_cast<size_t>(fib.base_idx[1])] = T(u[1]);

  auto pair_dalpha = [&](const std::vector<T>& A, const std::vector<T>& B) -> T {
    T acc(0.0);
    for (int i = 0; i < n; ++i) {
      T MA(0.0);
      for (int j = 0; j < n; ++j)
        MA = MA + M[static_cast<size_t>(i * n + j)] * A[static_cast<size_t>(j)];
      acc = acc + B[static_cast<size_t>(i)] * MA;
    }
    return acc;
  };

  // kernel basis of alpha restricted to the fiber directions
  int p = -1;
  double best = 0.0;
  for (int l = 0; l < m; ++l) {
    double mag = std::fabs(scalar_value(a[static_cast<size_t>(fib.fiber_idx[static_cast<size_t>(l)])]));
    if (mag > best) {
      best = mag;
      p = l;
    }
  }
  if (p < 0 || best == 0.0)
    throw SingularSystemError("horizontal lift: alpha vanishes on the fiber");

  std::vector<std::vector<T>> w;
  for (int l = 0; l < m; ++l) {
    if (l == p) continue;
    std::vector<T> wl(static_cast<size_t>(n), T(0.0));
    int il = fib.fiber_idx[static_cast<size_t>(l)];
    int ip = fib.fiber_idx[static_cast<size_t>(p)];
    wl[static_cast<size_t>(il)] = T(1.0);
    wl[static_cast<size_t>(ip)] = -a[static_cast<size_t>(il)] / a[static_cast<size_t>(ip)];
    w.push_back(std::move(wl));
  }

  // unknowns: fiber components of v; rows: alpha(v) = -alpha(u_emb), then
  // dalpha(v, w_l) = -dalpha(u_emb, w_l)
  std::vector<T> K(static_cast<size_t>(m * m), T(0.0));
  std::vector<T> rhs(static_cast<size_t>(m), T(0.0));
  for (int c = 0; c < m; ++c)
    K[static_cast<size_t>(c)] = a[static_cast<size_t>(fib.fiber_idx[static_cast<size_t>(c)])];
  T au(0.0);
  for (int i = 0; i < n; ++i) au = au + a[static_cast<size_t>(i)] * u_emb[static_cast<size_t>(i)];
  rhs[0] = -au;
  for (int l = 1; l < m; ++l) {
    const auto& wl = w[static_cast<size_t>(l - 1)];
    for (int c = 0; c < m; ++c) {
      std::vector<T> ec(static_cast<size_t>(n), T(0.0));
      ec[static_cast<size_t>(fib.fiber_idx[static_cast<size_t>(c)])] = T(1.0);
      K[static_cast<size_t>(l * m + c)] = pair_dalpha(ec, wl);
    }
    rhs[static_cast<size_t>(l)] = -pair_dalpha(u_emb, wl);
  }
  std::vector<T> vf = lu_solve(std::move(K), std::move(rhs), m, "horizontal lift");

  std::vector<T> X = u_emb;
  for (int c = 0; c < m; ++c)
    X[static_cast<size_t>(fib.fiber_idx[static_cast<size_t>(c)])] = vf[static_cast<size_t>(c)];
  return X;
}

struct LiftOptions {
  double steps_per_unit = 2000.0;
  int total_steps = 0;  // overrides steps_per_unit when positive
  int checkpoints = 17;
};

int resolve_step_count(const ContactFibration& fib, const BasePath& path,
                       const LiftOptions& opts);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> fiber_states;             // per checkpoint
  std::vector<std::vector<std::vector<double>>> tangents;    // [checkpoint][seed][fiber]
  bool complete = false;
  std::string diagnostic;
  int steps_used = 0;

  const std::vector<double>& end_state() const { return fiber_states.back(); }
};

// RK4 lift of a base path starting at the given fiber coordinates; optional
// tangent seeds (fiber vectors) are transported variationally alongside.
Trajectory lift_path(const ContactFibration& fib, const BasePath& path,
                     std::span<const double> fiber_start,
                     const std::vector<std::vector<double>>& tangent_seeds = {},
                     const LiftOptions& opts = {});

// Monodromy of a closed loop with memoized per-point transport.
class MonodromyMap {
 public:
  MonodromyMap(const ContactFibration& fib, BasePath loop, LiftOptions opts = {});

  const Trajectory& transport(const std::vector<double>& fiber_start,
                              bool with_frame = false);
  const ContactFibration& fibration() const { return *fib_; }
  const BasePath& loop() const { return loop_; }

 private:
  const ContactFibration* fib_;
  BasePath loop_;
  LiftOptions opts_;
  std::map<std::pair<std::vector<double>, bool>, Trajectory> cache_;
};

struct MonodromyCheckResult {
  bool pass = false;
  bool all_complete = true;
  double max_displacement = 0.0;
  double max_kernel_violation = 0.0;
  double max_lambda_dev = 0.0;
  double min_lambda = 0.0, max_lambda = 0.0;
  size_t sample_count = 0;
};

// Is the monodromy of `loop` the identity contactomorphism of the fiber?
// Transports each fiber sample with a full coordinate frame and compares
// the pulled-back fiber form.
MonodromyCheckResult monodromy_identity_check(MonodromyMap& mono,
                                              const std::vector<Point>& fiber_samples,
                                              double tol_displacement,
                                              double tol_kernel);

// Conformality data of the monodromy as a fiber self-map (no displacement
// requirement): lambda spread and kernel violations.
MonodromyCheckResult monodromy_conformal_check(MonodromyMap& mono,
                                               const std::vector<Point>& fiber_samples,
                                               double tol_kernel);

struct SweptTransportResult {
  bool complete = false;
  double max_isotropy_violation = 0.0;
  double worst_checkpoint_time = 0.0;
  double return_distance = 0.0;  // max over samples of distance back to the start set
  size_t sample_count = 0;
};

// Transport a parametrized isotropic submanifold of the fiber along a path,
// checking isotropy of the transported tangents at every checkpoint.
SweptTransportResult transport_isotropic(const ContactFibration& fib,
                                         const ParamImmersion& imm,
                                         const std::vector<std::vector<double>>& params,
                                         const BasePath& path, const LiftOptions& opts = {});

struct AreaLawResult {
  double displacement = 0.0;   // measured fiber Reeb time
  double signed_area = 0.0;    // enclosed area of the base loop
  double expected = 0.0;       // -2 * area
  double error = 0.0;
  int steps_used = 0;
};

// For product-type fibrations whose fiber Reeb coordinate is `reeb_coord`
// (an index into fiber coords), measure the lift displacement against the
// enclosed-area law.
AreaLawResult area_law_measurement(const ContactFibration& fib, const BasePath& loop,
                                   std::span<const double> fiber_start, int reeb_coord,
                                   const LiftOptions& opts = {}, bool base_polar = false);

}  // namespace contactlab
