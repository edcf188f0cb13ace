#pragma once

#include <optional>
#include <string>
#include <vector>

#include "contactlab/calculus.hpp"
#include "contactlab/forms.hpp"
#include "contactlab/linalg.hpp"

namespace contactlab {

// Templated coefficient evaluation so point solves can run on plain doubles
// or dual scalars with one code path.
inline double fn_eval(const SmoothFn& f, std::span<const double> x, const DiffBackend&) {
  return f.f0(x);
}
inline D1 fn_eval(const SmoothFn& f, std::span<const D1> x, const DiffBackend& be) {
  return fn_d1(f, x, be);
}
inline D2 fn_eval(const SmoothFn& f, std::span<const D2> x, const DiffBackend& be) {
  return fn_d2(f, x, be);
}

inline double fn_partial_t(const SmoothFn& f, std::span<const double> x, int j,
                           const DiffBackend& be) {
  return fn_partial(f, x, j, be);
}
inline D1 fn_partial_t(const SmoothFn& f, std::span<const D1> x, int j,
                       const DiffBackend& be) {
  return fn_partial_d1(f, x, j, be);
}
inline D2 fn_partial_t(const SmoothFn& f, std::span<const D2> x, int j,
                       const DiffBackend& be) {
  return fn_partial_d2(f, x, j, be);
}

class ContactForm {
 public:
  ContactForm(ChartPtr chart, DifferentialForm alpha, DiffBackend be,
              int orientation_sign = +1, std::string name = "");

  const ChartPtr& chart() const { return chart_; }
  const std::string& name() const { return name_; }
  const DifferentialForm& alpha() const { return alpha_; }
  const DifferentialForm& dalpha() const { return dalpha_; }
  const DifferentialForm& volume_form() const { return volume_; }
  const DiffBackend& backend() const { return backend_; }
  int orientation_sign() const { return orientation_sign_; }
  int n() const { return (chart_->dim() + 1) / 2; }

  double volume_density(std::span<const double> x) const;

  // alpha and dalpha assembled pointwise on the coordinate frame, any scalar.
  template <class T>
  std::vector<T> alpha_frame(std::span<const T> x) const {
    int n = chart_->dim();
    std::vector<T> a(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      a[static_cast<size_t>(i)] = fn_eval(alpha_.coefficient(i), x, backend_);
    return a;
  }

  // M[i*n+j] = dalpha(e_j, e_i), the matrix acting on components from the
  // right: (M u)_i = dalpha(u, e_i).
  template <class T>
  std::vector<T> dalpha_matrix(std::span<const T> x) const {
    int n = chart_->dim();
    std::vector<T> M(static_cast<size_t>(n * n), T(0.0));
    const auto& pairs = index_subsets(n, 2);
    for (size_t r = 0; r < pairs.size(); ++r) {
      int a = pairs[r][0], b = pairs[r][1];
      T c = fn_eval(dalpha_.coefficient(static_cast<int>(r)), x, backend_);
      M[static_cast<size_t>(b * n + a)] = c;
      M[static_cast<size_t>(a * n + b)] = -c;
    }
    return M;
  }

 private:
  ChartPtr chart_;
  DifferentialForm alpha_;
  DifferentialForm dalpha_;
  DifferentialForm volume_;
  DiffBackend backend_;
  int orientation_sign_;
  std::string name_;
};

struct ContactCheckResult {
  bool pass = false;
  size_t sample_count = 0;
  double min_abs = 0.0;
  double median_abs = 0.0;
  double threshold = 0.0;
  bool orientation_consistent = true;
  std::vector<double> argmin;
};

// Nondegeneracy of alpha ^ (dalpha)^(n-1) over a sample set, relative to the
// median magnitude.
ContactCheckResult verify_contact(const ContactForm& cf, const std::vector<Point>& samples,
                                  double tol_rel = 1e-6);

// Reeb components at a point, templated over scalar type.
template <class T>
std::vector<T> reeb_components(const ContactForm& cf, std::span<const T> x,
                               double* pivot_ratio = nullptr) {
  int n = cf.chart()->dim();
  std::vector<T> M = cf.dalpha_matrix(x);
  std::vector<T> u = kernel_vector(M, n, pivot_ratio, "reeb kernel");
  std::vector<T> a = cf.alpha_frame(x);
  T denom(0.0);
  for (int i = 0; i < n; ++i)
    denom = denom + a[static_cast<size_t>(i)] * u[static_cast<size_t>(i)];
  if (std::fabs(scalar_value(denom)) < 1e-10)
    throw SingularSystemError("reeb: alpha vanishes on the kernel direction");
  std::vector<T> R(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) R[static_cast<size_t>(i)] = u[static_cast<size_t>(i)] / denom;
  return R;
}

VectorField reeb_field(const ContactForm& cf);

// Residual of the Reeb defining equations at a point.
double reeb_residual(const ContactForm& cf, std::span<const double> x,
                     std::span<const double> R);

// Contact Hamiltonian field: i_X alpha = H, i_X dalpha = (dH . R) alpha - dH.
template <class T>
std::vector<T> hamiltonian_components(const ContactForm& cf, const SmoothFn& H,
                                      std::span<const T> x) {
  const DiffBackend& be = cf.backend();
  int n = cf.chart()->dim();
  std::vector<T> a = cf.alpha_frame(x);
  std::vector<T> M = cf.dalpha_matrix(x);
  std::vector<T> R = reeb_components(cf, x);

  int p = 0;
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double m = std::fabs(scalar_value(a[static_cast<size_t>(i)]));
    if (m > best) {
      best = m;
      p = i;
    }
  }
  if (best == 0.0) throw SingularSystemError("hamiltonian: alpha vanishes at point");

  // kernel basis of alpha: w_l = e_l - (a_l / a_p) e_p, l != p
  std::vector<int> ker_idx;
  for (int i = 0; i < n; ++i)
    if (i != p) ker_idx.push_back(i);
  int m = n - 1;

  auto dalpha_on = [&](const std::vector<T>& u, const std::vector<T>& w) -> T {
    // dalpha(u, w) = sum_i (M w)_i u_i ... careful with convention:
    // (M u)_i = dalpha(u, e_i), so dalpha(u, w) = sum_i w_i (M u)_i.
    T acc(0.0);
    for (int i = 0; i < n; ++i) {
      T Mu_i(0.0);
      for (int j = 0; j < n; ++j)
        Mu_i = Mu_i + M[static_cast<size_t>(i * n + j)] * u[static_cast<size_t>(j)];
      acc = acc + w[static_cast<size_t>(i)] * Mu_i;
    }
    return acc;
  };

  std::vector<std::vector<T>> w(static_cast<size_t>(m), std::vector<T>(static_cast<size_t>(n), T(0.0)));
  for (int l = 0; l < m; ++l) {
    int il = ker_idx[static_cast<size_t>(l)];
    w[static_cast<size_t>(l)][static_cast<size_t>(il)] = T(1.0);
    w[static_cast<size_t>(l)][static_cast<size_t>(p)] =
        -a[static_cast<size_t>(il)] / a[static_cast<size_t>(p)];
  }

  // grad H components at x
  std::vector<T> dH(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) dH[static_cast<size_t>(j)] = fn_partial_t(H, x, j, be);

  std::vector<T> K(static_cast<size_t>(m * m), T(0.0));
  std::vector<T> rhs(static_cast<size_t>(m), T(0.0));
  for (int l = 0; l < m; ++l) {
    for (int kcol = 0; kcol < m; ++kcol)
      K[static_cast<size_t>(l * m + kcol)] = dalpha_on(w[static_cast<size_t>(kcol)], w[static_cast<size_t>(l)]);
    T dHw(0.0);
    for (int i = 0; i < n; ++i)
      dHw = dHw + dH[static_cast<size_t>(i)] * w[static_cast<size_t>(l)][static_cast<size_t>(i)];
    rhs[static_cast<size_t>(l)] = -dHw;
  }
  std::vector<T> c = lu_solve(std::move(K), std::move(rhs), m, "hamiltonian kernel system");

  T Hval = fn_eval(H, x, be);
  std::vector<T> X(static_cast<size_t>(n), T(0.0));
  for (int i = 0; i < n; ++i) X[static_cast<size_t>(i)] = Hval * R[static_cast<size_t>(i)];
  for (int kcol = 0; kcol < m; ++kcol)
    for (int i = 0; i < n; ++i)
      X[static_cast<size_t>(i)] =
          X[static_cast<size_t>(i)] + c[static_cast<size_t>(kcol)] * w[static_cast<size_t>(kcol)][static_cast<size_t>(i)];
  return X;
}

VectorField hamiltonian_field(const ContactForm& cf, const SmoothFn& H);

// Residuals of the two Hamiltonian defining equations at a point; d_R H is
// taken as a directional derivative along the solved Reeb field.
struct HamiltonianResidual {
  double alpha_eq = 0.0;   // |alpha(X) - H|
  double dalpha_eq = 0.0;  // max_i |dalpha(X, e_i) - ((d_R H) alpha - dH)(e_i)|
};
HamiltonianResidual hamiltonian_residual(const ContactForm& cf, const SmoothFn& H,
                                         std::span<const double> x);

struct ConformalSample {
  double lambda = 0.0;
  double kernel_violation = 0.0;
  double displacement = 0.0;
};

struct ConformalCheckResult {
  bool pass = false;
  double max_kernel_violation = 0.0;
  double min_lambda = 0.0;
  double max_lambda = 0.0;
  double max_lambda_dev = 0.0;  // max |lambda - 1|
  std::vector<ConformalSample> samples;
};

// Does phi pull alpha_dst back to a positive multiple of alpha_src?  lambda
// is estimated per sample by least squares over the coordinate frame.
ConformalCheckResult check_contactomorphism(const ContactForm& src, const ContactForm& dst,
                                            const ChartMap& phi,
                                            const std::vector<Point>& samples,
                                            double tol_kernel = 1e-4);

// Independent RK4 flow integrations, used as cross-check references against
// transport results.  All of them re-solve the defining linear system at
// every stage; none shares code with the fibration lift.
std::vector<double> flow_reeb(const ContactForm& cf, std::vector<double> start,
                              double time, int steps = 4000);
std::vector<double> flow_hamiltonian(const ContactForm& cf, const SmoothFn& H,
                                     std::vector<double> start, double time,
                                     int steps = 4000);
// Time-dependent family H(x..., t) flowed over t in [0, 1].
std::vector<double> flow_hamiltonian_family(const ContactForm& cf, const SmoothFn& family,
                                            std::vector<double> start, int steps = 4000);

struct IsotropicCheckResult {
  bool pass = false;
  double max_violation = 0.0;
  double min_independence = 1.0;
  std::vector<double> worst_param;
};

// |alpha(t_j)| over immersion tangents at the given parameter samples.
IsotropicCheckResult check_isotropic(const ContactForm& cf, const ParamImmersion& imm,
                                     const std::vector<std::vector<double>>& param_samples,
                                     double tol = 1e-6);

}  // namespace contactlab
