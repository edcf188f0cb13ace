#include "contactlab/plastikstufe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "contactlab/constructions.hpp"
#include "contactlab/smooth.hpp"

namespace contactlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTau = 2.0 * std::numbers::pi;

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

double alpha_on(const ContactForm& cf, std::span<const double> x,
                std::span<const double> v) {
  auto a = cf.alpha_frame(x);
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * v[i];
  return s;
}

double dalpha_on(const ContactForm& cf, std::span<const double> x,
                 std::span<const double> v, std::span<const double> w) {
  auto M = cf.dalpha_matrix(x);
  size_t n = static_cast<size_t>(cf.chart()->dim());
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double Mv = 0.0;
    for (size_t j = 0; j < n; ++j) Mv += M[i * n + j] * v[j];
    s += w[i] * Mv;
  }
  return s;
}

// graph height: slight bell with a smooth interior cutoff so the
// perturbation vanishes identically at the rim
template <class T>
T disk_height(const T& r, double scale, double r_b) {
  return scale * (1.0 - cos(r)) * smooth_step(r_b - r);
}

// winding of the in-plane kernel functional around one parameter circle;
// zero signals a degenerate (non elliptic) pattern
int slice_winding(const ContactForm& cf, const PlastikstufeMesh& mesh, int s, int i0) {
  double prev_angle = 0.0;
  double total = 0.0;
  bool have_prev = false;
  for (int j = 0; j <= mesh.n_theta; ++j) {
    const PsNode& nd = mesh.at(s, i0, j % mesh.n_theta);
    double c = std::cos(nd.theta), sn = std::sin(nd.theta);
    size_t dim = nd.x.size();
    std::vector<double> tu(dim), tv(dim);
    for (size_t k = 0; k < dim; ++k) {
      tu[k] = c * nd.t_rho[k] - sn / nd.rho * nd.t_theta[k];
      tv[k] = sn * nd.t_rho[k] + c / nd.rho * nd.t_theta[k];
    }
    double A = alpha_on(cf, nd.x, tu);
    double B = alpha_on(cf, nd.x, tv);
    if (std::hypot(A, B) < 1e-12) return 0;
    double ang = std::atan2(B, A);
    if (have_prev) {
      double d = ang - prev_angle;
      while (d > kPi) d -= kTau;
      while (d < -kPi) d += kTau;
      total += d;
    }
    have_prev = true;
    prev_angle = ang;
  }
  return static_cast<int>(std::lround(total / kTau));
}

}  // namespace

double ot_disk_boundary_radius() {
  // root of the angular coefficient r sin r between 2 and 4
  double lo = 2.0, hi = 4.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (mid * std::sin(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PlastikstufeMesh ot_disk_mesh(double height_scale, int n_rho, int n_theta) {
  if (n_rho < 3 || n_theta < 8)
    throw std::invalid_argument("ot_disk_mesh: grid too coarse");
  double r_b = ot_disk_boundary_radius();
  PlastikstufeMesh mesh{"ot-disk", chart_r3_cart(12.0), false, n_rho, n_theta, 1, r_b, {}};
  mesh.nodes.reserve(static_cast<size_t>(n_rho * n_theta));
  for (int i = 0; i < n_rho; ++i) {
    double rho = r_b * i / (n_rho - 1);
    D1 h = disk_height(D1(rho, 1.0), height_scale, r_b);
    for (int j = 0; j < n_theta; ++j) {
      double th = kTau * j / n_theta;
      double c = std::cos(th), s = std::sin(th);
      PsNode nd;
      nd.rho = rho;
      nd.theta = th;
      nd.x = {rho * c, rho * s, h.v};
      nd.t_rho = {c, s, h.d};
      nd.t_theta = {-rho * s, rho * c, 0.0};
      mesh.nodes.push_back(std::move(nd));
    }
  }
  return mesh;
}

PlastikstufeMesh flat_disk_mesh(double radius, int n_rho, int n_theta) {
  PlastikstufeMesh mesh{"flat-disk", chart_r3_cart(50.0), false, n_rho, n_theta, 1,
                        radius,      {}};
  mesh.nodes.reserve(static_cast<size_t>(n_rho * n_theta));
  for (int i = 0; i < n_rho; ++i) {
    double rho = radius * i / (n_rho - 1);
    for (int j = 0; j < n_theta; ++j) {
      double th = kTau * j / n_theta;
      double c = std::cos(th), s = std::sin(th);
      PsNode nd;
      nd.rho = rho;
      nd.theta = th;
      nd.x = {rho * c, rho * s, 0.0};
      nd.t_rho = {c, s, 0.0};
      nd.t_theta = {-rho * s, rho * c, 0.0};
      mesh.nodes.push_back(std::move(nd));
    }
  }
  return mesh;
}

PlastikstufeReport verify_plastikstufe(const ContactForm& cf, const PlastikstufeMesh& mesh,
                                       double tol) {
  if (mesh.chart->dim() != cf.chart()->dim())
    throw std::invalid_argument("verify_plastikstufe: chart dimension mismatch");
  PlastikstufeReport rep;
  rep.tol = tol;
  rep.node_count = static_cast<int>(mesh.nodes.size());

  auto rel = [&cf](const PsNode& nd, std::span<const double> v) {
    double n = norm2(v);
    return n == 0.0 ? 0.0 : std::fabs(alpha_on(cf, nd.x, v)) / n;
  };

  for (int s = 0; s < mesh.n_core; ++s) {
    for (int i = 0; i < mesh.n_rho; ++i) {
      for (int j = 0; j < mesh.n_theta; ++j) {
        const PsNode& nd = mesh.at(s, i, j);
        bool core = i == 0;
        bool rim = i == mesh.n_rho - 1;
        if (core) {
          rep.core_violation = std::max(rep.core_violation, rel(nd, nd.t_rho));
          if (!nd.t_core.empty())
            rep.core_violation = std::max(rep.core_violation, rel(nd, nd.t_core));
        } else if (rim) {
          rep.boundary_violation = std::max(rep.boundary_violation, rel(nd, nd.t_theta));
          if (!nd.t_core.empty())
            rep.boundary_violation = std::max(rep.boundary_violation, rel(nd, nd.t_core));
        } else {
          rep.leaf_violation = std::max(rep.leaf_violation, rel(nd, nd.t_rho));
          if (!nd.t_core.empty()) {
            rep.leaf_violation = std::max(rep.leaf_violation, rel(nd, nd.t_core));
            double nr = norm2(nd.t_rho) * norm2(nd.t_core);
            if (nr > 0.0)
              rep.leaf_dalpha = std::max(
                  rep.leaf_dalpha,
                  std::fabs(dalpha_on(cf, nd.x, nd.t_rho, nd.t_core)) / nr);
          }
        }
      }
    }
  }

  int i0 = std::max(1, mesh.n_rho / 6);
  rep.winding_min = 1 << 30;
  rep.winding_max = -(1 << 30);
  for (int s = 0; s < mesh.n_core; ++s) {
    int w = slice_winding(cf, mesh, s, i0);
    rep.winding_min = std::min(rep.winding_min, w);
    rep.winding_max = std::max(rep.winding_max, w);
  }

  rep.pass = rep.core_violation <= tol && rep.leaf_violation <= tol &&
             rep.boundary_violation <= tol && rep.winding_min == 1 && rep.winding_max == 1;
  return rep;
}

PlastikstufeMesh transport_plastikstufe(const ContactFibration& fib, const BasePath& loop,
                                        const PlastikstufeMesh& disk, int n_core,
                                        const LiftOptions& opts, double tol_mono) {
  if (!loop.closed)
    throw std::invalid_argument("transport_plastikstufe: loop must be closed");
  if (disk.swept)
    throw std::invalid_argument("transport_plastikstufe: expected a fiber disk mesh");
  if (disk.chart->dim() != fib.fiber.chart()->dim())
    throw std::invalid_argument("transport_plastikstufe: mesh is not a fiber mesh");
  if (n_core < 4) throw std::invalid_argument("transport_plastikstufe: n_core too small");

  LiftOptions lo = opts;
  lo.checkpoints = n_core + 1;  // last checkpoint only closes the loop

  PlastikstufeMesh out{disk.name + "-swept",
                       fib.total.chart(),
                       true,
                       disk.n_rho,
                       disk.n_theta,
                       n_core,
                       disk.rho_max,
                       {}};
  out.nodes.resize(static_cast<size_t>(n_core) * static_cast<size_t>(disk.n_rho) *
                   static_cast<size_t>(disk.n_theta));

  const ChartManifold& fchart = *fib.fiber.chart();
  int n = fib.total.chart()->dim();
  double worst_return = 0.0;

  for (int i = 0; i < disk.n_rho; ++i) {
    for (int j = 0; j < disk.n_theta; ++j) {
      const PsNode& src = disk.at(0, i, j);
      Trajectory tr = lift_path(fib, loop, src.x, {src.t_rho, src.t_theta}, lo);
      if (!tr.complete)
        throw MonodromyRejection("transport_plastikstufe: lift left the chart: " +
                                     tr.diagnostic,
                                 -1.0);
      worst_return =
          std::max(worst_return, chart_distance(fchart, tr.end_state(), src.x));
      if (worst_return > tol_mono)
        throw MonodromyRejection(
            "transport_plastikstufe: monodromy moves the mesh (displacement " +
                std::to_string(worst_return) + ")",
            worst_return);

      for (int s = 0; s < n_core; ++s) {
        double t = tr.times[static_cast<size_t>(s)];
        auto b = loop.pos(t);
        auto u = path_velocity(loop, t);
        const auto& y = tr.fiber_states[static_cast<size_t>(s)];
        PsNode nd;
        nd.rho = src.rho;
        nd.theta = src.theta;
        nd.core_s = t;
        nd.x = fib.embed(y, std::vector<double>{b[0], b[1]});
        auto lift_vec = [&](const std::vector<double>& fv) {
          std::vector<double> v(static_cast<size_t>(n), 0.0);
          for (size_t k = 0; k < fib.fiber_idx.size(); ++k)
            v[static_cast<size_t>(fib.fiber_idx[k])] = fv[k];
          return v;
        };
        nd.t_rho = lift_vec(tr.tangents[static_cast<size_t>(s)][0]);
        nd.t_theta = lift_vec(tr.tangents[static_cast<size_t>(s)][1]);
        nd.t_core = horizontal_lift<double>(fib, std::span<const double>(nd.x), u);
        out.nodes[static_cast<size_t>((s * disk.n_rho + i) * disk.n_theta + j)] =
            std::move(nd);
      }
    }
  }

  return out;
}

OverlapReport reeb_disk_overlap(const ContactForm& cf, const PlastikstufeMesh& disk,
                                double flow_time, int flow_steps) {
  if (flow_time == 0.0)
    throw std::invalid_argument("reeb_disk_overlap: need a nonzero flow time");
  OverlapReport rep;
  rep.flow_time = flow_time;
  int zi = cf.chart()->dim() - 1;  // vertical coordinate is last in both charts

  double prev = 0.0, prev_r = 0.0;
  bool have_prev = false;
  for (int i = 0; i < disk.n_rho; ++i) {
    const PsNode& nd = disk.at(0, i, 0);
    auto q = flow_reeb(cf, nd.x, flow_time, flow_steps);
    double dz = q[static_cast<size_t>(zi)] - nd.x[static_cast<size_t>(zi)];
    if (i == 0) rep.z_rate_center = dz / flow_time;
    if (std::fabs(dz) < 1e-14) continue;
    if (have_prev && prev * dz < 0.0) {
      ++rep.sign_changes;
      if (rep.sign_changes == 1)
        rep.first_crossing_r = prev_r + (nd.rho - prev_r) * prev / (prev - dz);
    }
    prev = dz;
    prev_r = nd.rho;
    have_prev = true;
  }
  rep.intersects = rep.sign_changes > 0;
  return rep;
}

void write_mesh_csv(const PlastikstufeMesh& mesh, std::ostream& os) {
  os << "s,rho,theta";
  for (int k = 0; k < mesh.chart->dim(); ++k) os << "," << mesh.chart->coord(k).name;
  os << "\n";
  for (const PsNode& nd : mesh.nodes) {
    os << nd.core_s << "," << nd.rho << "," << nd.theta;
    for (double c : nd.x) os << "," << c;
    os << "\n";
  }
}

}  // namespace contactlab
