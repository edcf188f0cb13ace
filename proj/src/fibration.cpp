#include "contactlab/fibration.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace contactlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> ContactFibration::embed(std::span<const double> fiber_coords,
                                            std::span<const double> base_coords) const {
  int n = total.chart()->dim();
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  for (size_t i = 0; i < fiber_idx.size(); ++i)
    x[static_cast<size_t>(fiber_idx[i])] = fiber_coords[i];
  for (size_t i = 0; i < base_idx.size(); ++i)
    x[static_cast<size_t>(base_idx[i])] = base_coords[i];
  return x;
}

std::vector<double> ContactFibration::extract_fiber(
    std::span<const double> total_coords) const {
  std::vector<double> f(fiber_idx.size());
  for (size_t i = 0; i < fiber_idx.size(); ++i)
    f[i] = total_coords[static_cast<size_t>(fiber_idx[i])];
  return f;
}

std::array<double, 2> path_velocity(const BasePath& path, double t) {
  if (path.vel) return path.vel(t);
  double h = 1e-7 * (path.t1 - path.t0);
  double tp = std::min(t + h, path.t1), tm = std::max(t - h, path.t0);
  auto p = path.pos(tp), m = path.pos(tm);
  return {(p[0] - m[0]) / (tp - tm), (p[1] - m[1]) / (tp - tm)};
}

double path_length(const BasePath& path, int nsamples) {
  double acc = 0.0;
  double dt = (path.t1 - path.t0) / nsamples;
  for (int i = 0; i < nsamples; ++i) {
    double t = path.t0 + (i + 0.5) * dt;
    auto v = path_velocity(path, t);
    acc += std::hypot(v[0], v[1]) * dt;
  }
  return acc;
}

double path_signed_area(const BasePath& path, int panels, bool polar) {
  if (panels % 2) ++panels;
  auto integrand = [&](double t) {
    auto p = path.pos(t);
    auto v = path_velocity(path, t);
    if (polar) return 0.5 * p[0] * p[0] * v[1];
    return 0.5 * (p[0] * v[1] - p[1] * v[0]);
  };
  double h = (path.t1 - path.t0) / panels;
  double acc = integrand(path.t0) + integrand(path.t1);
  for (int i = 1; i < panels; ++i)
    acc += integrand(path.t0 + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

BasePath circle_path(std::array<double, 2> center, double radius, bool ccw) {
  BasePath p;
  p.name = "circle";
  p.closed = true;
  double sgn = ccw ? 1.0 : -1.0;
  p.pos = [center, radius, sgn](double t) -> std::array<double, 2> {
    double a = 2 * kPi * sgn * t;
    return {center[0] + radius * std::cos(a), center[1] + radius * std::sin(a)};
  };
  p.vel = [radius, sgn](double t) -> std::array<double, 2> {
    double a = 2 * kPi * sgn * t;
    return {-2 * kPi * sgn * radius * std::sin(a), 2 * kPi * sgn * radius * std::cos(a)};
  };
  return p;
}

BasePath gerono_path(double amplitude) {
  BasePath p;
  p.name = "gerono-eight";
  p.closed = true;
  p.pos = [amplitude](double t) -> std::array<double, 2> {
    double a = 2 * kPi * t;
    return {amplitude * std::sin(a), amplitude * std::sin(a) * std::cos(a)};
  };
  p.vel = [amplitude](double t) -> std::array<double, 2> {
    double a = 2 * kPi * t;
    return {amplitude * 2 * kPi * std::cos(a), amplitude * 2 * kPi * std::cos(2 * a)};
  };
  return p;
}

BasePath segment_path(std::array<double, 2> a, std::array<double, 2> b) {
  BasePath p;
  p.name = "segment";
  p.pos = [a, b](double t) -> std::array<double, 2> {
    return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t};
  };
  p.vel = [a, b](double) -> std::array<double, 2> { return {b[0] - a[0], b[1] - a[1]}; };
  return p;
}

BasePath concat_paths(std::string name, std::vector<BasePath> pieces) {
  if (pieces.empty()) throw std::invalid_argument("concat_paths: no pieces");
  auto shared = std::make_shared<std::vector<BasePath>>(std::move(pieces));
  int k = static_cast<int>(shared->size());
  BasePath p;
  p.name = std::move(name);
  p.closed = true;
  p.grid_multiple = k;
  p.pos = [shared, k](double t) -> std::array<double, 2> {
    double s = t * k;
    int i = std::min(static_cast<int>(s), k - 1);
    const BasePath& piece = (*shared)[static_cast<size_t>(i)];
    double local = piece.t0 + (piece.t1 - piece.t0) * (s - i);
    return piece.pos(local);
  };
  p.vel = [shared, k](double t) -> std::array<double, 2> {
    double s = t * k;
    int i = std::min(static_cast<int>(s), k - 1);
    const BasePath& piece = (*shared)[static_cast<size_t>(i)];
    double local = piece.t0 + (piece.t1 - piece.t0) * (s - i);
    auto v = path_velocity(piece, local);
    double scale = (piece.t1 - piece.t0) * k;
    return {v[0] * scale, v[1] * scale};
  };
  return p;
}

BasePath reparametrize_exp(BasePath path, double k) {
  if (std::abs(k) < 1e-12) return path;
  auto inner = std::make_shared<BasePath>(std::move(path));
  double span = inner->t1 - inner->t0;
  double denom = std::expm1(k);
  BasePath p;
  p.name = inner->name + "-exp";
  p.closed = inner->closed;
  p.grid_multiple = inner->grid_multiple;
  p.pos = [inner, span, denom, k](double t) {
    double sigma = std::expm1(k * t) / denom;
    return inner->pos(inner->t0 + span * sigma);
  };
  p.vel = [inner, span, denom, k](double t) -> std::array<double, 2> {
    double sigma = std::expm1(k * t) / denom;
    double dsigma = k * std::exp(k * t) / denom;
    auto v = path_velocity(*inner, inner->t0 + span * sigma);
    return {v[0] * span * dsigma, v[1] * span * dsigma};
  };
  return p;
}

int resolve_step_count(const ContactFibration& fib, const BasePath& path,
                       const LiftOptions& opts) {
  (void)fib;
  int n;
  if (opts.total_steps > 0) {
    n = opts.total_steps;
  } else {
    double len = path_length(path);
    n = static_cast<int>(std::ceil(opts.steps_per_unit * std::max(len, 1e-6)));
  }
  n = std::max(n, 16);
  int mult = std::max(path.grid_multiple, 1);
  if (n % mult) n += mult - (n % mult);
  return n;
}

Trajectory lift_path(const ContactFibration& fib, const BasePath& path,
                     std::span<const double> fiber_start,
                     const std::vector<std::vector<double>>& tangent_seeds,
                     const LiftOptions& opts) {
  int m = fib.fiber_dim();
  int nseeds = static_cast<int>(tangent_seeds.size());
  int N = resolve_step_count(fib, path, opts);
  int C = std::max(2, opts.checkpoints);

  Trajectory traj;
  traj.steps_used = N;

  std::vector<double> y(fiber_start.begin(), fiber_start.end());
  std::vector<std::vector<double>> T(tangent_seeds);

  // velocity of the fiber state; dual channel for the variational flow
  auto fiber_velocity = [&](double t, const std::vector<double>& yy) {
    auto b = path.pos(t);
    auto u = path_velocity(path, t);
    std::vector<double> x = fib.embed(yy, std::vector<double>{b[0], b[1]});
    fib.total.chart()->validate(x);
    std::vector<double> X = horizontal_lift(fib, std::span<const double>(x), u);
    return fib.extract_fiber(X);
  };
  auto fiber_velocity_d1 = [&](double t, const std::vector<double>& yy,
                               const std::vector<double>& tan) {
    auto b = path.pos(t);
    auto u = path_velocity(path, t);
    int n = fib.total.chart()->dim();
    std::vector<D1> x(static_cast<size_t>(n), D1(0.0));
    for (size_t i = 0; i < fib.fiber_idx.size(); ++i)
      x[static_cast<size_t>(fib.fiber_idx[i])] = D1{yy[i], tan[i]};
    x[static_cast<size_t>(fib.base_idx[0])] = D1(b[0]);
    x[static_cast<size_t>(fib.base_idx[1])] = D1(b[1]);
    std::vector<D1> X = horizontal_lift(fib, std::span<const D1>(x), u);
    std::vector<double> dv(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i)
      dv[static_cast<size_t>(i)] = X[static_cast<size_t>(fib.fiber_idx[static_cast<size_t>(i)])].d;
    return dv;
  };

  auto capture = [&](double t) {
    traj.times.push_back(t);
    traj.fiber_states.push_back(y);
    traj.tangents.push_back(T);
  };

  double h = (path.t1 - path.t0) / N;
  std::vector<long> checkpoint_at(static_cast<size_t>(C));
  for (int c = 0; c < C; ++c)
    checkpoint_at[static_cast<size_t>(c)] = std::lround(static_cast<double>(c) * N / (C - 1));

  size_t next_cp = 0;
  try {
    for (int step = 0; step <= N; ++step) {
      double t = path.t0 + step * h;
      if (next_cp < checkpoint_at.size() && step == checkpoint_at[next_cp]) {
        capture(t);
        ++next_cp;
      }
      if (step == N) break;

      auto k1 = fiber_velocity(t, y);
      std::vector<double> y2(y), y3(y), y4(y);
      for (int i = 0; i < m; ++i) y2[static_cast<size_t>(i)] += 0.5 * h * k1[static_cast<size_t>(i)];
      auto k2 = fiber_velocity(t + 0.5 * h, y2);
      for (int i = 0; i < m; ++i) y3[static_cast<size_t>(i)] += 0.5 * h * k2[static_cast<size_t>(i)];
      auto k3 = fiber_velocity(t + 0.5 * h, y3);
      for (int i = 0; i < m; ++i) y4[static_cast<size_t>(i)] += h * k3[static_cast<size_t>(i)];
      auto k4 = fiber_velocity(t + h, y4);

      for (int s = 0; s < nseeds; ++s) {
        auto& Ts = T[static_cast<size_t>(s)];
        auto q1 = fiber_velocity_d1(t, y, Ts);
        std::vector<double> T2(Ts), T3(Ts), T4(Ts);
        for (int i = 0; i < m; ++i) T2[static_cast<size_t>(i)] += 0.5 * h * q1[static_cast<size_t>(i)];
        auto q2 = fiber_velocity_d1(t + 0.5 * h, y2, T2);
        for (int i = 0; i < m; ++i) T3[static_cast<size_t>(i)] += 0.5 * h * q2[static_cast<size_t>(i)];
        auto q3 = fiber_velocity_d1(t + 0.5 * h, y3, T3);
        for (int i = 0; i < m; ++i) T4[static_cast<size_t>(i)] += h * q3[static_cast<size_t>(i)];
        auto q4 = fiber_velocity_d1(t + h, y4, T4);
        for (int i = 0; i < m; ++i)
          Ts[static_cast<size_t>(i)] +=
              h / 6.0 * (q1[static_cast<size_t>(i)] + 2 * q2[static_cast<size_t>(i)] +
                         2 * q3[static_cast<size_t>(i)] + q4[static_cast<size_t>(i)]);
      }

      bool finite = true;
      for (int i = 0; i < m; ++i) {
        y[static_cast<size_t>(i)] +=
            h / 6.0 * (k1[static_cast<size_t>(i)] + 2 * k2[static_cast<size_t>(i)] +
                       2 * k3[static_cast<size_t>(i)] + k4[static_cast<size_t>(i)]);
        if (!std::isfinite(y[static_cast<size_t>(i)])) finite = false;
      }
      if (!finite) {
        traj.diagnostic = "state became non-finite at t=" + std::to_string(t);
        return traj;
      }
    }
  } catch (const EvaluationError& e) {
    traj.diagnostic = e.what();
    return traj;
  } catch (const SingularSystemError& e) {
    traj.diagnostic = e.what();
    return traj;
  }
  traj.complete = true;
  return traj;
}

MonodromyMap::MonodromyMap(const ContactFibration& fib, BasePath loop, LiftOptions opts)
    : fib_(&fib), loop_(std::move(loop)), opts_(opts) {
  if (!loop_.closed) throw std::invalid_argument("monodromy needs a closed loop");
}

const Trajectory& MonodromyMap::transport(const std::vector<double>& fiber_start,
                                          bool with_frame) {
  auto key = std::make_pair(fiber_start, with_frame);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  std::vector<std::vector<double>> seeds;
  if (with_frame) {
    int m = fib_->fiber_dim();
    for (int j = 0; j < m; ++j) {
      std::vector<double> e(static_cast<size_t>(m), 0.0);
      e[static_cast<size_t>(j)] = 1.0;
      seeds.push_back(std::move(e));
    }
  }
  Trajectory traj = lift_path(*fib_, loop_, fiber_start, seeds, opts_);
  auto [ins, ok] = cache_.emplace(std::move(key), std::move(traj));
  (void)ok;
  return ins->second;
}

namespace {

struct FrameConformal {
  double lambda = 0.0;
  double kernel_violation = 0.0;
};

FrameConformal frame_conformal(const ContactForm& fiber_cf,
                               const std::vector<double>& x_start,
                               const std::vector<double>& x_end,
                               const std::vector<std::vector<double>>& cols) {
  int m = fiber_cf.chart()->dim();
  std::vector<double> a = fiber_cf.alpha_frame(std::span<const double>(x_start));
  std::vector<double> ae = fiber_cf.alpha_frame(std::span<const double>(x_end));
  std::vector<double> pb(static_cast<size_t>(m), 0.0);
  for (int j = 0; j < m; ++j) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i)
      acc += ae[static_cast<size_t>(i)] * cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
    pb[static_cast<size_t>(j)] = acc;
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    num += pb[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
    den += a[static_cast<size_t>(i)] * a[static_cast<size_t>(i)];
  }
  FrameConformal out;
  out.lambda = den > 0.0 ? num / den : 0.0;
  int piv = 0;
  double best = 0.0;
  for (int i = 0; i < m; ++i) {
    double mag = std::fabs(a[static_cast<size_t>(i)]);
    if (mag > best) {
      best = mag;
      piv = i;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (i == piv) continue;
    double norm = 1.0 + sq(a[static_cast<size_t>(i)] / a[static_cast<size_t>(piv)]);
    double val = pb[static_cast<size_t>(i)] -
                 pb[static_cast<size_t>(piv)] * a[static_cast<size_t>(i)] / a[static_cast<size_t>(piv)];
    out.kernel_violation = std::max(out.kernel_violation, std::fabs(val) / std::sqrt(norm));
  }
  return out;
}

}  // namespace

static MonodromyCheckResult monodromy_check_impl(MonodromyMap& mono,
                                                 const std::vector<Point>& fiber_samples,
                                                 double tol_displacement, double tol_kernel,
                                                 bool require_identity) {
  const ContactFibration& fib = mono.fibration();
  MonodromyCheckResult res;
  res.min_lambda = std::numeric_limits<double>::infinity();
  res.max_lambda = -std::numeric_limits<double>::infinity();
  res.sample_count = fiber_samples.size();
  for (const auto& p : fiber_samples) {
    const Trajectory& traj = mono.transport(p.x, true);
    if (!traj.complete) {
      res.all_complete = false;
      continue;
    }
    const auto& end = traj.end_state();
    double disp = chart_distance(*fib.fiber.chart(), p.x, end);
    res.max_displacement = std::max(res.max_displacement, disp);
    // transported frame columns: tangents.back()[j] is the image of e_j
    FrameConformal fc = frame_conformal(fib.fiber, p.x, end, traj.tangents.back());
    res.max_kernel_violation = std::max(res.max_kernel_violation, fc.kernel_violation);
    res.min_lambda = std::min(res.min_lambda, fc.lambda);
    res.max_lambda = std::max(res.max_lambda, fc.lambda);
    res.max_lambda_dev = std::max(res.max_lambda_dev, std::fabs(fc.lambda - 1.0));
  }
  res.pass = res.all_complete && res.max_kernel_violation <= tol_kernel &&
             res.min_lambda > 0.0;
  if (require_identity)
    res.pass = res.pass && res.max_displacement <= tol_displacement;
  return res;
}

MonodromyCheckResult monodromy_identity_check(MonodromyMap& mono,
                                              const std::vector<Point>& fiber_samples,
                                              double tol_displacement, double tol_kernel) {
  return monodromy_check_impl(mono, fiber_samples, tol_displacement, tol_kernel, true);
}

MonodromyCheckResult monodromy_conformal_check(MonodromyMap& mono,
                                               const std::vector<Point>& fiber_samples,
                                               double tol_kernel) {
  return monodromy_check_impl(mono, fiber_samples, 0.0, tol_kernel, false);
}

SweptTransportResult transport_isotropic(const ContactFibration& fib,
                                         const ParamImmersion& imm,
                                         const std::vector<std::vector<double>>& params,
                                         const BasePath& path, const LiftOptions& opts) {
  const DiffBackend& be = fib.fiber.backend();
  int kdim = imm.domain->dim();
  SweptTransportResult res;
  res.complete = true;
  res.sample_count = params.size();

  std::vector<std::vector<double>> starts;
  std::vector<std::vector<double>> ends;
  for (const auto& s : params) {
    std::vector<double> x0 = imm.position(s);
    std::vector<std::vector<double>> seeds;
    for (int j = 0; j < kdim; ++j) seeds.push_back(imm.tangent(s, j, be));
    Trajectory traj = lift_path(fib, path, x0, seeds, opts);
    if (!traj.complete) {
      res.complete = false;
      continue;
    }
    starts.push_back(x0);
    ends.push_back(traj.end_state());
    for (size_t c = 0; c < traj.times.size(); ++c) {
      std::vector<double> a =
          fib.fiber.alpha_frame(std::span<const double>(traj.fiber_states[c]));
      for (int j = 0; j < kdim; ++j) {
        const auto& Tj = traj.tangents[c][static_cast<size_t>(j)];
        double val = 0.0, norm = 0.0;
        for (size_t i = 0; i < Tj.size(); ++i) {
          val += a[i] * Tj[i];
          norm += Tj[i] * Tj[i];
        }
        double viol = std::fabs(val) / std::max(std::sqrt(norm), 1e-30);
        if (viol > res.max_isotropy_violation) {
          res.max_isotropy_violation = viol;
          res.worst_checkpoint_time = traj.times[c];
        }
      }
    }
  }
  // distance from each transported point back to the start set
  for (const auto& e : ends) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : starts)
      best = std::min(best, chart_distance(*fib.fiber.chart(), e, s));
    res.return_distance = std::max(res.return_distance, best);
  }
  return res;
}

AreaLawResult area_law_measurement(const ContactFibration& fib, const BasePath& loop,
                                   std::span<const double> fiber_start, int reeb_coord,
                                   const LiftOptions& opts, bool base_polar) {
  AreaLawResult out;
  Trajectory traj = lift_path(fib, loop, fiber_start, {}, opts);
  if (!traj.complete) throw std::runtime_error("area law lift left the chart: " + traj.diagnostic);
  out.steps_used = traj.steps_used;
  const auto& end = traj.end_state();
  out.displacement = end[static_cast<size_t>(reeb_coord)] -
                     fiber_start[static_cast<size_t>(reeb_coord)];
  out.signed_area = path_signed_area(loop, 1 << 14, base_polar);
  out.expected = -2.0 * out.signed_area;
  out.error = std::fabs(out.displacement - out.expected);
  return out;
}

}  // namespace contactlab
