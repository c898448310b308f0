#include "pmm/pme.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmm/errors.hpp"
#include "pmm/simd/kernels.hpp"

namespace pmm {

namespace {

constexpr double kRangeTol = 1e-10;
constexpr double kCflSafety = 0.9;

}  // namespace

BoundaryCondition BoundaryCondition::dirichlet(double alpha, double beta) {
  return {Kind::Dirichlet, 0.0, alpha, beta};
}

BoundaryCondition BoundaryCondition::robin(double kappa, double alpha, double beta) {
  return {Kind::Robin, kappa, alpha, beta};
}

BoundaryCondition BoundaryCondition::neumann(double alpha, double beta) {
  return {Kind::Robin, 0.0, alpha, beta};
}

void BoundaryCondition::validate() const {
  if (kind == Kind::Robin && !(kappa >= 0.0)) throw InputError("kappa must be >= 0");
  const bool need_densities = kind == Kind::Dirichlet || kappa > 0.0;
  if (need_densities && !(alpha > 0.0 && alpha < 1.0))
    throw InputError("alpha must lie in (0,1)");
  if (need_densities && !(beta > 0.0 && beta < 1.0)) throw InputError("beta must lie in (0,1)");
}

std::string BoundaryCondition::describe() const {
  std::ostringstream os;
  if (kind == Kind::Dirichlet)
    os << "dirichlet(alpha=" << alpha << ",beta=" << beta << ")";
  else if (is_neumann())
    os << "neumann";
  else
    os << "robin(kappa=" << kappa << ",alpha=" << alpha << ",beta=" << beta << ")";
  return os.str();
}

double stationary_profile(const BoundaryCondition& bc, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("u must lie in [0,1]");
  const double al = bc.alpha, be = bc.beta;
  if (bc.kind == BoundaryCondition::Kind::Dirichlet)
    return std::sqrt((be * be - al * al) * u + al * al);
  if (bc.kappa == 0.0) return 0.5 * (al + be);
  const double k = bc.kappa;
  const double root_b = (k * al + (al + be) * (al + be)) / (2.0 * (al + be) + k);
  const double a = k * (root_b - al);
  return std::sqrt(a * u + root_b * root_b);
}

double DensityGrid::at(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw InputError("u must lie in [0,1]");
  const double pos = u / du;
  const int i = std::min(static_cast<int>(pos), J() - 1);
  const double w = pos - i;
  return (1.0 - w) * values[static_cast<std::size_t>(i)] + w * values[static_cast<std::size_t>(i + 1)];
}

double DensityGrid::mass() const {
  double interior = 0.0;
  for (int i = 1; i < J(); ++i) interior += values[static_cast<std::size_t>(i)];
  return du * (interior + 0.5 * (values.front() + values.back()));
}

DensityGrid initial_grid(const ProfileFn& g, int J, const BoundaryCondition& bc) {
  if (J < 2) throw InputError("J must be >= 2");
  bc.validate();
  DensityGrid grid;
  grid.du = 1.0 / J;
  grid.values.resize(static_cast<std::size_t>(J + 1));
  for (int i = 0; i <= J; ++i) {
    const double v = g(i * grid.du);
    if (!(v >= 0.0 && v <= 1.0))
      throw InputError("initial profile value " + std::to_string(v) + " outside [0,1]");
    grid.values[static_cast<std::size_t>(i)] = v;
  }
  if (bc.kind == BoundaryCondition::Kind::Dirichlet) {
    grid.values.front() = bc.alpha;
    grid.values.back() = bc.beta;
  }
  return grid;
}

DensityGrid stationary_grid(const BoundaryCondition& bc, int J) {
  return initial_grid([&](double u) { return stationary_profile(bc, u); }, J, bc);
}

double cfl_limit(double du) { return kCflSafety * du * du / 4.0; }

double default_time_step(double du, const BoundaryCondition& bc) {
  const double kappa = bc.kind == BoundaryCondition::Kind::Robin ? bc.kappa : 0.0;
  return kCflSafety * du * du / (4.0 + 2.0 * du * kappa);
}

namespace {

// Boundary rows for the Robin condition. The ghost value at u = -du solves the
// centred relation (rho_1^2 - ghost) / (2 du) = kappa (rho_0 - alpha), and
// symmetrically on the right with kappa (beta - rho_J).
void robin_rows(const std::vector<double>& r, std::vector<double>& out, double lambda,
                const BoundaryCondition& bc) {
  const std::size_t J = r.size() - 1;
  const double du = 1.0 / static_cast<double>(J);
  const double s0 = r[0] * r[0], s1 = r[1] * r[1];
  const double ghost_l = s1 - 2.0 * du * bc.kappa * (r[0] - bc.alpha);
  out[0] = r[0] + lambda * ((s1 - 2.0 * s0) + ghost_l);
  const double sj = r[J] * r[J], sjm = r[J - 1] * r[J - 1];
  const double ghost_r = sjm + 2.0 * du * bc.kappa * (bc.beta - r[J]);
  out[J] = r[J] + lambda * ((ghost_r - 2.0 * sj) + sjm);
}

void check_range(const DensityGrid& g) {
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double v = g.values[i];
    if (!(v >= -kRangeTol && v <= 1.0 + kRangeTol))
      throw NumericalInstability("density " + std::to_string(v) + " at node " +
                                 std::to_string(i) + ", t=" + std::to_string(g.time) +
                                 " left [0,1]");
  }
}

}  // namespace

void pde_step_into(const DensityGrid& grid, double dt, const BoundaryCondition& bc,
                   DensityGrid& out) {
  if (grid.J() < 2) throw InputError("grid needs at least 3 nodes");
  if (!(dt > 0.0) || dt > cfl_limit(grid.du) * (1.0 + 1e-12))
    throw InputError("time step " + std::to_string(dt) + " violates the CFL bound " +
                     std::to_string(cfl_limit(grid.du)));
  const double lambda = dt / (grid.du * grid.du);
  out.du = grid.du;
  out.time = grid.time + dt;
  out.values.resize(grid.values.size());
  simd::kernels().porous_stencil(grid.values.data(), out.values.data(), grid.values.size(),
                                 lambda);
  if (bc.kind == BoundaryCondition::Kind::Dirichlet) {
    out.values.front() = bc.alpha;
    out.values.back() = bc.beta;
  } else {
    robin_rows(grid.values, out.values, lambda, bc);
  }
  check_range(out);
}

DensityGrid pde_step(const DensityGrid& grid, double dt, const BoundaryCondition& bc) {
  DensityGrid out;
  pde_step_into(grid, dt, bc, out);
  return out;
}

std::vector<double> discrete_operator(const DensityGrid& grid, const BoundaryCondition& bc) {
  // lambda = 1 gives du^2 times the operator; avoid the CFL check on purpose.
  const std::size_t size = grid.values.size();
  std::vector<double> out(size);
  simd::kernels().porous_stencil(grid.values.data(), out.data(), size, 1.0);
  if (bc.kind == BoundaryCondition::Kind::Dirichlet) {
    out.front() = bc.alpha;
    out.back() = bc.beta;
  } else {
    robin_rows(grid.values, out, 1.0, bc);
  }
  const double inv = 1.0 / (grid.du * grid.du);
  for (std::size_t i = 0; i < size; ++i) out[i] = (out[i] - grid.values[i]) * inv;
  return out;
}

std::vector<double> Field::times() const {
  std::vector<double> t;
  for (const auto& s : samples) t.push_back(s.time);
  return t;
}

std::vector<double> uniform_times(double T, int k) {
  if (k < 1) throw InputError("sample count must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(k + 1));
  for (int i = 0; i <= k; ++i) t[static_cast<std::size_t>(i)] = T * i / k;
  return t;
}

Field solve(const ProfileFn& g, const BoundaryCondition& bc, double T, int J,
            std::vector<double> sample_times) {
  if (!(T > 0.0)) throw InputError("T must be > 0");
  if (sample_times.empty()) sample_times = {0.0, T};
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    if (sample_times[k] < 0.0 || sample_times[k] > T)
      throw InputError("sample times must lie in [0, T]");
    if (k > 0 && !(sample_times[k] > sample_times[k - 1]))
      throw InputError("sample times must be strictly increasing");
  }
  Field field;
  field.bc = bc;
  DensityGrid cur = initial_grid(g, J, bc);
  field.du = cur.du;
  field.dt = default_time_step(cur.du, bc);
  DensityGrid next;
  for (double target : sample_times) {
    while (cur.time < target) {
      // Land exactly on the sample time; a shorter step is always stable.
      const double remaining = target - cur.time;
      const bool last = remaining <= field.dt * (1.0 + 1e-9);
      pde_step_into(cur, last ? remaining : field.dt, bc, next);
      if (last) next.time = target;
      std::swap(cur, next);
    }
    field.samples.push_back(cur);
  }
  return field;
}

namespace {

// Trapezoid in space of f(i) over nodes 0..J.
template <typename F>
double trapezoid(int J, double du, F&& f) {
  double s = 0.5 * (f(0) + f(J));
  for (int i = 1; i < J; ++i) s += f(i);
  return s * du;
}

}  // namespace

double weak_form_residual(const Field& field, const ProfileFn& g, const TestFunction& G,
                          double t) {
  if (field.samples.empty()) throw InputError("field has no samples");
  const auto times = field.times();
  const auto it = std::find(times.begin(), times.end(), t);
  if (it == times.end()) throw InputError("t is not a stored sample time");
  if (times.front() != 0.0) throw InputError("field must start at t = 0");
  const auto last = static_cast<std::size_t>(it - times.begin());
  const BoundaryCondition& bc = field.bc;
  const bool dirichlet = bc.kind == BoundaryCondition::Kind::Dirichlet;
  if (dirichlet) {
    if (!G.vanishes_at_boundary)
      throw InputError("Dirichlet residual needs a test function vanishing at the boundary");
    for (std::size_t k = 0; k <= last; ++k)
      if (std::fabs(G.value(times[k], 0.0)) > 1e-12 || std::fabs(G.value(times[k], 1.0)) > 1e-12)
        throw InputError("test function " + G.name + " does not vanish at u = 0, 1");
  }

  const int J = field.samples.front().J();
  const double du = field.du;
  auto u = [&](int i) { return i * du; };

  const auto& rho_t = field.samples[last].values;
  const double end_pairing =
      trapezoid(J, du, [&](int i) { return rho_t[static_cast<std::size_t>(i)] * G.value(t, u(i)); });
  const double start_pairing = trapezoid(J, du, [&](int i) { return g(u(i)) * G.value(0.0, u(i)); });

  // Time integrand at sample k.
  auto integrand = [&](std::size_t k) {
    const double s = times[k];
    const auto& r = field.samples[k].values;
    double val = -trapezoid(J, du, [&](int i) {
      const double rho = r[static_cast<std::size_t>(i)];
      return rho * (G.dt(s, u(i)) + rho * G.duu(s, u(i)));
    });
    if (dirichlet) {
      val += bc.beta * bc.beta * G.du(s, 1.0) - bc.alpha * bc.alpha * G.du(s, 0.0);
    } else {
      const double r0 = r.front(), r1 = r.back();
      val += r1 * r1 * G.du(s, 1.0) - r0 * r0 * G.du(s, 0.0);
      val -= bc.kappa * (G.value(s, 0.0) * (bc.alpha - r0) + G.value(s, 1.0) * (bc.beta - r1));
    }
    return val;
  };

  double time_integral = 0.0;
  for (std::size_t k = 1; k <= last; ++k)
    time_integral += 0.5 * (times[k] - times[k - 1]) * (integrand(k - 1) + integrand(k));
  return end_pairing - start_pairing + time_integral;
}

}  // namespace pmm
