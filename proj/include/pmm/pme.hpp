#pragma once

// Porous medium equation d_t rho = Laplacian(rho^2) on [0,1]: explicit
// conservative finite differences on J+1 nodes, closed-form stationary
// profiles and the weak-formulation residuals F_Dir / F_Rob.

#include <functional>
#include <string>
#include <vector>

namespace pmm {

struct BoundaryCondition {
  enum class Kind { Dirichlet, Robin };
  Kind kind = Kind::Dirichlet;
  double kappa = 0.0;  // Robin only; kappa = 0 is the Neumann condition
  double alpha = 0.5;
  double beta = 0.5;

  static BoundaryCondition dirichlet(double alpha, double beta);
  static BoundaryCondition robin(double kappa, double alpha, double beta);
  static BoundaryCondition neumann(double alpha = 0.5, double beta = 0.5);

  bool is_neumann() const { return kind == Kind::Robin && kappa == 0.0; }
  void validate() const;  // InputError on bad parameters
  std::string describe() const;

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

// Closed-form stationary solution at u in [0,1].
double stationary_profile(const BoundaryCondition& bc, double u);

struct DensityGrid {
  std::vector<double> values;  // rho at u_i = i du, i = 0..J
  double du = 0.0;
  double time = 0.0;

  int J() const { return static_cast<int>(values.size()) - 1; }
  double node(int i) const { return i * du; }
  // Piecewise-linear interpolation, u in [0,1].
  double at(double u) const;
  // Trapezoid-weighted mass du * (rho_0/2 + rho_1 + ... + rho_{J-1} + rho_J/2).
  double mass() const;
};

using ProfileFn = std::function<double(double)>;

// Samples g at the nodes (values checked to lie in [0,1]); Dirichlet pins the
// end nodes to alpha and beta.
DensityGrid initial_grid(const ProfileFn& g, int J, const BoundaryCondition& bc);
DensityGrid stationary_grid(const BoundaryCondition& bc, int J);

// Largest step accepted by pde_step: 0.9 du^2 / 4.
double cfl_limit(double du);
// Step used by solve: the CFL limit, reduced for Robin so the boundary rows
// stay monotone.
double default_time_step(double du, const BoundaryCondition& bc);

// One explicit step. Throws InputError when dt exceeds cfl_limit and
// NumericalInstability when a value leaves [-1e-10, 1 + 1e-10].
DensityGrid pde_step(const DensityGrid& grid, double dt, const BoundaryCondition& bc);
void pde_step_into(const DensityGrid& grid, double dt, const BoundaryCondition& bc,
                   DensityGrid& out);

// Discrete right-hand side (rho_new - rho) / dt of the scheme at every node;
// zero at pinned Dirichlet nodes.
std::vector<double> discrete_operator(const DensityGrid& grid, const BoundaryCondition& bc);

struct Field {
  BoundaryCondition bc;
  double du = 0.0;
  double dt = 0.0;  // solver step (the last step before a sample may be shorter)
  std::vector<DensityGrid> samples;

  std::vector<double> times() const;
};

// Integrates from g up to T and stores the grid at each sample time (sorted,
// within [0, T]; empty means {0, T}).
Field solve(const ProfileFn& g, const BoundaryCondition& bc, double T, int J,
            std::vector<double> sample_times = {});

// Uniform sample times 0, T/k, ..., T.
std::vector<double> uniform_times(double T, int k);

struct TestFunction {
  std::function<double(double, double)> value;  // G(t, u)
  std::function<double(double, double)> dt;     // d_t G
  std::function<double(double, double)> du;     // d_u G
  std::function<double(double, double)> duu;    // d_uu G
  bool vanishes_at_boundary = false;
  std::string name;
};

// F_Dir (Dirichlet) or F_Rob (Robin, including Neumann) at sample time t,
// trapezoidal in space over the nodes and in time over the stored samples.
// InputError when t is not a stored sample time or when a Dirichlet residual
// is requested with a G that does not vanish at u = 0, 1.
double weak_form_residual(const Field& field, const ProfileFn& g, const TestFunction& G,
                          double t);

}  // namespace pmm
