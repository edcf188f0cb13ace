#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "contactlab/fibration.hpp"

namespace contactlab {

// One mesh node with the immersion tangents the foliation checks need.
// Vectors live in the mesh chart; fiber-only vectors carry zero base slots.
struct PsNode {
  std::vector<double> x;
  std::vector<double> t_rho;    // leaf direction
  std::vector<double> t_theta;  // angular direction, zero at the core
  std::vector<double> t_core;   // sweep direction, empty on a plain disk
  double rho = 0.0, theta = 0.0, core_s = 0.0;
};

// Disk (singular set a point) or swept (singular set a circle) candidate.
// Leaves are the radial parameter lines, the core is rho = 0, the boundary
// rho = rho_max; singular-set structure and leaf topology are fixed by this
// parametrization, so only the pointwise conditions get measured.
struct PlastikstufeMesh {
  std::string name;
  ChartPtr chart;
  bool swept = false;
  int n_rho = 0, n_theta = 0, n_core = 1;
  double rho_max = 1.0;
  std::vector<PsNode> nodes;  // layout [(s * n_rho + i) * n_theta + j]

  const PsNode& at(int s, int i, int j) const {
    return nodes[static_cast<size_t>((s * n_rho + i) * n_theta + j)];
  }
};

struct PlastikstufeReport {
  bool pass = false;
  double tol = 1e-4;
  double core_violation = 0.0;      // tangency of the singular set
  double leaf_violation = 0.0;      // leaf isotropy
  double boundary_violation = 0.0;  // boundary Legendrian
  double leaf_dalpha = 0.0;  // informational: pairing of the two leaf directions
  int winding_min = 0, winding_max = 0;  // line-field index per slice
  int node_count = 0;
};

// First radius at which the horizontal boundary circle is Legendrian for
// the overtwisted form; root of the angular coefficient.
double ot_disk_boundary_radius();

// Overtwisted disk as a graph z = h(r) over the flat disk of radius
// ot_disk_boundary_radius(), in the cartesian chart.  The default height
// scale keeps the perturbation slight enough for the foliation tolerances.
PlastikstufeMesh ot_disk_mesh(double height_scale = 1e-5, int n_rho = 40,
                              int n_theta = 64);

// Flat horizontal disk, used as the negative control in the standard form.
PlastikstufeMesh flat_disk_mesh(double radius = 1.0, int n_rho = 24, int n_theta = 48);

PlastikstufeReport verify_plastikstufe(const ContactForm& cf, const PlastikstufeMesh& mesh,
                                       double tol = 1e-4);

class MonodromyRejection : public std::runtime_error {
 public:
  MonodromyRejection(const std::string& what, double displacement)
      : std::runtime_error(what), max_displacement(displacement) {}
  double max_displacement;
};

// Sweep a fiber disk mesh around a closed loop whose monodromy fixes the
// mesh; throws MonodromyRejection with the measured displacement otherwise.
PlastikstufeMesh transport_plastikstufe(const ContactFibration& fib, const BasePath& loop,
                                        const PlastikstufeMesh& disk, int n_core = 24,
                                        const LiftOptions& opts = {},
                                        double tol_mono = 1e-3);

struct OverlapReport {
  double flow_time = 0.0;
  int sign_changes = 0;
  double first_crossing_r = 0.0;
  bool intersects = false;
  double z_rate_center = 0.0;  // vertical displacement rate at the center
};

// Flow the disk's radial section by the Reeb field and scan the sign of the
// vertical displacement across radii.  A sign change means the flowed disk
// meets the original one along a circle.
OverlapReport reeb_disk_overlap(const ContactForm& cf, const PlastikstufeMesh& disk,
                                double flow_time, int flow_steps = 800);

void write_mesh_csv(const PlastikstufeMesh& mesh, std::ostream& os);

}  // namespace contactlab
