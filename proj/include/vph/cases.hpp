#pragma once

#include <memory>
#include <string>

#include "vph/hermite.hpp"
#include "vph/mesh.hpp"

namespace vph {

enum class CaseId {
  near_equilibrium,          // density perturbation of the global Maxwellian
  temperature_perturbation,  // Maxwellian with T(x) = 1 + delta cos(k_x x)
  oscillatory_perturbation,  // velocity-oscillatory factor on top of T(x)
  two_stream                 // bimodal (1 + 5 v^2 / T) Maxwellian
};

CaseId case_id_from_string(const std::string& name);
std::string to_string(CaseId id);

struct CaseSpec {
  CaseId id = CaseId::near_equilibrium;
  double delta = 0.1;   // perturbation amplitude
  double alpha = 0.0;   // field-amplitude scaling exponent (near_equilibrium only)
  double k_x = 0.0;     // spatial frequency; 0 picks the case default
  double a = 0.0, b = 0.0;  // domain; a == b picks the case default
  double lambda = 0.1;
  double T0 = 1.0;

  void apply_defaults();
  void validate() const;
  double temperature_at(double x) const;  // T_in(x) = 1 + delta cos(k_x x)
};

// Density perturbation of order delta lambda^{2-alpha}: C_0 = 1 + that cosine,
// all higher coefficients zero (the velocity profile is exactly the basis
// Maxwellian, so the projection is analytic).
HermiteState near_equilibrium(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                              int max_mode);

// Per-cell projection of the Maxwellian with temperature T_in(x_j).
HermiteState temperature_perturbation(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                                      int max_mode, int quad_order = 0);

// Per-cell projection of (1 + delta cos(k_x x) sin(3 pi v)) times the
// T_in(x) Maxwellian.
HermiteState oscillatory_perturbation(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                                      int max_mode, int quad_order = 0);

// Per-cell projection of (1 + 5 v^2 / T_in) / (6 sqrt(2 pi T_in)) exp(-v^2 / (2 T_in)).
HermiteState two_stream(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh, int max_mode,
                        int quad_order = 0);

HermiteState make_initial_state(const CaseSpec& spec, std::shared_ptr<const Mesh1D> mesh,
                                int max_mode, int quad_order = 0);

// Quadrature order the generator will use; 0 for the analytic fast path.
int case_quadrature_order(const CaseSpec& spec, int max_mode);

}  // namespace vph
