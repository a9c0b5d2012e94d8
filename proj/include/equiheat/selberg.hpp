#pragma once

#include <functional>
#include <string>
#include <vector>

#include "equiheat/heat.hpp"

namespace equiheat {

/// Finite uniform subgroup Gamma of SU(2). Bundled: cyclic Z_N generated by
/// diag(e^{2 pi i/N}, e^{-2 pi i/N}) (the +/-1 center for even N sits inside).
/// Haar is normalized, so vol(Gamma\G) = 1/|Gamma|.
struct FiniteLattice {
  std::string name;
  int order = 1;
  std::vector<GroupElement> elements;
  /// conjugacy classes (cyclic groups: singletons), as indices into elements
  std::vector<std::vector<int>> classes;
  std::vector<int> centralizer_order;       ///< |Gamma_gamma| per class
  std::vector<bool> central_in_g;           ///< gamma in {+-1} (G_gamma = G)?
  double covolume = 1.0;                    ///< vol(Gamma\G) = 1/|Gamma|
};

FiniteLattice make_cyclic_lattice(const GroupModel& su2, int order);

/// m_rho = dim V_rho^Gamma = (1/|Gamma|) sum_gamma chi_rho(gamma), rounded to
/// the nearest integer; residuals above 1e-10 raise NumericError.
std::vector<std::pair<IrrepInfo, int>> lattice_multiplicities(const GroupModel& su2,
                                                              const FiniteLattice& lattice,
                                                              double lambda_cutoff);

struct SelbergReport {
  double t = 0.0;
  double spectral = 0.0;
  double geometric = 0.0;
  double residual = 0.0;  ///< |spectral - geometric| / spectral
  std::vector<double> class_contributions;
  std::vector<double> spectral_terms;  ///< m_rho d_rho e^{-t lambda_rho}
  double truncation = 0.0;
};

/// Both sides of the trace formula for f = p_t: the spectral side from the
/// lattice multiplicities, the geometric side from orbital integrals over
/// G_gamma \ G by quadrature (central classes reduce to vol(Gamma\G) f(gamma)).
SelbergReport selberg_sides(const GroupModel& su2, const FiniteLattice& lattice, double t,
                            int orbital_nodes = 48, const HeatOptions& opts = {});

/// Orbital integral int_{G_gamma\G} f(g^{-1} gamma g) dg (normalized quotient
/// measure) for gamma in the maximal torus; 2D quadrature over the flag
/// direction.
complexd orbital_integral(const GroupModel& su2, const GroupElement& gamma,
                          const std::function<complexd(const GroupElement&)>& f, int nodes = 48);

/// Periodized kernel k_f(g, h) = sum_gamma f(g^{-1} gamma h). Finite lattices
/// sum exactly; the torus lattice 2 pi Z on the line uses a radius schedule
/// with a certified Gaussian tail bound.
complexd kernel_periodization(const GroupModel& group, const FiniteLattice& lattice,
                              const std::function<complexd(const GroupElement&)>& f,
                              const GroupElement& g, const GroupElement& h);

struct LinePeriodizationResult {
  double value = 0.0;
  double tail_bound = 0.0;
  int terms = 0;
  double critical_exponent_estimate = 0.0;  ///< fitted from Poincare partial sums
};

/// k_f(x, y) = sum_{m} f(y - x + 2 pi m) for f with certified Gaussian decay
/// f(u) = (4 pi t)^{-1/2} e^{-u^2/4t} (the line heat kernel at time t).
LinePeriodizationResult line_heat_periodization(double t, double x, double y,
                                                double tol = 1e-14);

/// Poincare-series probe P(s) = sum_m e^{-s |2 pi m|} on the lattice 2 pi Z:
/// partial sums converge for every s > 0 (critical exponent 0).
double poincare_series_probe(double s, int max_terms, double* tail_bound);

/// Heat trace of the Bochner-Laplace operator on the charge-n bundle over
/// S^2 = SU(2)/U(1) (Gamma = {e}): spectral route
/// sum_{l >= |n|} (2l+1) e^{-t(l(l+1) - n^2)}, kernel route via the trace of
/// h_t^sigma at the identity.
double bundle_heat_trace_spectral(int charge, double t, double* tail_bound = nullptr);
double bundle_heat_trace_kernel(const GroupModel& su2, int charge, double t,
                                const HeatOptions& opts = {});

}  // namespace equiheat
