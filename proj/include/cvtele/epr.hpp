#pragma once

// EPR measurement machinery.
//
// The improper vectors |Phi> = (1/sqrt(2 pi)) sum_n |n,n> and
//   |Phi(x,p)> = [D(x,p) (x) 1] |Phi> e^{-i p x / 2} = [1 (x) D(-x,p)] |Phi> e^{-i p x / 2}
//   |Psi(x,p)> = [1 (x) D(x,p)] |Phi>
// are never normalized. They only enter through overlaps with normalizable
// two-mode states, which are exact on the kept levels.

#include <utility>
#include <vector>

#include "cvtele/fock.hpp"

namespace cvtele {

/// Schmidt coefficients tanh^n(r) / cosh(r), n < n_max.
RealVector tmsv_schmidt(double r, FockDim dim);

/// Two-mode squeezed vacuum in Schmidt form. Leakage tanh^{2 n_max}(r) is
/// reported and warned about when above `leakage_warning`.
TwoModeState tmsv(double r, FockDim dim, double leakage_warning = 1e-8);

/// Incoherent mixture sum_k w_k |TMSV(r_k)><TMSV(r_k)| (pair-diagonal form).
TwoModeState tmsv_mixture(const std::vector<std::pair<double, double>>& weight_and_r,
                          FockDim dim);

/// Spectral factorization of a resource state W = sum_k weight_k |v_k><v_k|.
/// Each component is held as an n_max x n_max amplitude matrix v(a, b) = <a,b|v>;
/// components supported on span{|n,n>} keep only their diagonal.
class Resource {
 public:
  struct Component {
    double weight = 0.0;
    bool pair_diagonal = false;
    Vector diagonal;  // used when pair_diagonal
    Matrix amplitudes;  // used otherwise
  };

  explicit Resource(const TwoModeState& w, double cutoff = 1e-14);

  FockDim dim() const { return dim_; }
  const std::vector<Component>& components() const { return components_; }
  bool all_pair_diagonal() const;

 private:
  FockDim dim_;
  std::vector<Component> components_;
};

/// Moments of the commuting EPR observables x_B - x_A and p_A + p_B in W, plus
/// the local mean photon numbers. Computed from exact ladder matrix elements.
struct EprMoments {
  double mean_x_diff = 0.0;
  double mean_p_sum = 0.0;
  double var_x_diff = 0.0;
  double var_p_sum = 0.0;
  double photons_a = 0.0;
  double photons_b = 0.0;
};
EprMoments epr_moments(const TwoModeState& w);

/// Dense truncated |Phi(x,p)> including the e^{-ipx/2} phase; index a*n_max + b.
Vector phi_vector(PhasePoint pt, FockDim dim);
/// Dense truncated |Psi(x,p)>.
Vector psi_vector(PhasePoint pt, FockDim dim);

/// <Phi(x,p)|psi> for a pure two-mode state. Schmidt form takes the diagonal
/// displacement sum; other pure states use the dense vector path. Mixed states
/// throw DomainError.
Complex epr_overlap(const TwoModeState& state, PhasePoint pt);
Complex epr_overlap(const Vector& two_mode_amplitudes, FockDim dim, PhasePoint pt);

/// Kernel P(x,p) = <Psi(x,p)|W|Psi(x,p)> through the factorized resource.
double kernel_value(const Resource& w, PhasePoint pt);
double kernel_value(const TwoModeState& w, PhasePoint pt);
/// Same quantity as a dense quadratic form; the arbiter for the factorized path.
double kernel_value_dense(const TwoModeState& w, PhasePoint pt);

/// F_W(x,u; y,v) = <Phi(x,u)|W|Phi(y,v)>. Its diagonal equals kernel_value at (-x, u).
Complex f_w_element(const Resource& w, PhasePoint left, PhasePoint right);
Complex f_w_element(const TwoModeState& w, PhasePoint left, PhasePoint right);
Complex f_w_element_dense(const TwoModeState& w, PhasePoint left, PhasePoint right);

/// Tr_A of the truncated improper projector |Phi><Phi|; (1/2pi) * identity.
Matrix epr_reduced_projector(FockDim dim);

}  // namespace cvtele
