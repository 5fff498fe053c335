#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "socs/spin_coherent.hpp"
#include "socs/types.hpp"

namespace socs {

/// Spin-orbit symbol H(w) = H0(w) + hbar C(w).dpi_s(sigma/2) on phase space
/// w = (x, xi) in R^{2d}, with analytic first and second derivatives.
class SpinOrbitModel {
public:
  virtual ~SpinOrbitModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0; // d

  virtual double h0(const Vec& w) const = 0;
  virtual Vec grad_h0(const Vec& w) const = 0;  // length 2d, (d/dx, d/dxi)
  virtual Mat hess_h0(const Vec& w) const = 0;  // 2d x 2d symmetric

  virtual Vec3 C(const Vec& w) const = 0;
  virtual Mat jac_C(const Vec& w) const = 0;        // 3 x 2d
  virtual Mat hess_C(const Vec& w, int k) const = 0; // 2d x 2d, k in {1,2,3}

  /// Structural properties used to gate solvers and experiments.
  virtual bool constant_C() const = 0;
  virtual bool x_only_C() const = 0;
  virtual bool quadratic_h0() const = 0;

  /// Split form H0 = xi^2/(2m) + V(x); all built-ins are of this shape.
  virtual bool split_form() const { return true; }
  virtual double mass() const { return 1.0; }
  double potential(const Vec& x) const;

  /// Growth exponents M = (M_x, M_xi) of the symbol class; recorded for
  /// documentation and validation warnings only.
  virtual Eigen::Vector2d growth_exponents() const = 0;
};

/// Identifier + keyed parameters for the built-in catalog.
struct ModelId {
  std::string name;
  std::map<std::string, double> params;
};

/// Model catalog:
///   harmonic_const_field  H0 = (xi^2 + x^2)/2,        C = (cx, cy, cz)
///   free_const_field      H0 = xi^2/2,                C = (cx, cy, cz)
///   inverted_osc          H0 = (xi^2 - x^2)/2,        C = (cx, cy, cz)
///   pendulum              H0 = xi^2/2 - cos x,        C = (cx, cy, cz)
///   quartic_perturbed     H0 = (xi^2 + x^2)/2 + eps x^4, C = (0, 0, c0 + c1 x)
///   stern_gerlach         H0 = xi^2/2,                C = (0, 0, b0 + b1 x)
/// Unknown names and unknown parameter keys are rejected.
std::shared_ptr<const SpinOrbitModel> builtin(const ModelId& id);

std::vector<std::string> builtin_names();

/// Classical spin-orbit Hamiltonian H_so = H0(w) + S n.C(w).
double eval_h_so(const SpinOrbitModel& model, const Vec& w, const SpinDirection& n, double S);

/// Gradient and Hessian of w -> H_so(w, n) at frozen n.
Vec grad_h_so(const SpinOrbitModel& model, const Vec& w, const Vec3& n, double S);
Mat hess_h_so(const SpinOrbitModel& model, const Vec& w, const Vec3& n, double S);

} // namespace socs
