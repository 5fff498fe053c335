#include "socs/model.hpp"

#include <cmath>
#include <functional>
#include <set>

namespace socs {

double SpinOrbitModel::potential(const Vec& x) const {
  if (!split_form()) throw Error("potential: model is not of split form H0 = xi^2/2m + V(x)");
  Vec w = Vec::Zero(2 * dim());
  w.head(dim()) = x;
  return h0(w);
}

double eval_h_so(const SpinOrbitModel& model, const Vec& w, const SpinDirection& n, double S) {
  if (S < 0.0) throw Error("eval_h_so: classical spin length S must be nonnegative");
  return model.h0(w) + S * n.n().dot(model.C(w));
}

Vec grad_h_so(const SpinOrbitModel& model, const Vec& w, const Vec3& n, double S) {
  Vec g = model.grad_h0(w);
  if (S != 0.0 && !model.constant_C()) g += S * (model.jac_C(w).transpose() * n);
  return g;
}

Mat hess_h_so(const SpinOrbitModel& model, const Vec& w, const Vec3& n, double S) {
  Mat h = model.hess_h0(w);
  if (S != 0.0 && !model.constant_C()) {
    for (int k = 0; k < 3; ++k) {
      if (n[k] != 0.0) h += S * n[k] * model.hess_C(w, k + 1);
    }
  }
  return h;
}

namespace {

struct Flags {
  bool constant_C = false;
  bool x_only_C = true;
  bool quadratic_h0 = false;
};

/// Concrete 1-d catalog entry backed by closed-form callables.
class BuiltinModel final : public SpinOrbitModel {
public:
  BuiltinModel(std::string name, Flags flags, Eigen::Vector2d growth,
               std::function<double(double, double)> h0,
               std::function<Vec(double, double)> grad,
               std::function<Mat(double, double)> hess,
               std::function<Vec3(double)> field, std::function<Vec3(double)> field_dx)
      : name_(std::move(name)),
        flags_(flags),
        growth_(growth),
        h0_(std::move(h0)),
        grad_(std::move(grad)),
        hess_(std::move(hess)),
        field_(std::move(field)),
        field_dx_(std::move(field_dx)) {}

  std::string name() const override { return name_; }
  int dim() const override { return 1; }

  double h0(const Vec& w) const override { return h0_(w[0], w[1]); }
  Vec grad_h0(const Vec& w) const override { return grad_(w[0], w[1]); }
  Mat hess_h0(const Vec& w) const override { return hess_(w[0], w[1]); }

  Vec3 C(const Vec& w) const override { return field_(w[0]); }
  Mat jac_C(const Vec& w) const override {
    Mat j = Mat::Zero(3, 2);
    if (!flags_.constant_C) j.col(0) = field_dx_(w[0]);
    return j;
  }
  Mat hess_C(const Vec&, int k) const override {
    if (k < 1 || k > 3) throw Error("hess_C: component index must be 1, 2 or 3");
    return Mat::Zero(2, 2); // all built-in fields are affine in x
  }

  bool constant_C() const override { return flags_.constant_C; }
  bool x_only_C() const override { return flags_.x_only_C; }
  bool quadratic_h0() const override { return flags_.quadratic_h0; }
  Eigen::Vector2d growth_exponents() const override { return growth_; }

private:
  std::string name_;
  Flags flags_;
  Eigen::Vector2d growth_;
  std::function<double(double, double)> h0_;
  std::function<Vec(double, double)> grad_;
  std::function<Mat(double, double)> hess_;
  std::function<Vec3(double)> field_;
  std::function<Vec3(double)> field_dx_;
};

double param(const ModelId& id, const std::string& key, double fallback) {
  auto it = id.params.find(key);
  return it == id.params.end() ? fallback : it->second;
}

void reject_unknown_params(const ModelId& id, const std::set<std::string>& known) {
  for (const auto& [key, value] : id.params) {
    (void)value;
    if (!known.contains(key)) {
      throw Error("builtin: model '" + id.name + "' has no parameter '" + key + "'");
    }
  }
}

Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Vec grad2(double gx, double gxi) {
  Vec g(2);
  g << gx, gxi;
  return g;
}

} // namespace

std::vector<std::string> builtin_names() {
  return {"harmonic_const_field", "free_const_field", "inverted_osc",
          "pendulum",             "quartic_perturbed", "stern_gerlach"};
}

std::shared_ptr<const SpinOrbitModel> builtin(const ModelId& id) {
  const auto const_field = [&id] {
    const Vec3 c(param(id, "cx", 0.0), param(id, "cy", 0.0), param(id, "cz", 1.0));
    return c;
  };

  if (id.name == "harmonic_const_field") {
    reject_unknown_params(id, {"cx", "cy", "cz"});
    const Vec3 c = const_field();
    return std::make_shared<BuiltinModel>(
        id.name, Flags{true, true, true}, Eigen::Vector2d(2, 2),
        [](double x, double xi) { return 0.5 * (xi * xi + x * x); },
        [](double x, double xi) { return grad2(x, xi); },
        [](double, double) { return diag2(1, 1); }, [c](double) { return c; },
        [](double) { return Vec3::Zero().eval(); });
  }
  if (id.name == "free_const_field") {
    reject_unknown_params(id, {"cx", "cy", "cz"});
    const Vec3 c = const_field();
    return std::make_shared<BuiltinModel>(
        id.name, Flags{true, true, true}, Eigen::Vector2d(0, 2),
        [](double, double xi) { return 0.5 * xi * xi; },
        [](double, double xi) { return grad2(0, xi); },
        [](double, double) { return diag2(0, 1); }, [c](double) { return c; },
        [](double) { return Vec3::Zero().eval(); });
  }
  if (id.name == "inverted_osc") {
    reject_unknown_params(id, {"cx", "cy", "cz"});
    const Vec3 c = const_field();
    return std::make_shared<BuiltinModel>(
        id.name, Flags{true, true, true}, Eigen::Vector2d(2, 2),
        [](double x, double xi) { return 0.5 * (xi * xi - x * x); },
        [](double x, double xi) { return grad2(-x, xi); },
        [](double, double) { return diag2(-1, 1); }, [c](double) { return c; },
        [](double) { return Vec3::Zero().eval(); });
  }
  if (id.name == "pendulum") {
    reject_unknown_params(id, {"cx", "cy", "cz"});
    const Vec3 c = const_field();
    return std::make_shared<BuiltinModel>(
        id.name, Flags{true, true, false}, Eigen::Vector2d(0, 2),
        [](double x, double xi) { return 0.5 * xi * xi - std::cos(x); },
        [](double x, double xi) { return grad2(std::sin(x), xi); },
        [](double x, double) { return diag2(std::cos(x), 1); }, [c](double) { return c; },
        [](double) { return Vec3::Zero().eval(); });
  }
  if (id.name == "quartic_perturbed") {
    reject_unknown_params(id, {"eps", "c0", "c1"});
    const double eps = param(id, "eps", 0.02);
    const double c0 = param(id, "c0", 1.0);
    const double c1 = param(id, "c1", 0.0);
    return std::make_shared<BuiltinModel>(
        id.name, Flags{c1 == 0.0, true, eps == 0.0}, Eigen::Vector2d(4, 2),
        [eps](double x, double xi) { return 0.5 * (xi * xi + x * x) + eps * x * x * x * x; },
        [eps](double x, double xi) { return grad2(x + 4.0 * eps * x * x * x, xi); },
        [eps](double x, double) { return diag2(1.0 + 12.0 * eps * x * x, 1); },
        [c0, c1](double x) { return Vec3(0, 0, c0 + c1 * x); },
        [c1](double) { return Vec3(0, 0, c1); });
  }
  if (id.name == "stern_gerlach") {
    reject_unknown_params(id, {"b0", "b1"});
    const double b0 = param(id, "b0", 0.0);
    const double b1 = param(id, "b1", 0.5);
    return std::make_shared<BuiltinModel>(
        id.name, Flags{b1 == 0.0, true, true}, Eigen::Vector2d(1, 2),
        [](double, double xi) { return 0.5 * xi * xi; },
        [](double, double xi) { return grad2(0, xi); },
        [](double, double) { return diag2(0, 1); },
        [b0, b1](double x) { return Vec3(0, 0, b0 + b1 * x); },
        [b1](double) { return Vec3(0, 0, b1); });
  }
  throw Error("builtin: unknown model id '" + id.name + "'");
}

} // namespace socs
