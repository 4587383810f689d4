#include "capeuler/field_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace capeuler {

namespace {

void check_pair(const VectorField2& v) {
  if (v.x.domain.get() != v.y.domain.get())
    throw std::invalid_argument("vector field components on different domains");
  v.x.domain->check_field(v.x);
  v.x.domain->check_field(v.y);
}

void check_same_domain(const VectorField2& v, const VectorField2& w) {
  if (v.domain().get() != w.domain().get())
    throw std::invalid_argument("vector fields on different domains");
}

} // namespace

VectorField2 sample_vector(const DomainPtr& d,
                           const std::function<Eigen::Vector2d(double, double)>& v) {
  InteriorField fx = d->sample([&](double x, double y) { return v(x, y).x(); });
  InteriorField fy = d->sample([&](double x, double y) { return v(x, y).y(); });
  return VectorField2(std::move(fx), std::move(fy));
}

NormalTrace normal_trace(const VectorField2& v) {
  check_pair(v);
  const DomainPtr& d = v.domain();
  const GeometryReport& go = d->outer_geometry();
  Vec out = d->trace_outer(v.x).values.cwiseProduct(go.nx) +
            d->trace_outer(v.y).values.cwiseProduct(go.ny);
  NormalTrace t;
  t.outer = BoundaryScalar(out, d->is_annulus() ? BoundaryTag::outer : BoundaryTag::single);
  if (d->is_annulus()) {
    const GeometryReport& gi = d->inner_geometry();
    Vec in = d->trace_inner(v.x).values.cwiseProduct(gi.nx) +
             d->trace_inner(v.y).values.cwiseProduct(gi.ny);
    t.inner = BoundaryScalar(in, BoundaryTag::inner);
  }
  return t;
}

InteriorField divergence(const VectorField2& v) {
  check_pair(v);
  const DomainPtr& d = v.domain();
  InteriorField dvx = d->dx(v.x);
  InteriorField dvy = d->dy(v.y);
  return InteriorField(v.x.domain, dvx.values + dvy.values);
}

double divergence_residual(const VectorField2& v) {
  // <div v, phi> = oint v.N phi dS - <v, grad phi> for smooth test functions
  check_pair(v);
  const DomainPtr& d = v.domain();
  double vnorm = l2_norm(v);
  if (vnorm == 0.0) return 0.0;
  NormalTrace vn = normal_trace(v);
  double worst = 0.0;
  for (int kx = 0; kx <= 2; ++kx) {
    for (int ky = 0; ky <= 2 - kx; ++ky) {
      InteriorField phi = d->sample([&](double x, double y) {
        return std::pow(x, kx) * std::pow(y, ky) * std::exp(-0.25 * (x * x + y * y));
      });
      auto [px, py] = d->gradient(phi);
      double vol = d->inner_product(v.x, px) + d->inner_product(v.y, py);
      double bnd = integrate_boundary(
          d->outer_curve(), Vec(vn.outer.values.cwiseProduct(d->trace_outer(phi).values)));
      if (d->is_annulus())
        bnd += integrate_boundary(
            d->inner_curve(), Vec(vn.inner->values.cwiseProduct(d->trace_inner(phi).values)));
      double phinorm = std::sqrt(d->inner_product(phi, phi) +
                                 d->inner_product(px, px) + d->inner_product(py, py));
      worst = std::max(worst, std::abs(bnd - vol) / (vnorm * phinorm));
    }
  }
  return worst;
}

InteriorField pressure_bilinear(const VectorField2& v, const VectorField2& w) {
  check_pair(v);
  check_pair(w);
  check_same_domain(v, w);
  const DomainPtr& d = v.domain();
  auto [vxx, vxy] = d->gradient(v.x);
  auto [vyx, vyy] = d->gradient(v.y);
  auto [wxx, wxy] = d->gradient(w.x);
  auto [wyx, wyy] = d->gradient(w.y);
  // tr(Dv Dw) = dx v^x dx w^x + dy v^x dx w^y + dx v^y dy w^x + dy v^y dy w^y
  Mat tr = vxx.values.cwiseProduct(wxx.values) +
           vxy.values.cwiseProduct(wyx.values) +
           vyx.values.cwiseProduct(wxy.values) +
           vyy.values.cwiseProduct(wyy.values);
  InteriorField rhs(v.x.domain, -tr);
  return d->poisson_zero_dirichlet(rhs);
}

VectorField2 curvature_force_J(const DomainPtr& d) {
  InteriorField kh;
  if (d->is_annulus()) {
    BoundaryScalar ko(d->outer_geometry().kappa, BoundaryTag::outer);
    BoundaryScalar ki(d->inner_geometry().kappa, BoundaryTag::inner);
    kh = d->harmonic_extension2(ko, ki);
  } else {
    kh = d->harmonic_extension(BoundaryScalar(d->outer_geometry().kappa));
  }
  auto [gx, gy] = d->gradient(kh);
  return VectorField2(std::move(gx), std::move(gy));
}

VectorField2 op_A(const NormalTrace& wperp, const DomainPtr& d) {
  BoundaryScalar lo = surface_laplacian(d->outer_curve(), wperp.outer);
  InteriorField h;
  if (d->is_annulus()) {
    if (!wperp.inner) throw std::invalid_argument("op_A: annulus needs both traces");
    BoundaryScalar li = surface_laplacian(d->inner_curve(), *wperp.inner);
    h = d->harmonic_extension2(BoundaryScalar(Vec(-lo.values), BoundaryTag::outer),
                               BoundaryScalar(Vec(-li.values), BoundaryTag::inner));
  } else {
    h = d->harmonic_extension(BoundaryScalar(Vec(-lo.values)));
  }
  auto [gx, gy] = d->gradient(h);
  return VectorField2(std::move(gx), std::move(gy));
}

NormalTrace rt_pressure_gradient(const VectorField2& v) {
  check_pair(v);
  const DomainPtr& d = v.domain();
  InteriorField p = pressure_bilinear(v, v);
  NormalTrace t;
  BoundaryScalar dn_out = d->normal_derivative(p, BoundaryTag::outer);
  t.outer = BoundaryScalar(Vec(-dn_out.values),
                           d->is_annulus() ? BoundaryTag::outer : BoundaryTag::single);
  if (d->is_annulus()) {
    BoundaryScalar dn_in = d->normal_derivative(p, BoundaryTag::inner);
    t.inner = BoundaryScalar(Vec(-dn_in.values), BoundaryTag::inner);
  }
  return t;
}

VectorField2 op_R0(const VectorField2& v, const NormalTrace& wperp) {
  const DomainPtr& d = v.domain();
  NormalTrace mg = rt_pressure_gradient(v);
  InteriorField h;
  if (d->is_annulus()) {
    if (!wperp.inner) throw std::invalid_argument("op_R0: annulus needs both traces");
    h = d->harmonic_extension2(
        BoundaryScalar(Vec(mg.outer.values.cwiseProduct(wperp.outer.values)),
                       BoundaryTag::outer),
        BoundaryScalar(Vec(mg.inner->values.cwiseProduct(wperp.inner->values)),
                       BoundaryTag::inner));
  } else {
    h = d->harmonic_extension(
        BoundaryScalar(Vec(mg.outer.values.cwiseProduct(wperp.outer.values))));
  }
  auto [gx, gy] = d->gradient(h);
  return VectorField2(std::move(gx), std::move(gy));
}

InteriorField vorticity(const VectorField2& v) {
  check_pair(v);
  const DomainPtr& d = v.domain();
  InteriorField a = d->dx(v.y);
  InteriorField b = d->dy(v.x);
  return InteriorField(v.x.domain, a.values - b.values);
}

std::pair<VectorField2, InteriorField> hodge_decompose(const VectorField2& u) {
  check_pair(u);
  const DomainPtr& d = u.domain();
  InteriorField div = divergence(u);
  InteriorField p = d->poisson_zero_dirichlet(InteriorField(u.x.domain, Mat(-div.values)));
  auto [px, py] = d->gradient(p);
  VectorField2 v(InteriorField(u.x.domain, u.x.values + px.values),
                 InteriorField(u.x.domain, u.y.values + py.values));
  return {std::move(v), std::move(p)};
}

std::pair<VectorField2, VectorField2> rotational_split(const VectorField2& v) {
  check_pair(v);
  const DomainPtr& d = v.domain();
  NormalTrace vn = normal_trace(v);
  InteriorField phi;
  if (d->is_annulus()) {
    auto [po, pi] = d->dn_inverse2(vn.outer, *vn.inner);
    phi = d->harmonic_extension2(po, pi);
  } else {
    BoundaryScalar p = d->dn_inverse(vn.outer);
    phi = d->harmonic_extension(p);
  }
  auto [gx, gy] = d->gradient(phi);
  VectorField2 vir(std::move(gx), std::move(gy));
  VectorField2 vr(InteriorField(v.x.domain, v.x.values - vir.x.values),
                  InteriorField(v.x.domain, v.y.values - vir.y.values));
  return {std::move(vr), std::move(vir)};
}

VectorField2 operator+(const VectorField2& a, const VectorField2& b) {
  check_same_domain(a, b);
  return VectorField2(InteriorField(a.x.domain, a.x.values + b.x.values),
                      InteriorField(a.x.domain, a.y.values + b.y.values));
}

VectorField2 operator-(const VectorField2& a, const VectorField2& b) {
  check_same_domain(a, b);
  return VectorField2(InteriorField(a.x.domain, a.x.values - b.x.values),
                      InteriorField(a.x.domain, a.y.values - b.y.values));
}

VectorField2 operator*(double c, const VectorField2& a) {
  return VectorField2(InteriorField(a.x.domain, Mat(c * a.x.values)),
                      InteriorField(a.x.domain, Mat(c * a.y.values)));
}

double inner_product(const VectorField2& a, const VectorField2& b) {
  check_same_domain(a, b);
  const DomainPtr& d = a.domain();
  return d->inner_product(a.x, b.x) + d->inner_product(a.y, b.y);
}

double l2_norm(const VectorField2& v) {
  return std::sqrt(std::max(0.0, inner_product(v, v)));
}

} // namespace capeuler
