#include "cuspflow/lattice.hpp"

namespace cuspflow {

Rational dot(const Vec3Q& a, const Vec3Q& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Rational norm2(const Vec3Q& a) { return dot(a, a); }

Vec3Q cross(const Vec3Q& u, const Vec3Q& v) {
  return {Rational(u[1] * v[2] - u[2] * v[1]), Rational(u[2] * v[0] - u[0] * v[2]), Rational(u[0] * v[1] - u[1] * v[0])};
}

Vec3Z cross(const Vec3Z& u, const Vec3Z& v) {
  return {Integer(u[1] * v[2] - u[2] * v[1]), Integer(u[2] * v[0] - u[0] * v[2]), Integer(u[0] * v[1] - u[1] * v[0])};
}

Rational determinant(const Mat3Q& m) { return dot(m[0], cross(m[1], m[2])); }

Rational covolume(const Mat3Q& basis) { return abs(determinant(basis)); }

Mat3Q inverse_transpose(const Mat3Q& m) {
  Rational det = determinant(m);
  if (det == 0) throw PreconditionError("singular matrix has no inverse");
  // Rows of (m^T)^{-1} are the cross products of the other two rows over det.
  Mat3Q out;
  for (int i = 0; i < 3; ++i) {
    Vec3Q c = cross(m[static_cast<std::size_t>((i + 1) % 3)], m[static_cast<std::size_t>((i + 2) % 3)]);
    for (auto& e : c) e /= det;
    out[static_cast<std::size_t>(i)] = c;
  }
  return out;
}

Vec3Q combine(const Vec3Z& coeffs, const Mat3Q& basis) {
  Vec3Q out{Rational(0), Rational(0), Rational(0)};
  for (std::size_t i = 0; i < 3; ++i) {
    if (coeffs[i] == 0) continue;
    Rational c(coeffs[i]);
    for (std::size_t j = 0; j < 3; ++j) out[j] += c * basis[i][j];
  }
  return out;
}

UnimodularLattice::UnimodularLattice(Mat3Q basis) : basis_(std::move(basis)) {
  for (auto& r : basis_) {
    for (auto& e : r) e.canonicalize();
  }
  Rational det = determinant(basis_);
  if (det == 0) throw NotUnimodularError("basis rows are linearly dependent");
  if (abs(det) != 1) throw NotUnimodularError("basis determinant is " + format_rational(det) + ", expected +-1");
  det_sign_ = det > 0 ? 1 : -1;
}

UnimodularLattice UnimodularLattice::identity() {
  Mat3Q m;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) m[i][j] = i == j ? 1 : 0;
  }
  return UnimodularLattice(m);
}

UnimodularLattice UnimodularLattice::dual() const { return UnimodularLattice(inverse_transpose(basis_)); }

LatticeVector LatticeVector::from_coeffs(const UnimodularLattice& x, const Vec3Z& coeffs) {
  return {coeffs, x.ambient(coeffs)};
}

std::pair<Vec3Z, Vec3Z> kernel_basis(const Vec3Z& k) {
  Integer g;
  Integer x;
  Integer y;
  mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), k[0].get_mpz_t(), k[1].get_mpz_t());
  if (g == 0) return {Vec3Z{Integer(1), Integer(0), Integer(0)}, Vec3Z{Integer(0), k[2], Integer(0)}};
  Integer a = k[0] / g;
  Integer b = k[1] / g;
  // (-b, a, 0) x (-k3 x, -k3 y, g) = (a g, b g, k3 (a x + b y)) = k.
  Vec3Z c{Integer(-b), a, Integer(0)};
  Vec3Z d{Integer(-k[2] * x), Integer(-k[2] * y), g};
  return {c, d};
}

PlaneWedge PlaneWedge::from_dual_coeffs(const UnimodularLattice& x, const Vec3Z& k) {
  if (gcd3(k) != 1) throw PreconditionError("dual coefficients of a plane must be primitive");
  auto [c, d] = kernel_basis(k);
  return {cross(x.ambient(c), x.ambient(d)), k};
}

std::pair<Vec3Z, Vec3Z> PlaneWedge::generator_coeffs() const { return kernel_basis(dual_coeffs); }

std::pair<LatticeVector, LatticeVector> PlaneWedge::generators(const UnimodularLattice& x) const {
  auto [c, d] = generator_coeffs();
  return {LatticeVector::from_coeffs(x, c), LatticeVector::from_coeffs(x, d)};
}

}  // namespace cuspflow
