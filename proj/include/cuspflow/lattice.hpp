#ifndef CUSPFLOW_LATTICE_HPP
#define CUSPFLOW_LATTICE_HPP

#include <utility>

#include "cuspflow/numeric.hpp"

namespace cuspflow {

Rational dot(const Vec3Q& a, const Vec3Q& b);
Rational norm2(const Vec3Q& a);
Vec3Q cross(const Vec3Q& u, const Vec3Q& v);
Vec3Z cross(const Vec3Z& u, const Vec3Z& v);
Rational determinant(const Mat3Q& m);
/// |det(basis)|, exact.
Rational covolume(const Mat3Q& basis);
/// (m^T)^{-1}; throws PreconditionError when m is singular.
Mat3Q inverse_transpose(const Mat3Q& m);
Vec3Q combine(const Vec3Z& coeffs, const Mat3Q& basis);

/// A point of SL3(Z)\SL3(R) given by an exact rational basis with |det| = 1.
class UnimodularLattice {
 public:
  /// Throws NotUnimodularError unless |det(basis)| = 1 exactly.
  explicit UnimodularLattice(Mat3Q basis);
  static UnimodularLattice identity();

  const Mat3Q& basis() const { return basis_; }
  const Vec3Q& row(int i) const { return basis_[static_cast<std::size_t>(i)]; }
  /// +1 or -1.
  int det_sign() const { return det_sign_; }
  /// Basis (basis^T)^{-1}; dual().dual() reproduces this basis exactly.
  UnimodularLattice dual() const;
  Vec3Q ambient(const Vec3Z& coeffs) const { return combine(coeffs, basis_); }

  friend bool operator==(const UnimodularLattice& a, const UnimodularLattice& b) { return a.basis_ == b.basis_; }

 private:
  Mat3Q basis_;
  int det_sign_ = 1;
};

/// A lattice element by its integer coefficients.
struct LatticeVector {
  Vec3Z coeffs;
  Vec3Q ambient;

  static LatticeVector from_coeffs(const UnimodularLattice& x, const Vec3Z& coeffs);
  bool primitive() const { return gcd3(coeffs) == 1; }
};

/// A rational plane, stored as its wedge u^v and the primitive dual coefficients k.
///
/// The plane is {c . basis : c . k = 0}; its generators u, v satisfy
/// coeff(u) x coeff(v) = k and u^v = det(basis) * (k . dual basis).
struct PlaneWedge {
  Vec3Q wedge;
  Vec3Z dual_coeffs;

  /// Throws PreconditionError unless k is primitive.
  static PlaneWedge from_dual_coeffs(const UnimodularLattice& x, const Vec3Z& k);
  Rational covolume_squared() const { return norm2(wedge); }
  /// Integer coefficient vectors of a basis of the plane's sublattice.
  std::pair<Vec3Z, Vec3Z> generator_coeffs() const;
  std::pair<LatticeVector, LatticeVector> generators(const UnimodularLattice& x) const;
};

/// Integer c, c' with c x c' = k, for primitive k.
std::pair<Vec3Z, Vec3Z> kernel_basis(const Vec3Z& k);

}  // namespace cuspflow

#endif
