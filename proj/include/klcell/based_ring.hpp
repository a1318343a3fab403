#pragma once

#include <map>

#include "klcell/cells.hpp"
#include "klcell/hecke.hpp"

namespace klcell {

// Element of the representation-ring lattice in the S basis: finitely
// supported map dominant weight -> integer.
using ZElem = std::map<Vec, mpz_class>;

ZElem z_mul(const RepRing& rep, const ZElem& a, const ZElem& b);
ZElem z_one(int rank);

// The based ring of the lowest cell in its matrix model: a B0 x B0 matrix
// over the representation-ring lattice.  t_{w1 w0 p_x w2^{-1}} sits at entry
// (w1, w2) with value S_x.
struct J0Elem {
  size_t nb0 = 0;
  std::vector<ZElem> entries;  // row-major

  static J0Elem zero(size_t nb0) {
    J0Elem j;
    j.nb0 = nb0;
    j.entries.resize(nb0 * nb0);
    return j;
  }
  ZElem& at(size_t i, size_t j) { return entries[i * nb0 + j]; }
  const ZElem& at(size_t i, size_t j) const { return entries[i * nb0 + j]; }
  bool operator==(const J0Elem& o) const { return nb0 == o.nb0 && entries == o.entries; }
  J0Elem& operator+=(const J0Elem& o);
};

J0Elem j_unit(const CellDatum& d);
J0Elem j_basis(const CellDatum& d, uint32_t b1, const Vec& x, uint32_t b2);  // one t element
J0Elem j_mul(const CellDatum& d, const J0Elem& a, const J0Elem& b);

// t-sum view of a matrix element, for output: (b1, x, b2, coeff).
std::vector<std::tuple<uint32_t, Vec, uint32_t, mpz_class>> j_terms(const J0Elem& j);

// Predicted gamma_{x,y,z} from the factorizations (tensor multiplicities);
// domain error when an argument is outside the lowest cell.
mpz_class gamma_predicted(const CellDatum& d, const Elt& x, const Elt& y, const Elt& z);

// phi: H -> Z[Gamma] (x) J0, phi(C_x) = sum_{d, z} h_{x,d,z} t_z.
// Entries carry Laurent coefficients on each S_x.
struct JGammaElem {
  size_t nb0 = 0;
  std::vector<std::map<Vec, Laurent>> entries;

  static JGammaElem zero(size_t nb0) {
    JGammaElem j;
    j.nb0 = nb0;
    j.entries.resize(nb0 * nb0);
    return j;
  }
  std::map<Vec, Laurent>& at(size_t i, size_t j) { return entries[i * nb0 + j]; }
  const std::map<Vec, Laurent>& at(size_t i, size_t j) const { return entries[i * nb0 + j]; }
  bool operator==(const JGammaElem& o) const;
  JGammaElem& operator+=(const JGammaElem& o);
  void scale(const Laurent& c);
};

JGammaElem jg_unit(const HeckeCtx& ctx);
JGammaElem jg_mul(const HeckeCtx& ctx, const JGammaElem& a, const JGammaElem& b);
JGammaElem phi_image(const HeckeCtx& ctx, uint32_t x);
// phi extended linearly to a resolved C-expansion.
JGammaElem phi_image_of(const HeckeCtx& ctx, const std::map<uint32_t, Laurent>& cexp);

// Linear independence of {phi(C_w) : l(w) <= radius} over Frac(Z[Gamma]),
// certified by exact rank at rational specializations (rank can only drop
// under specialization, so a full specialized rank is a proof).
struct RankReport {
  size_t columns = 0;
  size_t rank = 0;
  bool full = false;
};
RankReport phi_injectivity(const HeckeCtx& ctx, long radius);

}  // namespace klcell
