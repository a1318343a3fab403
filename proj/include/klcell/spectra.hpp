#pragma once

#include <optional>
#include <string>
#include <vector>

#include "klcell/based_ring.hpp"
#include "klcell/hecke.hpp"

namespace klcell {

// Exact coefficient field for specializations: the rationals (p = 0) or a
// prime field F_p.
class Field {
public:
  explicit Field(long p = 0);
  long characteristic() const { return p_; }

  struct V {
    mpq_class q;  // p == 0
    long r = 0;   // p != 0, in [0, p)
  };

  V zero() const { return V{}; }
  V one() const { return from_int(1); }
  V from_int(const mpz_class& n) const;
  V from_rational(const mpq_class& x) const;  // denominator must be a unit
  V add(const V& a, const V& b) const;
  V sub(const V& a, const V& b) const;
  V mul(const V& a, const V& b) const;
  V neg(const V& a) const;
  V inv(const V& a) const;
  V pow(const V& a, long e) const;  // negative e inverts
  bool is_zero(const V& a) const;
  bool eq(const V& a, const V& b) const { return is_zero(sub(a, b)); }
  std::string str(const V& a) const;

private:
  long p_;
};

// Ring map Z[Gamma] -> k given by nonzero values on the coordinate generators.
struct Specialization {
  Field field;
  std::vector<Field::V> q_images;  // one per Gamma coordinate

  Field::V eval(const Laurent& a) const;
};

// Rational (or F_p) torus point in coordinates dual to the fundamental
// weights; all coordinates nonzero.
struct TorusPoint {
  std::vector<Field::V> t;
};

// Element of Z[Gamma] (x) Z_Z in the S basis.
using ZGElem = std::map<Vec, Laurent>;

// chi_x(t) = sum_{x'} d(x',x) t^{x'}
Field::V character_eval(const RepRing& rep, const Field& f, const Vec& x, const TorusPoint& t);

// lambda_{spec,t} applied to an S-basis element.
Field::V eval_central(const RepRing& rep, const Specialization& spec, const TorusPoint& t,
                      const ZGElem& z);

// Parabolic subsets are bitmasks over the finite generators 1..rank
// (bit i-1 = generator s_i).
Laurent zeta_poly(const CellDatum& d, uint32_t subset);  // h_{w_I,w_I,w_I}, closed form

// Working context for the representation-theoretic criteria.  The underlying
// Hecke context is sized so that every needed product resolves exactly.
struct SpectraCtx {
  std::shared_ptr<HeckeCtx> hecke;
  std::vector<ZGElem> matrix;  // B0 x B0 entries m_{w1,w2}, row-major
  std::optional<ZGElem> det_symbolic;

  const CellDatum& datum() const { return *hecke->datum; }
  size_t nb0() const { return datum().b0_elements().size(); }
};

// Builds the context: chooses ball/KL radii, computes the matrix, and the
// symbolic determinant when the matrix order is at most `symbolic_det_max`.
SpectraCtx make_spectra_ctx(std::shared_ptr<const CellDatum> datum, int threads,
                            size_t symbolic_det_max = 8);

// alpha_I = sum_x h_{w0, x_I w_{I'}, w0 p_x} S_x in S-coordinates.
ZGElem alpha_poly(const HeckeCtx& ctx, uint32_t subset);

// Delta_k = {I : zeta_{I'} != 0 but zeta_{I' u {i}} = 0 for all i in I}.
std::vector<uint32_t> delta_set(const CellDatum& d, const Specialization& spec);

bool attached_simple_test(const SpectraCtx& sctx, const Specialization& spec,
                          const TorusPoint& t);

// Exact rank of (lambda(m_{w1,w2})) over the specialization field.
size_t dim_rho(const SpectraCtx& sctx, const Specialization& spec, const TorusPoint& t);

Field::V det_at_point(const SpectraCtx& sctx, const Specialization& spec, const TorusPoint& t);

struct IsoVerdict {
  bool iso = false;
  std::string det_value;
  size_t dim = 0;
};
IsoVerdict phi_p_iso(const SpectraCtx& sctx, const Specialization& spec, const TorusPoint& t);

// Division-free determinant of an n x n ZGElem matrix (subset dynamic
// programming over columns).
ZGElem zg_det(const RepRing& rep, const std::vector<ZGElem>& entries, size_t n);

}  // namespace klcell
