#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "klcell/root_datum.hpp"

namespace klcell {

// Weight multiplicities, tensor product multiplicities and dimensions for the
// simply connected group attached to a root datum.  All arithmetic is exact;
// query results are memoized behind a lock so concurrent readers are safe.
class RepRing {
public:
  explicit RepRing(std::shared_ptr<const RootDatum> rd) : rd_(std::move(rd)) {}

  using WeightMap = std::map<Vec, long>;  // weight (omega coords) -> multiplicity

  // Full weight system of V(x), x dominant.
  const WeightMap& weight_system(const Vec& x) const;

  // d(x', x): dimension of the x'-weight space of V(x); x' arbitrary.
  long weight_multiplicity(const Vec& xp, const Vec& x) const;

  // Decomposition of V(x) (x) V(x') into irreducibles.
  const WeightMap& tensor_decomposition(const Vec& x, const Vec& xp) const;

  // m(x, x', x''): multiplicity of V(x'') in V(x) (x) V(x').
  long tensor_multiplicity(const Vec& x, const Vec& xp, const Vec& xpp) const;

  mpz_class dim(const Vec& x) const;  // Weyl dimension formula

  const RootDatum& datum() const { return *rd_; }

private:
  std::shared_ptr<const RootDatum> rd_;
  mutable std::mutex mu_;
  mutable std::map<Vec, std::unique_ptr<WeightMap>> weights_cache_;
  mutable std::map<std::pair<Vec, Vec>, std::unique_ptr<WeightMap>> tensor_cache_;

  std::unique_ptr<WeightMap> compute_weights(const Vec& x) const;
  std::unique_ptr<WeightMap> compute_tensor(const Vec& x, const Vec& xp) const;
};

}  // namespace klcell
