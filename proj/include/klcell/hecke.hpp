#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "klcell/affine.hpp"
#include "klcell/laurent.hpp"

namespace klcell {

// Sparse element of the Hecke algebra in the T-tilde basis, indexed over a Ball.
class HeckeElt {
public:
  using TermMap = std::unordered_map<uint32_t, Laurent>;

  HeckeElt() = default;
  static HeckeElt basis(uint32_t i, int gamma_rank) {
    HeckeElt h;
    h.terms_[i] = Laurent::one(gamma_rank);
    return h;
  }

  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  Laurent coeff(uint32_t i) const {
    auto it = terms_.find(i);
    return it == terms_.end() ? Laurent() : it->second;
  }

  void add(uint32_t i, const Laurent& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(i);
    if (it == terms_.end()) {
      terms_.emplace(i, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  HeckeElt& operator+=(const HeckeElt& o) {
    for (const auto& [i, c] : o.terms_) add(i, c);
    return *this;
  }
  HeckeElt& operator-=(const HeckeElt& o) {
    for (const auto& [i, c] : o.terms_) add(i, -c);
    return *this;
  }
  void scale(const Laurent& c) {
    if (c.is_zero()) {
      terms_.clear();
      return;
    }
    for (auto& [i, v] : terms_) v = v * c;
  }

  std::vector<uint32_t> sorted_support() const {
    std::vector<uint32_t> s;
    s.reserve(terms_.size());
    for (const auto& [i, c] : terms_) s.push_back(i);
    std::sort(s.begin(), s.end());
    return s;
  }

  bool operator==(const HeckeElt& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    for (const auto& [i, c] : terms_) {
      auto it = o.terms_.find(i);
      if (it == o.terms_.end() || !(it->second == c)) return false;
    }
    return true;
  }

private:
  TermMap terms_;
};

// Kazhdan-Lusztig table: for every w in the ball with l(w) <= radius, the
// coefficients p~_{y,w} of C_w = sum_y p~_{y,w} T~_y.
class KLTable {
public:
  KLTable(const Ball& ball, long radius, int threads, bool verify_bar);

  long radius;
  using Row = std::vector<std::pair<uint32_t, Laurent>>;  // sorted by index

  const Row& row(uint32_t w) const;
  Laurent kl_coeff(uint32_t y, uint32_t w) const;

  // Delta(z) = -deg p~_{e,z} and its leading integer n_z; nullopt encodes
  // Delta = +infinity (p~_{e,z} = 0, e.g. on a nontrivial omega coset).
  std::optional<std::pair<Gamma, mpz_class>> delta_of(uint32_t z) const;

  bool bar_verified() const { return bar_verified_; }

private:
  const Ball& ball_;
  std::vector<Row> rows_;
  bool bar_verified_ = false;
  friend struct HeckeCtx;
};

// Working context: ball + KL table + memoized derived elements.
struct HeckeCtx {
  std::shared_ptr<const CellDatum> datum;
  std::shared_ptr<const Ball> ball;
  std::unique_ptr<KLTable> kl;
  int threads = 1;

  static std::shared_ptr<HeckeCtx> make(std::shared_ptr<const CellDatum> datum, long ball_radius,
                                        long kl_radius, int threads, bool verify_bar = false);

  int grank() const { return datum->gamma_rank; }
  Laurent q_power(const Gamma& g) const { return Laurent::monomial(g, 1); }
  Laurent xi(int gen) const;

  // elementary T-tilde arithmetic
  HeckeElt basis(uint32_t i) const { return HeckeElt::basis(i, grank()); }
  HeckeElt mul_gen_right(const HeckeElt& h, int g) const;
  HeckeElt mul_gen_left(int g, const HeckeElt& h) const;
  HeckeElt mul_omega_right(const HeckeElt& h, int k) const;
  HeckeElt mul_omega_left(int k, const HeckeElt& h) const;
  HeckeElt mul_basis_right(const HeckeElt& h, uint32_t w) const;  // h * T~_w
  HeckeElt mul_basis_left(uint32_t w, const HeckeElt& h) const;   // T~_w * h
  HeckeElt mul(const HeckeElt& a, const HeckeElt& b) const;
  HeckeElt flat(const HeckeElt& h) const;  // T~_u -> T~_{u^{-1}}
  Laurent tau(const HeckeElt& h) const { return h.coeff(ball->identity()); }

  const HeckeElt& bar_basis(uint32_t w) const;  // bar(T~_w), memoized
  HeckeElt bar(const HeckeElt& h) const;

  // KL basis elements and structure constants C_x C_y = sum h_{x,y,z} C_z
  HeckeElt kl_elt(uint32_t w) const;
  std::map<uint32_t, Laurent> structure_constants(uint32_t x, uint32_t y) const;
  std::map<uint32_t, Laurent> resolve(HeckeElt p) const;
  void verify_kl_conditions(uint32_t w) const;  // throws on violation

  // Bernstein elements and the center
  const HeckeElt& theta(const Vec& x) const;
  const HeckeElt& central(const Vec& x) const;  // S_x, x dominant in the lattice

  // C_{w w0} = E_w C_{w0} and C_{w0 w^{-1}} = C_{w0} F_w for w in U_0
  HeckeElt left_factor(uint32_t w) const;
  HeckeElt right_factor(uint32_t w) const;

  HeckeElt c_w0_explicit() const;  // q_{w0}^{-1} sum_{y in W0} T_y
  const HeckeElt& c_w0_times_central(const Vec& x) const;  // C_{w0 p_x}, memoized

  // Writes P as sum_x c_x C_{w0 p_x}; throws if a remainder survives.
  std::map<Vec, Laurent> resolve_lowest_row(HeckeElt p) const;

  // Xi decomposition: residuals of C_{w1 w0 p_x w2^{-1}} - E_{w1} C_{w0} S_x F_{w2}
  // and of the same element minus C_{w1 w0 w2^{-1}} S_x.  Contract: both zero.
  std::pair<HeckeElt, HeckeElt> xi_residuals(uint32_t b0_idx1, const Vec& x,
                                             uint32_t b0_idx2) const;

  uint32_t b0_ball_index(uint32_t b0_idx) const;

private:
  mutable std::mutex mu_;
  mutable std::unordered_map<uint32_t, HeckeElt> bar_cache_;
  mutable std::map<Vec, HeckeElt> theta_cache_;
  mutable std::map<Vec, HeckeElt> central_cache_;
  mutable std::map<Vec, HeckeElt> cw0px_cache_;
};

// Simple index-range parallel map; f(i) must only touch slot i of its output.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& f);

}  // namespace klcell
