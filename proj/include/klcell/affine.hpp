#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "klcell/laurent.hpp"
#include "klcell/rep_ring.hpp"
#include "klcell/root_datum.hpp"

namespace klcell {

enum class Mode { Extended, NonExtended };

// Element of the (extended) affine Weyl group in canonical pair form
// p_x * u: translation by x followed by the finite part u.
struct Elt {
  Vec x;
  uint16_t u = 0;

  bool operator==(const Elt& o) const { return u == o.u && x == o.x; }
  bool operator<(const Elt& o) const {
    if (!(x == o.x)) return x < o.x;
    return u < o.u;
  }
};

struct EltHash {
  size_t operator()(const Elt& e) const {
    size_t h = VecHash{}(e.x);
    h ^= (static_cast<size_t>(e.u) + 0x9e3779b97f4a7c15ull) + (h << 6) + (h >> 2);
    return h;
  }
};

// Group datum: root system, lattice mode, weight function.  Immutable after
// construction; everything here is safe to share across threads.
class CellDatum {
public:
  struct Config {
    std::string type;
    Mode mode = Mode::Extended;
    int gamma_rank = 1;
    // generator index (0 = affine node, 1..rank finite) -> exponent vector
    std::map<int, std::vector<int32_t>> weights;
  };
  static std::shared_ptr<const CellDatum> make(const Config& cfg);

  std::shared_ptr<const RootDatum> rd;
  std::shared_ptr<RepRing> rep;
  Mode mode = Mode::Extended;
  int gamma_rank = 1;

  int ngens() const { return rd->rank + 1; }               // s_0 .. s_rank
  std::vector<Gamma> weight_of_gen;                        // L(s_i)
  std::vector<int> class_of_gen;                           // conjugacy class ids
  std::vector<std::vector<int>> coxeter_m;                 // m(s_i, s_j); 0 = infinity

  std::vector<Elt> omega;                                  // length-zero elements, omega[0] = e
  std::vector<std::vector<int>> omega_gen_perm;            // pi s_i pi^{-1} = s_{perm[i]}
  std::vector<int> omega_inverse;                          // index of pi^{-1}

  std::vector<int32_t> box_levels;                         // c_i: box is 0 < <v,a_i^vee> < c_i
  int sample_denominator = 0;                              // h + 1

  // --- group operations -------------------------------------------------
  Elt identity() const;
  Elt gen(int i) const;                                    // simple reflection s_i
  Elt translation(const Vec& x) const;                     // p_x (validated against the lattice)
  Elt mul(const Elt& a, const Elt& b) const;
  Elt inv(const Elt& a) const;
  bool is_translation(const Elt& a) const { return a.u == 0; }

  long length(const Elt& w) const;
  Gamma weight_length(const Elt& w) const;
  bool is_left_descent(int g, const Elt& w) const;
  bool is_right_descent(int g, const Elt& w) const;
  std::vector<int> descents(const Elt& w, bool left) const;
  int first_left_descent(const Elt& w) const;              // -1 for length 0

  // Omega decomposition w = omega[k] * w' with w' in W'.
  int omega_part(const Elt& w) const;
  Elt strip_omega(const Elt& w) const;
  bool in_wprime(const Elt& w) const;

  // Reduced word: (omega index, generator letters); deterministic
  // (lexicographically least left descent at each step).
  std::pair<int, std::vector<int>> reduced_word(const Elt& w) const;
  Elt from_word(int omega_idx, const std::vector<int>& letters) const;

  // Bruhat order via the lifting property (elements of W with equal omega part).
  bool bruhat_leq(const Elt& y, const Elt& w) const;

  // --- alcove membership (box and dominant quarter) ----------------------
  // Both tests strip the omega part and look at the alcove of w'^{-1}.
  bool in_u0(const Elt& w) const;
  bool in_b0(const Elt& w) const;

  const std::vector<Elt>& b0_elements() const { return b0_; }
  long max_b0_length() const { return max_b0_len_; }
  Elt longest_finite() const;                              // w_0 as group element
  long l_w0() const { return rd->w0group.length[rd->w0group.w0]; }
  Gamma weight_w0() const;                                 // L(w_0)

  // Unique factorization z = w1 * w0 * p_x * w2^{-1} with w1, w2 in B_0 and
  // x dominant (x in Q^+ in the non-extended mode); nullopt iff z is not in
  // the lowest cell.
  struct CellFactor {
    uint32_t b1;  // indices into b0_elements()
    uint32_t b2;
    Vec x;
  };
  std::optional<CellFactor> lowest_cell_factorize(const Elt& z) const;
  bool in_lowest_cell(const Elt& z) const { return lowest_cell_factorize(z).has_value(); }

  // Distinguished involutions {w w0 w^{-1} | w in B_0}, deterministic order.
  std::vector<Elt> distinguished_involutions() const;

  // Lattice membership for translations: P in extended mode, Q otherwise.
  bool in_lattice(const Vec& x) const;
  bool dominant_lattice(const Vec& x) const { return rd->dominant(x) && in_lattice(x); }

  std::string describe_gen(int g) const;

private:
  CellDatum() = default;
  void build(const Config& cfg);

  std::vector<Elt> b0_;
  long max_b0_len_ = 0;
  uint16_t theta_reflection_ = 0;  // finite part of s_0
  Vec theta_translation_;          // translation part of s_0
  Vec scaled_alcove_point(const Elt& w) const;  // (h+1) * image of the alcove point
};

// Indexed ball {w : l(w) <= radius} with multiplication tables; the working
// universe for Hecke arithmetic.
class Ball {
public:
  Ball(std::shared_ptr<const CellDatum> datum, long radius);

  std::shared_ptr<const CellDatum> datum;
  long radius;
  static constexpr uint32_t npos = UINT32_MAX;

  size_t size() const { return elems_.size(); }
  const Elt& elt(uint32_t i) const { return elems_[i]; }
  uint32_t index_of(const Elt& e) const;                  // npos if absent
  uint32_t require(const Elt& e) const;                   // truncation error if absent

  long length(uint32_t i) const { return len_[i]; }
  const Gamma& wlength(uint32_t i) const { return wlen_[i]; }
  uint32_t right_mul(uint32_t i, int g) const { return right_[static_cast<size_t>(g)][i]; }
  uint32_t left_mul(uint32_t i, int g) const { return left_[static_cast<size_t>(g)][i]; }
  uint32_t omega_right(uint32_t i, int k) const { return oright_[static_cast<size_t>(k)][i]; }
  uint32_t omega_left(uint32_t i, int k) const { return oleft_[static_cast<size_t>(k)][i]; }
  uint32_t inverse(uint32_t i) const { return inv_[i]; }
  int omega_part(uint32_t i) const { return opart_[i]; }
  uint32_t strip_omega(uint32_t i) const { return strip_[i]; }
  bool in_wprime(uint32_t i) const { return opart_[i] == 0; }
  int first_left_descent(uint32_t i) const { return fld_[i]; }
  const std::vector<int>& word(uint32_t i) const { return word_[i]; }  // right word of strip
  uint32_t identity() const { return e_; }
  uint32_t w0() const { return w0_; }

  bool bruhat_leq(uint32_t y, uint32_t w) const;
  bool in_u0(uint32_t i) const { return u0_[i]; }
  bool in_b0(uint32_t i) const { return b0flag_[i]; }
  bool in_lowest_cell(uint32_t i) const { return c0_[i].has_value(); }
  const std::optional<CellDatum::CellFactor>& cell_factor(uint32_t i) const { return c0_[i]; }

  std::vector<uint32_t> elements_up_to(long l) const;
  std::vector<uint32_t> lowest_cell_elements(long max_len) const;

private:
  std::vector<Elt> elems_;
  std::unordered_map<Elt, uint32_t, EltHash> index_;
  std::vector<long> len_;
  std::vector<Gamma> wlen_;
  std::vector<std::vector<uint32_t>> right_, left_, oright_, oleft_;
  std::vector<uint32_t> inv_;
  std::vector<int> opart_;
  std::vector<uint32_t> strip_;
  std::vector<int> fld_;
  std::vector<std::vector<int>> word_;
  std::vector<uint8_t> u0_, b0flag_;
  std::vector<std::optional<CellDatum::CellFactor>> c0_;
  uint32_t e_ = 0, w0_ = 0;

  // Bruhat table over W'-elements only
  std::vector<uint32_t> wprime_rank_;
  std::vector<uint32_t> wprime_list_;
  size_t bruhat_words_ = 0;
  std::vector<uint64_t> bruhat_bits_;
};

}  // namespace klcell
