#pragma once

#include <gmpxx.h>

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "klcell/error.hpp"

namespace klcell {

// The exponent group: Z^rank with the lexicographic total order.  Rank is
// fixed per configuration (1 for equal parameters, one coordinate per
// conjugacy class of simple reflections in the generic case).
constexpr int kMaxGammaRank = 4;

struct Gamma {
  std::array<int32_t, kMaxGammaRank> c{};
  uint8_t rank = 1;

  static Gamma zero(int rank) {
    Gamma g;
    g.rank = static_cast<uint8_t>(rank);
    return g;
  }
  static Gamma unit(int rank, int i, int32_t v = 1) {
    Gamma g = zero(rank);
    g.c[static_cast<size_t>(i)] = v;
    return g;
  }

  bool is_zero() const {
    for (int i = 0; i < rank; ++i)
      if (c[static_cast<size_t>(i)] != 0) return false;
    return true;
  }

  Gamma operator+(const Gamma& o) const {
    check_rank(o);
    Gamma r = *this;
    for (int i = 0; i < rank; ++i) r.c[static_cast<size_t>(i)] += o.c[static_cast<size_t>(i)];
    return r;
  }
  Gamma operator-(const Gamma& o) const {
    check_rank(o);
    Gamma r = *this;
    for (int i = 0; i < rank; ++i) r.c[static_cast<size_t>(i)] -= o.c[static_cast<size_t>(i)];
    return r;
  }
  Gamma operator-() const {
    Gamma r = *this;
    for (int i = 0; i < rank; ++i) r.c[static_cast<size_t>(i)] = -r.c[static_cast<size_t>(i)];
    return r;
  }
  Gamma& operator+=(const Gamma& o) {
    check_rank(o);
    for (int i = 0; i < rank; ++i) c[static_cast<size_t>(i)] += o.c[static_cast<size_t>(i)];
    return *this;
  }

  // Lexicographic order; total and translation invariant.
  std::strong_ordering operator<=>(const Gamma& o) const {
    check_rank(o);
    for (int i = 0; i < rank; ++i) {
      if (c[static_cast<size_t>(i)] != o.c[static_cast<size_t>(i)])
        return c[static_cast<size_t>(i)] <=> o.c[static_cast<size_t>(i)];
    }
    return std::strong_ordering::equal;
  }
  bool operator==(const Gamma& o) const { return (*this <=> o) == std::strong_ordering::equal; }

  bool positive() const { return *this > zero(rank); }
  bool negative() const { return *this < zero(rank); }

  std::string str() const;

private:
  void check_rank(const Gamma& o) const {
    if (rank != o.rank) fail_config("exponent rank mismatch");
  }
};

// An element of Z[Gamma], written sum a_g q^g.  Terms are kept sorted by
// ascending exponent with no zero coefficients.
class Laurent {
public:
  using Term = std::pair<Gamma, mpz_class>;

  Laurent() = default;
  static Laurent zero() { return Laurent(); }
  static Laurent monomial(const Gamma& g, mpz_class coeff);
  static Laurent integer(int rank, long v) { return monomial(Gamma::zero(rank), mpz_class(v)); }
  static Laurent one(int rank) { return integer(rank, 1); }

  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }

  // deg(sum a_g q^g) = max{g | a_g != 0}; nullopt is the explicit -infinity
  // marker for the zero element.
  std::optional<Gamma> degree() const {
    if (terms_.empty()) return std::nullopt;
    return terms_.back().first;
  }
  const mpz_class& leading_coeff() const { return terms_.back().second; }
  mpz_class coeff_at(const Gamma& g) const;

  Laurent operator+(const Laurent& o) const;
  Laurent operator-(const Laurent& o) const;
  Laurent operator*(const Laurent& o) const;
  Laurent operator-() const;
  Laurent& operator+=(const Laurent& o) { return *this = *this + o; }
  Laurent& operator-=(const Laurent& o) { return *this = *this - o; }

  void add_term(const Gamma& g, const mpz_class& coeff);   // in-place merge of one term
  void scale(const mpz_class& c);
  Laurent shifted(const Gamma& g) const;                   // multiply by q^g

  // q^g -> q^{-g} on every term; a ring involution.
  Laurent bar() const;

  // True iff every exponent is < 0 (vacuously true for 0).
  bool strictly_negative() const {
    return terms_.empty() || terms_.back().first.negative();
  }
  // The part with exponents >= 0, completed to a bar-invariant element:
  // sum_{g>0} a_g (q^g + q^{-g}) + a_0.  Used by the KL correction step.
  Laurent bar_symmetric_head() const;

  bool operator==(const Laurent& o) const { return terms_ == o.terms_; }

  std::string str() const;  // human-readable, deterministic

private:
  std::vector<Term> terms_;
  void normalize(std::vector<Term>&& raw);
};

}  // namespace klcell
