#include "klcell/based_ring.hpp"

#include <algorithm>

namespace klcell {

ZElem z_one(int rank) {
  ZElem z;
  z[Vec::zero(rank)] = 1;
  return z;
}

ZElem z_mul(const RepRing& rep, const ZElem& a, const ZElem& b) {
  ZElem out;
  for (const auto& [x, ca] : a) {
    for (const auto& [y, cb] : b) {
      mpz_class c = ca * cb;
      for (const auto& [z, m] : rep.tensor_decomposition(x, y)) {
        auto it = out.find(z);
        if (it == out.end()) out.emplace(z, c * m);
        else {
          it->second += c * m;
          if (it->second == 0) out.erase(it);
        }
      }
    }
  }
  return out;
}

J0Elem& J0Elem::operator+=(const J0Elem& o) {
  for (size_t i = 0; i < entries.size(); ++i) {
    for (const auto& [x, c] : o.entries[i]) {
      auto it = entries[i].find(x);
      if (it == entries[i].end()) entries[i].emplace(x, c);
      else {
        it->second += c;
        if (it->second == 0) entries[i].erase(it);
      }
    }
  }
  return *this;
}

J0Elem j_unit(const CellDatum& d) {
  size_t n = d.b0_elements().size();
  J0Elem j = J0Elem::zero(n);
  for (size_t i = 0; i < n; ++i) j.at(i, i) = z_one(d.rd->rank);
  return j;
}

J0Elem j_basis(const CellDatum& d, uint32_t b1, const Vec& x, uint32_t b2) {
  if (!d.dominant_lattice(x)) fail_domain("t-basis label needs a dominant lattice weight");
  J0Elem j = J0Elem::zero(d.b0_elements().size());
  j.at(b1, b2)[x] = 1;
  return j;
}

J0Elem j_mul(const CellDatum& d, const J0Elem& a, const J0Elem& b) {
  if (a.nb0 != b.nb0) fail_domain("matrix size mismatch");
  J0Elem out = J0Elem::zero(a.nb0);
  for (size_t i = 0; i < a.nb0; ++i)
    for (size_t k = 0; k < a.nb0; ++k) {
      if (a.at(i, k).empty()) continue;
      for (size_t j = 0; j < a.nb0; ++j) {
        if (b.at(k, j).empty()) continue;
        ZElem prod = z_mul(*d.rep, a.at(i, k), b.at(k, j));
        auto& cell = out.at(i, j);
        for (const auto& [x, c] : prod) {
          auto it = cell.find(x);
          if (it == cell.end()) cell.emplace(x, c);
          else {
            it->second += c;
            if (it->second == 0) cell.erase(it);
          }
        }
      }
    }
  return out;
}

std::vector<std::tuple<uint32_t, Vec, uint32_t, mpz_class>> j_terms(const J0Elem& j) {
  std::vector<std::tuple<uint32_t, Vec, uint32_t, mpz_class>> out;
  for (size_t i = 0; i < j.nb0; ++i)
    for (size_t k = 0; k < j.nb0; ++k)
      for (const auto& [x, c] : j.at(i, k))
        out.emplace_back(static_cast<uint32_t>(i), x, static_cast<uint32_t>(k), c);
  return out;
}

mpz_class gamma_predicted(const CellDatum& d, const Elt& x, const Elt& y, const Elt& z) {
  auto fx = d.lowest_cell_factorize(x);
  auto fy = d.lowest_cell_factorize(y);
  auto fz = d.lowest_cell_factorize(d.inv(z));
  if (!fx || !fy || !fz) fail_domain("gamma is defined on the lowest cell");
  if (fx->b2 != fy->b1 || fy->b2 != fz->b2 || fz->b1 != fx->b1) return mpz_class(0);
  return mpz_class(d.rep->tensor_multiplicity(fx->x, fy->x, fz->x));
}

bool JGammaElem::operator==(const JGammaElem& o) const {
  return nb0 == o.nb0 && entries == o.entries;
}

JGammaElem& JGammaElem::operator+=(const JGammaElem& o) {
  for (size_t i = 0; i < entries.size(); ++i) {
    for (const auto& [x, c] : o.entries[i]) {
      auto it = entries[i].find(x);
      if (it == entries[i].end()) entries[i].emplace(x, c);
      else {
        it->second += c;
        if (it->second.is_zero()) entries[i].erase(it);
      }
    }
  }
  return *this;
}

void JGammaElem::scale(const Laurent& c) {
  for (auto& e : entries) {
    if (c.is_zero()) {
      e.clear();
      continue;
    }
    for (auto& [x, v] : e) v = v * c;
  }
}

JGammaElem jg_unit(const HeckeCtx& ctx) {
  size_t n = ctx.datum->b0_elements().size();
  JGammaElem j = JGammaElem::zero(n);
  Vec zero = Vec::zero(ctx.datum->rd->rank);
  for (size_t i = 0; i < n; ++i) j.at(i, i)[zero] = Laurent::one(ctx.grank());
  return j;
}

JGammaElem jg_mul(const HeckeCtx& ctx, const JGammaElem& a, const JGammaElem& b) {
  if (a.nb0 != b.nb0) fail_domain("matrix size mismatch");
  const RepRing& rep = *ctx.datum->rep;
  JGammaElem out = JGammaElem::zero(a.nb0);
  for (size_t i = 0; i < a.nb0; ++i)
    for (size_t k = 0; k < a.nb0; ++k) {
      if (a.at(i, k).empty()) continue;
      for (size_t j = 0; j < a.nb0; ++j) {
        if (b.at(k, j).empty()) continue;
        auto& cell = out.at(i, j);
        for (const auto& [x, ca] : a.at(i, k))
          for (const auto& [y, cb] : b.at(k, j)) {
            Laurent c = ca * cb;
            for (const auto& [z, m] : rep.tensor_decomposition(x, y)) {
              Laurent t = c;
              t.scale(mpz_class(m));
              auto it = cell.find(z);
              if (it == cell.end()) cell.emplace(z, std::move(t));
              else {
                it->second += t;
                if (it->second.is_zero()) cell.erase(it);
              }
            }
          }
      }
    }
  return out;
}

JGammaElem phi_image(const HeckeCtx& ctx, uint32_t x) {
  const Ball& ball = *ctx.ball;
  size_t n = ctx.datum->b0_elements().size();
  JGammaElem out = JGammaElem::zero(n);
  for (uint32_t d : distinguished_involutions(ctx)) {
    for (const auto& [z, h] : ctx.structure_constants(x, d)) {
      const auto& f = ball.cell_factor(z);
      if (!f) fail_internal("product against a cell element left the cell ideal");
      auto& cell = out.at(f->b1, f->b2);
      auto it = cell.find(f->x);
      if (it == cell.end()) cell.emplace(f->x, h);
      else {
        it->second += h;
        if (it->second.is_zero()) cell.erase(it);
      }
    }
  }
  return out;
}

JGammaElem phi_image_of(const HeckeCtx& ctx, const std::map<uint32_t, Laurent>& cexp) {
  size_t n = ctx.datum->b0_elements().size();
  JGammaElem out = JGammaElem::zero(n);
  for (const auto& [w, c] : cexp) {
    JGammaElem t = phi_image(ctx, w);
    t.scale(c);
    out += t;
  }
  return out;
}

RankReport phi_injectivity(const HeckeCtx& ctx, long radius) {
  std::vector<uint32_t> cols = ctx.ball->elements_up_to(radius);
  // label space: (b1, b2, x)
  std::map<std::tuple<uint32_t, uint32_t, Vec>, size_t> label_row;
  std::vector<std::map<size_t, Laurent>> col_entries(cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    JGammaElem img = phi_image(ctx, cols[c]);
    for (size_t i = 0; i < img.nb0; ++i)
      for (size_t j = 0; j < img.nb0; ++j)
        for (const auto& [x, v] : img.at(i, j)) {
          auto key = std::make_tuple(static_cast<uint32_t>(i), static_cast<uint32_t>(j), x);
          auto it = label_row.find(key);
          if (it == label_row.end())
            it = label_row.emplace(key, label_row.size()).first;
          col_entries[c][it->second] = v;
        }
  }
  size_t nrows = label_row.size(), ncols = cols.size();

  auto rank_at = [&](const std::vector<long>& primes) {
    // specialize q^{e_k} -> primes[k], exact rank over Q
    std::vector<std::vector<mpq_class>> m(nrows, std::vector<mpq_class>(ncols, 0));
    for (size_t c = 0; c < ncols; ++c)
      for (const auto& [r, v] : col_entries[c]) {
        mpq_class acc = 0;
        for (const auto& [g, coef] : v.terms()) {
          mpq_class term(coef);
          for (int k = 0; k < ctx.grank(); ++k) {
            long e = g.c[static_cast<size_t>(k)];
            mpq_class p(primes[static_cast<size_t>(k)]);
            mpq_class pw = 1;
            for (long t = 0; t < std::abs(e); ++t) pw *= p;
            if (e >= 0) term *= pw;
            else term /= pw;
          }
          acc += term;
        }
        m[r][c] = acc;
      }
    size_t rank = 0;
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < nrows; ++col) {
      size_t piv = row;
      while (piv < nrows && m[piv][col] == 0) ++piv;
      if (piv == nrows) continue;
      std::swap(m[piv], m[row]);
      for (size_t rr = row + 1; rr < nrows; ++rr) {
        if (m[rr][col] == 0) continue;
        mpq_class f = m[rr][col] / m[row][col];
        for (size_t cc = col; cc < ncols; ++cc) m[rr][cc] -= f * m[row][cc];
      }
      ++row;
      ++rank;
    }
    return rank;
  };

  RankReport rep;
  rep.columns = ncols;
  rep.rank = rank_at(std::vector<long>{2, 3, 5, 7});
  if (rep.rank < ncols) rep.rank = std::max(rep.rank, rank_at(std::vector<long>{5, 11, 2, 3}));
  rep.full = rep.rank == ncols;
  return rep;
}

}  // namespace klcell
