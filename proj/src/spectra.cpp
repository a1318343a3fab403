#include "klcell/spectra.hpp"

#include <algorithm>
#include <functional>

namespace klcell {

namespace {

long mod_pos(long a, long p) {
  long r = a % p;
  return r < 0 ? r + p : r;
}

long mod_inv(long a, long p) {
  long t = 0, nt = 1, r = p, nr = mod_pos(a, p);
  while (nr != 0) {
    long q = r / nr;
    t -= q * nt;
    std::swap(t, nt);
    r -= q * nr;
    std::swap(r, nr);
  }
  if (r != 1) fail_domain("value is not a unit modulo the characteristic");
  return mod_pos(t, p);
}

}  // namespace

Field::Field(long p) : p_(p) {
  if (p < 0) fail_config("field characteristic must be 0 or a prime");
  if (p > 0) {
    for (long d = 2; d * d <= p; ++d)
      if (p % d == 0) fail_config("field characteristic must be prime");
  }
}

Field::V Field::from_int(const mpz_class& n) const {
  V v;
  if (p_ == 0) {
    v.q = mpq_class(n);
  } else {
    v.r = mod_pos(mpz_class(n % p_).get_si(), p_);
  }
  return v;
}

Field::V Field::from_rational(const mpq_class& x) const {
  V v;
  if (p_ == 0) {
    v.q = x;
    v.q.canonicalize();
  } else {
    mpz_class num = x.get_num(), den = x.get_den();
    long dn = mod_pos(mpz_class(den % p_).get_si(), p_);
    if (dn == 0) fail_config("denominator is not a unit modulo the characteristic");
    long nm = mod_pos(mpz_class(num % p_).get_si(), p_);
    v.r = mod_pos(nm * mod_inv(dn, p_), p_);
  }
  return v;
}

Field::V Field::add(const V& a, const V& b) const {
  V v;
  if (p_ == 0) v.q = a.q + b.q;
  else v.r = mod_pos(a.r + b.r, p_);
  return v;
}
Field::V Field::sub(const V& a, const V& b) const {
  V v;
  if (p_ == 0) v.q = a.q - b.q;
  else v.r = mod_pos(a.r - b.r, p_);
  return v;
}
Field::V Field::mul(const V& a, const V& b) const {
  V v;
  if (p_ == 0) v.q = a.q * b.q;
  else v.r = mod_pos(a.r * b.r, p_);
  return v;
}
Field::V Field::neg(const V& a) const {
  V v;
  if (p_ == 0) v.q = -a.q;
  else v.r = mod_pos(-a.r, p_);
  return v;
}
Field::V Field::inv(const V& a) const {
  if (is_zero(a)) fail_domain("division by zero in the specialization field");
  V v;
  if (p_ == 0) v.q = 1 / a.q;
  else v.r = mod_inv(a.r, p_);
  return v;
}
Field::V Field::pow(const V& a, long e) const {
  V base = e < 0 ? inv(a) : a;
  long n = std::abs(e);
  V acc = one();
  while (n) {
    if (n & 1) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1;
  }
  return acc;
}
bool Field::is_zero(const V& a) const { return p_ == 0 ? a.q == 0 : a.r == 0; }
std::string Field::str(const V& a) const {
  return p_ == 0 ? a.q.get_str() : std::to_string(a.r);
}

Field::V Specialization::eval(const Laurent& a) const {
  Field::V acc = field.zero();
  for (const auto& [g, c] : a.terms()) {
    Field::V term = field.from_int(c);
    for (size_t k = 0; k < q_images.size(); ++k)
      term = field.mul(term, field.pow(q_images[k], g.c[k]));
    acc = field.add(acc, term);
  }
  return acc;
}

Field::V character_eval(const RepRing& rep, const Field& f, const Vec& x, const TorusPoint& t) {
  for (const auto& ti : t.t)
    if (f.is_zero(ti)) fail_domain("torus point has a zero coordinate");
  Field::V acc = f.zero();
  for (const auto& [xp, d] : rep.weight_system(x)) {
    Field::V term = f.from_int(d);
    for (int i = 0; i < rep.datum().rank; ++i)
      term = f.mul(term, f.pow(t.t[static_cast<size_t>(i)], xp[i]));
    acc = f.add(acc, term);
  }
  return acc;
}

Field::V eval_central(const RepRing& rep, const Specialization& spec, const TorusPoint& t,
                      const ZGElem& z) {
  Field::V acc = spec.field.zero();
  for (const auto& [x, c] : z) {
    Field::V v = spec.eval(c);
    v = spec.field.mul(v, character_eval(rep, spec.field, x, t));
    acc = spec.field.add(acc, v);
  }
  return acc;
}

Laurent zeta_poly(const CellDatum& d, uint32_t subset) {
  // closed form h_{w_I,w_I,w_I} = q_{w_I}^{-1} sum_{y in W_I} q_y^2
  const auto& g = d.rd->w0group;
  std::vector<uint16_t> members{0};
  std::vector<uint8_t> seen(g.size(), 0);
  seen[0] = 1;
  std::vector<uint16_t> gens;
  for (int i = 1; i <= d.rd->rank; ++i)
    if (subset & (1u << (i - 1))) gens.push_back(d.gen(i).u);
  for (size_t head = 0; head < members.size(); ++head) {
    for (uint16_t s : gens) {
      uint16_t n = g.mul(members[head], s);
      if (!seen[n]) {
        seen[n] = 1;
        members.push_back(n);
      }
    }
  }
  uint16_t wi = 0;
  for (uint16_t m : members)
    if (g.length[m] > g.length[wi]) wi = m;
  Gamma lwi = d.weight_length(Elt{Vec::zero(d.rd->rank), wi});
  Laurent sum;
  for (uint16_t m : members) {
    Gamma ly = d.weight_length(Elt{Vec::zero(d.rd->rank), m});
    sum.add_term(ly + ly - lwi, 1);
  }
  return sum;
}

ZGElem alpha_poly(const HeckeCtx& ctx, uint32_t subset) {
  const CellDatum& D = *ctx.datum;
  int r = D.rd->rank;
  // x_I = sum of the fundamental weights in I; w_{I'} longest in the complement
  Vec xi = Vec::zero(r);
  uint32_t comp = 0;
  for (int i = 1; i <= r; ++i) {
    if (subset & (1u << (i - 1))) xi[i - 1] = 1;
    else comp |= (1u << (i - 1));
  }
  const auto& g = D.rd->w0group;
  uint16_t wip = 0;
  {
    std::vector<uint16_t> members{0};
    std::vector<uint8_t> seen(g.size(), 0);
    seen[0] = 1;
    for (size_t head = 0; head < members.size(); ++head)
      for (int i = 1; i <= r; ++i) {
        if (!(comp & (1u << (i - 1)))) continue;
        uint16_t n = g.mul(members[head], D.gen(i).u);
        if (!seen[n]) {
          seen[n] = 1;
          members.push_back(n);
        }
      }
    for (uint16_t m : members)
      if (g.length[m] > g.length[wip]) wip = m;
  }
  Elt a = D.mul(D.translation(xi), Elt{Vec::zero(r), wip});
  // sanity: x_I w_{I'} = w w0 for some w in B0
  Elt w = D.mul(a, D.longest_finite());  // a * w0^{-1} = a * w0
  if (!D.in_b0(w)) fail_internal("x_I w_{I'} is not of the form w w0 with w in B0");

  HeckeElt cww0 = ctx.mul(ctx.left_factor(ctx.ball->require(w)), ctx.c_w0_explicit());
  HeckeElt p = ctx.mul(ctx.c_w0_explicit(), cww0);
  auto resolved = ctx.resolve_lowest_row(std::move(p));
  ZGElem out;
  for (auto& [x, c] : resolved) out.emplace(x, std::move(c));
  return out;
}

std::vector<uint32_t> delta_set(const CellDatum& d, const Specialization& spec) {
  int r = d.rd->rank;
  uint32_t full = (1u << r) - 1;
  std::vector<uint8_t> zeta_zero(full + 1, 0);
  for (uint32_t s = 0; s <= full; ++s)
    zeta_zero[s] = spec.field.is_zero(spec.eval(zeta_poly(d, s))) ? 1 : 0;
  std::vector<uint32_t> out;
  for (uint32_t I = 0; I <= full; ++I) {
    uint32_t comp = full & ~I;
    if (zeta_zero[comp]) continue;
    bool ok = true;
    for (int i = 0; i < r; ++i)
      if (I & (1u << i))
        if (!zeta_zero[comp | (1u << i)]) ok = false;
    if (ok) out.push_back(I);
  }
  if (out.empty()) fail_internal("Delta_k is empty");
  // antichain property
  for (uint32_t a : out)
    for (uint32_t b : out)
      if (a != b && (a & b) == a) fail_internal("Delta_k is not an antichain");
  return out;
}

SpectraCtx make_spectra_ctx(std::shared_ptr<const CellDatum> datum, int threads,
                            size_t symbolic_det_max) {
  const CellDatum& D = *datum;
  long lw0 = D.l_w0();
  long mb = D.max_b0_length();
  long sandwich = 2 * lw0 + 2 * mb;
  // the ball must also hold the Bernstein products for every S_x that can
  // appear while resolving against C_{w0 p_x}
  long ball_radius = sandwich;
  {
    // dominant lattice x with l(p_x) <= lw0 + 2 mb
    long bound = lw0 + 2 * mb;
    int r = D.rd->rank;
    std::vector<long> unit(static_cast<size_t>(r), 0);
    for (int i = 0; i < r; ++i) {
      Vec w = Vec::zero(r);
      w[i] = 1;
      unit[static_cast<size_t>(i)] = D.length(Elt{w, 0});
    }
    std::function<void(int, Vec, long)> rec = [&](int pos, Vec cur, long used) {
      if (pos == r) {
        if (!D.in_lattice(cur)) return;
        for (const auto& [xp, d] : D.rep->weight_system(cur)) {
          (void)d;
          Vec y = Vec::zero(r), z = Vec::zero(r);
          for (int i = 0; i < r; ++i) {
            y[i] = std::max(xp[i], 0);
            z[i] = std::max(-xp[i], 0);
          }
          if (D.mode == Mode::NonExtended) {
            // theta uses the two_rho shift there; bound it the same way
            Vec kappa = D.rd->two_rho();
            int m = 0;
            for (;;) {
              bool dom = true;
              for (int i = 0; i < r; ++i)
                if (xp[i] + m * kappa[i] < 0) dom = false;
              if (dom) break;
              ++m;
            }
            ++m;  // the well-definedness check shifts once more
            for (int i = 0; i < r; ++i) {
              y[i] = xp[i] + m * kappa[i];
              z[i] = m * kappa[i];
            }
          }
          long cost = lw0 + D.length(Elt{y, 0}) + D.length(Elt{z, 0});
          ball_radius = std::max(ball_radius, cost);
        }
        return;
      }
      for (long v = 0;; ++v) {
        Vec nxt = cur;
        nxt[pos] = static_cast<int32_t>(v);
        long nused = used + v * unit[static_cast<size_t>(pos)];
        if (nused > bound) break;
        rec(pos + 1, nxt, nused);
      }
    };
    rec(0, Vec::zero(r), 0);
    if (D.mode == Mode::Extended) {
      // extended theta may add one rho shift in the well-definedness check
      Vec rho = D.rd->rho();
      ball_radius += 2 * D.length(Elt{rho, 0});
    }
  }
  long kl_radius = lw0 + mb;

  SpectraCtx sctx;
  sctx.hecke = HeckeCtx::make(datum, ball_radius, kl_radius, threads, false);
  HeckeCtx& ctx = *sctx.hecke;

  size_t n = D.b0_elements().size();
  sctx.matrix.resize(n * n);
  HeckeElt cw0 = ctx.c_w0_explicit();
  std::vector<HeckeElt> efac(n), ffac(n);
  for (size_t i = 0; i < n; ++i) {
    uint32_t bi = ctx.ball->require(D.b0_elements()[i]);
    efac[i] = ctx.left_factor(bi);
    ffac[i] = ctx.right_factor(bi);
  }
  parallel_for(n * n, threads, [&](size_t idx) {
    size_t w1 = idx / n, w2 = idx % n;
    HeckeElt m = ctx.mul(ffac[w1], efac[w2]);
    HeckeElt p = ctx.mul(ctx.mul(cw0, m), cw0);
    auto resolved = ctx.resolve_lowest_row(std::move(p));
    ZGElem e;
    for (auto& [x, c] : resolved) e.emplace(x, std::move(c));
    sctx.matrix[idx] = std::move(e);
  });

  if (n <= symbolic_det_max) sctx.det_symbolic = zg_det(*D.rep, sctx.matrix, n);
  return sctx;
}

bool attached_simple_test(const SpectraCtx& sctx, const Specialization& spec,
                          const TorusPoint& t) {
  const CellDatum& D = sctx.datum();
  for (uint32_t I : delta_set(D, spec)) {
    ZGElem a = alpha_poly(*sctx.hecke, I);
    if (!spec.field.is_zero(eval_central(*D.rep, spec, t, a))) return true;
  }
  return false;
}

namespace {

std::vector<std::vector<Field::V>> eval_matrix(const SpectraCtx& sctx,
                                               const Specialization& spec,
                                               const TorusPoint& t) {
  const CellDatum& D = sctx.datum();
  size_t n = sctx.nb0();
  std::vector<std::vector<Field::V>> m(n, std::vector<Field::V>(n, spec.field.zero()));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      m[i][j] = eval_central(*D.rep, spec, t, sctx.matrix[i * n + j]);
  return m;
}

}  // namespace

size_t dim_rho(const SpectraCtx& sctx, const Specialization& spec, const TorusPoint& t) {
  auto m = eval_matrix(sctx, spec, t);
  const Field& f = spec.field;
  size_t n = m.size(), rank = 0, row = 0;
  for (size_t col = 0; col < n && row < n; ++col) {
    size_t piv = row;
    while (piv < n && f.is_zero(m[piv][col])) ++piv;
    if (piv == n) continue;
    std::swap(m[piv], m[row]);
    Field::V invp = f.inv(m[row][col]);
    for (size_t rr = row + 1; rr < n; ++rr) {
      if (f.is_zero(m[rr][col])) continue;
      Field::V factor = f.mul(m[rr][col], invp);
      for (size_t cc = col; cc < n; ++cc)
        m[rr][cc] = f.sub(m[rr][cc], f.mul(factor, m[row][cc]));
    }
    ++row;
    ++rank;
  }
  return rank;
}

Field::V det_at_point(const SpectraCtx& sctx, const Specialization& spec, const TorusPoint& t) {
  const Field& f = spec.field;
  if (sctx.det_symbolic)
    return eval_central(*sctx.datum().rep, spec, t, *sctx.det_symbolic);
  auto m = eval_matrix(sctx, spec, t);
  size_t n = m.size();
  Field::V det = f.one();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && f.is_zero(m[piv][col])) ++piv;
    if (piv == n) return f.zero();
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = f.neg(det);
    }
    det = f.mul(det, m[col][col]);
    Field::V invp = f.inv(m[col][col]);
    for (size_t rr = col + 1; rr < n; ++rr) {
      if (f.is_zero(m[rr][col])) continue;
      Field::V factor = f.mul(m[rr][col], invp);
      for (size_t cc = col; cc < n; ++cc)
        m[rr][cc] = f.sub(m[rr][cc], f.mul(factor, m[col][cc]));
    }
  }
  return det;
}

IsoVerdict phi_p_iso(const SpectraCtx& sctx, const Specialization& spec, const TorusPoint& t) {
  IsoVerdict v;
  Field::V det = det_at_point(sctx, spec, t);
  v.det_value = spec.field.str(det);
  v.dim = dim_rho(sctx, spec, t);
  v.iso = !spec.field.is_zero(det);
  // cross-validation: lambda(det) != 0 iff the evaluated matrix has full rank
  if (v.iso != (v.dim == sctx.nb0()))
    fail_internal("determinant and rank disagree at a specialization point");
  return v;
}

ZGElem zg_det(const RepRing& rep, const std::vector<ZGElem>& entries, size_t n) {
  // subset dynamic programming: minors over the first k rows and column set S
  auto mul_zg = [&](const ZGElem& a, const ZGElem& b) {
    ZGElem out;
    for (const auto& [x, ca] : a)
      for (const auto& [y, cb] : b) {
        Laurent c = ca * cb;
        for (const auto& [z, m] : rep.tensor_decomposition(x, y)) {
          Laurent t = c;
          t.scale(mpz_class(m));
          auto it = out.find(z);
          if (it == out.end()) out.emplace(z, std::move(t));
          else {
            it->second += t;
            if (it->second.is_zero()) out.erase(it);
          }
        }
      }
    return out;
  };
  if (n > 25) fail_config("symbolic determinant limited to small matrices");
  int grank = 1;
  for (const auto& e : entries) {
    bool found = false;
    for (const auto& [x, c] : e)
      if (!c.is_zero()) {
        grank = c.terms().front().first.rank;
        found = true;
        break;
      }
    if (found) break;
  }
  std::vector<ZGElem> cur(1ull << n), next;
  cur[0][Vec::zero(rep.datum().rank)] = Laurent::one(grank);
  for (size_t row = 0; row < n; ++row) {
    next.assign(1ull << n, ZGElem{});
    for (size_t s = 0; s < (1ull << n); ++s) {
      if (static_cast<size_t>(__builtin_popcountll(s)) != row) continue;
      if (cur[s].empty()) continue;
      int pos = 0;
      for (size_t j = 0; j < n; ++j) {
        if (s & (1ull << j)) {
          ++pos;
          continue;
        }
        const ZGElem& a = entries[row * n + j];
        if (a.empty()) continue;
        ZGElem prod = mul_zg(cur[s], a);
        if (pos % 2 == 1)
          for (auto& [x, c] : prod) c = -c;
        auto& slot = next[s | (1ull << j)];
        for (auto& [x, c] : prod) {
          auto it = slot.find(x);
          if (it == slot.end()) slot.emplace(x, std::move(c));
          else {
            it->second += c;
            if (it->second.is_zero()) slot.erase(it);
          }
        }
      }
    }
    cur = std::move(next);
  }
  return cur[(1ull << n) - 1];
}

}  // namespace klcell
