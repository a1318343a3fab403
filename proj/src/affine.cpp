#include "klcell/affine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace klcell {

namespace {

int gcd_long(int a, int b) {
  a = std::abs(a), b = std::abs(b);
  while (b) {
    int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(static_cast<size_t>(n)) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) { return p[static_cast<size_t>(a)] == a ? a : p[static_cast<size_t>(a)] = find(p[static_cast<size_t>(a)]); }
  void unite(int a, int b) { p[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace

std::shared_ptr<const CellDatum> CellDatum::make(const Config& cfg) {
  auto d = std::shared_ptr<CellDatum>(new CellDatum());
  d->build(cfg);
  return d;
}

Elt CellDatum::identity() const { return Elt{Vec::zero(rd->rank), 0}; }

Elt CellDatum::gen(int i) const {
  if (i < 0 || i >= ngens()) fail_domain("generator index out of range");
  if (i == 0) return Elt{theta_translation_, theta_reflection_};
  // finite simple reflection s_i: index of its matrix in W0
  // (generator i corresponds to the length-one element with word {i})
  for (size_t u = 0; u < rd->w0group.size(); ++u)
    if (rd->w0group.length[u] == 1 && rd->w0group.word[u][0] == i)
      return Elt{Vec::zero(rd->rank), static_cast<uint16_t>(u)};
  fail_internal("missing finite generator");
}

Elt CellDatum::translation(const Vec& x) const {
  if (!in_lattice(x)) fail_domain("translation not in the configured lattice");
  return Elt{x, 0};
}

Elt CellDatum::mul(const Elt& a, const Elt& b) const {
  Elt r;
  r.x = a.x + rd->apply(a.u, b.x);
  r.u = rd->w0group.mul(a.u, b.u);
  return r;
}

Elt CellDatum::inv(const Elt& a) const {
  uint16_t ui = rd->w0group.inverse[a.u];
  Elt r;
  r.x = -rd->apply(ui, a.x);
  r.u = ui;
  return r;
}

long CellDatum::length(const Elt& w) const {
  uint16_t uinv = rd->w0group.inverse[w.u];
  long l = 0;
  for (size_t k = 0; k < rd->positive_roots.size(); ++k) {
    int sign;
    rd->root_image(uinv, static_cast<int>(k), &sign);
    long p = rd->pair_with_coroot(w.x, static_cast<int>(k));
    if (sign < 0) p -= 1;
    l += std::abs(p);
  }
  return l;
}

bool CellDatum::is_left_descent(int g, const Elt& w) const {
  return length(mul(gen(g), w)) < length(w);
}
bool CellDatum::is_right_descent(int g, const Elt& w) const {
  return length(mul(w, gen(g))) < length(w);
}

std::vector<int> CellDatum::descents(const Elt& w, bool left) const {
  std::vector<int> r;
  for (int g = 0; g < ngens(); ++g)
    if (left ? is_left_descent(g, w) : is_right_descent(g, w)) r.push_back(g);
  return r;
}

int CellDatum::first_left_descent(const Elt& w) const {
  long l = length(w);
  if (l == 0) return -1;
  for (int g = 0; g < ngens(); ++g)
    if (length(mul(gen(g), w)) < l) return g;
  fail_internal("positive-length element without left descent");
}

int CellDatum::omega_part(const Elt& w) const {
  if (mode == Mode::NonExtended) return 0;
  for (size_t k = 0; k < omega.size(); ++k) {
    if (rd->in_root_lattice(w.x - omega[k].x)) {
      // the coset of p_x u in W/W' is the coset of x in P/Q
      return static_cast<int>(k);
    }
  }
  fail_internal("element matches no omega coset");
}

Elt CellDatum::strip_omega(const Elt& w) const {
  int k = omega_part(w);
  if (k == 0) return w;
  return mul(inv(omega[static_cast<size_t>(k)]), w);
}

bool CellDatum::in_wprime(const Elt& w) const { return rd->in_root_lattice(w.x); }

Gamma CellDatum::weight_length(const Elt& w) const {
  Gamma total = Gamma::zero(gamma_rank);
  Elt cur = strip_omega(w);
  long l = length(cur);
  while (l > 0) {
    int g = first_left_descent(cur);
    total += weight_of_gen[static_cast<size_t>(g)];
    cur = mul(gen(g), cur);
    --l;
  }
  return total;
}

std::pair<int, std::vector<int>> CellDatum::reduced_word(const Elt& w) const {
  int k = omega_part(w);
  Elt cur = (k == 0) ? w : mul(inv(omega[static_cast<size_t>(k)]), w);
  std::vector<int> letters;
  long l = length(cur);
  while (l > 0) {
    int g = first_left_descent(cur);
    letters.push_back(g);
    cur = mul(gen(g), cur);
    --l;
  }
  return {k, letters};
}

Elt CellDatum::from_word(int omega_idx, const std::vector<int>& letters) const {
  if (omega_idx < 0 || omega_idx >= static_cast<int>(omega.size()))
    fail_domain("omega index out of range");
  Elt cur = omega[static_cast<size_t>(omega_idx)];
  for (int g : letters) cur = mul(cur, gen(g));
  return cur;
}

bool CellDatum::bruhat_leq(const Elt& y, const Elt& w) const {
  if (mode == Mode::Extended) {
    int ky = omega_part(y), kw = omega_part(w);
    if (ky != kw) return false;
    if (ky != 0) return bruhat_leq(strip_omega(y), strip_omega(w));
  }
  long ly = length(y), lw = length(w);
  if (ly > lw) return false;
  if (ly == 0) return true;
  if (ly == lw) return y == w;
  int g = first_left_descent(w);
  Elt sw = mul(gen(g), w);
  Elt sy = mul(gen(g), y);
  if (length(sy) < ly) return bruhat_leq(sy, sw);
  return bruhat_leq(y, sw);
}

Vec CellDatum::scaled_alcove_point(const Elt& w) const {
  Vec r = rd->apply(w.u, rd->rho());
  for (int i = 0; i < rd->rank; ++i) r[i] += sample_denominator * w.x[i];
  return r;
}

bool CellDatum::in_u0(const Elt& w) const {
  Vec v = scaled_alcove_point(inv(strip_omega(w)));
  for (int i = 0; i < rd->rank; ++i)
    if (v[i] <= 0) return false;
  return true;
}

bool CellDatum::in_b0(const Elt& w) const {
  Vec v = scaled_alcove_point(inv(strip_omega(w)));
  for (int i = 0; i < rd->rank; ++i) {
    if (v[i] <= 0) return false;
    if (v[i] >= sample_denominator * box_levels[static_cast<size_t>(i)]) return false;
  }
  return true;
}

Elt CellDatum::longest_finite() const { return Elt{Vec::zero(rd->rank), rd->w0group.w0}; }

Gamma CellDatum::weight_w0() const { return weight_length(longest_finite()); }

bool CellDatum::in_lattice(const Vec& x) const {
  return mode == Mode::Extended ? true : rd->in_root_lattice(x);
}

std::optional<CellDatum::CellFactor> CellDatum::lowest_cell_factorize(const Elt& z) const {
  Elt w0e = longest_finite();
  long lz = length(z);
  long lw0 = l_w0();
  std::optional<CellFactor> found;
  for (uint32_t i = 0; i < b0_.size(); ++i) {
    const Elt& b1 = b0_[i];
    long l1 = length(b1);
    if (l1 + lw0 > lz) continue;
    Elt left = mul(inv(w0e), mul(inv(b1), z));
    for (uint32_t j = 0; j < b0_.size(); ++j) {
      const Elt& b2 = b0_[j];
      long l2 = length(b2);
      Elt m = mul(left, b2);
      if (m.u != 0) continue;
      if (!rd->dominant(m.x) || !in_lattice(m.x)) continue;
      long lx = length(m);
      if (l1 + lw0 + lx + l2 != lz) continue;
      if (found) fail_internal("lowest-cell factorization not unique");
      found = CellFactor{i, j, m.x};
    }
  }
  return found;
}

std::vector<Elt> CellDatum::distinguished_involutions() const {
  std::vector<Elt> d;
  Elt w0e = longest_finite();
  for (const Elt& b : b0_) d.push_back(mul(mul(b, w0e), inv(b)));
  std::sort(d.begin(), d.end(), [&](const Elt& a, const Elt& b) {
    long la = length(a), lb = length(b);
    if (la != lb) return la < lb;
    return a < b;
  });
  for (size_t i = 0; i + 1 < d.size(); ++i)
    if (d[i] == d[i + 1]) fail_internal("distinguished involutions not distinct");
  return d;
}

std::string CellDatum::describe_gen(int g) const { return "s" + std::to_string(g); }

void CellDatum::build(const Config& cfg) {
  rd = RootDatum::make(cfg.type);
  rep = std::make_shared<RepRing>(rd);
  mode = cfg.mode;
  gamma_rank = cfg.gamma_rank;
  if (gamma_rank < 1 || gamma_rank > kMaxGammaRank)
    fail_config("gamma_rank must be between 1 and " + std::to_string(kMaxGammaRank));

  // s_0 = p_theta s_theta where theta is the root with the highest coroot
  {
    int hc = rd->highest_coroot_idx;
    theta_translation_ = rd->root_as_weight(hc);
    const Root& theta = rd->positive_roots[static_cast<size_t>(hc)];
    // reflection matrix: x -> x - <x, theta^vee> theta
    Mat m{};
    Vec tw = rd->root_as_weight(hc);
    for (int i = 0; i < rd->rank; ++i)
      for (int j = 0; j < rd->rank; ++j)
        m[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            (i == j ? 1 : 0) - tw[i] * theta.coalpha[j];
    theta_reflection_ = 0;
    bool ok = false;
    for (size_t u = 0; u < rd->w0group.size(); ++u) {
      if (rd->w0group.action[u] == m) {
        theta_reflection_ = static_cast<uint16_t>(u);
        ok = true;
        break;
      }
    }
    if (!ok) fail_internal("reflection for the affine node not found in W0");
  }
  sample_denominator = rd->coxeter_number + 1;

  // omega: length-zero elements, one per coset of Q in P
  omega.clear();
  omega.push_back(identity());
  if (mode == Mode::Extended) {
    std::vector<int> simple_root_idx(static_cast<size_t>(rd->rank), -1);
    for (size_t k = 0; k < rd->positive_roots.size(); ++k) {
      int h = 0;
      for (int i = 0; i < rd->rank; ++i) h += rd->positive_roots[k].alpha[i];
      if (h == 1) {
        for (int i = 0; i < rd->rank; ++i)
          if (rd->positive_roots[k].alpha[i] == 1) simple_root_idx[static_cast<size_t>(i)] = static_cast<int>(k);
      }
    }
    std::vector<Elt> found;
    for (size_t u = 0; u < rd->w0group.size(); ++u) {
      uint16_t uinv = rd->w0group.inverse[u];
      Vec y = Vec::zero(rd->rank);
      for (int i = 0; i < rd->rank; ++i) {
        int sign;
        rd->root_image(uinv, simple_root_idx[static_cast<size_t>(i)], &sign);
        y[i] = sign < 0 ? 1 : 0;
      }
      Elt cand{y, static_cast<uint16_t>(u)};
      if (!y.is_zero() || u != 0) {
        if (length(cand) == 0) found.push_back(cand);
      }
    }
    std::sort(found.begin(), found.end());
    for (const Elt& e : found)
      if (!(e == identity())) omega.push_back(e);
    if (static_cast<long>(omega.size()) != std::abs(rd->cartan_det))
      fail_internal("omega count does not match the lattice index");
  }
  omega_inverse.assign(omega.size(), 0);
  for (size_t k = 0; k < omega.size(); ++k) {
    for (size_t j = 0; j < omega.size(); ++j)
      if (mul(omega[k], omega[j]) == identity()) omega_inverse[k] = static_cast<int>(j);
  }

  // Coxeter matrix of the affine diagram (0 encodes infinite order)
  int ng = ngens();
  coxeter_m.assign(static_cast<size_t>(ng), std::vector<int>(static_cast<size_t>(ng), 2));
  for (int i = 0; i < ng; ++i) {
    coxeter_m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
    for (int j = i + 1; j < ng; ++j) {
      Elt p = mul(gen(i), gen(j));
      Elt cur = p;
      int order = 0;
      for (int k = 1; k <= 60; ++k) {
        if (cur == identity()) {
          order = k;
          break;
        }
        cur = mul(cur, p);
      }
      coxeter_m[static_cast<size_t>(i)][static_cast<size_t>(j)] = order;
      coxeter_m[static_cast<size_t>(j)][static_cast<size_t>(i)] = order;
    }
  }

  // omega conjugation permutes the simple reflections
  omega_gen_perm.assign(omega.size(), std::vector<int>(static_cast<size_t>(ng), -1));
  for (size_t k = 0; k < omega.size(); ++k) {
    for (int i = 0; i < ng; ++i) {
      Elt c = mul(mul(omega[k], gen(i)), inv(omega[k]));
      int img = -1;
      for (int j = 0; j < ng; ++j)
        if (c == gen(j)) img = j;
      if (img < 0) fail_internal("omega conjugate of a generator is not a generator");
      omega_gen_perm[k][static_cast<size_t>(i)] = img;
    }
  }

  // conjugacy classes of generators: odd bonds merge, and in extended mode
  // omega conjugation merges as well
  UnionFind uf(ng);
  for (int i = 0; i < ng; ++i)
    for (int j = i + 1; j < ng; ++j) {
      int m = coxeter_m[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (m >= 3 && m % 2 == 1) uf.unite(i, j);
    }
  if (mode == Mode::Extended)
    for (size_t k = 0; k < omega.size(); ++k)
      for (int i = 0; i < ng; ++i) uf.unite(i, omega_gen_perm[k][static_cast<size_t>(i)]);
  class_of_gen.assign(static_cast<size_t>(ng), 0);
  for (int i = 0; i < ng; ++i) class_of_gen[static_cast<size_t>(i)] = uf.find(i);

  // weight function
  weight_of_gen.assign(static_cast<size_t>(ng), Gamma::zero(gamma_rank));
  for (int i = 0; i < ng; ++i) {
    auto it = cfg.weights.find(i);
    if (it == cfg.weights.end()) fail_config("missing weight for generator s" + std::to_string(i));
    if (static_cast<int>(it->second.size()) != gamma_rank)
      fail_config("weight vector for s" + std::to_string(i) + " must have length gamma_rank");
    Gamma g = Gamma::zero(gamma_rank);
    for (int k = 0; k < gamma_rank; ++k) g.c[static_cast<size_t>(k)] = it->second[static_cast<size_t>(k)];
    if (!g.positive())
      fail_config("weight of s" + std::to_string(i) + " must be positive in the order on Gamma");
    weight_of_gen[static_cast<size_t>(i)] = g;
  }
  for (int i = 0; i < ng; ++i)
    for (int j = i + 1; j < ng; ++j)
      if (class_of_gen[static_cast<size_t>(i)] == class_of_gen[static_cast<size_t>(j)] &&
          !(weight_of_gen[static_cast<size_t>(i)] == weight_of_gen[static_cast<size_t>(j)]))
        fail_config("weights must agree on conjugate generators s" + std::to_string(i) +
                    " and s" + std::to_string(j));

  // boxes: in non-extended mode the special points form the root lattice, so
  // the wall family parallel to alpha_i comes with spacing gcd of row i of
  // the Cartan matrix
  box_levels.assign(static_cast<size_t>(rd->rank), 1);
  if (mode == Mode::NonExtended) {
    char fam = rd->type_name[0];
    bool ctilde = (rd->type_name == "A1") || fam == 'B' || rd->type_name == "C2";
    if (!ctilde)
      fail_config("non-extended mode is only supported for the C-tilde family "
                  "(types A1, B2..Br, C2)");
    for (int i = 0; i < rd->rank; ++i) {
      int g = 0;
      for (int j = 0; j < rd->rank; ++j)
        g = gcd_long(g, rd->cartan[static_cast<size_t>(i)][static_cast<size_t>(j)]);
      box_levels[static_cast<size_t>(i)] = g;
    }
    // normalization: the affine end of the diagram carries the smaller weight
    int other_end = -1;
    for (int i = 1; i < ng; ++i) {
      int big = 0;
      for (int j = 0; j < ng; ++j) {
        int m = coxeter_m[static_cast<size_t>(i)][static_cast<size_t>(j)];
        if (i != j && (m >= 3 || m == 0)) ++big;
      }
      if (big == 1 || ng == 2) {
        int m0 = coxeter_m[0][static_cast<size_t>(i)];
        if (m0 >= 3 || m0 == 0) continue;  // adjacent to s0: not the far end
        other_end = i;
      }
    }
    if (ng == 2) other_end = 1;
    if (other_end < 0) fail_internal("could not locate the far end of the affine diagram");
    if (!(weight_of_gen[0] < weight_of_gen[static_cast<size_t>(other_end)]))
      fail_config("non-extended mode requires L(s0) < L(s" + std::to_string(other_end) +
                  ") so that the special points form the root lattice");
  }

  // B0 by breadth-first search over the alcoves of the fundamental box
  {
    std::vector<Elt> box_alcoves;  // elements v with the alcove of v inside the box
    std::vector<Elt> queue{identity()};
    std::map<std::pair<std::vector<int32_t>, uint16_t>, bool> seen;
    auto key = [&](const Elt& e) {
      return std::make_pair(std::vector<int32_t>(e.x.c.begin(), e.x.c.begin() + rd->rank), e.u);
    };
    seen[key(identity())] = true;
    while (!queue.empty()) {
      Elt v = queue.back();
      queue.pop_back();
      box_alcoves.push_back(v);
      for (int g = 0; g < ng; ++g) {
        Elt w = mul(v, gen(g));
        if (seen.count(key(w))) continue;
        // test the alcove of w directly
        Vec pt = scaled_alcove_point(w);
        bool inside = true;
        for (int i = 0; i < rd->rank; ++i)
          if (pt[i] <= 0 || pt[i] >= sample_denominator * box_levels[static_cast<size_t>(i)])
            inside = false;
        if (!inside) continue;
        seen[key(w)] = true;
        queue.push_back(w);
      }
    }
    b0_.clear();
    for (const Elt& v : box_alcoves)
      for (const Elt& om : omega) b0_.push_back(mul(om, inv(v)));
    std::sort(b0_.begin(), b0_.end(), [&](const Elt& a, const Elt& b) {
      long la = length(a), lb = length(b);
      if (la != lb) return la < lb;
      return a < b;
    });
    max_b0_len_ = 0;
    for (const Elt& b : b0_) max_b0_len_ = std::max(max_b0_len_, length(b));
    if (static_cast<long>(b0_.size()) !=
        static_cast<long>(rd->w0group.size()))
      fail_internal("box census: |B0| != |W0|");
  }
}

// ---------------------------------------------------------------------------
// Ball

Ball::Ball(std::shared_ptr<const CellDatum> datum_in, long radius_in)
    : datum(std::move(datum_in)), radius(radius_in) {
  const CellDatum& D = *datum;
  int ng = D.ngens();

  // enumerate by length strata
  std::vector<Elt> stratum;
  for (const Elt& om : D.omega) stratum.push_back(om);
  std::sort(stratum.begin(), stratum.end());
  std::unordered_map<Elt, long, EltHash> seen;
  for (const Elt& e : stratum) seen[e] = 0;
  long l = 0;
  while (!stratum.empty()) {
    for (const Elt& e : stratum) {
      index_[e] = static_cast<uint32_t>(elems_.size());
      elems_.push_back(e);
      len_.push_back(l);
    }
    if (l == radius) break;
    std::vector<Elt> next;
    for (const Elt& e : stratum) {
      for (int g = 0; g < ng; ++g) {
        Elt w = D.mul(e, D.gen(g));
        if (seen.count(w)) continue;
        long lw = D.length(w);
        if (lw != l + 1) {
          if (lw != l - 1) fail_internal("length formula and word metric disagree");
          continue;
        }
        seen[w] = lw;
        next.push_back(w);
      }
    }
    std::sort(next.begin(), next.end());
    stratum = std::move(next);
    ++l;
  }

  size_t n = elems_.size();
  right_.assign(static_cast<size_t>(ng), std::vector<uint32_t>(n, npos));
  left_.assign(static_cast<size_t>(ng), std::vector<uint32_t>(n, npos));
  for (size_t i = 0; i < n; ++i) {
    for (int g = 0; g < ng; ++g) {
      auto itr = index_.find(D.mul(elems_[i], D.gen(g)));
      if (itr != index_.end()) right_[static_cast<size_t>(g)][i] = itr->second;
      auto itl = index_.find(D.mul(D.gen(g), elems_[i]));
      if (itl != index_.end()) left_[static_cast<size_t>(g)][i] = itl->second;
    }
  }
  size_t nom = D.omega.size();
  oright_.assign(nom, std::vector<uint32_t>(n, npos));
  oleft_.assign(nom, std::vector<uint32_t>(n, npos));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < nom; ++k) {
      oright_[k][i] = index_.at(D.mul(elems_[i], D.omega[k]));
      oleft_[k][i] = index_.at(D.mul(D.omega[k], elems_[i]));
    }
  inv_.assign(n, npos);
  for (size_t i = 0; i < n; ++i) inv_[i] = index_.at(D.inv(elems_[i]));

  opart_.assign(n, 0);
  strip_.assign(n, npos);
  wlen_.assign(n, Gamma::zero(D.gamma_rank));
  fld_.assign(n, -1);
  word_.assign(n, {});
  for (size_t i = 0; i < n; ++i) {
    opart_[i] = D.omega_part(elems_[i]);
    strip_[i] = oleft_[static_cast<size_t>(D.omega_inverse[static_cast<size_t>(opart_[i])])][i];
    for (int g = 0; g < ng; ++g) {
      uint32_t j = left_[static_cast<size_t>(g)][i];
      if (j != npos && len_[j] < len_[i]) {
        fld_[i] = g;
        break;
      }
    }
  }
  // reduced words of the W' parts, by induction on length
  for (size_t i = 0; i < n; ++i) {
    uint32_t w = strip_[i];
    if (word_[w].empty() && len_[w] > 0) {
      // peel left descents
      std::vector<int> letters;
      uint32_t cur = w;
      while (len_[cur] > 0) {
        int g = fld_[cur];
        letters.push_back(g);
        cur = left_[static_cast<size_t>(g)][cur];
      }
      word_[w] = letters;
    }
    if (w != i) word_[i] = word_[w];
  }
  for (size_t i = 0; i < n; ++i) {
    Gamma acc = Gamma::zero(D.gamma_rank);
    for (int g : word_[i]) acc += D.weight_of_gen[static_cast<size_t>(g)];
    wlen_[i] = acc;
  }

  e_ = index_.at(D.identity());
  {
    auto it = index_.find(D.longest_finite());
    w0_ = it == index_.end() ? npos : it->second;
  }

  // flags and factorizations
  u0_.assign(n, 0);
  b0flag_.assign(n, 0);
  c0_.assign(n, std::nullopt);
  for (size_t i = 0; i < n; ++i) {
    u0_[i] = D.in_u0(elems_[i]) ? 1 : 0;
    b0flag_[i] = D.in_b0(elems_[i]) ? 1 : 0;
    c0_[i] = D.lowest_cell_factorize(elems_[i]);
  }

  // Bruhat table over W' elements (lifting property, by length induction)
  wprime_rank_.assign(n, npos);
  for (size_t i = 0; i < n; ++i)
    if (opart_[i] == 0) {
      wprime_rank_[i] = static_cast<uint32_t>(wprime_list_.size());
      wprime_list_.push_back(static_cast<uint32_t>(i));
    }
  size_t m = wprime_list_.size();
  bruhat_words_ = (m + 63) / 64;
  bruhat_bits_.assign(m * bruhat_words_, 0);
  auto set_bit = [&](size_t row, size_t col) {
    bruhat_bits_[row * bruhat_words_ + col / 64] |= (1ull << (col % 64));
  };
  auto get_bit = [&](size_t row, size_t col) {
    return (bruhat_bits_[row * bruhat_words_ + col / 64] >> (col % 64)) & 1;
  };
  for (size_t jr = 0; jr < m; ++jr) {
    uint32_t j = wprime_list_[jr];
    if (len_[j] == 0) {
      set_bit(jr, jr);
      continue;
    }
    int g = fld_[j];
    uint32_t sj = left_[static_cast<size_t>(g)][j];
    size_t sjr = wprime_rank_[sj];
    for (size_t ir = 0; ir < m; ++ir) {
      uint32_t i = wprime_list_[ir];
      if (len_[i] > len_[j]) continue;
      if (i == j) {
        set_bit(jr, ir);
        continue;
      }
      uint32_t si = left_[static_cast<size_t>(g)][i];
      size_t target;
      if (si != npos && len_[si] < len_[i]) target = wprime_rank_[si];
      else target = ir;
      if (get_bit(sjr, target)) set_bit(jr, ir);
    }
  }
}

uint32_t Ball::index_of(const Elt& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? npos : it->second;
}

uint32_t Ball::require(const Elt& e) const {
  uint32_t i = index_of(e);
  if (i == npos)
    fail_truncation("element of length " + std::to_string(datum->length(e)) +
                        " outside the ball of radius " + std::to_string(radius),
                    datum->length(e));
  return i;
}

bool Ball::bruhat_leq(uint32_t y, uint32_t w) const {
  if (opart_[y] != opart_[w]) return false;
  uint32_t ys = strip_[y], ws = strip_[w];
  return (bruhat_bits_[static_cast<size_t>(wprime_rank_[ws]) * bruhat_words_ +
                       wprime_rank_[ys] / 64] >>
          (wprime_rank_[ys] % 64)) &
         1;
}

std::vector<uint32_t> Ball::elements_up_to(long l) const {
  std::vector<uint32_t> r;
  for (uint32_t i = 0; i < elems_.size(); ++i)
    if (len_[i] <= l) r.push_back(i);
  return r;
}

std::vector<uint32_t> Ball::lowest_cell_elements(long max_len) const {
  std::vector<uint32_t> r;
  for (uint32_t i = 0; i < elems_.size(); ++i)
    if (len_[i] <= max_len && c0_[i].has_value()) r.push_back(i);
  return r;
}

}  // namespace klcell
