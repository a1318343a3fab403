#include "klcell/root_datum.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace klcell {

std::string Vec::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < rank; ++i) {
    if (i) os << ',';
    os << c[static_cast<size_t>(i)];
  }
  os << ')';
  return os.str();
}

namespace {

struct TypeData {
  int rank;
  Mat cartan;
  std::array<int32_t, kMaxRank> d;
};

void chain_edges(Mat& a, int rank) {
  for (int i = 0; i + 1 < rank; ++i) {
    a[static_cast<size_t>(i)][static_cast<size_t>(i + 1)] = -1;
    a[static_cast<size_t>(i + 1)][static_cast<size_t>(i)] = -1;
  }
}

TypeData type_data(const std::string& name) {
  if (name.size() < 2) fail_config("unknown root system type: " + name);
  char fam = name[0];
  int n = std::atoi(name.c_str() + 1);
  if (n < 1 || n > kMaxRank) fail_config("unsupported rank in type: " + name);
  TypeData t;
  t.rank = n;
  for (auto& row : t.cartan) row.fill(0);
  for (int i = 0; i < n; ++i) t.cartan[static_cast<size_t>(i)][static_cast<size_t>(i)] = 2;
  t.d.fill(1);
  auto std_edge = [&](int i, int j) {
    t.cartan[static_cast<size_t>(i)][static_cast<size_t>(j)] = -1;
    t.cartan[static_cast<size_t>(j)][static_cast<size_t>(i)] = -1;
  };
  switch (fam) {
    case 'A':
      chain_edges(t.cartan, n);
      return t;
    case 'B':
      if (n < 2) fail_config("B_n needs n >= 2");
      chain_edges(t.cartan, n);
      // alpha_n short: <alpha_{n-1}, alpha_n^vee> = -2
      t.cartan[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 2)] = -2;
      for (int i = 0; i < n - 1; ++i) t.d[static_cast<size_t>(i)] = 2;
      t.d[static_cast<size_t>(n - 1)] = 1;
      return t;
    case 'C':
      if (n < 2) fail_config("C_n needs n >= 2");
      chain_edges(t.cartan, n);
      // alpha_n long: <alpha_n, alpha_{n-1}^vee> = -2
      t.cartan[static_cast<size_t>(n - 2)][static_cast<size_t>(n - 1)] = -2;
      for (int i = 0; i < n - 1; ++i) t.d[static_cast<size_t>(i)] = 1;
      t.d[static_cast<size_t>(n - 1)] = 2;
      return t;
    case 'D':
      if (n < 3) fail_config("D_n needs n >= 3");
      chain_edges(t.cartan, n - 1);
      t.cartan[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)] = 2;
      std_edge(n - 3, n - 1);
      return t;
    case 'E': {
      if (n < 6 || n > 8) fail_config("E_n needs n in {6,7,8}");
      // Bourbaki numbering: chain 1-3-4-5-...-n, extra node 2 attached to 4.
      std_edge(0, 2);
      for (int i = 2; i + 1 < n; ++i) std_edge(i, i + 1);
      std_edge(1, 3);
      return t;
    }
    case 'F':
      if (n != 4) fail_config("only F4 supported");
      chain_edges(t.cartan, 4);
      t.cartan[static_cast<size_t>(2)][static_cast<size_t>(1)] = -2;  // <alpha_2, alpha_3^vee> = -2
      t.d = {2, 2, 1, 1, 1, 1, 1, 1};
      return t;
    case 'G':
      if (n != 2) fail_config("only G2 supported");
      t.cartan[0][1] = -3;  // <alpha_2, alpha_1^vee> = -3, alpha_1 short
      t.cartan[1][0] = -1;
      t.d = {1, 3, 1, 1, 1, 1, 1, 1};
      return t;
    default:
      fail_config("unknown root system type: " + name);
  }
}

long det_int(const Mat& m, std::vector<int> idx) {
  if (idx.empty()) return 1;
  if (idx.size() == 1) return m[static_cast<size_t>(idx[0])][static_cast<size_t>(idx[0])];
  // expand along the first remaining row
  long det = 0;
  int row = idx[0];
  std::vector<int> rest(idx.begin() + 1, idx.end());
  int sign = 1;
  for (size_t k = 0; k < idx.size(); ++k) {
    int col = idx[k];
    std::vector<int> sub_rows = rest;
    std::vector<int> sub_cols;
    for (size_t j = 0; j < idx.size(); ++j)
      if (j != k) sub_cols.push_back(idx[j]);
    // minor over sub_rows x sub_cols
    long minor;
    {
      size_t s = sub_rows.size();
      if (s == 0) {
        minor = 1;
      } else {
        // general recursive minor
        std::vector<std::vector<long>> mm(s, std::vector<long>(s));
        for (size_t r = 0; r < s; ++r)
          for (size_t c = 0; c < s; ++c)
            mm[r][c] = m[static_cast<size_t>(sub_rows[r])][static_cast<size_t>(sub_cols[c])];
        // fraction-free Gaussian elimination (Bareiss)
        long denom = 1;
        minor = 1;
        bool zero = false;
        for (size_t p = 0; p + 1 < s && !zero; ++p) {
          if (mm[p][p] == 0) {
            size_t swap = p + 1;
            while (swap < s && mm[swap][p] == 0) ++swap;
            if (swap == s) {
              zero = true;
              break;
            }
            std::swap(mm[p], mm[swap]);
            denom = -denom;
          }
          for (size_t r = p + 1; r < s; ++r)
            for (size_t c = p + 1; c < s; ++c)
              mm[r][c] = (mm[r][c] * mm[p][p] - mm[r][p] * mm[p][c]) / (p == 0 ? 1 : mm[p - 1][p - 1]);
        }
        minor = zero ? 0 : denom * mm[s - 1][s - 1];
      }
    }
    det += sign * m[static_cast<size_t>(row)][static_cast<size_t>(col)] * minor;
    sign = -sign;
  }
  return det;
}

}  // namespace

std::shared_ptr<const RootDatum> RootDatum::make(const std::string& type_name) {
  auto rd = std::shared_ptr<RootDatum>(new RootDatum());
  rd->build(type_name);
  return rd;
}

Vec RootDatum::apply(uint16_t u, const Vec& weight) const {
  const Mat& m = w0group.action[u];
  Vec r = Vec::zero(rank);
  for (int i = 0; i < rank; ++i) {
    long s = 0;
    for (int j = 0; j < rank; ++j)
      s += static_cast<long>(m[static_cast<size_t>(i)][static_cast<size_t>(j)]) * weight[j];
    r[i] = static_cast<int32_t>(s);
  }
  return r;
}

int RootDatum::root_image(uint16_t u, int root_idx, int* sign) const {
  int16_t v = w0group.root_action[static_cast<size_t>(u) * positive_roots.size() +
                                  static_cast<size_t>(root_idx)];
  *sign = v > 0 ? 1 : -1;
  return (v > 0 ? v : -v) - 1;
}

Vec RootDatum::root_as_weight(int root_idx) const {
  const Vec& a = positive_roots[static_cast<size_t>(root_idx)].alpha;
  Vec r = Vec::zero(rank);
  for (int i = 0; i < rank; ++i) {
    long s = 0;
    for (int j = 0; j < rank; ++j)
      s += static_cast<long>(cartan[static_cast<size_t>(i)][static_cast<size_t>(j)]) * a[j];
    r[i] = static_cast<int32_t>(s);
  }
  return r;
}

Vec RootDatum::dominize(const Vec& weight, int* det_sign) const {
  Vec x = weight;
  int sign = 1;
  bool moved = true;
  while (moved) {
    moved = false;
    for (int i = 0; i < rank; ++i) {
      if (x[i] < 0) {
        // apply s_i: x -> x - x_i * alpha_i
        int32_t xi = x[i];
        for (int k = 0; k < rank; ++k)
          x[k] -= xi * cartan[static_cast<size_t>(k)][static_cast<size_t>(i)];
        sign = -sign;
        moved = true;
      }
    }
  }
  if (det_sign) {
    bool wall = false;
    for (int i = 0; i < rank; ++i)
      if (x[i] == 0) wall = true;
    *det_sign = wall ? 0 : sign;
  }
  return x;
}

bool RootDatum::in_root_lattice(const Vec& weight) const {
  for (int i = 0; i < rank; ++i) {
    long s = 0;
    for (int j = 0; j < rank; ++j)
      s += static_cast<long>(cartan_adj[static_cast<size_t>(i)][static_cast<size_t>(j)]) * weight[j];
    if (s % cartan_det != 0) return false;
  }
  return true;
}

Vec RootDatum::two_rho() const {
  Vec sum_alpha = Vec::zero(rank);
  for (const auto& r : positive_roots)
    for (int i = 0; i < rank; ++i) sum_alpha[i] += r.alpha[i];
  Vec r = Vec::zero(rank);
  for (int i = 0; i < rank; ++i) {
    long s = 0;
    for (int j = 0; j < rank; ++j)
      s += static_cast<long>(cartan[static_cast<size_t>(i)][static_cast<size_t>(j)]) * sum_alpha[j];
    r[i] = static_cast<int32_t>(s);
  }
  return r;
}

void RootDatum::build(const std::string& name) {
  TypeData td = type_data(name);
  type_name = name;
  rank = td.rank;
  cartan = td.cartan;
  root_len = td.d;

  // All roots, as (alpha, coalpha) pairs, by closure under simple reflections.
  std::vector<Root> all;
  std::map<std::pair<std::vector<int32_t>, std::vector<int32_t>>, int> seen;
  auto key_of = [&](const Root& r) {
    std::vector<int32_t> a(r.alpha.c.begin(), r.alpha.c.begin() + rank);
    std::vector<int32_t> b(r.coalpha.c.begin(), r.coalpha.c.begin() + rank);
    return std::make_pair(a, b);
  };
  for (int i = 0; i < rank; ++i) {
    Root r;
    r.alpha = Vec::zero(rank);
    r.coalpha = Vec::zero(rank);
    r.alpha[i] = 1;
    r.coalpha[i] = 1;
    seen[key_of(r)] = static_cast<int>(all.size());
    all.push_back(r);
  }
  for (size_t head = 0; head < all.size(); ++head) {
    Root cur = all[head];
    for (int i = 0; i < rank; ++i) {
      Root img;
      img.alpha = cur.alpha;
      img.coalpha = cur.coalpha;
      long pa = 0, pc = 0;
      for (int j = 0; j < rank; ++j) {
        pa += static_cast<long>(cartan[static_cast<size_t>(i)][static_cast<size_t>(j)]) * cur.alpha[j];
        pc += static_cast<long>(cartan[static_cast<size_t>(j)][static_cast<size_t>(i)]) * cur.coalpha[j];
      }
      img.alpha[i] -= static_cast<int32_t>(pa);
      img.coalpha[i] -= static_cast<int32_t>(pc);
      if (!seen.count(key_of(img))) {
        seen[key_of(img)] = static_cast<int>(all.size());
        all.push_back(img);
      }
    }
  }
  for (const auto& r : all) {
    bool pos = true;
    for (int i = 0; i < rank; ++i)
      if (r.alpha[i] < 0) pos = false;
    if (pos) positive_roots.push_back(r);
  }
  auto height = [&](const Vec& v) {
    int h = 0;
    for (int i = 0; i < rank; ++i) h += v[i];
    return h;
  };
  std::sort(positive_roots.begin(), positive_roots.end(), [&](const Root& a, const Root& b) {
    int ha = height(a.alpha), hb = height(b.alpha);
    if (ha != hb) return ha < hb;
    return a.alpha < b.alpha;
  });
  for (size_t k = 0; k < positive_roots.size(); ++k) {
    if (highest_root_idx < 0 ||
        height(positive_roots[static_cast<size_t>(highest_root_idx)].alpha) <
            height(positive_roots[k].alpha))
      highest_root_idx = static_cast<int>(k);
    if (highest_coroot_idx < 0 ||
        height(positive_roots[static_cast<size_t>(highest_coroot_idx)].coalpha) <
            height(positive_roots[k].coalpha))
      highest_coroot_idx = static_cast<int>(k);
  }
  coxeter_number = height(positive_roots[static_cast<size_t>(highest_root_idx)].alpha) + 1;

  // W0 by breadth-first closure of the generator matrices.
  auto& g = w0group;
  Mat id{};
  for (auto& row : id) row.fill(0);
  for (int i = 0; i < rank; ++i) id[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1;
  std::vector<Mat> gens(static_cast<size_t>(rank), id);
  for (int i = 0; i < rank; ++i)
    for (int k = 0; k < rank; ++k)
      gens[static_cast<size_t>(i)][static_cast<size_t>(k)][static_cast<size_t>(i)] -=
          cartan[static_cast<size_t>(k)][static_cast<size_t>(i)];

  auto mat_key = [&](const Mat& m) {
    std::vector<int32_t> v;
    v.reserve(static_cast<size_t>(rank * rank));
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) v.push_back(m[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    return v;
  };
  auto mat_mul = [&](const Mat& a, const Mat& b) {
    Mat r{};
    for (auto& row : r) row.fill(0);
    for (int i = 0; i < rank; ++i)
      for (int k = 0; k < rank; ++k) {
        int32_t aik = a[static_cast<size_t>(i)][static_cast<size_t>(k)];
        if (!aik) continue;
        for (int j = 0; j < rank; ++j)
          r[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
              aik * b[static_cast<size_t>(k)][static_cast<size_t>(j)];
      }
    return r;
  };

  std::map<std::vector<int32_t>, uint16_t> index;
  g.action.push_back(id);
  g.length.push_back(0);
  g.word.push_back({});
  index[mat_key(id)] = 0;
  for (size_t head = 0; head < g.action.size(); ++head) {
    Mat cur = g.action[head];
    for (int i = 0; i < rank; ++i) {
      Mat nxt = mat_mul(cur, gens[static_cast<size_t>(i)]);
      auto key = mat_key(nxt);
      if (!index.count(key)) {
        if (g.action.size() >= 65000) fail_config("Weyl group too large for this build");
        index[key] = static_cast<uint16_t>(g.action.size());
        g.action.push_back(nxt);
        g.length.push_back(static_cast<uint8_t>(g.length[head] + 1));
        auto w = g.word[head];
        w.push_back(static_cast<uint8_t>(i + 1));
        g.word.push_back(std::move(w));
      }
    }
  }
  size_t n = g.size();
  if (n * n > (1ull << 26)) fail_config("Weyl group multiplication table too large");
  g.mult.assign(n * n, 0);
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      g.mult[a * n + b] = index.at(mat_key(mat_mul(g.action[a], g.action[b])));
  g.inverse.assign(n, 0);
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      if (g.mult[a * n + b] == 0) g.inverse[a] = static_cast<uint16_t>(b);
  g.w0 = 0;
  for (size_t a = 0; a < n; ++a)
    if (g.length[a] > g.length[g.w0]) g.w0 = static_cast<uint16_t>(a);

  // Root action table: generators from the reflection action on alpha coords,
  // general elements composed along BFS words.
  size_t npos = positive_roots.size();
  std::map<std::vector<int32_t>, int> root_index;
  for (size_t k = 0; k < npos; ++k) {
    std::vector<int32_t> v(positive_roots[k].alpha.c.begin(),
                           positive_roots[k].alpha.c.begin() + rank);
    root_index[v] = static_cast<int>(k);
  }
  g.root_action.assign(n * npos, 0);
  std::vector<std::vector<int16_t>> gen_action(static_cast<size_t>(rank),
                                               std::vector<int16_t>(npos));
  for (int i = 0; i < rank; ++i) {
    for (size_t k = 0; k < npos; ++k) {
      Vec a = positive_roots[k].alpha;
      long p = 0;
      for (int j = 0; j < rank; ++j)
        p += static_cast<long>(cartan[static_cast<size_t>(i)][static_cast<size_t>(j)]) * a[j];
      a[i] -= static_cast<int32_t>(p);
      int sgn = 1;
      bool pos = true;
      for (int j = 0; j < rank; ++j)
        if (a[j] < 0) pos = false;
      if (!pos) {
        a = -a;
        sgn = -1;
      }
      std::vector<int32_t> v(a.c.begin(), a.c.begin() + rank);
      gen_action[static_cast<size_t>(i)][k] = static_cast<int16_t>(sgn * (root_index.at(v) + 1));
    }
  }
  for (size_t u = 0; u < n; ++u) {
    for (size_t k = 0; k < npos; ++k) {
      // u = s_{w1} ... s_{wm} acting on root k: apply rightmost letter first
      int idx = static_cast<int>(k);
      int sgn = 1;
      const auto& w = g.word[u];
      for (auto it = w.rbegin(); it != w.rend(); ++it) {
        int16_t v = gen_action[static_cast<size_t>(*it - 1)][static_cast<size_t>(idx)];
        sgn *= v > 0 ? 1 : -1;
        idx = (v > 0 ? v : -v) - 1;
      }
      g.root_action[u * npos + k] = static_cast<int16_t>(sgn * (idx + 1));
    }
  }
  // cross-check: Coxeter length equals the number of positive roots sent negative
  for (size_t u = 0; u < n; ++u) {
    int neg = 0;
    for (size_t k = 0; k < npos; ++k)
      if (g.root_action[u * npos + k] < 0) ++neg;
    if (neg != g.length[u]) fail_internal("length/root-inversion mismatch in Weyl group build");
  }

  // det and adjugate of the Cartan matrix
  std::vector<int> all_idx(static_cast<size_t>(rank));
  std::iota(all_idx.begin(), all_idx.end(), 0);
  cartan_det = det_int(cartan, all_idx);
  for (int i = 0; i < rank; ++i) {
    for (int j = 0; j < rank; ++j) {
      std::vector<int> rows, cols;
      for (int r = 0; r < rank; ++r)
        if (r != j) rows.push_back(r);
      // adjugate = transpose of cofactor matrix: adj[i][j] = (-1)^{i+j} M_{ji}
      Mat sub{};
      for (auto& row : sub) row.fill(0);
      int rr = 0;
      for (int r = 0; r < rank; ++r) {
        if (r == j) continue;
        int cc = 0;
        for (int c = 0; c < rank; ++c) {
          if (c == i) continue;
          sub[static_cast<size_t>(rr)][static_cast<size_t>(cc)] =
              cartan[static_cast<size_t>(r)][static_cast<size_t>(c)];
          ++cc;
        }
        ++rr;
      }
      std::vector<int> sidx(static_cast<size_t>(rank - 1));
      std::iota(sidx.begin(), sidx.end(), 0);
      long minor = rank == 1 ? 1 : det_int(sub, sidx);
      cartan_adj[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          static_cast<int32_t>(((i + j) % 2 == 0 ? 1 : -1) * minor);
    }
  }
}

}  // namespace klcell
