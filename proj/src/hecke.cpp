#include "klcell/hecke.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <thread>

namespace klcell {

void parallel_for(size_t n, int threads, const std::function<void(size_t)>& f) {
  if (threads <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) f(i);
    return;
  }
  size_t nt = std::min<size_t>(static_cast<size_t>(threads), n);
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (size_t t = 0; t < nt; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        f(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

using TermMap = std::unordered_map<uint32_t, Laurent>;

Laurent xi_of(const CellDatum& d, int g) {
  const Gamma& L = d.weight_of_gen[static_cast<size_t>(g)];
  Laurent x = Laurent::monomial(L, 1);
  x.add_term(-L, -1);
  return x;
}

void add_into(TermMap& out, uint32_t i, const Laurent& c) {
  if (c.is_zero()) return;
  auto it = out.find(i);
  if (it == out.end()) {
    out.emplace(i, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) out.erase(it);
  }
}

// h -> T~_g * h over a ball, with truncation checks.
TermMap mul_gen_left_map(const Ball& ball, const Laurent& xi_g, int g, const TermMap& h) {
  TermMap out;
  out.reserve(h.size() * 2);
  for (const auto& [i, c] : h) {
    uint32_t j = ball.left_mul(i, g);
    if (j == Ball::npos)
      fail_truncation("product leaves the ball of radius " + std::to_string(ball.radius),
                      ball.length(i) + 1);
    add_into(out, j, c);
    if (ball.length(j) < ball.length(i)) add_into(out, i, c * xi_g);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// KLTable

KLTable::KLTable(const Ball& ball, long radius_in, int threads, bool verify_bar)
    : radius(radius_in), ball_(ball) {
  const CellDatum& D = *ball.datum;
  if (radius > ball.radius) fail_config("KL radius exceeds the ball radius");
  rows_.resize(ball.size());

  std::vector<Laurent> xi(static_cast<size_t>(D.ngens()));
  for (int g = 0; g < D.ngens(); ++g) xi[static_cast<size_t>(g)] = xi_of(D, g);

  std::vector<std::vector<uint32_t>> strata(static_cast<size_t>(radius + 1));
  for (uint32_t i = 0; i < ball.size(); ++i)
    if (ball.length(i) <= radius) strata[static_cast<size_t>(ball.length(i))].push_back(i);

  for (uint32_t i : strata[0]) rows_[i] = Row{{i, Laurent::one(D.gamma_rank)}};

  for (long l = 1; l <= radius; ++l) {
    std::vector<uint32_t> prime;
    std::vector<uint32_t> lifted;
    for (uint32_t w : strata[static_cast<size_t>(l)])
      (ball.in_wprime(w) ? prime : lifted).push_back(w);

    parallel_for(prime.size(), threads, [&](size_t pi) {
      uint32_t w = prime[pi];
      int g = ball.first_left_descent(w);
      uint32_t v = ball.left_mul(w, g);
      // P = C_g * C_v = T~_g C_v + q^{-L(g)} C_v
      TermMap p;
      const Laurent qinv =
          Laurent::monomial(-D.weight_of_gen[static_cast<size_t>(g)], 1);
      {
        TermMap cv;
        for (const auto& [y, c] : rows_[v]) cv.emplace(y, c);
        p = mul_gen_left_map(ball, xi[static_cast<size_t>(g)], g, cv);
        for (const auto& [y, c] : rows_[v]) add_into(p, y, c * qinv);
      }
      // subtract bar-invariant corrections until triangular
      for (;;) {
        uint32_t bad = Ball::npos;
        for (const auto& [y, c] : p) {
          if (y == w) continue;
          if (c.strictly_negative()) continue;
          if (bad == Ball::npos || ball.length(y) > ball.length(bad) ||
              (ball.length(y) == ball.length(bad) && y < bad))
            bad = y;
        }
        if (bad == Ball::npos) break;
        Laurent m = p.at(bad).bar_symmetric_head();
        for (const auto& [z, c] : rows_[bad]) add_into(p, z, -(m * c));
      }
      // checks: unitriangular with strictly negative lower coefficients,
      // support inside the Bruhat interval
      auto pw = p.find(w);
      if (pw == p.end() || !(pw->second == Laurent::one(D.gamma_rank)))
        fail_internal("KL element without unit leading coefficient");
      Row row;
      row.reserve(p.size());
      for (auto& [y, c] : p) {
        if (y != w && !c.strictly_negative())
          fail_internal("KL element violates the negative-degree condition");
        if (!ball.bruhat_leq(y, w)) fail_internal("KL support outside the Bruhat interval");
        row.emplace_back(y, std::move(c));
      }
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      rows_[w] = std::move(row);
    });

    for (uint32_t w : lifted) {
      int k = ball.omega_part(w);
      uint32_t ws = ball.strip_omega(w);
      Row row;
      row.reserve(rows_[ws].size());
      for (const auto& [y, c] : rows_[ws]) row.emplace_back(ball.omega_left(y, k), c);
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      rows_[w] = std::move(row);
    }
  }

  if (verify_bar) {
    // bar(T~_y) for all y up to the radius, by the left recursion
    std::vector<TermMap> bart(ball.size());
    std::vector<uint32_t> order;
    for (long l = 0; l <= radius; ++l)
      for (uint32_t i : strata[static_cast<size_t>(l)]) order.push_back(i);
    for (uint32_t y : order) {
      if (!ball.in_wprime(y)) {
        int k = ball.omega_part(y);
        TermMap m;
        for (const auto& [z, c] : bart[ball.strip_omega(y)])
          add_into(m, ball.omega_left(z, k), c);
        bart[y] = std::move(m);
        continue;
      }
      if (ball.length(y) == 0) {
        bart[y].emplace(y, Laurent::one(D.gamma_rank));
        continue;
      }
      int g = ball.first_left_descent(y);
      uint32_t y2 = ball.left_mul(y, g);
      TermMap m = mul_gen_left_map(ball, xi[static_cast<size_t>(g)], g, bart[y2]);
      for (const auto& [z, c] : bart[y2]) add_into(m, z, -(c * xi[static_cast<size_t>(g)]));
      bart[y] = std::move(m);
    }
    std::vector<uint8_t> ok(ball.size(), 1);
    std::vector<uint32_t> to_check;
    for (long l = 0; l <= radius; ++l)
      for (uint32_t w : strata[static_cast<size_t>(l)])
        if (ball.in_wprime(w)) to_check.push_back(w);
    parallel_for(to_check.size(), threads, [&](size_t i) {
      uint32_t w = to_check[i];
      TermMap acc;
      for (const auto& [y, c] : rows_[w]) {
        Laurent cb = c.bar();
        for (const auto& [z, t] : bart[y]) add_into(acc, z, cb * t);
      }
      // acc must equal the row itself
      if (acc.size() != rows_[w].size()) {
        ok[w] = 0;
        return;
      }
      for (const auto& [y, c] : rows_[w]) {
        auto it = acc.find(y);
        if (it == acc.end() || !(it->second == c)) {
          ok[w] = 0;
          return;
        }
      }
    });
    for (uint32_t i = 0; i < ball.size(); ++i)
      if (!ok[i]) fail_internal("KL element is not bar-invariant");
    bar_verified_ = true;
  }
}

const KLTable::Row& KLTable::row(uint32_t w) const {
  if (ball_.length(w) > radius)
    fail_truncation("KL element outside table radius " + std::to_string(radius),
                    ball_.length(w));
  return rows_[w];
}

Laurent KLTable::kl_coeff(uint32_t y, uint32_t w) const {
  const Row& r = row(w);
  auto it = std::lower_bound(r.begin(), r.end(), y,
                             [](const auto& t, uint32_t v) { return t.first < v; });
  if (it != r.end() && it->first == y) return it->second;
  return Laurent();
}

std::optional<std::pair<Gamma, mpz_class>> KLTable::delta_of(uint32_t z) const {
  Laurent p = kl_coeff(ball_.identity(), z);
  if (p.is_zero()) return std::nullopt;
  Gamma d = *p.degree();
  return std::make_pair(-d, p.leading_coeff());
}

// ---------------------------------------------------------------------------
// HeckeCtx

std::shared_ptr<HeckeCtx> HeckeCtx::make(std::shared_ptr<const CellDatum> datum, long ball_radius,
                                         long kl_radius, int threads, bool verify_bar) {
  auto ctx = std::make_shared<HeckeCtx>();
  ctx->datum = datum;
  ctx->threads = threads;
  ctx->ball = std::make_shared<Ball>(datum, ball_radius);
  ctx->kl = std::make_unique<KLTable>(*ctx->ball, kl_radius, threads, verify_bar);
  return ctx;
}

Laurent HeckeCtx::xi(int g) const { return xi_of(*datum, g); }

HeckeElt HeckeCtx::mul_gen_right(const HeckeElt& h, int g) const {
  HeckeElt out;
  for (const auto& [i, c] : h.terms()) {
    uint32_t j = ball->right_mul(i, g);
    if (j == Ball::npos)
      fail_truncation("product leaves the ball of radius " + std::to_string(ball->radius),
                      ball->length(i) + 1);
    out.add(j, c);
    if (ball->length(j) < ball->length(i)) out.add(i, c * xi(g));
  }
  return out;
}

HeckeElt HeckeCtx::mul_gen_left(int g, const HeckeElt& h) const {
  HeckeElt out;
  for (const auto& [i, c] : h.terms()) {
    uint32_t j = ball->left_mul(i, g);
    if (j == Ball::npos)
      fail_truncation("product leaves the ball of radius " + std::to_string(ball->radius),
                      ball->length(i) + 1);
    out.add(j, c);
    if (ball->length(j) < ball->length(i)) out.add(i, c * xi(g));
  }
  return out;
}

HeckeElt HeckeCtx::mul_omega_right(const HeckeElt& h, int k) const {
  HeckeElt out;
  for (const auto& [i, c] : h.terms()) out.add(ball->omega_right(i, k), c);
  return out;
}

HeckeElt HeckeCtx::mul_omega_left(int k, const HeckeElt& h) const {
  HeckeElt out;
  for (const auto& [i, c] : h.terms()) out.add(ball->omega_left(i, k), c);
  return out;
}

HeckeElt HeckeCtx::mul_basis_right(const HeckeElt& h, uint32_t w) const {
  HeckeElt out = h;
  int k = ball->omega_part(w);
  if (k != 0) out = mul_omega_right(out, k);
  for (int g : ball->word(w)) out = mul_gen_right(out, g);
  return out;
}

HeckeElt HeckeCtx::mul_basis_left(uint32_t w, const HeckeElt& h) const {
  HeckeElt out = h;
  const auto& word = ball->word(w);
  for (auto it = word.rbegin(); it != word.rend(); ++it) out = mul_gen_left(*it, out);
  int k = ball->omega_part(w);
  if (k != 0) out = mul_omega_left(k, out);
  return out;
}

HeckeElt HeckeCtx::mul(const HeckeElt& a, const HeckeElt& b) const {
  HeckeElt out;
  for (uint32_t w : b.sorted_support()) {
    HeckeElt t = mul_basis_right(a, w);
    t.scale(b.coeff(w));
    out += t;
  }
  return out;
}

HeckeElt HeckeCtx::flat(const HeckeElt& h) const {
  HeckeElt out;
  for (const auto& [i, c] : h.terms()) out.add(ball->inverse(i), c);
  return out;
}

const HeckeElt& HeckeCtx::bar_basis(uint32_t w) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = bar_cache_.find(w);
    if (it != bar_cache_.end()) return it->second;
  }
  HeckeElt val;
  if (!ball->in_wprime(w)) {
    int k = ball->omega_part(w);
    val = mul_omega_left(k, bar_basis(ball->strip_omega(w)));
  } else if (ball->length(w) == 0) {
    val = basis(w);
  } else {
    int g = ball->first_left_descent(w);
    uint32_t w2 = ball->left_mul(w, g);
    const HeckeElt& inner = bar_basis(w2);
    val = mul_gen_left(g, inner);
    HeckeElt corr = inner;
    corr.scale(xi(g));
    val -= corr;
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = bar_cache_.emplace(w, std::move(val));
  return it->second;
}

HeckeElt HeckeCtx::bar(const HeckeElt& h) const {
  HeckeElt out;
  for (uint32_t w : h.sorted_support()) {
    HeckeElt t = bar_basis(w);
    t.scale(h.coeff(w).bar());
    out += t;
  }
  return out;
}

HeckeElt HeckeCtx::kl_elt(uint32_t w) const {
  HeckeElt out;
  for (const auto& [y, c] : kl->row(w)) out.add(y, c);
  return out;
}

std::map<uint32_t, Laurent> HeckeCtx::resolve(HeckeElt p) const {
  std::map<uint32_t, Laurent> out;
  while (!p.is_zero()) {
    uint32_t top = Ball::npos;
    for (const auto& [i, c] : p.terms()) {
      if (top == Ball::npos || ball->length(i) > ball->length(top) ||
          (ball->length(i) == ball->length(top) && i < top))
        top = i;
    }
    Laurent h = p.coeff(top);
    for (const auto& [y, c] : kl->row(top)) p.add(y, -(h * c));
    out.emplace(top, std::move(h));
  }
  return out;
}

std::map<uint32_t, Laurent> HeckeCtx::structure_constants(uint32_t x, uint32_t y) const {
  long need = ball->length(x) + ball->length(y);
  if (need > kl->radius)
    fail_truncation("structure constants need KL radius " + std::to_string(need), need);
  return resolve(mul(kl_elt(x), kl_elt(y)));
}

void HeckeCtx::verify_kl_conditions(uint32_t w) const {
  const auto& row = kl->row(w);
  for (const auto& [y, c] : row) {
    if (y == w) {
      if (!(c == Laurent::one(grank()))) fail_internal("leading KL coefficient is not 1");
    } else if (!c.strictly_negative() || !ball->bruhat_leq(y, w)) {
      fail_internal("KL triangularity violated");
    }
  }
  HeckeElt cw = kl_elt(w);
  if (!(bar(cw) == cw)) fail_internal("KL element is not bar-invariant");
}

const HeckeElt& HeckeCtx::theta(const Vec& x) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = theta_cache_.find(x);
    if (it != theta_cache_.end()) return it->second;
  }
  const CellDatum& D = *datum;
  if (!D.in_lattice(x)) fail_domain("theta argument not in the configured lattice");
  int r = D.rd->rank;
  auto decompose = [&](int extra) {
    // x = y - z with both parts dominant and in the lattice
    Vec y = Vec::zero(r), z = Vec::zero(r);
    if (D.mode == Mode::Extended) {
      for (int i = 0; i < r; ++i) {
        y[i] = std::max(x[i], 0);
        z[i] = std::max(-x[i], 0);
      }
      if (extra) {
        Vec rho = D.rd->rho();
        for (int i = 0; i < r; ++i) y[i] += extra * rho[i], z[i] += extra * rho[i];
      }
    } else {
      Vec kappa = D.rd->two_rho();
      int m = 0;
      for (;;) {
        bool dom = true;
        for (int i = 0; i < r; ++i)
          if (x[i] + m * kappa[i] < 0) dom = false;
        if (dom) break;
        ++m;
      }
      m += extra;
      for (int i = 0; i < r; ++i) {
        y[i] = x[i] + m * kappa[i];
        z[i] = m * kappa[i];
      }
    }
    return std::make_pair(y, z);
  };
  auto build = [&](const Vec& y, const Vec& z) {
    uint32_t py = ball->require(D.translation(y));
    uint32_t pnegz = ball->require(D.translation(-z));
    // (T~_{p_z})^{-1} = bar(T~_{p_{-z}})
    HeckeElt invpz = bar_basis(pnegz);
    return mul_basis_left(py, invpz);
  };
  auto [y1, z1] = decompose(0);
  HeckeElt v = build(y1, z1);
  auto [y2, z2] = decompose(1);
  HeckeElt v2 = build(y2, z2);
  if (!(v == v2)) fail_internal("theta depends on the chosen decomposition");
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = theta_cache_.emplace(x, std::move(v));
  return it->second;
}

const HeckeElt& HeckeCtx::central(const Vec& x) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = central_cache_.find(x);
    if (it != central_cache_.end()) return it->second;
  }
  const CellDatum& D = *datum;
  if (!D.dominant_lattice(x)) fail_domain("central element needs a dominant lattice weight");
  HeckeElt s;
  for (const auto& [xp, d] : D.rep->weight_system(x)) {
    HeckeElt t = theta(xp);
    t.scale(Laurent::integer(grank(), d));
    s += t;
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = central_cache_.emplace(x, std::move(s));
  return it->second;
}

HeckeElt HeckeCtx::left_factor(uint32_t w) const {
  if (!ball->in_u0(w)) fail_domain("left factor requires an element of U_0");
  const CellDatum& D = *datum;
  Elt w0e = D.longest_finite();
  long lw0 = D.l_w0();
  uint32_t ww0 = ball->require(D.mul(ball->elt(w), w0e));
  HeckeElt e;
  for (const auto& [y, c] : kl->row(ww0)) {
    Elt u = D.mul(ball->elt(y), w0e);
    long lu = D.length(u);
    if (lu + lw0 != ball->length(y)) continue;
    e.add(ball->require(u), c);
  }
  return e;
}

HeckeElt HeckeCtx::right_factor(uint32_t w) const { return flat(left_factor(w)); }

HeckeElt HeckeCtx::c_w0_explicit() const {
  const CellDatum& D = *datum;
  Gamma lw0 = D.weight_w0();
  HeckeElt c;
  for (size_t u = 0; u < D.rd->w0group.size(); ++u) {
    Elt y{Vec::zero(D.rd->rank), static_cast<uint16_t>(u)};
    uint32_t i = ball->require(y);
    c.add(i, Laurent::monomial(ball->wlength(i) - lw0, 1));
  }
  return c;
}

const HeckeElt& HeckeCtx::c_w0_times_central(const Vec& x) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cw0px_cache_.find(x);
    if (it != cw0px_cache_.end()) return it->second;
  }
  HeckeElt v = mul(c_w0_explicit(), central(x));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = cw0px_cache_.emplace(x, std::move(v));
  return it->second;
}

std::map<Vec, Laurent> HeckeCtx::resolve_lowest_row(HeckeElt p) const {
  const CellDatum& D = *datum;
  Elt w0inv = D.inv(D.longest_finite());
  std::map<Vec, Laurent> out;
  while (!p.is_zero()) {
    uint32_t top = Ball::npos;
    for (const auto& [i, c] : p.terms()) {
      if (top == Ball::npos || ball->length(i) > ball->length(top) ||
          (ball->length(i) == ball->length(top) && i < top))
        top = i;
    }
    Elt px = D.mul(w0inv, ball->elt(top));
    if (px.u != 0 || !D.dominant_lattice(px.x))
      fail_internal("product does not lie in the span of C_{w0 p_x}");
    Laurent c = p.coeff(top);
    p -= [&] {
      HeckeElt t = c_w0_times_central(px.x);
      t.scale(c);
      return t;
    }();
    out.emplace(px.x, std::move(c));
  }
  return out;
}

uint32_t HeckeCtx::b0_ball_index(uint32_t b0_idx) const {
  return ball->require(datum->b0_elements()[b0_idx]);
}

std::pair<HeckeElt, HeckeElt> HeckeCtx::xi_residuals(uint32_t b0_idx1, const Vec& x,
                                                     uint32_t b0_idx2) const {
  const CellDatum& D = *datum;
  const Elt& w1 = D.b0_elements()[b0_idx1];
  const Elt& w2 = D.b0_elements()[b0_idx2];
  Elt w0e = D.longest_finite();
  Elt z = D.mul(D.mul(D.mul(w1, w0e), D.translation(x)), D.inv(w2));
  HeckeElt lhs = kl_elt(ball->require(z));

  HeckeElt rhs = left_factor(ball->require(w1));
  rhs = mul(rhs, c_w0_explicit());
  rhs = mul(rhs, central(x));
  rhs = mul(rhs, right_factor(ball->require(w2)));
  HeckeElt res1 = lhs;
  res1 -= rhs;

  Elt z2 = D.mul(D.mul(w1, w0e), D.inv(w2));
  HeckeElt rhs2 = mul(kl_elt(ball->require(z2)), central(x));
  HeckeElt res2 = lhs;
  res2 -= rhs2;
  return {std::move(res1), std::move(res2)};
}

}  // namespace klcell
