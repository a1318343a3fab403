#include "klcell/cells.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <unordered_set>

namespace klcell {

namespace {

std::string elt_str(const CellDatum& d, const Elt& e) {
  auto [k, letters] = d.reduced_word(e);
  std::ostringstream os;
  if (k) os << "o" << k;
  if (letters.empty() && !k) os << "e";
  for (size_t i = 0; i < letters.size(); ++i) {
    if (i || k) os << ".";
    os << "s" << letters[i];
  }
  return os.str();
}

std::string idx_str(const HeckeCtx& ctx, uint32_t i) {
  return elt_str(*ctx.datum, ctx.ball->elt(i));
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// gamma values from one T-basis product: entries u -> coefficient of q^{L(w0)}
// at T~_u in T~_a T~_b.
std::vector<std::pair<uint32_t, mpz_class>> gamma_row(const HeckeCtx& ctx, uint32_t a,
                                                      uint32_t b, const Gamma& lw0) {
  HeckeElt p = ctx.mul_basis_right(ctx.basis(a), b);
  std::vector<std::pair<uint32_t, mpz_class>> out;
  for (uint32_t u : p.sorted_support()) {
    mpz_class g = p.coeff(u).coeff_at(lw0);
    if (g != 0) out.emplace_back(u, std::move(g));
  }
  return out;
}

// gamma_{x,y,z} for x,y,z drawn from a fixed list, via the trace route.
class GammaTable {
public:
  GammaTable(const HeckeCtx& ctx, const std::vector<uint32_t>& list, int threads)
      : ctx_(ctx), lw0_(ctx.datum->weight_w0()), list_(list) {
    rows_.resize(list.size() * list.size());
    parallel_for(rows_.size(), threads, [&](size_t i) {
      uint32_t a = list_[i / list_.size()];
      uint32_t b = list_[i % list_.size()];
      rows_[i] = gamma_row(ctx_, a, b, lw0_);
    });
    for (size_t i = 0; i < list.size(); ++i) pos_[list[i]] = i;
  }

  // gamma_{x, a, b}: the coefficient of q^{L(w0)} at T~_{x^{-1}} in T~_a T~_b
  mpz_class gamma(uint32_t x, uint32_t a, uint32_t b) const {
    const auto& row = rows_[pos_.at(a) * list_.size() + pos_.at(b)];
    uint32_t u = ctx_.ball->inverse(x);
    for (const auto& [v, g] : row)
      if (v == u) return g;
    return mpz_class(0);
  }
  const std::vector<std::pair<uint32_t, mpz_class>>& row(uint32_t a, uint32_t b) const {
    return rows_[pos_.at(a) * list_.size() + pos_.at(b)];
  }

private:
  const HeckeCtx& ctx_;
  Gamma lw0_;
  std::vector<uint32_t> list_;
  std::unordered_map<uint32_t, size_t> pos_;
  std::vector<std::vector<std::pair<uint32_t, mpz_class>>> rows_;
};

struct Runner {
  const HeckeCtx& ctx;
  const SuiteOptions& opt;
  CellReport rep;
  Stopwatch watch;

  Runner(const HeckeCtx& c, const SuiteOptions& o, const std::string& prop,
         const std::string& statement)
      : ctx(c), opt(o) {
    rep.property = prop;
    rep.statement = statement;
    rep.radius = o.radius;
    rep.scope = o.sample > 0 ? "sample(" + std::to_string(o.sample) +
                                   ", seed=" + std::to_string(o.seed) + ")"
                             : "exhaustive";
    rep.verdict = "pass";
  }

  bool fail(const std::string& witness) {
    if (rep.verdict != "fail") {
      rep.verdict = "fail";
      rep.witness = witness;
    }
    return false;
  }
  CellReport done(long checked) {
    rep.checked = checked;
    if (checked == 0 && rep.verdict == "pass") rep.verdict = "vacuous";
    rep.millis = watch.ms();
    return rep;
  }
};

std::vector<size_t> sample_indices(size_t space, long budget, uint64_t seed) {
  std::vector<size_t> out;
  if (budget <= 0 || static_cast<size_t>(budget) >= space) {
    out.resize(space);
    for (size_t i = 0; i < space; ++i) out[i] = i;
    return out;
  }
  std::mt19937_64 rng(seed);
  out.reserve(static_cast<size_t>(budget));
  for (long i = 0; i < budget; ++i) out.push_back(static_cast<size_t>(rng() % space));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

mpz_class gamma_trace(const HeckeCtx& ctx, uint32_t x, uint32_t y, uint32_t z) {
  HeckeElt p = ctx.mul_basis_right(ctx.basis(y), z);
  return p.coeff(ctx.ball->inverse(x)).coeff_at(ctx.datum->weight_w0());
}

mpz_class gamma_structure(const HeckeCtx& ctx, uint32_t x, uint32_t y, uint32_t z) {
  if (!ctx.ball->in_lowest_cell(x) || !ctx.ball->in_lowest_cell(y) ||
      !ctx.ball->in_lowest_cell(z))
    fail_domain("gamma is defined on the lowest cell");
  auto h = ctx.structure_constants(x, y);
  auto it = h.find(ctx.ball->inverse(z));
  if (it == h.end()) return mpz_class(0);
  return it->second.coeff_at(ctx.datum->weight_w0());
}

std::vector<uint32_t> distinguished_involutions(const HeckeCtx& ctx) {
  const CellDatum& D = *ctx.datum;
  Gamma lw0 = D.weight_w0();
  std::vector<uint32_t> out;
  for (const Elt& d : D.distinguished_involutions()) {
    if (!(D.mul(d, d) == D.identity()))
      fail_internal("distinguished element is not an involution");
    uint32_t i = ctx.ball->require(d);
    auto dn = ctx.kl->delta_of(i);
    if (!dn) fail_internal("distinguished involution with infinite Delta");
    if (!(dn->first == lw0)) fail_internal("distinguished involution with Delta(d) != L(w0)");
    if (dn->second != 1) fail_internal("distinguished involution with n_d != 1");
    out.push_back(i);
  }
  return out;
}

uint32_t left_cell_label(const HeckeCtx& ctx, uint32_t z) {
  const auto& f = ctx.ball->cell_factor(z);
  if (!f) fail_domain("element is not in the lowest cell");
  return f->b2;
}

uint32_t right_cell_label(const HeckeCtx& ctx, uint32_t z) {
  const auto& f = ctx.ball->cell_factor(z);
  if (!f) fail_domain("element is not in the lowest cell");
  return f->b1;
}

std::optional<Gamma> empirical_a(const HeckeCtx& ctx, uint32_t z, long pair_radius) {
  if (2 * pair_radius > ctx.kl->radius)
    fail_truncation("empirical a-sweep needs KL radius " + std::to_string(2 * pair_radius),
                    2 * pair_radius);
  std::optional<Gamma> best;
  auto xs = ctx.ball->elements_up_to(pair_radius);
  for (uint32_t x : xs) {
    for (uint32_t y : xs) {
      auto h = ctx.structure_constants(x, y);
      auto it = h.find(z);
      if (it == h.end()) continue;
      Gamma d = *it->second.degree();
      if (!best || *best < d) best = d;
    }
  }
  return best;
}

const std::vector<std::string>& all_properties() {
  static const std::vector<std::string> props = {"P1", "P2",  "P3",  "P4",    "P5",   "P6",
                                                 "P7", "P8", "P13", "P15", "DEG32", "DEG33"};
  return props;
}

namespace {

CellReport prop_p1(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "P1",
           "Delta(z) >= a(z) = L(w0) on the lowest cell, with equality exactly on the "
           "distinguished involutions");
  Gamma lw0 = ctx.datum->weight_w0();
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  auto dis = distinguished_involutions(ctx);
  std::unordered_set<uint32_t> dset(dis.begin(), dis.end());
  long checked = 0;
  auto sel = sample_indices(cell.size(), opt.sample, opt.seed);
  for (size_t si : sel) {
    uint32_t z = cell[si];
    auto dn = ctx.kl->delta_of(z);
    ++checked;
    if (dn && dn->first < lw0) {
      r.fail("z=" + idx_str(ctx, z) + " Delta=" + dn->first.str());
      break;
    }
    bool at_floor = dn && dn->first == lw0;
    if (at_floor != (dset.count(z) > 0)) {
      r.fail("z=" + idx_str(ctx, z) + " Delta=" + (dn ? dn->first.str() : "inf") +
             " distinguished=" + (dset.count(z) ? "yes" : "no"));
      break;
    }
  }
  return r.done(checked);
}

CellReport prop_p2(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "P2", "gamma_{x,y,d} != 0 with d distinguished forces x = y^{-1}");
  Gamma lw0 = ctx.datum->weight_w0();
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  auto dis = distinguished_involutions(ctx);
  long checked = 0;
  size_t space = cell.size() * dis.size();
  auto sel = sample_indices(space, opt.sample, opt.seed);
  for (size_t si : sel) {
    uint32_t y = cell[si / dis.size()];
    uint32_t d = dis[si % dis.size()];
    auto row = gamma_row(ctx, y, d, lw0);
    ++checked;
    for (const auto& [u, g] : row) {
      if (!ctx.ball->in_lowest_cell(u)) continue;
      if (u != y) {
        r.fail("x=" + idx_str(ctx, ctx.ball->inverse(u)) + " y=" + idx_str(ctx, y) +
               " d=" + idx_str(ctx, d) + " gamma=" + g.get_str());
        break;
      }
    }
    if (r.rep.verdict == "fail") break;
  }
  return r.done(checked);
}

CellReport prop_p3_p5(const HeckeCtx& ctx, const SuiteOptions& opt, bool p5) {
  Runner r(ctx, opt, p5 ? "P5" : "P3",
           p5 ? "gamma_{y^{-1},y,d} = n_d = 1 for the matching distinguished d"
              : "every y in the lowest cell meets a unique distinguished d with "
                "gamma_{y^{-1},y,d} != 0");
  Gamma lw0 = ctx.datum->weight_w0();
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  auto dis = distinguished_involutions(ctx);
  long checked = 0;
  auto sel = sample_indices(cell.size(), opt.sample, opt.seed);
  for (size_t si : sel) {
    uint32_t y = cell[si];
    ++checked;
    int hits = 0;
    mpz_class val;
    uint32_t hit_d = Ball::npos;
    for (uint32_t d : dis) {
      // gamma_{y^{-1},y,d}: coefficient at T~_y of T~_y T~_d
      HeckeElt p = ctx.mul_basis_right(ctx.basis(y), d);
      mpz_class g = p.coeff(y).coeff_at(lw0);
      if (g != 0) {
        ++hits;
        val = g;
        hit_d = d;
      }
    }
    if (!p5 && hits != 1) {
      r.fail("y=" + idx_str(ctx, y) + " hits=" + std::to_string(hits));
      break;
    }
    if (p5 && hits >= 1) {
      mpz_class nd = ctx.kl->delta_of(hit_d)->second;
      if (val != 1 || nd != 1) {
        r.fail("y=" + idx_str(ctx, y) + " gamma=" + val.get_str() + " n_d=" + nd.get_str());
        break;
      }
    }
  }
  return r.done(checked);
}

CellReport prop_p4(const HeckeCtx& ctx, const SuiteOptions& opt) {
  long pr = opt.pair_radius >= 0 ? opt.pair_radius
                                 : std::min(opt.radius, ctx.kl->radius - opt.radius);
  Runner r(ctx, opt, "P4",
           "the lowest cell is exactly the a = L(w0) locus; empirical sweep with T-basis "
           "pairs to radius " +
               std::to_string(opt.radius) + " and C-basis pairs to radius " +
               std::to_string(pr));
  Gamma lw0 = ctx.datum->weight_w0();
  const Ball& ball = *ctx.ball;
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  auto dis = distinguished_involutions(ctx);
  long checked = 0;

  // attainment on the cell: gamma_{z,d,z^{-1}} != 0 for the distinguished
  // involution d of the left cell of z
  std::unordered_map<uint32_t, uint32_t> d_of_label;
  for (uint32_t d : dis) d_of_label[left_cell_label(ctx, d)] = d;
  for (uint32_t z : cell) {
    uint32_t d = d_of_label.at(left_cell_label(ctx, z));
    HeckeElt p = ctx.mul_basis_right(ctx.basis(d), ball.inverse(z));
    ++checked;
    if (p.coeff(ball.inverse(z)).coeff_at(lw0) == 0) {
      r.fail("attainment failed at z=" + idx_str(ctx, z));
      return r.done(checked);
    }
  }

  // sweeps: per-target maxima of deg m_{x,y,z} resp. deg h_{x,y,z}
  auto scan = [&](long rad, bool structure) -> bool {
    std::vector<uint32_t> xs;
    for (uint32_t i : ball.elements_up_to(rad))
      if (ball.in_wprime(i)) xs.push_back(i);
    size_t space = xs.size() * xs.size();
    auto sel = sample_indices(space, opt.sample ? opt.sample * 4 : 0, opt.seed + 7);
    std::vector<std::optional<Gamma>> maxdeg(ball.size());
    std::mutex merge_mu;
    parallel_for(sel.size(), opt.threads, [&](size_t k) {
      uint32_t x = xs[sel[k] / xs.size()], y = xs[sel[k] % xs.size()];
      std::vector<std::pair<uint32_t, Gamma>> local;
      if (structure) {
        for (const auto& [z, h] : ctx.structure_constants(x, y))
          local.emplace_back(z, *h.degree());
      } else {
        HeckeElt p = ctx.mul_basis_right(ctx.basis(x), y);
        for (const auto& [z, c] : p.terms()) local.emplace_back(z, *c.degree());
      }
      std::lock_guard<std::mutex> lock(merge_mu);
      size_t nom = ctx.datum->omega.size();
      for (const auto& [z, dg] : local)
        for (size_t ka = 0; ka < nom; ++ka)
          for (size_t kb = 0; kb < nom; ++kb) {
            uint32_t zz =
                ball.omega_left(ball.omega_right(z, static_cast<int>(kb)), static_cast<int>(ka));
            auto& slot = maxdeg[zz];
            if (!slot || *slot < dg) slot = dg;
          }
    });
    checked += static_cast<long>(sel.size());
    for (uint32_t z = 0; z < ball.size(); ++z) {
      if (!maxdeg[z]) continue;
      if (lw0 < *maxdeg[z])
        return r.fail("deg exceeds L(w0) at z=" + idx_str(ctx, z) + " (" +
                      (structure ? "C" : "T") + "-route)");
      if (*maxdeg[z] == lw0 && !ball.in_lowest_cell(z))
        return r.fail("a-value L(w0) attained outside the cell at z=" + idx_str(ctx, z) + " (" +
                      (structure ? "C" : "T") + "-route)");
    }
    return true;
  };
  if (!scan(opt.radius, false)) return r.done(checked);
  if (pr > 0 && 2 * pr <= ctx.kl->radius)
    if (!scan(pr, true)) return r.done(checked);
  return r.done(checked);
}

CellReport prop_p6(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "P6", "every distinguished involution squares to the identity");
  const CellDatum& D = *ctx.datum;
  long checked = 0;
  for (const Elt& d : D.distinguished_involutions()) {
    ++checked;
    if (!(D.mul(d, d) == D.identity())) {
      r.fail("d=" + elt_str(D, d));
      break;
    }
  }
  return r.done(checked);
}

CellReport prop_p7_p8(const HeckeCtx& ctx, const SuiteOptions& opt, bool p8) {
  Runner r(ctx, opt, p8 ? "P8" : "P7",
           p8 ? "gamma_{x,y,z} != 0 forces the left-cell matchings x ~L y^{-1}, y ~L z^{-1}, "
                "z ~L x^{-1}"
              : "cyclic symmetry gamma_{x,y,z} = gamma_{y,z,x}");
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  GammaTable table(ctx, cell, opt.threads);
  const Ball& ball = *ctx.ball;
  long checked = 0;
  size_t n = cell.size();
  if (!p8) {
    auto sel = sample_indices(n * n * n, opt.sample, opt.seed);
    for (size_t si : sel) {
      uint32_t x = cell[si / (n * n)];
      uint32_t y = cell[(si / n) % n];
      uint32_t z = cell[si % n];
      ++checked;
      if (table.gamma(x, y, z) != table.gamma(y, z, x)) {
        r.fail("x=" + idx_str(ctx, x) + " y=" + idx_str(ctx, y) + " z=" + idx_str(ctx, z));
        break;
      }
    }
    return r.done(checked);
  }
  auto sel = sample_indices(n * n, opt.sample, opt.seed);
  for (size_t si : sel) {
    uint32_t y = cell[si / n];
    uint32_t z = cell[si % n];
    for (const auto& [u, g] : table.row(y, z)) {
      uint32_t x = ball.inverse(u);
      ++checked;
      if (!ball.in_lowest_cell(x)) {
        r.fail("gamma nonzero outside the cell at x=" + idx_str(ctx, x));
        break;
      }
      bool ok = left_cell_label(ctx, x) == left_cell_label(ctx, ball.inverse(y)) &&
                left_cell_label(ctx, y) == left_cell_label(ctx, ball.inverse(z)) &&
                left_cell_label(ctx, z) == left_cell_label(ctx, ball.inverse(x));
      if (!ok) {
        r.fail("x=" + idx_str(ctx, x) + " y=" + idx_str(ctx, y) + " z=" + idx_str(ctx, z));
        break;
      }
    }
    if (r.rep.verdict == "fail") break;
  }
  return r.done(checked);
}

CellReport prop_p13(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "P13",
           "each left cell holds a unique distinguished involution, and gamma_{x^{-1},x,d} != 0 "
           "for every x in the cell");
  Gamma lw0 = ctx.datum->weight_w0();
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  auto dis = distinguished_involutions(ctx);
  long checked = 0;
  std::unordered_map<uint32_t, uint32_t> d_of_label;
  for (uint32_t d : dis) {
    uint32_t lab = left_cell_label(ctx, d);
    if (d_of_label.count(lab)) {
      r.fail("two distinguished involutions share left cell label " + std::to_string(lab));
      return r.done(1);
    }
    d_of_label[lab] = d;
  }
  if (d_of_label.size() != ctx.datum->b0_elements().size()) {
    r.fail("distinguished involutions do not exhaust the left cell labels");
    return r.done(1);
  }
  std::unordered_set<uint32_t> dset(dis.begin(), dis.end());
  auto sel = sample_indices(cell.size(), opt.sample, opt.seed);
  for (size_t si : sel) {
    uint32_t x = cell[si];
    uint32_t d = d_of_label.at(left_cell_label(ctx, x));
    ++checked;
    if (dset.count(x) && x != d) {
      r.fail("second distinguished involution in a left cell: " + idx_str(ctx, x));
      break;
    }
    // gamma_{x^{-1},x,d}: coefficient at T~_x of T~_x T~_d
    HeckeElt p = ctx.mul_basis_right(ctx.basis(x), d);
    if (p.coeff(x).coeff_at(lw0) == 0) {
      r.fail("x=" + idx_str(ctx, x) + " d=" + idx_str(ctx, d));
      break;
    }
  }
  return r.done(checked);
}

CellReport prop_p15(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "P15",
           "sum_{y'} h_{x,y',y} (x) h_{w,x',y'} = sum_{y'} h_{x,w,y'} (x) h_{y',x',y} in "
           "Z[G] (x) Z[G]; x, x' over the ball of radius " +
               std::to_string(opt.p15_x_len));
  const Ball& ball = *ctx.ball;
  auto cell = ctx.ball->lowest_cell_elements(opt.radius);
  std::vector<uint32_t> xs = ball.elements_up_to(opt.p15_x_len);
  long checked = 0;

  std::map<std::pair<uint32_t, uint32_t>, std::map<uint32_t, Laurent>> hcache;
  auto h_of = [&](uint32_t a, uint32_t b) -> const std::map<uint32_t, Laurent>& {
    auto key = std::make_pair(a, b);
    auto it = hcache.find(key);
    if (it == hcache.end()) it = hcache.emplace(key, ctx.structure_constants(a, b)).first;
    return it->second;
  };
  auto coeff_of = [](const std::map<uint32_t, Laurent>& h, uint32_t z) -> const Laurent* {
    auto it = h.find(z);
    return it == h.end() ? nullptr : &it->second;
  };

  using Tensor = std::map<std::pair<Gamma, Gamma>, mpz_class>;
  auto tensor_add = [](Tensor& t, const Laurent& a, const Laurent& b) {
    for (const auto& [ga, ca] : a.terms())
      for (const auto& [gb, cb] : b.terms()) {
        auto key = std::make_pair(ga, gb);
        auto it = t.find(key);
        if (it == t.end()) {
          t.emplace(key, ca * cb);
        } else {
          it->second += ca * cb;
          if (it->second == 0) t.erase(it);
        }
      }
  };

  size_t n = cell.size();
  size_t space = xs.size() * xs.size() * n * n;
  auto sel = sample_indices(space, opt.sample, opt.seed);
  for (size_t si : sel) {
    size_t rest = si;
    uint32_t x = xs[rest % xs.size()];
    rest /= xs.size();
    uint32_t xp = xs[rest % xs.size()];
    rest /= xs.size();
    uint32_t w = cell[rest % n];
    rest /= n;
    uint32_t y = cell[rest % n];
    ++checked;

    const auto& hwxp = h_of(w, xp);
    const auto& hxw = h_of(x, w);
    Tensor lhs, rhs;
    for (const auto& [yp, c2] : hwxp) {
      if (!ball.in_lowest_cell(yp)) continue;
      const Laurent* c1 = coeff_of(h_of(x, yp), y);
      if (c1) tensor_add(lhs, *c1, c2);
    }
    for (const auto& [yp, c1] : hxw) {
      if (!ball.in_lowest_cell(yp)) continue;
      const Laurent* c2 = coeff_of(h_of(yp, xp), y);
      if (c2) tensor_add(rhs, c1, *c2);
    }
    if (!(lhs == rhs)) {
      r.fail("x=" + idx_str(ctx, x) + " x'=" + idx_str(ctx, xp) + " w=" + idx_str(ctx, w) +
             " y=" + idx_str(ctx, y));
      break;
    }
  }
  return r.done(checked);
}

CellReport prop_deg32(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "DEG32",
           "deg m_{u,y,b} < L(y) for box representatives u and y != e in W0");
  const CellDatum& D = *ctx.datum;
  const Ball& ball = *ctx.ball;
  long checked = 0;
  for (const Elt& u : D.b0_elements()) {
    if (D.omega_part(u) != 0) continue;
    uint32_t ui = ball.require(u);
    for (size_t v = 1; v < D.rd->w0group.size(); ++v) {
      Elt y{Vec::zero(D.rd->rank), static_cast<uint16_t>(v)};
      uint32_t yi = ball.require(y);
      Gamma ly = ball.wlength(yi);
      HeckeElt p = ctx.mul_basis_right(ctx.basis(ui), yi);
      ++checked;
      for (const auto& [b, c] : p.terms()) {
        if (!(*c.degree() < ly)) {
          r.fail("u=" + idx_str(ctx, ui) + " y=" + idx_str(ctx, yi) + " b=" + idx_str(ctx, b) +
                 " deg=" + c.degree()->str());
          return r.done(checked);
        }
      }
    }
  }
  return r.done(checked);
}

CellReport prop_deg33(const HeckeCtx& ctx, const SuiteOptions& opt) {
  Runner r(ctx, opt, "DEG33",
           "every T-coefficient of T~_u T~_y T~_{u'^{-1}} has degree < L(y w0), for box u, "
           "u' in U_0 and y < w0 in W0");
  const CellDatum& D = *ctx.datum;
  const Ball& ball = *ctx.ball;
  Gamma lw0 = D.weight_w0();
  long checked = 0;
  std::vector<uint32_t> ups;
  for (uint32_t i : ball.elements_up_to(opt.radius))
    if (ball.in_u0(i) && ball.in_wprime(i)) ups.push_back(i);
  std::vector<std::pair<uint32_t, Gamma>> ys;
  for (size_t v = 0; v < D.rd->w0group.size(); ++v) {
    if (v == D.rd->w0group.w0) continue;
    Elt y{Vec::zero(D.rd->rank), static_cast<uint16_t>(v)};
    uint32_t yi = ball.require(y);
    ys.emplace_back(yi, lw0 - ball.wlength(yi));  // L(y w0) = L(w0) - L(y)
  }
  std::vector<uint32_t> us;
  for (const Elt& u : D.b0_elements())
    if (D.omega_part(u) == 0) us.push_back(ball.require(u));

  size_t space = us.size() * ys.size() * ups.size();
  auto sel = sample_indices(space, opt.sample, opt.seed);
  for (size_t si : sel) {
    size_t rest = si;
    uint32_t u = us[rest % us.size()];
    rest /= us.size();
    auto [yi, bound] = ys[rest % ys.size()];
    rest /= ys.size();
    uint32_t up = ups[rest % ups.size()];
    ++checked;
    HeckeElt p = ctx.mul_basis_right(ctx.mul_basis_right(ctx.basis(u), yi), ball.inverse(up));
    for (const auto& [z, c] : p.terms()) {
      if (!(*c.degree() < bound)) {
        r.fail("u=" + idx_str(ctx, u) + " y=" + idx_str(ctx, yi) + " u'=" + idx_str(ctx, up) +
               " z=" + idx_str(ctx, z));
        return r.done(checked);
      }
    }
  }
  return r.done(checked);
}

}  // namespace

CellReport verify_property(const HeckeCtx& ctx, const std::string& prop,
                           const SuiteOptions& opt) {
  if (opt.radius > ctx.kl->radius)
    fail_truncation("suite radius exceeds the KL table radius", opt.radius);
  if (prop == "P1") return prop_p1(ctx, opt);
  if (prop == "P2") return prop_p2(ctx, opt);
  if (prop == "P3") return prop_p3_p5(ctx, opt, false);
  if (prop == "P4") return prop_p4(ctx, opt);
  if (prop == "P5") return prop_p3_p5(ctx, opt, true);
  if (prop == "P6") return prop_p6(ctx, opt);
  if (prop == "P7") return prop_p7_p8(ctx, opt, false);
  if (prop == "P8") return prop_p7_p8(ctx, opt, true);
  if (prop == "P13") return prop_p13(ctx, opt);
  if (prop == "P15") return prop_p15(ctx, opt);
  if (prop == "DEG32") return prop_deg32(ctx, opt);
  if (prop == "DEG33") return prop_deg33(ctx, opt);
  fail_config("unknown property id: " + prop);
}

std::vector<CellReport> run_suite(const HeckeCtx& ctx, const std::vector<std::string>& props,
                                  const SuiteOptions& opt) {
  std::vector<CellReport> out;
  for (const std::string& p : props) out.push_back(verify_property(ctx, p, opt));
  return out;
}

CellReport preorder_consistency(const HeckeCtx& ctx, long radius, long sample_pairs,
                                uint64_t seed) {
  SuiteOptions opt;
  opt.radius = radius;
  Runner r(ctx, opt, "PREORDER",
           "same-label cell elements are mutually reachable under the h-constant preorder "
           "generated inside the ball");
  const Ball& ball = *ctx.ball;
  auto cell = ball.lowest_cell_elements(radius);
  std::unordered_map<uint32_t, size_t> pos;
  for (size_t i = 0; i < cell.size(); ++i) pos[cell[i]] = i;

  // edges z -> z' when C_{z'} appears in C_s C_z, or z' is an omega twist of z
  size_t n = cell.size();
  std::vector<std::vector<uint32_t>> adj(n);
  for (size_t i = 0; i < n; ++i) {
    uint32_t z = cell[i];
    for (int g = 0; g < ctx.datum->ngens(); ++g) {
      uint32_t gi = ball.require(ctx.datum->gen(g));
      for (const auto& [zp, h] : ctx.structure_constants(gi, z)) {
        auto it = pos.find(zp);
        if (it != pos.end() && zp != z) adj[i].push_back(static_cast<uint32_t>(it->second));
      }
    }
    for (size_t k = 1; k < ctx.datum->omega.size(); ++k) {
      uint32_t zp = ball.omega_left(z, static_cast<int>(k));
      auto it = pos.find(zp);
      if (it != pos.end()) adj[i].push_back(static_cast<uint32_t>(it->second));
    }
  }
  std::vector<std::vector<uint32_t>> radj(n);
  for (size_t i = 0; i < n; ++i)
    for (uint32_t j : adj[i]) radj[j].push_back(static_cast<uint32_t>(i));
  std::vector<int> order;
  std::vector<char> vis(n, 0);
  std::function<void(size_t)> dfs1 = [&](size_t v) {
    vis[v] = 1;
    for (uint32_t w : adj[v])
      if (!vis[w]) dfs1(w);
    order.push_back(static_cast<int>(v));
  };
  for (size_t i = 0; i < n; ++i)
    if (!vis[i]) dfs1(i);
  std::vector<int> comp(n, -1);
  int nc = 0;
  std::function<void(size_t, int)> dfs2 = [&](size_t v, int c) {
    comp[v] = c;
    for (uint32_t w : radj[v])
      if (comp[w] < 0) dfs2(w, c);
  };
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (comp[static_cast<size_t>(*it)] < 0) dfs2(static_cast<size_t>(*it), nc++);

  std::mt19937_64 rng(seed);
  long checked = 0;
  for (long t = 0; t < sample_pairs && n > 1; ++t) {
    size_t i = rng() % n, j = rng() % n;
    if (left_cell_label(ctx, cell[i]) != left_cell_label(ctx, cell[j])) continue;
    ++checked;
    if (comp[i] != comp[j]) {
      r.fail("z=" + idx_str(ctx, cell[i]) + " z'=" + idx_str(ctx, cell[j]));
      break;
    }
  }
  return r.done(checked);
}

}  // namespace klcell
