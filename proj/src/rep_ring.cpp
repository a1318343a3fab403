#include "klcell/rep_ring.hpp"

#include <algorithm>
#include <functional>

namespace klcell {

namespace {

// (beta,beta)/2 for a positive root, from d_i * alpha_i = d_beta * coalpha_i.
long root_half_norm(const RootDatum& rd, int root_idx) {
  const Root& r = rd.positive_roots[static_cast<size_t>(root_idx)];
  for (int i = 0; i < rd.rank; ++i) {
    if (r.coalpha[i] != 0)
      return static_cast<long>(rd.root_len[static_cast<size_t>(i)]) * r.alpha[i] / r.coalpha[i];
  }
  fail_internal("zero coroot");
}

// (u, v) for u in weight coords, v in alpha coords (exact integer).
long form_wa(const RootDatum& rd, const Vec& u, const Vec& v_alpha) {
  return rd.form_weight_root(u, v_alpha);
}

}  // namespace

const RepRing::WeightMap& RepRing::weight_system(const Vec& x) const {
  if (!rd_->dominant(x)) fail_domain("weight_system requires a dominant weight");
  std::lock_guard<std::mutex> lock(mu_);
  auto it = weights_cache_.find(x);
  if (it == weights_cache_.end())
    it = weights_cache_.emplace(x, compute_weights(x)).first;
  return *it->second;
}

std::unique_ptr<RepRing::WeightMap> RepRing::compute_weights(const Vec& x) const {
  const RootDatum& rd = *rd_;
  int r = rd.rank;
  // Dominant weights mu with x - mu in Q^+, graded by the height of x - mu.
  Vec low = rd.apply(rd.w0group.w0, x);
  long hmax = 0;
  {
    Vec diff = x - low;  // lies in Q
    // alpha coordinates of diff via the adjugate
    for (int i = 0; i < r; ++i) {
      long s = 0;
      for (int j = 0; j < r; ++j)
        s += static_cast<long>(rd.cartan_adj[static_cast<size_t>(i)][static_cast<size_t>(j)]) *
             diff[j];
      if (s % rd.cartan_det != 0) fail_internal("x - w0(x) not in the root lattice");
      hmax += s / rd.cartan_det;
    }
  }

  // multiplicities of dominant weights, keyed by alpha-coords of x - mu
  std::map<Vec, long> mult_by_drop;        // drop (alpha coords) -> multiplicity
  std::map<Vec, Vec> weight_by_drop;       // drop -> mu (weight coords)
  std::vector<Vec> drops_in_order;

  // enumerate all drops c >= 0 with sum <= hmax, by ascending height then lex
  std::vector<Vec> all_drops;
  Vec cur = Vec::zero(r);
  std::function<void(int, long)> rec = [&](int pos, long remaining) {
    if (pos == r) {
      all_drops.push_back(cur);
      return;
    }
    for (long v = 0; v <= remaining; ++v) {
      cur[pos] = static_cast<int32_t>(v);
      rec(pos + 1, remaining - v);
    }
    cur[pos] = 0;
  };
  rec(0, hmax);
  std::sort(all_drops.begin(), all_drops.end(), [&](const Vec& a, const Vec& b) {
    long ha = 0, hb = 0;
    for (int i = 0; i < r; ++i) ha += a[i], hb += b[i];
    if (ha != hb) return ha < hb;
    return a < b;
  });

  Vec rho = rd.rho();
  for (const Vec& drop : all_drops) {
    Vec mu = x;
    for (int i = 0; i < r; ++i) {
      long s = 0;
      for (int j = 0; j < r; ++j)
        s += static_cast<long>(rd.cartan[static_cast<size_t>(i)][static_cast<size_t>(j)]) * drop[j];
      mu[i] -= static_cast<int32_t>(s);
    }
    if (!rd.dominant(mu)) continue;
    if (drop.is_zero()) {
      mult_by_drop[drop] = 1;
      weight_by_drop[drop] = mu;
      drops_in_order.push_back(drop);
      continue;
    }
    // Freudenthal: ((x+rho,x+rho)-(mu+rho,mu+rho)) m_mu
    //            = 2 sum_{beta>0} sum_{k>=1} m_{mu+k beta} (mu + k beta, beta)
    // The left factor is (x+mu+2rho, x-mu), computed on alpha coords of x-mu.
    long lhs_factor = form_wa(rd, x + mu + rho + rho, drop);
    if (lhs_factor <= 0) fail_internal("Freudenthal norm factor not positive");
    long rhs = 0;
    for (size_t b = 0; b < rd.positive_roots.size(); ++b) {
      long db = root_half_norm(rd, static_cast<int>(b));
      long pairing = rd.pair_with_coroot(mu, static_cast<int>(b));  // <mu, beta^vee>
      Vec nu = mu;
      Vec beta_wt = rd.root_as_weight(static_cast<int>(b));
      for (long k = 1;; ++k) {
        nu = nu + beta_wt;
        // multiplicity of nu in V(x): dominize and look up among computed drops
        Vec dom = rd.dominize(nu);
        // drop of dom
        Vec ddrop = Vec::zero(r);
        bool in_range = true;
        {
          Vec diff = x - dom;
          for (int i = 0; i < r && in_range; ++i) {
            long s = 0;
            for (int j = 0; j < r; ++j)
              s += static_cast<long>(
                       rd.cartan_adj[static_cast<size_t>(i)][static_cast<size_t>(j)]) *
                   diff[j];
            if (s % rd.cartan_det != 0 || s / rd.cartan_det < 0) in_range = false;
            else ddrop[i] = static_cast<int32_t>(s / rd.cartan_det);
          }
        }
        if (!in_range) break;
        auto mit = mult_by_drop.find(ddrop);
        long m = (mit == mult_by_drop.end()) ? 0 : mit->second;
        if (m == 0) {
          // nu may still be a hole inside the string; stop only when nu is
          // no longer <= x, which the in_range test above detects.
          // (m = 0 contributes nothing either way.)
        }
        rhs += m * (db * (pairing + 2 * k));
      }
    }
    rhs *= 2;
    if (rhs % lhs_factor != 0) fail_internal("Freudenthal division not exact");
    long m = rhs / lhs_factor;
    if (m > 0) {
      mult_by_drop[drop] = m;
      weight_by_drop[drop] = mu;
      drops_in_order.push_back(drop);
    }
  }

  auto out = std::make_unique<WeightMap>();
  for (const Vec& drop : drops_in_order) {
    Vec mu = weight_by_drop[drop];
    long m = mult_by_drop[drop];
    // expand the W0 orbit
    for (size_t u = 0; u < rd.w0group.size(); ++u) {
      Vec img = rd.apply(static_cast<uint16_t>(u), mu);
      (*out)[img] = m;  // overwrite; orbit visits repeat
    }
  }
  return out;
}

long RepRing::weight_multiplicity(const Vec& xp, const Vec& x) const {
  const WeightMap& ws = weight_system(x);
  Vec dom = rd_->dominize(xp);
  auto it = ws.find(dom);
  return it == ws.end() ? 0 : it->second;
}

const RepRing::WeightMap& RepRing::tensor_decomposition(const Vec& x, const Vec& xp) const {
  if (!rd_->dominant(x) || !rd_->dominant(xp))
    fail_domain("tensor_decomposition requires dominant weights");
  std::lock_guard<std::mutex> lock(mu_);
  auto key = std::make_pair(x, xp);
  auto it = tensor_cache_.find(key);
  if (it == tensor_cache_.end())
    it = tensor_cache_.emplace(key, compute_tensor(x, xp)).first;
  return *it->second;
}

std::unique_ptr<RepRing::WeightMap> RepRing::compute_tensor(const Vec& x, const Vec& xp) const {
  const RootDatum& rd = *rd_;
  // Klimyk: run over the weights of the smaller factor.
  Vec a = x, b = xp;
  if (dim(a) > dim(b)) std::swap(a, b);
  const WeightMap* wsa;
  {
    // weight_system grabs the same lock; compute without it here
    auto it = weights_cache_.find(a);
    if (it == weights_cache_.end())
      it = weights_cache_.emplace(a, compute_weights(a)).first;
    wsa = it->second.get();
  }
  Vec rho = rd.rho();
  auto out = std::make_unique<WeightMap>();
  for (const auto& [mu, d] : *wsa) {
    Vec nu = b + mu + rho;
    int sign = 0;
    Vec dom = rd.dominize(nu, &sign);
    if (sign == 0) continue;
    Vec target = dom - rho;
    (*out)[target] += sign * d;
  }
  for (auto it = out->begin(); it != out->end();) {
    if (it->second == 0) it = out->erase(it);
    else {
      if (it->second < 0) fail_internal("negative tensor multiplicity");
      ++it;
    }
  }
  return out;
}

long RepRing::tensor_multiplicity(const Vec& x, const Vec& xp, const Vec& xpp) const {
  const WeightMap& t = tensor_decomposition(x, xp);
  auto it = t.find(xpp);
  return it == t.end() ? 0 : it->second;
}

mpz_class RepRing::dim(const Vec& x) const {
  if (!rd_->dominant(x)) fail_domain("dim requires a dominant weight");
  mpz_class num = 1, den = 1;
  Vec rho = rd_->rho();
  Vec xr = x + rho;
  for (size_t b = 0; b < rd_->positive_roots.size(); ++b) {
    num *= rd_->pair_with_coroot(xr, static_cast<int>(b));
    den *= rd_->pair_with_coroot(rho, static_cast<int>(b));
  }
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  if (r != 0) fail_internal("Weyl dimension formula not integral");
  return q;
}

}  // namespace klcell
