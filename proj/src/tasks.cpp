#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "klcell/based_ring.hpp"
#include "klcell/cells.hpp"
#include "klcell/config.hpp"
#include "klcell/spectra.hpp"

namespace klcell {

using nlohmann::json;

namespace {

mpq_class parse_rational(const std::string& s) {
  if (s.empty()) fail_config("empty rational literal");
  try {
    mpq_class q(s);
    q.canonicalize();
    if (q.get_den() == 0) fail_config("rational with zero denominator: " + s);
    return q;
  } catch (const std::invalid_argument&) {
    fail_config("cannot parse rational: " + s);
  }
}

struct TaskContext {
  const RunConfig& cfg;
  std::shared_ptr<const CellDatum> datum;
  long kl_radius;
  long ball_radius;
  int threads;
  std::shared_ptr<HeckeCtx> hecke_;

  HeckeCtx& ctx() {
    if (!hecke_)
      hecke_ = HeckeCtx::make(datum, ball_radius, kl_radius, threads, false);
    return *hecke_;
  }
};

json task_info(TaskContext& tc) {
  const CellDatum& d = *tc.datum;
  json j;
  j["type"] = d.rd->type_name;
  j["mode"] = d.mode == Mode::Extended ? "extended" : "non-extended";
  j["weyl_group_order"] = d.rd->w0group.size();
  j["longest_element_length"] = d.l_w0();
  j["coxeter_number"] = d.rd->coxeter_number;
  j["positive_roots"] = d.rd->positive_roots.size();
  j["omega_order"] = d.omega.size();
  json classes = json::object();
  for (int g = 0; g < d.ngens(); ++g)
    classes[d.describe_gen(g)] = d.class_of_gen[static_cast<size_t>(g)];
  j["generator_classes"] = classes;
  json weights = json::object();
  for (int g = 0; g < d.ngens(); ++g) {
    json v = json::array();
    for (int k = 0; k < d.gamma_rank; ++k)
      v.push_back(d.weight_of_gen[static_cast<size_t>(g)].c[static_cast<size_t>(k)]);
    weights[d.describe_gen(g)] = v;
  }
  j["weights"] = weights;
  json m = json::object();
  for (int a = 0; a < d.ngens(); ++a)
    for (int b = a + 1; b < d.ngens(); ++b) {
      int mm = d.coxeter_m[static_cast<size_t>(a)][static_cast<size_t>(b)];
      if (mm != 2) m["m(" + d.describe_gen(a) + "," + d.describe_gen(b) + ")"] =
          mm == 0 ? json("infinity") : json(mm);
    }
  j["coxeter_bonds"] = m;
  json box = json::array();
  for (int i = 0; i < d.rd->rank; ++i) box.push_back(d.box_levels[static_cast<size_t>(i)]);
  j["box_levels"] = box;
  json b0 = json::array();
  for (const Elt& b : d.b0_elements()) {
    json e;
    e["key"] = elt_key(d, b);
    e["length"] = d.length(b);
    e["element"] = elt_to_json(d, b);
    b0.push_back(e);
  }
  j["box_elements"] = b0;
  json dis = json::array();
  for (const Elt& dd : d.distinguished_involutions()) {
    json e;
    e["key"] = elt_key(d, dd);
    e["length"] = d.length(dd);
    dis.push_back(e);
  }
  j["distinguished_involutions"] = dis;
  return j;
}

json task_klbasis(TaskContext& tc, const json& opt) {
  long radius = opt.value("radius", std::min<long>(tc.kl_radius, 6));
  if (radius > tc.kl_radius)
    fail_truncation("klbasis radius exceeds the KL table radius", radius);
  HeckeCtx& ctx = tc.ctx();
  const CellDatum& d = *tc.datum;
  json out = json::object();
  for (uint32_t w : ctx.ball->elements_up_to(radius)) {
    json row = json::object();
    for (const auto& [y, c] : ctx.kl->row(w))
      row[elt_key(d, ctx.ball->elt(y))] = laurent_to_json(c);
    out[elt_key(d, ctx.ball->elt(w))] = row;
  }
  json j;
  j["radius"] = radius;
  j["kl_coefficients"] = out;
  return j;
}

json task_xi(TaskContext& tc, const json& opt, bool& failed) {
  long max_len = opt.value("max_length", std::min<long>(tc.kl_radius, 2 * tc.datum->l_w0() + 2));
  if (max_len > tc.kl_radius)
    fail_truncation("xi max_length exceeds the KL table radius", max_len);
  HeckeCtx& ctx = tc.ctx();
  const CellDatum& d = *tc.datum;
  json entries = json::array();
  bool all_zero = true;
  for (uint32_t z : ctx.ball->lowest_cell_elements(max_len)) {
    const auto& f = ctx.ball->cell_factor(z);
    auto [r1, r2] = ctx.xi_residuals(f->b1, f->x, f->b2);
    bool ok = r1.is_zero() && r2.is_zero();
    all_zero = all_zero && ok;
    json e;
    e["z"] = elt_key(d, ctx.ball->elt(z));
    e["w1"] = elt_key(d, d.b0_elements()[f->b1]);
    json xv = json::array();
    for (int i = 0; i < d.rd->rank; ++i) xv.push_back(f->x[i]);
    e["x"] = xv;
    e["w2"] = elt_key(d, d.b0_elements()[f->b2]);
    e["residual"] = ok ? "0" : "nonzero";
    entries.push_back(e);
  }
  if (!all_zero) failed = true;
  json j;
  j["max_length"] = max_len;
  j["checked"] = entries.size();
  j["all_zero"] = all_zero;
  j["entries"] = entries;
  return j;
}

json report_to_json(const CellReport& r) {
  json e;
  e["property"] = r.property;
  e["statement"] = r.statement;
  e["radius"] = r.radius;
  e["scope"] = r.scope;
  e["verdict"] = r.verdict;
  if (!r.witness.empty()) e["witness"] = r.witness;
  e["checked"] = r.checked;
  e["millis"] = r.millis;
  return e;
}

json task_verify(TaskContext& tc, const json& opt, bool& failed) {
  SuiteOptions so;
  so.radius = opt.value("radius", std::min<long>(tc.kl_radius / 2, 8));
  so.pair_radius = opt.value("pair_radius", -1L);
  so.sample = opt.value("sample", 0L);
  so.p15_x_len = opt.value("p15_x_len", 1L);
  so.seed = opt.value("seed", 0x5eedUL);
  so.threads = tc.threads;
  std::vector<std::string> props;
  if (!opt.contains("props") || (opt["props"].is_string() && opt["props"] == "all")) {
    props = all_properties();
  } else if (opt["props"].is_array()) {
    for (const auto& p : opt["props"]) props.push_back(p.get<std::string>());
  } else {
    props.push_back(opt["props"].get<std::string>());
  }
  HeckeCtx& ctx = tc.ctx();
  json arr = json::array();
  for (const CellReport& r : run_suite(ctx, props, so)) {
    if (r.verdict == "fail") failed = true;
    arr.push_back(report_to_json(r));
  }
  return arr;
}

json task_basedring(TaskContext& tc, const json& opt, bool& failed) {
  long radius = opt.value("radius", std::min<long>(tc.kl_radius / 2, 6));
  bool check_gamma = opt.value("check_gamma", true);
  HeckeCtx& ctx = tc.ctx();
  const CellDatum& d = *tc.datum;
  const Ball& ball = *ctx.ball;
  Gamma lw0 = d.weight_w0();
  auto cell = ball.lowest_cell_elements(radius);
  json nonzero = json::array();
  long checked = 0;
  bool agree = true;
  for (uint32_t x : cell) {
    for (uint32_t y : cell) {
      auto h = ctx.structure_constants(x, y);
      for (uint32_t z : cell) {
        ++checked;
        mpz_class g_hecke(0);
        auto it = h.find(ball.inverse(z));
        if (it != h.end()) g_hecke = it->second.coeff_at(lw0);
        mpz_class g_pred =
            gamma_predicted(d, ball.elt(x), ball.elt(y), ball.elt(z));
        bool same = g_hecke == g_pred;
        if (check_gamma) {
          mpz_class g_tr = gamma_trace(ctx, x, y, z);
          same = same && g_tr == g_hecke;
        }
        if (!same) {
          agree = false;
          failed = true;
        }
        if (g_hecke != 0 || g_pred != 0) {
          json e;
          e["x"] = elt_key(d, ball.elt(x));
          e["y"] = elt_key(d, ball.elt(y));
          e["z"] = elt_key(d, ball.elt(z));
          e["gamma_hecke"] = g_hecke.get_str();
          e["gamma_tensor"] = g_pred.get_str();
          e["agree"] = same;
          nonzero.push_back(e);
        }
      }
    }
  }
  json j;
  j["radius"] = radius;
  j["checked_triples"] = checked;
  j["agree"] = agree;
  j["nonzero_triples"] = nonzero;
  return j;
}

std::vector<std::vector<mpq_class>> parse_point_list(const json& v, int expect_len,
                                                     const std::string& what) {
  std::vector<std::vector<mpq_class>> out;
  auto parse_one = [&](const json& p) {
    std::vector<mpq_class> pt;
    if (p.is_string() || p.is_number()) {
      pt.push_back(parse_rational(p.is_string() ? p.get<std::string>()
                                                : std::to_string(p.get<long>())));
    } else if (p.is_array()) {
      for (const auto& c : p)
        pt.push_back(parse_rational(c.is_string() ? c.get<std::string>()
                                                  : std::to_string(c.get<long>())));
    } else {
      fail_config(what + ": expected rational or array of rationals");
    }
    if (static_cast<int>(pt.size()) != expect_len)
      fail_config(what + ": expected " + std::to_string(expect_len) + " coordinates");
    return pt;
  };
  if (v.is_array() && !v.empty() && (v[0].is_array() || expect_len == 1)) {
    // list of points (or list of scalars in rank one)
    if (expect_len == 1 && !v[0].is_array()) {
      for (const auto& p : v) out.push_back(parse_one(p));
      return out;
    }
    for (const auto& p : v) out.push_back(parse_one(p));
    return out;
  }
  out.push_back(parse_one(v));
  return out;
}

std::string subset_str(uint32_t I, int rank) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 1; i <= rank; ++i)
    if (I & (1u << (i - 1))) {
      if (!first) os << ",";
      os << "s" << i;
      first = false;
    }
  os << "}";
  return os.str();
}

json task_spectra(TaskContext& tc, const json& opt) {
  const CellDatum& d = *tc.datum;
  long p = opt.value("char", 0L);
  Field field(p);
  auto qpoints = opt.contains("q")
                     ? parse_point_list(opt["q"], d.gamma_rank, "spectra.q")
                     : std::vector<std::vector<mpq_class>>{{mpq_class(2)}};
  auto tpoints = opt.contains("torus")
                     ? parse_point_list(opt["torus"], d.rd->rank, "spectra.torus")
                     : std::vector<std::vector<mpq_class>>{
                           std::vector<mpq_class>(static_cast<size_t>(d.rd->rank), mpq_class(3))};
  size_t det_max = opt.value("symbolic_det_max", 8UL);

  SpectraCtx sctx = make_spectra_ctx(tc.datum, tc.threads, det_max);
  json points = json::array();
  for (const auto& qv : qpoints) {
    Specialization spec;
    spec.field = field;
    for (const auto& c : qv) {
      auto v = field.from_rational(c);
      if (field.is_zero(v)) fail_config("spectra.q: images must be nonzero");
      spec.q_images.push_back(v);
    }
    auto deltas = delta_set(d, spec);
    for (const auto& tv : tpoints) {
      TorusPoint t;
      for (const auto& c : tv) {
        auto v = field.from_rational(c);
        if (field.is_zero(v)) fail_config("spectra.torus: coordinates must be nonzero");
        t.t.push_back(v);
      }
      json e;
      json qj = json::array(), tj = json::array();
      for (const auto& c : qv) qj.push_back(c.get_str());
      for (const auto& c : tv) tj.push_back(c.get_str());
      e["q"] = qj;
      e["torus"] = tj;
      e["char"] = p;
      json dj = json::array();
      json alpha = json::object();
      for (uint32_t I : deltas) {
        dj.push_back(subset_str(I, d.rd->rank));
        ZGElem a = alpha_poly(*sctx.hecke, I);
        alpha[subset_str(I, d.rd->rank)] =
            field.str(eval_central(*d.rep, spec, t, a));
      }
      e["delta_k"] = dj;
      e["alpha"] = alpha;
      e["attached"] = attached_simple_test(sctx, spec, t);
      e["dim"] = dim_rho(sctx, spec, t);
      IsoVerdict vv = phi_p_iso(sctx, spec, t);
      e["det"] = vv.det_value;
      e["phi_iso"] = vv.iso;
      points.push_back(e);
    }
  }
  json j;
  j["matrix_order"] = sctx.nb0();
  j["symbolic_det"] = sctx.det_symbolic.has_value();
  j["points"] = points;
  return j;
}

}  // namespace

int run_config(const RunConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
    auto datum = CellDatum::make(cfg.cell);
    TaskContext tc{cfg, datum, 0, 0, 0, nullptr};
    tc.kl_radius = cfg.radius >= 0 ? cfg.radius : 2 * datum->l_w0() + 2;
    tc.ball_radius = cfg.ball_radius >= 0
                         ? cfg.ball_radius
                         : tc.kl_radius + 2 * datum->max_b0_length() + datum->l_w0();
    if (tc.ball_radius < tc.kl_radius) fail_config("config.ball_radius: below the KL radius");
    tc.threads = cfg.threads > 0
                     ? cfg.threads
                     : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    // cell-level tasks need enough room for the longest element
    for (const auto& t : cfg.tasks)
      if ((t.name == "verify" || t.name == "basedring" || t.name == "xi") &&
          tc.kl_radius < 2 * datum->l_w0())
        fail_config("config.radius: cell tasks need radius >= 2 l(w0) = " +
                    std::to_string(2 * datum->l_w0()));

    json cache_base;
    {
      cache_base["type"] = cfg.cell.type;
      cache_base["mode"] = cfg.cell.mode == Mode::Extended ? "extended" : "non-extended";
      cache_base["gamma_rank"] = cfg.cell.gamma_rank;
      json w = json::object();
      for (const auto& [g, v] : cfg.cell.weights) w[std::to_string(g)] = v;
      cache_base["weights"] = w;
      cache_base["radius"] = tc.kl_radius;
      cache_base["ball_radius"] = tc.ball_radius;
    }

    bool any_failed = false;
    if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);
    if (!cfg.cache_dir.empty()) std::filesystem::create_directories(cfg.cache_dir);

    for (const auto& task : cfg.tasks) {
      auto t0 = std::chrono::steady_clock::now();
      json full;
      full["config"] = cache_base;
      json tj = task.options;
      tj["name"] = task.name;
      full["task"] = tj;

      std::string key = content_hash(full.dump());
      std::string cache_file =
          cfg.cache_dir.empty() ? "" : cfg.cache_dir + "/" + task.name + "-" + key + ".json";
      std::string output_bytes;
      bool cache_hit = false;
      bool task_failed = false;

      if (!cache_file.empty() && std::filesystem::exists(cache_file)) {
        std::ifstream in(cache_file);
        json stored = json::parse(in, nullptr, false);
        if (!stored.is_discarded() && stored.contains("config") && stored["config"] == cache_base &&
            stored["task"] == tj && stored.contains("output")) {
          output_bytes = stored["output"].dump(2);
          task_failed = stored.value("failed", false);
          cache_hit = true;
        }
      }

      if (!cache_hit) {
        json out;
        if (task.name == "info") out = task_info(tc);
        else if (task.name == "klbasis") out = task_klbasis(tc, task.options);
        else if (task.name == "xi") out = task_xi(tc, task.options, task_failed);
        else if (task.name == "verify") out = task_verify(tc, task.options, task_failed);
        else if (task.name == "basedring") out = task_basedring(tc, task.options, task_failed);
        else if (task.name == "spectra") out = task_spectra(tc, task.options);
        output_bytes = out.dump(2);
        if (!cache_file.empty()) {
          json stored = full;
          stored["output"] = out;
          stored["failed"] = task_failed;
          std::ofstream of(cache_file);
          of << stored.dump(2) << "\n";
        }
      }
      any_failed = any_failed || task_failed;

      if (!cfg.out_dir.empty()) {
        std::ofstream of(cfg.out_dir + "/" + task.name + ".json");
        of << output_bytes << "\n";
      }
      long ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
      log << "task " << task.name << ": " << (task_failed ? "FAIL" : "ok")
          << (cache_hit ? " (cached)" : "") << " [" << ms << " ms]";
      if (!cfg.out_dir.empty()) log << " -> " << cfg.out_dir << "/" << task.name << ".json";
      log << "\n";
      if (!cfg.table_output && cfg.out_dir.empty()) log << output_bytes << "\n";
    }
    return any_failed ? 1 : 0;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Config:
      case ErrorKind::Domain:
        return 2;
      case ErrorKind::Truncation:
        if (e.needed_radius() >= 0)
          log << "minimal sufficient radius: " << e.needed_radius() << "\n";
        return 3;
      case ErrorKind::Resource:
        return 3;
      case ErrorKind::Internal:
        return 3;
    }
    return 3;
  }
}

}  // namespace klcell
