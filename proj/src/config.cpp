#include "klcell/config.hpp"

#include <sstream>

namespace klcell {

using nlohmann::json;

RunConfig RunConfig::from_json(const json& j) {
  RunConfig cfg;
  if (!j.is_object()) fail_config("config: expected a JSON object");
  if (!j.contains("type") || !j["type"].is_string()) fail_config("config.type: required string");
  cfg.cell.type = j["type"].get<std::string>();
  std::string mode = j.value("mode", std::string("extended"));
  if (mode == "extended") cfg.cell.mode = Mode::Extended;
  else if (mode == "non-extended") cfg.cell.mode = Mode::NonExtended;
  else fail_config("config.mode: must be \"extended\" or \"non-extended\"");
  cfg.cell.gamma_rank = j.value("gamma_rank", 1);
  if (j.contains("weights")) {
    if (!j["weights"].is_object()) fail_config("config.weights: expected an object");
    for (auto it = j["weights"].begin(); it != j["weights"].end(); ++it) {
      int gen = -1;
      try {
        gen = std::stoi(it.key());
      } catch (...) {
        fail_config("config.weights: keys must be generator indices");
      }
      if (!it.value().is_array()) fail_config("config.weights." + it.key() + ": expected array");
      std::vector<int32_t> v;
      for (const auto& e : it.value()) {
        if (!e.is_number_integer()) fail_config("config.weights." + it.key() + ": integer exponents");
        v.push_back(e.get<int32_t>());
      }
      cfg.cell.weights[gen] = v;
    }
  }
  cfg.radius = j.value("radius", -1L);
  cfg.ball_radius = j.value("ball_radius", -1L);
  cfg.threads = j.value("threads", 0);
  cfg.out_dir = j.value("out", std::string());
  cfg.cache_dir = j.value("cache", std::string());
  cfg.table_output = j.value("table", false);
  if (j.contains("tasks")) {
    if (!j["tasks"].is_array()) fail_config("config.tasks: expected an array");
    for (const auto& t : j["tasks"]) {
      TaskSpec ts;
      if (t.is_string()) {
        ts.name = t.get<std::string>();
        ts.options = json::object();
      } else if (t.is_object() && t.contains("name")) {
        ts.name = t["name"].get<std::string>();
        ts.options = t;
        ts.options.erase("name");
      } else {
        fail_config("config.tasks[]: each task is a name or an object with a name");
      }
      cfg.tasks.push_back(ts);
    }
  }
  return cfg;
}

json RunConfig::to_json() const {
  json j;
  j["type"] = cell.type;
  j["mode"] = cell.mode == Mode::Extended ? "extended" : "non-extended";
  j["gamma_rank"] = cell.gamma_rank;
  json w = json::object();
  for (const auto& [g, v] : cell.weights) w[std::to_string(g)] = v;
  j["weights"] = w;
  j["radius"] = radius;
  j["ball_radius"] = ball_radius;
  j["threads"] = threads;
  if (!out_dir.empty()) j["out"] = out_dir;
  if (!cache_dir.empty()) j["cache"] = cache_dir;
  j["table"] = table_output;
  json ts = json::array();
  for (const auto& t : tasks) {
    json e = t.options;
    e["name"] = t.name;
    ts.push_back(e);
  }
  j["tasks"] = ts;
  return j;
}

void RunConfig::validate() const {
  if (cell.type.empty()) fail_config("config.type: required");
  if (cell.gamma_rank < 1 || cell.gamma_rank > kMaxGammaRank)
    fail_config("config.gamma_rank: must be in [1, " + std::to_string(kMaxGammaRank) + "]");
  static const std::vector<std::string> known = {"info",  "klbasis",  "xi",
                                                 "verify", "basedring", "spectra"};
  for (const auto& t : tasks) {
    if (std::find(known.begin(), known.end(), t.name) == known.end())
      fail_config("config.tasks: unknown task \"" + t.name + "\"");
  }
}

json laurent_to_json(const Laurent& a) {
  json terms = json::array();
  const auto& ts = a.terms();
  for (auto it = ts.rbegin(); it != ts.rend(); ++it) {  // descending exponents
    json t;
    json exp = json::array();
    for (int i = 0; i < it->first.rank; ++i) exp.push_back(it->first.c[static_cast<size_t>(i)]);
    t["exp"] = exp;
    t["coeff"] = it->second.get_str();
    terms.push_back(t);
  }
  json j;
  j["terms"] = terms;
  return j;
}

Laurent laurent_from_json(const json& j, int rank) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    fail_config("laurent: expected {\"terms\": [...]}");
  Laurent a;
  for (const auto& t : j["terms"]) {
    Gamma g = Gamma::zero(rank);
    const auto& exp = t.at("exp");
    if (static_cast<int>(exp.size()) != rank) fail_config("laurent term: exponent rank mismatch");
    for (int i = 0; i < rank; ++i) g.c[static_cast<size_t>(i)] = exp[static_cast<size_t>(i)].get<int32_t>();
    mpz_class c(t.at("coeff").get<std::string>());
    a.add_term(g, c);
  }
  return a;
}

json elt_to_json(const CellDatum& d, const Elt& e) {
  int k = d.omega_part(e);
  Elt w = k == 0 ? e : d.mul(d.inv(d.omega[static_cast<size_t>(k)]), e);
  json j;
  j["omega"] = k;
  json fin = json::array();
  for (uint8_t g : d.rd->w0group.word[w.u]) fin.push_back(static_cast<int>(g));
  j["finite"] = fin;
  json tr = json::array();
  for (int i = 0; i < d.rd->rank; ++i) tr.push_back(w.x[i]);
  j["translation"] = tr;
  return j;
}

Elt elt_from_json(const CellDatum& d, const json& j) {
  int k = j.value("omega", 0);
  if (k < 0 || k >= static_cast<int>(d.omega.size())) fail_config("element: omega out of range");
  Vec x = Vec::zero(d.rd->rank);
  const auto& tr = j.at("translation");
  if (static_cast<int>(tr.size()) != d.rd->rank) fail_config("element: translation rank mismatch");
  for (int i = 0; i < d.rd->rank; ++i) x[i] = tr[static_cast<size_t>(i)].get<int32_t>();
  if (!d.in_lattice(x)) fail_config("element: translation not in the configured lattice");
  Elt u = d.identity();
  for (const auto& g : j.at("finite")) u = d.mul(u, d.gen(g.get<int>()));
  return d.mul(d.omega[static_cast<size_t>(k)], d.mul(Elt{x, 0}, u));
}

std::string elt_key(const CellDatum& d, const Elt& e) {
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

std::string content_hash(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace klcell
