// Command-line driver: exact Kazhdan-Lusztig bases of affine Hecke algebras
// with unequal parameters, the lowest two-sided cell and its based ring, the
// P1'-P15' verification suite, and rational specializations.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "klcell/config.hpp"

using klcell::RunConfig;
using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"klcell: lowest-cell structure of affine Hecke algebras, exactly"};

  std::string config_path;
  std::string type;
  std::string mode = "extended";
  int gamma_rank = 0;
  std::vector<std::string> weight_args;  // "0=1" or "1=1,0"
  std::vector<std::string> task_names;
  long radius = -2;
  long ball_radius = -2;
  int threads = -1;
  std::string out_dir, cache_dir;
  bool table = false, json_out = false;
  std::string props = "all";
  long verify_radius = -1, sample = 0, p15_x_len = -1;
  std::string q_arg, torus_arg;
  long characteristic = 0;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--type", type, "root system type (A1, A2, B2, C2, G2, ...)");
  app.add_option("--mode", mode, "extended | non-extended");
  app.add_option("--gamma-rank", gamma_rank, "rank of the exponent group");
  app.add_option("--weight", weight_args,
                 "generator weight, e.g. --weight 0=1 --weight 1=1,0 (repeatable)");
  app.add_option("--task", task_names,
                 "task to run: info, klbasis, xi, verify, basedring, spectra");
  app.add_option("--radius", radius, "KL table radius");
  app.add_option("--ball-radius", ball_radius, "group ball radius");
  app.add_option("--threads", threads, "worker threads");
  app.add_option("--out", out_dir, "directory for per-task JSON reports");
  app.add_option("--cache", cache_dir, "result cache directory");
  app.add_flag("--table", table, "human summary only");
  app.add_flag("--json", json_out, "print JSON to stdout (default when no --out)");
  app.add_option("--props", props, "verify: comma-separated property ids or 'all'");
  app.add_option("--verify-radius", verify_radius, "verify/basedring/xi: cell ball radius");
  app.add_option("--sample", sample, "verify: sampled tuple budget (0 = exhaustive)");
  app.add_option("--p15-x-len", p15_x_len, "verify: x,x' ball radius for P15");
  app.add_option("--q", q_arg, "spectra: comma-separated images of the Gamma generators");
  app.add_option("--torus", torus_arg, "spectra: comma-separated torus coordinates");
  app.add_option("--char", characteristic, "spectra: field characteristic (0 = rationals)");

  CLI11_PARSE(app, argc, argv);
  (void)json_out;

  try {
    json j;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "error: cannot open config file " << config_path << "\n";
        return 2;
      }
      j = json::parse(in, nullptr, false);
      if (j.is_discarded()) {
        std::cerr << "error: config file is not valid JSON\n";
        return 2;
      }
    } else {
      j = json::object();
    }
    if (!type.empty()) j["type"] = type;
    if (app.count("--mode")) j["mode"] = mode;
    if (gamma_rank > 0) j["gamma_rank"] = gamma_rank;
    if (!weight_args.empty()) {
      json w = j.value("weights", json::object());
      for (const std::string& a : weight_args) {
        auto eq = a.find('=');
        if (eq == std::string::npos) {
          std::cerr << "error: --weight expects gen=v1,v2,...\n";
          return 2;
        }
        json vec = json::array();
        std::stringstream ss(a.substr(eq + 1));
        std::string piece;
        while (std::getline(ss, piece, ',')) vec.push_back(std::stol(piece));
        w[a.substr(0, eq)] = vec;
      }
      j["weights"] = w;
    }
    if (!j.contains("weights") && j.contains("type")) {
      // convenience default: equal parameters of weight 1 in rank one
      j["gamma_rank"] = j.value("gamma_rank", 1);
      json w = json::object();
      int r = std::atoi(j["type"].get<std::string>().c_str() + 1);
      for (int g = 0; g <= r; ++g) {
        json vec = json::array();
        for (int k = 0; k < j["gamma_rank"].get<int>(); ++k) vec.push_back(k == 0 ? 1 : 0);
        w[std::to_string(g)] = vec;
      }
      j["weights"] = w;
    }
    if (radius != -2) j["radius"] = radius;
    if (ball_radius != -2) j["ball_radius"] = ball_radius;
    if (threads >= 0) j["threads"] = threads;
    if (!out_dir.empty()) j["out"] = out_dir;
    if (!cache_dir.empty()) j["cache"] = cache_dir;
    if (table) j["table"] = true;

    if (!task_names.empty()) {
      json tasks = json::array();
      for (const std::string& name : task_names) {
        json t;
        t["name"] = name;
        if (name == "verify") {
          if (props != "all") {
            json pr = json::array();
            std::stringstream ss(props);
            std::string piece;
            while (std::getline(ss, piece, ',')) pr.push_back(piece);
            t["props"] = pr;
          } else {
            t["props"] = "all";
          }
          if (verify_radius >= 0) t["radius"] = verify_radius;
          if (sample > 0) t["sample"] = sample;
          if (p15_x_len >= 0) t["p15_x_len"] = p15_x_len;
        }
        if ((name == "basedring" || name == "xi") && verify_radius >= 0)
          t[name == "xi" ? "max_length" : "radius"] = verify_radius;
        if (name == "spectra") {
          auto split = [](const std::string& s) {
            json arr = json::array();
            std::stringstream ss(s);
            std::string piece;
            while (std::getline(ss, piece, ',')) arr.push_back(piece);
            return arr;
          };
          if (!q_arg.empty()) t["q"] = json::array({split(q_arg)});
          if (!torus_arg.empty()) t["torus"] = json::array({split(torus_arg)});
          if (characteristic > 0) t["char"] = characteristic;
        }
        tasks.push_back(t);
      }
      j["tasks"] = tasks;
    }
    if (!j.contains("tasks") || j["tasks"].empty()) j["tasks"] = json::array({"info"});
    if (!j.contains("type")) {
      std::cerr << "error: no root system type given (use --type or a config file)\n";
      return 2;
    }

    RunConfig cfg = RunConfig::from_json(j);
    return klcell::run_config(cfg, std::cout);
  } catch (const klcell::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case klcell::ErrorKind::Config:
      case klcell::ErrorKind::Domain:
        return 2;
      default:
        return 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
