#pragma once

#include <optional>
#include <string>
#include <vector>

#include "klcell/hecke.hpp"

namespace klcell {

struct CellReport {
  std::string property;
  std::string statement;   // what identity was checked
  long radius = 0;
  std::string scope;       // "exhaustive" or "sample(n, seed)" plus empirical notes
  std::string verdict;     // "pass" | "fail" | "vacuous"
  std::string witness;     // least failing tuple, when verdict == "fail"
  long checked = 0;
  long millis = 0;
};

struct SuiteOptions {
  long radius = 8;        // cell ball radius
  long pair_radius = -1;  // h-route sweep radius for P4 (-1: min(radius, kl - radius))
  long sample = 0;        // 0 = exhaustive; otherwise tuple budget per property
  long p15_x_len = 1;     // sampled x, x' run over the ball of this radius
  uint64_t seed = 0x5eed;
  int threads = 1;
};

// gamma_{x,y,z}: the coefficient of q^{L(w0)} in h_{x,y,z^{-1}}; the trace
// route reads it off tau(T~_x T~_y T~_z) instead and needs no KL table.
mpz_class gamma_trace(const HeckeCtx& ctx, uint32_t x, uint32_t y, uint32_t z);
mpz_class gamma_structure(const HeckeCtx& ctx, uint32_t x, uint32_t y, uint32_t z);

// Distinguished involutions as ball indices; verifies d^2 = e,
// Delta(d) = L(w0) and n_d = 1 for each of them.
std::vector<uint32_t> distinguished_involutions(const HeckeCtx& ctx);

// Index into b0_elements() of the left (w2) resp. right (w1) cell label.
uint32_t left_cell_label(const HeckeCtx& ctx, uint32_t z);
uint32_t right_cell_label(const HeckeCtx& ctx, uint32_t z);

// Empirical a-value of z: max deg h_{x,y,z} over x,y in the pair ball
// (lower bound of the true sup; exact on the lowest cell).
std::optional<Gamma> empirical_a(const HeckeCtx& ctx, uint32_t z, long pair_radius);

// One property of the verification suite; prop in
// {P1,P2,P3,P4,P5,P6,P7,P8,P13,P15,DEG32,DEG33}.
CellReport verify_property(const HeckeCtx& ctx, const std::string& prop,
                           const SuiteOptions& opt);

std::vector<CellReport> run_suite(const HeckeCtx& ctx, const std::vector<std::string>& props,
                                  const SuiteOptions& opt);

const std::vector<std::string>& all_properties();

// Left cells never separate under the h-constant preorder: same-label pairs
// are mutually reachable through generator multiplication inside the ball.
CellReport preorder_consistency(const HeckeCtx& ctx, long radius, long sample_pairs,
                                uint64_t seed);

}  // namespace klcell
