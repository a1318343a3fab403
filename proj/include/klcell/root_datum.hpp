#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "klcell/error.hpp"

namespace klcell {

constexpr int kMaxRank = 8;

// Integer vector in a fixed-rank coordinate space.  Weights are stored in
// fundamental-weight coordinates, roots in simple-root coordinates, coroots
// in simple-coroot coordinates; the functions below say which they expect.
struct Vec {
  std::array<int32_t, kMaxRank> c{};
  uint8_t rank = 0;

  static Vec zero(int rank) {
    Vec v;
    v.rank = static_cast<uint8_t>(rank);
    return v;
  }
  int32_t& operator[](int i) { return c[static_cast<size_t>(i)]; }
  int32_t operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec operator+(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < rank; ++i) r[i] += o[i];
    return r;
  }
  Vec operator-(const Vec& o) const {
    Vec r = *this;
    for (int i = 0; i < rank; ++i) r[i] -= o[i];
    return r;
  }
  Vec operator-() const {
    Vec r = *this;
    for (int i = 0; i < rank; ++i) r[i] = -r[i];
    return r;
  }
  bool operator==(const Vec& o) const {
    if (rank != o.rank) return false;
    for (int i = 0; i < rank; ++i)
      if (c[static_cast<size_t>(i)] != o.c[static_cast<size_t>(i)]) return false;
    return true;
  }
  bool operator<(const Vec& o) const {
    for (int i = 0; i < rank; ++i) {
      if (c[static_cast<size_t>(i)] != o.c[static_cast<size_t>(i)])
        return c[static_cast<size_t>(i)] < o.c[static_cast<size_t>(i)];
    }
    return false;
  }
  bool is_zero() const {
    for (int i = 0; i < rank; ++i)
      if (c[static_cast<size_t>(i)] != 0) return false;
    return true;
  }
  std::string str() const;
};

struct VecHash {
  size_t operator()(const Vec& v) const {
    size_t h = 1469598103934665603ull;
    for (int i = 0; i < v.rank; ++i) {
      h ^= static_cast<size_t>(static_cast<uint32_t>(v[i]));
      h *= 1099511628211ull;
    }
    return h;
  }
};

using Mat = std::array<std::array<int32_t, kMaxRank>, kMaxRank>;

struct Root {
  Vec alpha;    // simple-root coordinates
  Vec coalpha;  // simple-coroot coordinates; <x, beta^vee> = sum coalpha[j] * x[j]
};

// An irreducible root datum: Cartan matrix, positive roots with coroots, and
// the finite Weyl group realized by its action on weight coordinates.
class RootDatum {
public:
  static std::shared_ptr<const RootDatum> make(const std::string& type_name);

  std::string type_name;
  int rank = 0;
  Mat cartan{};                 // cartan[i][j] = <alpha_j, alpha_i^vee>
  std::array<int32_t, kMaxRank> root_len{};  // d_i = (alpha_i,alpha_i)/2 in {1,2,3}

  std::vector<Root> positive_roots;
  int highest_root_idx = -1;    // highest root (max height in alpha coords)
  int highest_coroot_idx = -1;  // root whose coroot is highest in the dual system
  int coxeter_number = 0;

  // Finite Weyl group W0.  Elements are indexed; 0 is the identity.
  struct Group {
    std::vector<Mat> action;                 // action on weight coordinates
    std::vector<uint16_t> inverse;
    std::vector<uint8_t> length;
    std::vector<std::vector<uint8_t>> word;  // a reduced word (generator indices 1..rank)
    std::vector<uint16_t> mult;              // row-major size*size table
    // root_action[u * nposroots + k]: image of positive root k under u,
    // encoded as +-(index+1).
    std::vector<int16_t> root_action;
    uint16_t w0 = 0;
    size_t size() const { return action.size(); }
    uint16_t mul(uint16_t a, uint16_t b) const { return mult[a * size() + b]; }
  };
  Group w0group;

  // det(cartan) and adjugate, for exact root-lattice membership tests.
  long cartan_det = 0;
  Mat cartan_adj{};

  Vec apply(uint16_t u, const Vec& weight) const;  // weight coordinates
  int root_image(uint16_t u, int root_idx, int* sign) const;

  long pair_with_coroot(const Vec& weight, int root_idx) const {
    long s = 0;
    for (int j = 0; j < rank; ++j)
      s += static_cast<long>(positive_roots[static_cast<size_t>(root_idx)].coalpha[j]) * weight[j];
    return s;
  }
  Vec root_as_weight(int root_idx) const;  // alpha coords -> weight coords

  bool dominant(const Vec& weight) const {
    for (int i = 0; i < rank; ++i)
      if (weight[i] < 0) return false;
    return true;
  }
  // Unique dominant element of the W0 orbit; if det_sign is non-null it gets
  // (-1)^{number of reflections used} and 0 when the weight sits on a wall.
  Vec dominize(const Vec& weight, int* det_sign = nullptr) const;

  // x in the root lattice?  Exact test via the adjugate.
  bool in_root_lattice(const Vec& weight) const;

  Vec rho() const {
    Vec r = Vec::zero(rank);
    for (int i = 0; i < rank; ++i) r[i] = 1;
    return r;
  }
  Vec two_rho() const;  // sum of positive roots, in weight coordinates

  // Symmetrized pairing (x, y) in the normalization (short root, short root) = 2.
  // x in weight coords, y in alpha coords: (x, alpha_j) = d_j * x_j.
  long form_weight_root(const Vec& weight, const Vec& alpha_coords) const {
    long s = 0;
    for (int j = 0; j < rank; ++j)
      s += static_cast<long>(root_len[static_cast<size_t>(j)]) * alpha_coords[j] * weight[j];
    return s;
  }

private:
  RootDatum() = default;
  void build(const std::string& name);
};

}  // namespace klcell
