#include "klcell/laurent.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace klcell {

std::string Gamma::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < rank; ++i) {
    if (i) os << ',';
    os << c[static_cast<size_t>(i)];
  }
  os << ')';
  return os.str();
}

Laurent Laurent::monomial(const Gamma& g, mpz_class coeff) {
  Laurent r;
  if (coeff != 0) r.terms_.emplace_back(g, std::move(coeff));
  return r;
}

mpz_class Laurent::coeff_at(const Gamma& g) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), g,
                             [](const Term& t, const Gamma& x) { return t.first < x; });
  if (it != terms_.end() && it->first == g) return it->second;
  return mpz_class(0);
}

void Laurent::normalize(std::vector<Term>&& raw) {
  std::sort(raw.begin(), raw.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  terms_.clear();
  for (auto& t : raw) {
    if (!terms_.empty() && terms_.back().first == t.first)
      terms_.back().second += t.second;
    else
      terms_.push_back(std::move(t));
  }
  terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                              [](const Term& t) { return t.second == 0; }),
               terms_.end());
}

Laurent Laurent::operator+(const Laurent& o) const {
  Laurent r;
  r.terms_.reserve(terms_.size() + o.terms_.size());
  size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
      r.terms_.push_back(terms_[i++]);
    } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
      r.terms_.push_back(o.terms_[j++]);
    } else {
      mpz_class s = terms_[i].second + o.terms_[j].second;
      if (s != 0) r.terms_.emplace_back(terms_[i].first, std::move(s));
      ++i, ++j;
    }
  }
  return r;
}

Laurent Laurent::operator-() const {
  Laurent r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Laurent Laurent::operator-(const Laurent& o) const { return *this + (-o); }

Laurent Laurent::operator*(const Laurent& o) const {
  if (terms_.empty() || o.terms_.empty()) return Laurent();
  if (o.terms_.size() == 1) {
    Laurent r = shifted(o.terms_[0].first);
    r.scale(o.terms_[0].second);
    return r;
  }
  if (terms_.size() == 1) return o * *this;
  std::vector<Term> raw;
  raw.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) raw.emplace_back(a.first + b.first, a.second * b.second);
  Laurent r;
  r.normalize(std::move(raw));
  return r;
}

void Laurent::add_term(const Gamma& g, const mpz_class& coeff) {
  if (coeff == 0) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), g,
                             [](const Term& t, const Gamma& x) { return t.first < x; });
  if (it != terms_.end() && it->first == g) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  } else {
    terms_.insert(it, Term(g, coeff));
  }
}

void Laurent::scale(const mpz_class& c) {
  if (c == 0) {
    terms_.clear();
    return;
  }
  for (auto& t : terms_) t.second *= c;
}

Laurent Laurent::shifted(const Gamma& g) const {
  Laurent r = *this;
  for (auto& t : r.terms_) t.first = t.first + g;
  return r;
}

Laurent Laurent::bar() const {
  Laurent r;
  r.terms_.reserve(terms_.size());
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    r.terms_.emplace_back(-it->first, it->second);
  return r;
}

Laurent Laurent::bar_symmetric_head() const {
  Laurent r;
  for (const auto& t : terms_) {
    if (t.first.negative()) continue;
    r.add_term(t.first, t.second);
    if (t.first.positive()) r.add_term(-t.first, t.second);
  }
  return r;
}

std::string Laurent::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // print by descending exponent
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const mpz_class& a = it->second;
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    first = false;
    mpz_class abs_a = abs(a);
    if (it->first.is_zero()) {
      os << abs_a.get_str();
    } else {
      if (abs_a != 1) os << abs_a.get_str() << "*";
      os << "q^" << it->first.str();
    }
  }
  return os.str();
}

}  // namespace klcell
