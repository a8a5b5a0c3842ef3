#pragma once

// Exact scalar ring: multivariate polynomials over Q in named variables,
// extended by a Laurent unit u = exp(t) with d/dt(u) = u.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace jqn {

using Rat = mpq_class;

/// Name of the time variable. Its exponential is the unit u.
inline constexpr const char* kTime = "t";

class RingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Process-wide interning of variable names. Ids are handed out in first-use
// order; "t" is always id 0.
class VarTable {
 public:
  static VarTable& instance() {
    static VarTable table;
    return table;
  }
  std::size_t id(const std::string& name) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    if (name.empty() || name == "u") throw RingError("invalid variable name '" + name + "'");
    ids_.emplace(name, names_.size());
    names_.push_back(name);
    return names_.size() - 1;
  }
  std::string name(std::size_t id) const {
    std::lock_guard<std::mutex> lock(mu_);
    return names_.at(id);
  }
  bool known(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    return ids_.count(name) != 0;
  }

 private:
  VarTable() {
    ids_.emplace(kTime, 0);
    names_.push_back(kTime);
  }
  mutable std::mutex mu_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::vector<std::string> names_;
};

}  // namespace detail

inline std::size_t var_id(const std::string& name) { return detail::VarTable::instance().id(name); }
inline std::string var_name(std::size_t id) { return detail::VarTable::instance().name(id); }
inline std::size_t time_id() { return 0; }

/// Dense exponent vector (indexed by interned variable id, trailing zeros
/// trimmed) together with the exponent of u.
struct Monomial {
  std::vector<int> exps;
  int u = 0;

  void trim() {
    while (!exps.empty() && exps.back() == 0) exps.pop_back();
  }
  int exponent(std::size_t v) const { return v < exps.size() ? exps[v] : 0; }
  int degree() const { return std::accumulate(exps.begin(), exps.end(), 0); }
  bool operator==(const Monomial& o) const { return u == o.u && exps == o.exps; }

  Monomial operator*(const Monomial& o) const {
    Monomial r;
    r.exps.resize(std::max(exps.size(), o.exps.size()), 0);
    for (std::size_t i = 0; i < exps.size(); ++i) r.exps[i] += exps[i];
    for (std::size_t i = 0; i < o.exps.size(); ++i) r.exps[i] += o.exps[i];
    r.u = u + o.u;
    r.trim();
    return r;
  }
};

/// Graded-lexicographic order: higher total degree first, then larger
/// exponent in the earliest variable, then larger u exponent.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    std::size_t n = std::max(a.exps.size(), b.exps.size());
    for (std::size_t i = 0; i < n; ++i) {
      int ea = a.exponent(i), eb = b.exponent(i);
      if (ea != eb) return ea > eb;
    }
    return a.u > b.u;
  }
};

class Poly {
 public:
  using TermMap = std::map<Monomial, Rat, GrlexGreater>;

  Poly() = default;
  Poly(int c) { add_term(Monomial{}, Rat(c)); }  // NOLINT(implicit)
  Poly(const Rat& c) { add_term(Monomial{}, c); }  // NOLINT(implicit)

  static Poly var(const std::string& name) {
    Monomial m;
    std::size_t id = var_id(name);
    m.exps.assign(id + 1, 0);
    m.exps[id] = 1;
    Poly p;
    p.terms_.emplace(std::move(m), Rat(1));
    return p;
  }
  /// u^k = exp(k t).
  static Poly exp_t(int k = 1) {
    Monomial m;
    m.u = k;
    Poly p;
    p.terms_.emplace(std::move(m), Rat(1));
    return p;
  }
  static Poly monomial(const Monomial& m, const Rat& c) {
    Poly p;
    p.add_term(m, c);
    return p;
  }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{}); }
  Rat constant_value() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rat(0) : it->second;
  }

  void add_term(const Monomial& m, Rat c) {
    c.canonicalize();
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, std::move(c));
      return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, Rat(-c));
    return *this;
  }
  Poly operator-() const {
    Poly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    if (a.is_zero() || b.is_zero()) return r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly scaled(Rat c) const {
    Poly r;
    c.canonicalize();
    if (c == 0) return r;
    r = *this;
    for (auto& [m, k] : r.terms_) k *= c;
    return r;
  }

  bool operator==(const Poly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    auto it = o.terms_.begin();
    for (const auto& [m, c] : terms_) {
      if (!(m == it->first) || c != it->second) return false;
      ++it;
    }
    return true;
  }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  bool has_negative_u() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.u < 0; });
  }
  bool has_u() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.u != 0; });
  }
  bool uses_var(std::size_t id) const {
    return std::any_of(terms_.begin(), terms_.end(), [id](const auto& t) { return t.first.exponent(id) != 0; });
  }

  /// Variable names occurring in the polynomial, sorted.
  std::vector<std::string> variables() const {
    std::vector<bool> seen;
    for (const auto& [m, c] : terms_) {
      if (seen.size() < m.exps.size()) seen.resize(m.exps.size(), false);
      for (std::size_t i = 0; i < m.exps.size(); ++i)
        if (m.exps[i] != 0) seen[i] = true;
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (seen[i]) out.push_back(var_name(i));
    std::sort(out.begin(), out.end());
    return out;
  }

  std::string str() const;

 private:
  TermMap terms_;
};

inline Poly pow(const Poly& p, unsigned k) {
  Poly r(1), base = p;
  while (k) {
    if (k & 1u) r *= base;
    k >>= 1u;
    if (k) base *= base;
  }
  return r;
}

/// Formal partial derivative. For v = t the u-exponent contributes by the
/// chain rule d/dt(u^k) = k u^k.
inline Poly partial(const Poly& p, const std::string& v) {
  if (v == "u") throw RingError("cannot differentiate with respect to u; use t");
  std::size_t id = var_id(v);
  Poly r;
  for (const auto& [m, c] : p.terms()) {
    int e = m.exponent(id);
    if (e != 0) {
      Monomial dm = m;
      dm.exps[id] -= 1;
      dm.trim();
      r.add_term(dm, c * e);
    }
    if (id == time_id() && m.u != 0) r.add_term(m, c * m.u);
  }
  return r;
}

/// Simultaneous substitution of variables by polynomials. Binding t is
/// rejected when p carries u, since exp(binding) is not polynomial.
inline Poly substitute(const Poly& p, const std::map<std::string, Poly>& bindings) {
  if (bindings.empty()) return p;
  std::vector<std::pair<std::size_t, const Poly*>> bound;
  for (const auto& [name, val] : bindings) {
    if (name == "u") throw RingError("u cannot be bound; bind exponentials through t");
    std::size_t id = var_id(name);
    if (id == time_id() && p.has_u() && !(val == Poly::var(kTime)))
      throw RingError("cannot substitute for t in a polynomial carrying exp(t)");
    bound.emplace_back(id, &val);
  }
  Poly r;
  std::map<std::pair<std::size_t, int>, Poly> power_cache;
  for (const auto& [m, c] : p.terms()) {
    Monomial rest = m;
    Poly factor(1);
    for (const auto& [id, val] : bound) {
      int e = rest.exponent(id);
      if (e == 0) continue;
      rest.exps[id] = 0;
      auto key = std::make_pair(id, e);
      auto it = power_cache.find(key);
      if (it == power_cache.end()) it = power_cache.emplace(key, pow(*val, static_cast<unsigned>(e))).first;
      factor *= it->second;
    }
    rest.trim();
    r += Poly::monomial(rest, c) * factor;
  }
  return r;
}

/// Evaluation at a rational point; `u_value` stands in for exp(t) so that
/// sanity checks stay inside Q.
inline Rat evaluate(const Poly& p, const std::map<std::string, Rat>& point, const Rat& u_value = Rat(2)) {
  Rat total = 0;
  for (const auto& [m, c] : p.terms()) {
    Rat term = c;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      if (m.exps[i] == 0) continue;
      auto it = point.find(var_name(i));
      if (it == point.end()) throw RingError("evaluation point misses variable " + var_name(i));
      for (int k = 0; k < m.exps[i]; ++k) term *= it->second;
    }
    if (m.u != 0) {
      Rat base = m.u > 0 ? u_value : Rat(1) / u_value;
      for (int k = 0; k < std::abs(m.u); ++k) term *= base;
    }
    total += term;
  }
  return total;
}

inline std::string rat_str(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  return c.get_str();
}

inline std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    Rat mag = abs(c);
    bool neg = c < 0;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    std::vector<std::string> factors;
    for (std::size_t i = 0; i < m.exps.size(); ++i) {
      if (m.exps[i] == 0) continue;
      std::string f = var_name(i);
      if (m.exps[i] != 1) f += "^" + std::to_string(m.exps[i]);
      factors.push_back(f);
    }
    if (m.u == 1) factors.push_back("exp(t)");
    if (m.u == -1) factors.push_back("exp(-t)");
    if (m.u > 1) factors.push_back("exp(t)^" + std::to_string(m.u));
    if (m.u < -1) factors.push_back("exp(-t)^" + std::to_string(-m.u));
    bool unit = mag == 1;
    if (factors.empty() || !unit) {
      std::string s = rat_str(mag);
      if (!factors.empty() && s.find('/') != std::string::npos) s = "(" + s + ")";
      factors.insert(factors.begin(), s);
    }
    for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? "*" : "") << factors[i];
  }
  return os.str();
}

/// Polynomial map between charts: components[j] gives target coordinate j
/// as a polynomial in the source coordinates.
inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

struct PolyMap {
  std::vector<std::string> source;
  std::vector<std::string> target;
  std::vector<Poly> components;

  static PolyMap identity(const std::vector<std::string>& coords) {
    PolyMap m{coords, coords, {}};
    for (const auto& c : coords) m.components.push_back(Poly::var(c));
    return m;
  }

  void validate() const {
    if (components.size() != target.size()) throw RingError("PolyMap: component count differs from target dimension");
    for (const auto& p : components)
      for (const auto& v : p.variables())
        if (std::find(source.begin(), source.end(), v) == source.end())
          throw RingError("PolyMap: component uses non-source variable " + v);
  }

  std::map<std::string, Poly> bindings() const {
    std::map<std::string, Poly> b;
    for (std::size_t j = 0; j < target.size(); ++j) b.emplace(target[j], components[j]);
    return b;
  }
  /// f ∘ ψ for f over the target chart.
  Poly pull(const Poly& f) const { return substitute(f, bindings()); }

  bool is_identity() const {
    if (source != target) return false;
    for (std::size_t j = 0; j < target.size(); ++j)
      if (components[j] != Poly::var(target[j])) return false;
    return true;
  }
};

}  // namespace jqn
