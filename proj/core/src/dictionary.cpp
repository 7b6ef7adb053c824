#include "koopsub/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "koopsub/errors.hpp"

namespace koopsub {

namespace {

int degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

bool graded_lex_less(const Exponents& a, const Exponents& b) {
  const int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

// Exponent vectors of total degree `remaining` over the trailing variables,
// emitted in descending lexicographic order.
void compositions(int var, int remaining, Exponents& cur, std::vector<Exponents>& out) {
  const int n = static_cast<int>(cur.size());
  if (var == n - 1) {
    cur[var] = remaining;
    out.push_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[var] = e;
    compositions(var + 1, remaining - e, cur, out);
  }
  cur[var] = 0;
}

}  // namespace

int MonomialDictionary::max_degree() const noexcept {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, degree(t));
  return d;
}

std::string MonomialDictionary::term_name(Index j) const {
  const Exponents& e = terms.at(static_cast<std::size_t>(j));
  std::string out;
  for (int i = 0; i < n_vars; ++i) {
    if (e[i] == 0) continue;
    if (!out.empty()) out += '*';
    out += 'x' + std::to_string(i + 1);
    if (e[i] > 1) out += '^' + std::to_string(e[i]);
  }
  return out.empty() ? "1" : out;
}

Index MonomialDictionary::find(const Exponents& e) const {
  auto it = std::find(terms.begin(), terms.end(), e);
  return it == terms.end() ? -1 : static_cast<Index>(it - terms.begin());
}

MonomialDictionary make_dictionary(int n_vars, std::vector<Exponents> terms,
                                   std::vector<double> scales) {
  if (n_vars < 1) throw Error(ErrorCode::invalid_input, "dictionary: n_vars must be >= 1");
  if (scales.empty()) scales.assign(terms.size(), 1.0);
  if (scales.size() != terms.size()) {
    throw Error(ErrorCode::invalid_input, "dictionary: scales and terms differ in length");
  }
  std::set<Exponents> seen;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto& t = terms[j];
    if (static_cast<int>(t.size()) != n_vars) {
      throw Error(ErrorCode::invalid_input, "dictionary: exponent vector has wrong length");
    }
    if (std::any_of(t.begin(), t.end(), [](int e) { return e < 0; })) {
      throw Error(ErrorCode::invalid_input, "dictionary: negative exponent");
    }
    if (!seen.insert(t).second) throw Error(ErrorCode::invalid_input, "dictionary: duplicate term");
    if (!std::isfinite(scales[j]) || scales[j] <= 0.0) {
      throw Error(ErrorCode::invalid_input, "dictionary: scales must be positive and finite");
    }
  }
  std::vector<std::size_t> order(terms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return graded_lex_less(terms[a], terms[b]); });

  MonomialDictionary d;
  d.n_vars = n_vars;
  for (std::size_t j : order) {
    d.terms.push_back(terms[j]);
    d.scales.push_back(scales[j]);
  }
  return d;
}

MonomialDictionary monomials_up_to_degree(int n_vars, int max_degree) {
  if (n_vars < 1 || max_degree < 0) {
    throw Error(ErrorCode::invalid_input, "monomials_up_to_degree: need n_vars >= 1, max_degree >= 0");
  }
  MonomialDictionary d;
  d.n_vars = n_vars;
  Exponents cur(static_cast<std::size_t>(n_vars), 0);
  for (int deg = 0; deg <= max_degree; ++deg) compositions(0, deg, cur, d.terms);
  d.scales.assign(d.terms.size(), 1.0);
  return d;
}

Matrix evaluate(const MonomialDictionary& dict, const Matrix& x) {
  if (x.cols() != dict.n_vars) {
    throw Error(ErrorCode::invalid_input, "evaluate: state dimension does not match dictionary");
  }
  linalg::require_finite(x, "evaluate");
  const int max_deg = dict.max_degree();
  const Index n = dict.n_vars;
  Matrix out(x.rows(), dict.size());
  Matrix powers(n, max_deg + 1);
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index i = 0; i < n; ++i) {
      powers(i, 0) = 1.0;
      for (int p = 1; p <= max_deg; ++p) powers(i, p) = powers(i, p - 1) * x(r, i);
    }
    for (Index j = 0; j < dict.size(); ++j) {
      const Exponents& e = dict.terms[static_cast<std::size_t>(j)];
      double v = dict.scales[static_cast<std::size_t>(j)];
      for (Index i = 0; i < n; ++i) v *= powers(i, e[static_cast<std::size_t>(i)]);
      out(r, j) = v;
    }
  }
  return out;
}

MonomialDictionary balance_scales(const MonomialDictionary& dict, const Matrix& x,
                                  const Matrix& y) {
  const Matrix dx = evaluate(dict, x);
  const Matrix dy = evaluate(dict, y);
  MonomialDictionary out = dict;
  for (Index j = 0; j < dict.size(); ++j) {
    const double norm = std::sqrt(dx.col(j).squaredNorm() + dy.col(j).squaredNorm());
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorCode::degenerate_dictionary,
                  "balance_scales: column for " + dict.term_name(j) + " is identically zero");
    }
    out.scales[static_cast<std::size_t>(j)] /= norm;
  }
  return out;
}

Vector polynomial_coefficients(const MonomialDictionary& dict,
                               const std::vector<std::pair<Exponents, double>>& poly) {
  Vector c = Vector::Zero(dict.size());
  for (const auto& [e, coeff] : poly) {
    const Index j = dict.find(e);
    if (j < 0) throw Error(ErrorCode::invalid_input, "polynomial_coefficients: monomial not in dictionary");
    c(j) += coeff / dict.scales[static_cast<std::size_t>(j)];
  }
  return c;
}

Matrix ReducedDictionary::evaluate(const Matrix& x) const {
  const Matrix d = koopsub::evaluate(base, x);
  if (coeffs.is_zero()) return Matrix(x.rows(), 0);
  return d * coeffs.matrix();
}

ReducedDictionary reduce(const MonomialDictionary& dict, const CoefficientMatrix& c,
                         const Tolerances& tol) {
  if (c.ambient_dim() != dict.size()) {
    throw Error(ErrorCode::invalid_input, "reduce: coefficient matrix row count differs from dictionary size");
  }
  if (!c.is_zero()) {
    linalg::require_finite(c.matrix(), "reduce");
    if (linalg::orthonormal_basis(c.matrix(), tol).cols() != c.cols()) {
      throw Error(ErrorCode::precondition_violation, "reduce: coefficient matrix is rank deficient");
    }
  }
  return ReducedDictionary{dict, c};
}

}  // namespace koopsub
