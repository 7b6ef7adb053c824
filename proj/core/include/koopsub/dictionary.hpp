#pragma once

#include <string>
#include <utility>
#include <vector>

#include "koopsub/linalg.hpp"

namespace koopsub {

using Exponents = std::vector<int>;

// Ordered list of monomials d_j(x) = scale_j * prod_i x_i^{e_ji}.
//
// Terms are kept in graded lexicographic order: by total degree, then by
// exponent vector in descending lexicographic order, so x1 precedes x2 and
// x1^2 precedes x1*x2.
struct MonomialDictionary {
  int n_vars = 0;
  std::vector<Exponents> terms;
  std::vector<double> scales;

  Index size() const noexcept { return static_cast<Index>(terms.size()); }
  int max_degree() const noexcept;

  // Human readable name such as "x1^2*x2"; "1" for the constant.
  std::string term_name(Index j) const;

  // Index of the term with the given exponents, or -1.
  Index find(const Exponents& e) const;
};

// Builds a dictionary from explicit terms, sorting them into graded lex order
// (scales follow their terms). Throws InvalidInput on duplicate terms, wrong
// exponent lengths, negative exponents or non-positive scales.
MonomialDictionary make_dictionary(int n_vars, std::vector<Exponents> terms,
                                   std::vector<double> scales = {});

// All C(n_vars + max_degree, max_degree) monomials of total degree <= max_degree.
MonomialDictionary monomials_up_to_degree(int n_vars, int max_degree);

// Row i is D(x_i) with the per-term scales applied.
Matrix evaluate(const MonomialDictionary& dict, const Matrix& x);

// Rescales every term so that each column of [D(X); D(Y)] has unit 2-norm.
MonomialDictionary balance_scales(const MonomialDictionary& dict, const Matrix& x,
                                  const Matrix& y);

// Coefficient vector, in the scaled dictionary basis, of the polynomial
// sum_t c_t * x^{e_t}. Throws InvalidInput when a monomial is not in the
// dictionary.
Vector polynomial_coefficients(const MonomialDictionary& dict,
                               const std::vector<std::pair<Exponents, double>>& poly);

// Reduced dictionary D~(x) = D(x) C.
struct ReducedDictionary {
  MonomialDictionary base;
  CoefficientMatrix coeffs;

  Index size() const noexcept { return coeffs.cols(); }
  Matrix evaluate(const Matrix& x) const;
};

// C must be zero or have full column rank with size() rows.
ReducedDictionary reduce(const MonomialDictionary& dict, const CoefficientMatrix& c,
                         const Tolerances& tol = {});

}  // namespace koopsub
