#pragma once

#include <complex>
#include <vector>

#include "koopsub/dictionary.hpp"
#include "koopsub/linalg.hpp"

namespace koopsub {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

struct Eigenpair {
  Complex eigenvalue;
  CVector dictionary_coeffs;  // v = C w, unit norm, largest-magnitude entry real positive
  CVector reduced_coeffs;     // w with K w = lambda w
};

// K = pinv(DX) DY for a (reduced) dictionary evaluated on snapshot pairs.
Matrix prediction_matrix(const Matrix& dx, const Matrix& dy, const Tolerances& tol = {});

// All eigenpairs of K, ordered by decreasing real part, then decreasing
// imaginary part. C maps reduced coordinates to dictionary coordinates.
std::vector<Eigenpair> eigenpairs(const Matrix& k, const CoefficientMatrix& c);

// ||DY v - lambda DX v|| / ||DX v||.
double verify_linear_evolution(const CVector& v, Complex lambda, const Matrix& dx,
                               const Matrix& dy);

// Row k is d0 K^k for k = 0..steps, by repeated multiplication.
Matrix predict_observables(const Eigen::RowVectorXd& d0, const Matrix& k, Index steps);

// Angle in [0, pi] between two nonzero vectors.
double vector_angle(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b);

struct PredictionErrorSeries {
  std::vector<double> relative;  // percent
  std::vector<double> angle;     // radians
};

// `rows` holds D(x(k)) for k = 0..L; predictions start from rows(0).
PredictionErrorSeries error_series(const Matrix& rows, const Matrix& k);
PredictionErrorSeries error_series(const MonomialDictionary& dict, const Matrix& k,
                                   const Matrix& trajectory);
PredictionErrorSeries error_series(const ReducedDictionary& dict, const Matrix& k,
                                   const Matrix& trajectory);

struct QuartileSeries {
  std::vector<double> median;
  std::vector<double> q1;
  std::vector<double> q3;
};

// Quantile of sorted data with linear interpolation between order
// statistics: position (n - 1) p, zero based.
double quantile_sorted(const std::vector<double>& sorted, double p);

// Per-step median and quartiles across equally long series.
QuartileSeries quartile_summary(const std::vector<std::vector<double>>& series);

// Values of the eigenfunction sum_j v_j d_j(x) at each row of `points`.
CVector evaluate_eigenfunction(const MonomialDictionary& dict, const CVector& v,
                               const Matrix& points);

}  // namespace koopsub
