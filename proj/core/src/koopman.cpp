#include "koopsub/koopman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "koopsub/errors.hpp"
#include "koopsub/flops.hpp"

namespace koopsub {

Matrix prediction_matrix(const Matrix& dx, const Matrix& dy, const Tolerances& tol) {
  if (dx.rows() != dy.rows() || dx.cols() != dy.cols()) {
    throw Error(ErrorCode::invalid_input, "prediction_matrix: shapes differ");
  }
  if (dx.size() == 0 || dx.isZero(0.0)) {
    throw Error(ErrorCode::invalid_input, "prediction_matrix: zero input");
  }
  return linalg::least_squares(dx, dy, tol);
}

std::vector<Eigenpair> eigenpairs(const Matrix& k, const CoefficientMatrix& c) {
  if (k.rows() != k.cols() || k.rows() == 0) {
    throw Error(ErrorCode::invalid_input, "eigenpairs: K must be square and nonempty");
  }
  if (c.is_zero() || c.cols() != k.rows()) {
    throw Error(ErrorCode::invalid_input, "eigenpairs: C must be nonzero with one column per row of K");
  }
  linalg::require_finite(k, "eigenpairs");
  Eigen::EigenSolver<Matrix> es(k, true);
  flops::add(flops::eigen_general(k.rows()));
  if (es.info() != Eigen::Success) throw Error(ErrorCode::numerical_error, "eigenpairs: eigensolver failed");

  const Eigen::MatrixXcd cm = c.matrix().cast<Complex>();
  std::vector<Eigenpair> out;
  for (Index j = 0; j < k.rows(); ++j) {
    Eigenpair p;
    p.eigenvalue = es.eigenvalues()(j);
    CVector w = es.eigenvectors().col(j);
    CVector v = cm * w;
    const double nv = v.norm();
    if (!(nv > 0.0) || !std::isfinite(nv)) {
      throw Error(ErrorCode::numerical_error, "eigenpairs: degenerate eigenvector");
    }
    Index best = 0;
    for (Index i = 1; i < v.size(); ++i) {
      if (std::abs(v(i)) > std::abs(v(best))) best = i;
    }
    const Complex phase = std::conj(v(best)) / std::abs(v(best));
    p.dictionary_coeffs = v * (phase / nv);
    p.reduced_coeffs = w * (phase / nv);
    p.dictionary_coeffs(best) = Complex(p.dictionary_coeffs(best).real(), 0.0);
    out.push_back(std::move(p));
  }
  std::stable_sort(out.begin(), out.end(), [](const Eigenpair& a, const Eigenpair& b) {
    if (a.eigenvalue.real() != b.eigenvalue.real()) return a.eigenvalue.real() > b.eigenvalue.real();
    return a.eigenvalue.imag() > b.eigenvalue.imag();
  });
  return out;
}

double verify_linear_evolution(const CVector& v, Complex lambda, const Matrix& dx,
                               const Matrix& dy) {
  if (v.size() != dx.cols() || dx.rows() != dy.rows() || dx.cols() != dy.cols()) {
    throw Error(ErrorCode::invalid_input, "verify_linear_evolution: shapes disagree");
  }
  if (v.norm() == 0.0) throw Error(ErrorCode::invalid_input, "verify_linear_evolution: zero vector");
  const CVector ax = dx.cast<Complex>() * v;
  const CVector ay = dy.cast<Complex>() * v;
  const double base = ax.norm();
  const double floor = std::numeric_limits<double>::epsilon() * dx.norm() * v.norm();
  if (!(base > floor)) {
    throw Error(ErrorCode::degenerate_eigenfunction, "verify_linear_evolution: DX v vanishes");
  }
  return (ay - lambda * ax).norm() / base;
}

Matrix predict_observables(const Eigen::RowVectorXd& d0, const Matrix& k, Index steps) {
  if (k.rows() != k.cols() || k.rows() != d0.size()) {
    throw Error(ErrorCode::invalid_input, "predict_observables: K and D(x0) disagree");
  }
  if (steps < 0) throw Error(ErrorCode::invalid_input, "predict_observables: negative horizon");
  Matrix out(steps + 1, d0.size());
  out.row(0) = d0;
  for (Index s = 1; s <= steps; ++s) out.row(s) = out.row(s - 1) * k;
  return out;
}

double vector_angle(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::invalid_input, "vector_angle: zero vector");
  const Eigen::RowVectorXd ua = a / na, ub = b / nb;
  return 2.0 * std::atan2((ua - ub).norm(), (ua + ub).norm());
}

PredictionErrorSeries error_series(const Matrix& rows, const Matrix& k) {
  if (rows.rows() < 1) throw Error(ErrorCode::invalid_input, "error_series: empty trajectory");
  const Matrix pred = predict_observables(rows.row(0), k, rows.rows() - 1);
  PredictionErrorSeries s;
  s.relative.reserve(rows.rows());
  s.angle.reserve(rows.rows());
  for (Index t = 0; t < rows.rows(); ++t) {
    const double nt = rows.row(t).norm();
    if (!(nt > 0.0)) throw Error(ErrorCode::degenerate_observable, "error_series: zero observable row");
    s.relative.push_back((rows.row(t) - pred.row(t)).norm() / nt * 100.0);
    s.angle.push_back(pred.row(t).norm() > 0.0 ? vector_angle(rows.row(t), pred.row(t)) : M_PI / 2);
  }
  return s;
}

PredictionErrorSeries error_series(const MonomialDictionary& dict, const Matrix& k,
                                   const Matrix& trajectory) {
  return error_series(evaluate(dict, trajectory), k);
}

PredictionErrorSeries error_series(const ReducedDictionary& dict, const Matrix& k,
                                   const Matrix& trajectory) {
  return error_series(dict.evaluate(trajectory), k);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw Error(ErrorCode::invalid_input, "quantile: empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

QuartileSeries quartile_summary(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw Error(ErrorCode::invalid_input, "quartile_summary: no series");
  const std::size_t len = series.front().size();
  for (const auto& s : series) {
    if (s.size() != len) throw Error(ErrorCode::invalid_input, "quartile_summary: unequal lengths");
  }
  QuartileSeries q;
  std::vector<double> column(series.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t i = 0; i < series.size(); ++i) column[i] = series[i][t];
    std::sort(column.begin(), column.end());
    q.median.push_back(quantile_sorted(column, 0.5));
    q.q1.push_back(quantile_sorted(column, 0.25));
    q.q3.push_back(quantile_sorted(column, 0.75));
  }
  return q;
}

CVector evaluate_eigenfunction(const MonomialDictionary& dict, const CVector& v,
                               const Matrix& points) {
  if (v.size() != dict.size()) throw Error(ErrorCode::invalid_input, "evaluate_eigenfunction: size mismatch");
  return evaluate(dict, points).cast<Complex>() * v;
}

}  // namespace koopsub
