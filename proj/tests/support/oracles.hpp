#pragma once

#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "koopsub/linalg.hpp"
#include "koopsub/network.hpp"
#include "koopsub/pssd.hpp"

// Reference computations for tests. They rely on column-pivoted QR and
// symmetric eigensolvers only, never on the SVD-based routines under test.
namespace koopsub::testing {

// Ambient x 0 matrix for the zero marker.
Matrix as_matrix(const ColumnBasis& c);

// Orthonormal basis of R(a) from column-pivoted QR.
Matrix qr_range(const Matrix& a, double rtol = 1e-10);

Matrix projector(const Matrix& a);

// ||P_a - P_b||_2.
double projector_gap(const Matrix& a, const Matrix& b);

// ||(I - P_outer) P_inner||_2; zero iff R(inner) ⊆ R(outer).
double containment_gap(const Matrix& inner, const Matrix& outer);

bool same_range(const Matrix& a, const Matrix& b, double tol = 1e-8);

// R(a) ∩ R(b) as the eigenvalue-one eigenspace of P_a P_b P_a.
Matrix projector_intersection(const Matrix& a, const Matrix& b, double tol = 1e-8);

// Angle between v and its projection onto R(basis).
double angle_to_span(const Eigen::VectorXcd& v, const Matrix& basis);

// Shortest-path diameter by breadth-first search; nullopt unless strongly
// connected.
std::optional<int> bfs_diameter(const Digraph& g);

// A directed Hamiltonian cycle over a random node order plus every other
// ordered pair with probability `extra`.
Digraph random_strong_digraph(int m, double extra, std::mt19937_64& rng);

// Snapshot data with a planted answer.
//
// A = W diag(lambda) W^-1 has distinct real eigenvalues. Signature rows obey
// DY = DX A. Agent i's own rows obey DY = DX A + R_i (I - P_i), where P_i is
// the orthogonal projector onto S_i = span{W e_j : j in sets[i]}, so its local
// SSD subspace is S_i and the union subspace is the span of the eigenvectors
// listed in every set.
struct PlantedData {
  Matrix w;
  Vector lambda;
  std::vector<std::vector<int>> sets;
  std::vector<int> common;
  Matrix oracle;  // W(:, common)
  std::vector<AgentData> agents;  // signature rows first
  Matrix dx, dy;                  // signature rows once, then every agent's rows
  Matrix sig_dx, sig_dy;
  std::vector<Matrix> own_dx, own_dy;
};

struct PlantedSpec {
  int nd = 6;
  int agents = 3;
  int rows_per_agent = 13;
  int signature_rows = 7;
  int common_dim = 2;
  // Probability that a non-common eigenvector is also invariant for an agent.
  double extra = 0.5;
};

PlantedData make_planted(const PlantedSpec& spec, std::mt19937_64& rng);

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng);

}  // namespace koopsub::testing
