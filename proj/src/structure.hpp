#pragma once

// H-type group structure: bracket matrices L^alpha, group law, dilations,
// J-maps, the diagonalizing rotation T_lambda and the projection
// homomorphism alpha_lambda onto the Heisenberg group.
//
// Conventions.  Horizontal coordinates are x in R^{2d}; on the Heisenberg
// factor the first d entries act by translation and the last d by modulation
// in the Schrodinger representation.  The Heisenberg bracket matrix realizes
//   z'' = z + z' + (1/2) sum_j (x_j y'_j - x'_j y_j).
// J_mu is taken with the transposed sign convention J_mu = sum mu_a (L^a)^T,
// which is what makes J_lambda = |lambda| T J T^{-1} hold with T = I on the
// Heisenberg group for lambda > 0 (J the standard block matrix [[0,-I],[I,0]]).

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace htg {

struct HTypeStructure {
  int d = 1;  // half the horizontal rank
  int m = 1;  // vertical dimension
  std::vector<Eigen::MatrixXd> brackets;  // m antisymmetric 2d x 2d matrices

  int horizontal_dim() const { return 2 * d; }
  int homogeneous_dim() const { return 2 * d + 2 * m; }  // Q
};

HTypeStructure heisenberg_structure(int d);
HTypeStructure quaternionic_structure(int d);  // d multiple of 2, m = 3

// JSON round trip: {"d": int, "m": int, "L": [[row-major 2d x 2d], ...]},
// "L" omitted means Heisenberg.
HTypeStructure structure_from_json(const std::string& text);
std::string structure_to_json(const HTypeStructure& s);

struct GroupPoint {
  Eigen::VectorXd x;  // length 2d
  Eigen::VectorXd z;  // length m

  static GroupPoint zero(const HTypeStructure& s);
};

struct DualFrequency {
  Eigen::VectorXd lambda;  // length m, nonzero

  explicit DualFrequency(Eigen::VectorXd lam);
  DualFrequency(double lam) : DualFrequency(Eigen::VectorXd::Constant(1, lam)) {}
  double rho() const { return lambda.norm(); }
  Eigen::VectorXd omega() const { return lambda / lambda.norm(); }
};

GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b, const HTypeStructure& s);
GroupPoint group_inverse(const GroupPoint& p);
GroupPoint dilate(const GroupPoint& p, double Lam);

// J_mu = sum_a mu_a (L^a)^T (see header note); satisfies J_mu^2 = -|mu|^2 I.
Eigen::MatrixXd j_map(const DualFrequency& mu, const HTypeStructure& s);

// Orthogonal T with J_lambda = |lambda| T J T^{-1}; deterministic canonical
// choice (greedy symplectic basis seeded by ascending standard basis index).
Eigen::MatrixXd diagonalize_j(const DualFrequency& lam, const HTypeStructure& s);

// alpha_lambda(x, z) = (T_lambda^{-1} x, lambda.z / |lambda|), a surjective
// homomorphism onto H^d.
GroupPoint to_heisenberg(const GroupPoint& p, const DualFrequency& lam, const HTypeStructure& s);

struct ValidationReport {
  bool ok = true;
  double max_residual = 0.0;
  std::string message;             // empty when ok
  Eigen::VectorXd witness_mu;      // worst unit mu when H-type fails
};

ValidationReport validate_htype(const HTypeStructure& s, int n_samples = 64);

}  // namespace htg
