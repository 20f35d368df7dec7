#include "structure.hpp"

#include <json.hpp>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace htg {

namespace {

void check_dims(const GroupPoint& p, const HTypeStructure& s, const char* who) {
  if (p.x.size() != 2 * s.d || p.z.size() != s.m)
    throw std::invalid_argument(std::string(who) + ": point/structure dimension mismatch");
}

Eigen::MatrixXd standard_j(int d) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  J.bottomLeftCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  return J;
}

}  // namespace

HTypeStructure heisenberg_structure(int d) {
  if (d < 1) throw std::invalid_argument("heisenberg_structure: d >= 1 required");
  HTypeStructure s;
  s.d = d;
  s.m = 1;
  // z'' picks up (1/2)(x.y' - x'.y):  L = [[0, I], [-I, 0]]
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  L.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  L.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  s.brackets.push_back(L);
  return s;
}

HTypeStructure quaternionic_structure(int d) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("quaternionic_structure: d must be a positive multiple of 2");
  // Horizontal space R^{2d} = H^{d/2}; brackets are right multiplication by
  // i, j, k on each quaternionic block (antisymmetric, anticommuting,
  // squaring to -1: the standard H-type family).
  Eigen::Matrix4d Ri, Rj, Rk;
  Ri << 0, -1, 0, 0,
        1,  0, 0, 0,
        0,  0, 0, 1,
        0,  0, -1, 0;
  Rj << 0, 0, -1, 0,
        0, 0, 0, -1,
        1, 0, 0, 0,
        0, 1, 0, 0;
  Rk << 0, 0, 0, -1,
        0, 0, 1, 0,
        0, -1, 0, 0,
        1, 0, 0, 0;
  HTypeStructure s;
  s.d = d;
  s.m = 3;
  const int nq = (2 * d) / 4;
  for (const auto& R : {Ri, Rj, Rk}) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    for (int b = 0; b < nq; ++b) L.block<4, 4>(4 * b, 4 * b) = R;
    s.brackets.push_back(L);
  }
  return s;
}

HTypeStructure structure_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  const int d = j.at("d").get<int>();
  const int m = j.at("m").get<int>();
  if (d < 1 || m < 1) throw std::invalid_argument("structure_from_json: d, m must be positive");
  if (!j.contains("L")) {
    if (m != 1) throw std::invalid_argument("structure_from_json: omitted L requires m = 1 (Heisenberg)");
    return heisenberg_structure(d);
  }
  const auto& L = j.at("L");
  if (static_cast<int>(L.size()) != m)
    throw std::invalid_argument("structure_from_json: need m bracket matrices");
  HTypeStructure s;
  s.d = d;
  s.m = m;
  const int n = 2 * d;
  for (const auto& rows : L) {
    if (static_cast<int>(rows.size()) != n * n)
      throw std::invalid_argument("structure_from_json: each L must be row-major 2d x 2d");
    Eigen::MatrixXd M(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) M(r, c) = rows[r * n + c].get<double>();
    s.brackets.push_back(M);
  }
  return s;
}

std::string structure_to_json(const HTypeStructure& s) {
  nlohmann::json j;
  j["d"] = s.d;
  j["m"] = s.m;
  const int n = 2 * s.d;
  nlohmann::json L = nlohmann::json::array();
  for (const auto& M : s.brackets) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) rows.push_back(M(r, c));
    L.push_back(rows);
  }
  j["L"] = L;
  return j.dump();
}

GroupPoint GroupPoint::zero(const HTypeStructure& s) {
  return {Eigen::VectorXd::Zero(2 * s.d), Eigen::VectorXd::Zero(s.m)};
}

DualFrequency::DualFrequency(Eigen::VectorXd lam) : lambda(std::move(lam)) {
  if (lambda.size() < 1 || lambda.norm() <= 0.0 || !lambda.allFinite())
    throw std::invalid_argument("DualFrequency: lambda must be nonzero and finite");
}

GroupPoint group_multiply(const GroupPoint& a, const GroupPoint& b, const HTypeStructure& s) {
  check_dims(a, s, "group_multiply");
  check_dims(b, s, "group_multiply");
  GroupPoint out;
  out.x = a.x + b.x;
  out.z.resize(s.m);
  for (int al = 0; al < s.m; ++al)
    out.z(al) = a.z(al) + b.z(al) + 0.5 * a.x.dot(s.brackets[al] * b.x);
  return out;
}

GroupPoint group_inverse(const GroupPoint& p) { return {-p.x, -p.z}; }

GroupPoint dilate(const GroupPoint& p, double Lam) {
  if (!(Lam > 0.0)) throw std::invalid_argument("dilate: Lambda > 0 required");
  return {Lam * p.x, Lam * Lam * p.z};
}

Eigen::MatrixXd j_map(const DualFrequency& mu, const HTypeStructure& s) {
  if (mu.lambda.size() != s.m) throw std::invalid_argument("j_map: mu dimension mismatch");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * s.d, 2 * s.d);
  for (int al = 0; al < s.m; ++al) J += mu.lambda(al) * s.brackets[al].transpose();
  return J;
}

Eigen::MatrixXd diagonalize_j(const DualFrequency& lam, const HTypeStructure& s) {
  const int n = 2 * s.d;
  const Eigen::MatrixXd Jw = j_map(DualFrequency(lam.omega()), s);
  // Greedy symplectic orthonormal basis: seed with standard basis vectors in
  // ascending index, project out the J-invariant span built so far.  The
  // residual's seed component is automatically nonnegative, which fixes signs.
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  int filled = 0;  // number of (t, Jw t) pairs found
  for (int seed = 0; seed < n && filled < s.d; ++seed) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    r(seed) = 1.0;
    for (int c = 0; c < filled; ++c) {
      r -= T.col(c).dot(r) * T.col(c);
      r -= T.col(s.d + c).dot(r) * T.col(s.d + c);
    }
    const double nr = r.norm();
    if (nr < 1e-8) continue;
    T.col(filled) = r / nr;
    T.col(s.d + filled) = Jw * T.col(filled);
    ++filled;
  }
  if (filled != s.d)
    throw std::runtime_error("diagonalize_j: failed to build symplectic basis (structure not H-type?)");
  const Eigen::MatrixXd J = standard_j(s.d);
  const double resid = (j_map(lam, s) - lam.rho() * T * J * T.transpose()).lpNorm<Eigen::Infinity>();
  if (resid > 1e-8 * std::max(1.0, lam.rho()))
    throw std::runtime_error("diagonalize_j: residual too large; H-type condition violated");
  return T;
}

GroupPoint to_heisenberg(const GroupPoint& p, const DualFrequency& lam, const HTypeStructure& s) {
  check_dims(p, s, "to_heisenberg");
  const Eigen::MatrixXd T = diagonalize_j(lam, s);
  GroupPoint out;
  out.x = T.transpose() * p.x;  // T^{-1} = T^T
  out.z = Eigen::VectorXd::Constant(1, lam.lambda.dot(p.z) / lam.rho());
  return out;
}

ValidationReport validate_htype(const HTypeStructure& s, int n_samples) {
  ValidationReport rep;
  const int n = 2 * s.d;
  if (static_cast<int>(s.brackets.size()) != s.m) {
    rep.ok = false;
    rep.message = "bracket count != m";
    return rep;
  }
  for (int al = 0; al < s.m; ++al) {
    const double asym = (s.brackets[al] + s.brackets[al].transpose()).lpNorm<Eigen::Infinity>();
    rep.max_residual = std::max(rep.max_residual, asym);
    if (asym > 1e-12) {
      rep.ok = false;
      rep.message = "L^" + std::to_string(al) + " is not antisymmetric";
      return rep;
    }
  }
  // linear independence of the vectorized brackets
  Eigen::MatrixXd V(n * n, s.m);
  for (int al = 0; al < s.m; ++al)
    V.col(al) = Eigen::Map<const Eigen::VectorXd>(s.brackets[al].data(), n * n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
  if (svd.rank() < s.m) {
    rep.ok = false;
    rep.message = "bracket matrices are linearly dependent";
    return rep;
  }
  std::mt19937 rng(20240817u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < n_samples; ++it) {
    Eigen::VectorXd mu(s.m);
    do {
      for (int al = 0; al < s.m; ++al) mu(al) = gauss(rng);
    } while (mu.norm() < 1e-8);
    mu.normalize();
    const Eigen::MatrixXd J = j_map(DualFrequency(mu), s);
    const double resid = (J * J + I).lpNorm<Eigen::Infinity>();
    if (resid > rep.max_residual) {
      rep.max_residual = resid;
      rep.witness_mu = mu;
    }
    if (resid > 1e-10) rep.ok = false;
  }
  if (!rep.ok && rep.message.empty()) {
    std::ostringstream os;
    os << "H-type identity J_mu^2 = -|mu|^2 I fails; residual " << rep.max_residual;
    rep.message = os.str();
  }
  return rep;
}

}  // namespace htg
