#include "tgp/directions.hpp"

#include <algorithm>
#include <sstream>

namespace tgp {

StiefelScaling StiefelScaling::identity(int n, int r) {
  return {Matrix::Identity(r, r), Matrix::Zero(n - r, n - r), 0.0};
}

namespace {

void require_stiefel(const ManifoldKind &kind, const char *what) {
  if (!kind.is_stiefel()) {
    throw UnsupportedSpecError(std::string(what) +
                               " is only defined on the Stiefel manifold");
  }
}

Matrix block_diag(const Matrix &A, const Matrix &B) {
  Matrix D = Matrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
  D.topLeftCorner(A.rows(), A.cols()) = A;
  D.bottomRightCorner(B.rows(), B.cols()) = B;
  return D;
}

ScalingMatrices stiefel_matrices(const StiefelScaling &s, const ManifoldPoint &X) {
  const auto &kind = X.kind();
  require_stiefel(kind, "StiefelScaling");
  const int n = kind.n();
  const int r = kind.k();
  require_shape(s.E, r, r, "StiefelScaling::E");
  require_shape(s.F, n - r, n - r, "StiefelScaling::F");
  const Matrix &x = X.value();
  Matrix L = Matrix::Identity(n, n);
  if (s.mu != 0.0) {
    L += s.mu * x * s.E * x.transpose();
  }
  if (n > r && !s.F.isZero(0.0)) {
    const Matrix Xp = orthogonal_complement(x);
    L += Xp * s.F * Xp.transpose();
  }
  return {sym(L), s.E};
}

ScalingMatrices grassmann_matrices(const GrassmannScaling &s,
                                   const ManifoldPoint &X) {
  const auto &kind = X.kind();
  if (!kind.is_grassmann()) {
    throw UnsupportedSpecError("GrassmannScaling needs a Grassmann point");
  }
  const int n = kind.n();
  const int p = kind.k();
  require_shape(s.G1, p, p, "GrassmannScaling::G1");
  require_shape(s.G2, n - p, n - p, "GrassmannScaling::G2");
  const Matrix Q = grassmann_basis(X);
  const Matrix L = sym(Q * block_diag(s.G1, s.G2) * Q.transpose());
  return {L, L};
}

ScalingMatrices explicit_matrices(const ExplicitScaling &s,
                                  const ManifoldPoint &X) {
  const auto &kind = X.kind();
  require_shape(s.L, kind.ambient_rows(), kind.ambient_rows(),
                "ExplicitScaling::L");
  require_shape(s.R, kind.ambient_cols(), kind.ambient_cols(),
                "ExplicitScaling::R");
  return {s.L, s.R};
}

Matrix normal_term(const ManifoldPoint &X, double a, const SPolicy &policy,
                   std::uint64_t k) {
  require_stiefel(X.kind(), "the a*X*S normal term");
  return a * X.value() * sample_S_policy(policy, X.kind().k(), k);
}

void add_normal_term(Matrix &H, const ManifoldPoint &X, double a,
                     const SPolicy &policy, std::uint64_t k) {
  if (a != 0.0) {
    H += normal_term(X, a, policy, k);
  }
}

void require_positive_rho(double rho) {
  if (!(rho > 0.0)) {
    throw std::invalid_argument("D_rho requires rho > 0");
  }
}

Direction assemble(const ManifoldPoint &X, Matrix full, TangentVector rgrad) {
  TangentVector tangent = project_tangent(X, full);
  Matrix nval = full - tangent.value;
  return Direction{X, std::move(full), std::move(tangent),
                   NormalVector{X, std::move(nval)}, std::move(rgrad)};
}

template <class... Ts> struct overloaded : Ts... {
  using Ts::operator()...;
};

} // namespace

ScalingMatrices scaling_matrices(const Scaling &scaling, const ManifoldPoint &X) {
  return std::visit(
      overloaded{
          [&](const StiefelScaling &s) { return stiefel_matrices(s, X); },
          [&](const GrassmannScaling &s) { return grassmann_matrices(s, X); },
          [&](const ExplicitScaling &s) { return explicit_matrices(s, X); }},
      scaling);
}

Matrix sample_S_policy(const SPolicy &policy, int r, std::uint64_t k) {
  if (r < 1) {
    throw DimensionError("sample_S_policy: r must be positive");
  }
  switch (policy.kind) {
  case SPolicy::Kind::Identity:
    return Matrix::Identity(r, r);
  case SPolicy::Kind::Uniform:
    return rand_sym_with_spectrum(r, policy.lo, policy.hi,
                                  derive_seed(policy.seed, k));
  case SPolicy::Kind::FixedPerInstance:
    break;
  }
  return rand_sym_with_spectrum(r, policy.lo, policy.hi, policy.seed);
}

Matrix d_rho(const ManifoldPoint &X, const Matrix &egrad, double rho) {
  require_stiefel(X.kind(), "D_rho");
  require_positive_rho(rho);
  const Matrix &x = X.value();
  require_shape(egrad, x.rows(), x.cols(), "d_rho");
  return egrad - x * (2.0 * rho * egrad.transpose() * x +
                      (1.0 - 2.0 * rho) * x.transpose() * egrad);
}

Direction build_direction(const DirectionSpec &spec, const ManifoldPoint &X,
                          const Matrix &egrad, std::uint64_t k) {
  const auto &kind = X.kind();
  require_shape(egrad, kind.ambient_rows(), kind.ambient_cols(),
                "build_direction");
  TangentVector rgrad = riemannian_gradient(X, egrad);
  const Matrix &g = rgrad.value;
  const Matrix &x = X.value();

  Matrix full = std::visit(
      overloaded{
          [&](const preset::Rgd &) -> Matrix { return g; },
          [&](const preset::Egp &) -> Matrix { return egrad; },
          [&](const preset::ShiftedPM &p) -> Matrix {
            if (!kind.is_stiefel() || kind.k() != 1) {
              throw UnsupportedSpecError("ShiftedPM is only defined on St(1,n)");
            }
            return egrad + (1.0 - p.s) * x;
          },
          [&](const preset::DRho &p) -> Matrix { return d_rho(X, egrad, p.rho); },
          [&](const preset::TgpR &p) -> Matrix {
            Matrix H = g;
            add_normal_term(H, X, p.a, p.S, k);
            return H;
          },
          [&](const preset::TgpE &p) -> Matrix {
            Matrix H = egrad;
            add_normal_term(H, X, p.a, p.S, k);
            return H;
          },
          [&](const preset::TgpDE &p) -> Matrix {
            require_stiefel(kind, "TGP-DE");
            require_positive_rho(p.rho);
            // D_rho = grad + (4 rho - 1) X X^T grad, written so that
            // rho = 1/4 leaves egrad untouched.
            Matrix H = egrad;
            const double mu = 4.0 * p.rho - 1.0;
            if (mu != 0.0) {
              H += mu * x * (x.transpose() * g);
            }
            add_normal_term(H, X, p.a, p.S, k);
            return H;
          },
          [&](const preset::TgpDF &p) -> Matrix {
            const ScalingMatrices lr = stiefel_matrices(p.scaling, X);
            Matrix H = egrad + (lr.L * g * lr.R - g);
            add_normal_term(H, X, p.a, p.S, k);
            return H;
          },
          [&](const preset::TgpAEigen &p) -> Matrix {
            require_stiefel(kind, "TGP-A-Eigen");
            const ScalingMatrices lr =
                stiefel_matrices(std::get<StiefelScaling>(preset_scaling(p, kind)), X);
            return lr.L * g * lr.R;
          },
          [&](const General &p) -> Matrix {
            const ScalingMatrices lr = scaling_matrices(p.scaling, X);
            Matrix H = lr.L * g * lr.R;
            if (p.normal.include_euclidean_normal) {
              H += project_normal(X, egrad).value;
            }
            add_normal_term(H, X, p.normal.a, p.normal.S, k);
            return H;
          }},
      spec);

  return assemble(X, std::move(full), std::move(rgrad));
}

Scaling preset_scaling(const DirectionSpec &spec, const ManifoldKind &kind) {
  const int n = kind.n();
  const int r = kind.k();
  auto identity = [&]() -> Scaling {
    if (kind.is_stiefel()) {
      return StiefelScaling::identity(n, r);
    }
    return GrassmannScaling{Matrix::Identity(r, r),
                            Matrix::Identity(n - r, n - r)};
  };
  auto drho = [&](double rho) -> Scaling {
    require_stiefel(kind, "D_rho");
    require_positive_rho(rho);
    StiefelScaling s = StiefelScaling::identity(n, r);
    s.mu = 4.0 * rho - 1.0;
    return s;
  };
  return std::visit(
      overloaded{
          [&](const preset::DRho &p) { return drho(p.rho); },
          [&](const preset::TgpDE &p) { return drho(p.rho); },
          [&](const preset::TgpDF &p) -> Scaling { return p.scaling; },
          [&](const preset::TgpAEigen &p) -> Scaling {
            require_stiefel(kind, "TGP-A-Eigen");
            StiefelScaling s = StiefelScaling::identity(n, r);
            s.F = Matrix::Constant(n - r, n - r, p.F_scale);
            return s;
          },
          [&](const General &p) { return p.scaling; },
          [&](const auto &) { return identity(); }},
      spec);
}

std::string describe(const DirectionSpec &spec) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const preset::Rgd &) { os << "RGD"; },
                 [&](const preset::Egp &) { os << "EGP"; },
                 [&](const preset::ShiftedPM &p) { os << "ShiftedPM(s=" << p.s << ")"; },
                 [&](const preset::DRho &p) { os << "DRho(rho=" << p.rho << ")"; },
                 [&](const preset::TgpR &p) { os << "TGP-R(a=" << p.a << ")"; },
                 [&](const preset::TgpE &p) { os << "TGP-E(a=" << p.a << ")"; },
                 [&](const preset::TgpDE &p) {
                   os << "TGP-DE(rho=" << p.rho << ",a=" << p.a << ")";
                 },
                 [&](const preset::TgpDF &p) {
                   os << "TGP-DF(mu=" << p.scaling.mu << ",a=" << p.a << ")";
                 },
                 [&](const preset::TgpAEigen &p) {
                   os << "TGP-Eigen(F=" << p.F_scale << ")";
                 },
                 [&](const General &p) { os << "General(a=" << p.normal.a << ")"; }},
             spec);
  return os.str();
}

bool check_assumption_A1(const Scaling &scaling, const ManifoldPoint &X,
                         int trials, std::uint64_t seed) {
  const ScalingMatrices lr = scaling_matrices(scaling, X);
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const Matrix V = random_tangent(X, 1.0, rng);
    if (!is_tangent(X, lr.L * V * lr.R, 1e-9)) {
      return false;
    }
  }
  return true;
}

namespace {

struct Extremes {
  double lo;
  double hi;
};

Extremes spectrum_range(const Matrix &M) {
  const Vector ev = sym_eig(M).eigenvalues;
  return {ev(ev.size() - 1), ev(0)};
}

A2Bounds stiefel_bounds(const StiefelScaling &s, const ManifoldKind &kind) {
  const int n = kind.n();
  const int r = kind.k();
  require_shape(s.E, r, r, "StiefelScaling::E");
  require_shape(s.F, n - r, n - r, "StiefelScaling::F");
  const Extremes e = spectrum_range(s.E);
  // Spectrum of mu E is mu times that of E, reversed for negative mu.
  double lo = s.mu >= 0.0 ? s.mu * e.lo : s.mu * e.hi;
  double hi = s.mu >= 0.0 ? s.mu * e.hi : s.mu * e.lo;
  if (n > r) {
    const Extremes f = spectrum_range(s.F);
    lo = std::min(lo, f.lo);
    hi = std::max(hi, f.hi);
  }
  A2Bounds b;
  b.upsilon = (1.0 + lo) * e.lo;
  b.varpi = (1.0 + hi) * e.hi;
  b.certified = b.upsilon > 0.0 && 1.0 + lo >= 0.0 && e.lo >= 0.0;
  return b;
}

A2Bounds grassmann_bounds(const GrassmannScaling &s, const ManifoldKind &kind) {
  const int n = kind.n();
  const int p = kind.k();
  require_shape(s.G1, p, p, "GrassmannScaling::G1");
  require_shape(s.G2, n - p, n - p, "GrassmannScaling::G2");
  const Extremes a = spectrum_range(s.G1);
  const Extremes c = spectrum_range(s.G2);
  const double lo = std::min(a.lo, c.lo);
  const double hi = std::max(a.hi, c.hi);
  A2Bounds b;
  b.upsilon = lo * lo;
  b.varpi = hi * hi;
  b.certified = lo > 0.0;
  return b;
}

A2Bounds sampled_bounds(const ExplicitScaling &s, const ManifoldPoint &X,
                        int trials, std::uint64_t seed) {
  const ScalingMatrices lr = explicit_matrices(s, X);
  Rng rng(seed);
  A2Bounds b;
  b.upsilon = std::numeric_limits<double>::infinity();
  b.varpi = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Matrix V = random_tangent(X, 1.0, rng);
    const Matrix Ht = project_tangent(X, lr.L * V * lr.R).value;
    const double ip = inner(V, Ht);
    const double nrm = Ht.norm();
    b.upsilon = std::min({b.upsilon, ip, nrm});
    b.varpi = std::max({b.varpi, ip, nrm});
  }
  b.certified = false;
  return b;
}

} // namespace

A2Bounds assumption_A2_bounds(const Scaling &scaling, const ManifoldPoint &X,
                              int trials, std::uint64_t seed) {
  return std::visit(
      overloaded{
          [&](const StiefelScaling &s) {
            require_stiefel(X.kind(), "StiefelScaling");
            return stiefel_bounds(s, X.kind());
          },
          [&](const GrassmannScaling &s) {
            if (!X.kind().is_grassmann()) {
              throw UnsupportedSpecError("GrassmannScaling needs a Grassmann point");
            }
            return grassmann_bounds(s, X.kind());
          },
          [&](const ExplicitScaling &s) {
            return sampled_bounds(s, X, trials, seed);
          }},
      scaling);
}

} // namespace tgp
