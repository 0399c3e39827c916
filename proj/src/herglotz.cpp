#include "cmv/herglotz.hpp"

#include <cmath>
#include <cstdio>

#include "cmv/linalg.hpp"

namespace cmv {

namespace {

// a * b^{-1} through one factorization of b^*.
Matrix rinv_mul(const Matrix& a, const Matrix& b) {
  Eigen::FullPivLU<Matrix> lu(b.adjoint());
  require(lu.isInvertible(), Err::PivotSingular, "right factor is singular");
  return lu.solve(a.adjoint()).adjoint();
}

// a^{-1} * b.
Matrix linv_mul(const Matrix& a, const Matrix& b) {
  Eigen::FullPivLU<Matrix> lu(a);
  require(lu.isInvertible(), Err::PivotSingular, "left factor is singular");
  return lu.solve(b);
}

Complex schwarz_kernel(Complex node, Complex z) { return (node + z) / (node - z); }

void append_g17(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

void append_block_row(std::string& out, const Matrix& a) {
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out += ',';
      append_g17(out, a(i, j).real());
      out += ',';
      append_g17(out, a(i, j).imag());
    }
}

void append_block_header(std::string& out, int m) {
  char buf[64];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::snprintf(buf, sizeof buf, ",re_%d_%d,im_%d_%d", i, j, i, j);
      out += buf;
    }
}

}  // namespace

std::vector<double> cell_centers(int n) {
  require(n > 0, Err::BadGrid, "grid needs at least one cell");
  std::vector<double> c(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) c[size_t(j)] = (j + 0.5) * TWO_PI / n;
  return c;
}

Matrix schur_to_cayley(const Matrix& phi) {
  const auto m = phi.rows();
  Matrix id = Matrix::Identity(m, m);
  return rinv_mul(id + phi, id - phi);
}

Matrix cayley_to_schur(const Matrix& f) {
  const auto m = f.rows();
  Matrix id = Matrix::Identity(m, m);
  return rinv_mul(f - id, f + id);
}

Matrix schur_to_cayley_minus(const Matrix& g) {
  const auto m = g.rows();
  Matrix id = Matrix::Identity(m, m);
  return linv_mul(g - id, g + id);
}

Matrix cayley_to_schur_minus(const Matrix& f) {
  const auto m = f.rows();
  Matrix id = Matrix::Identity(m, m);
  return rinv_mul(f + id, f - id);
}

Matrix reflect_exterior(const MatrixFunction& f, Complex z) {
  require(std::abs(z) > 1.0, Err::BadRange, "reflection expects an exterior point");
  return -f(Complex(1, 0) / std::conj(z)).adjoint();
}

Matrix MatrixCircleMeasure::total() const {
  Matrix s = Matrix::Zero(m, m);
  for (const auto& w : cell) s += w;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

Matrix MatrixCircleMeasure::moment(long p) const {
  Matrix s = Matrix::Zero(m, m);
  for (size_t j = 0; j < cell.size(); ++j)
    s += std::polar(1.0, double(p) * theta_center[j]) * cell[j];
  for (const auto& a : atoms) s += std::polar(1.0, double(p) * a.theta) * a.weight;
  return s;
}

Matrix MatrixCircleMeasure::mass_on(double lo, double hi) const {
  require(hi > lo && hi - lo <= TWO_PI + 1e-12, Err::BadArc, "bad mass window");
  Matrix s = Matrix::Zero(m, m);
  auto inside = [&](double theta) { return wrap_angle(theta - lo) < hi - lo; };
  for (size_t j = 0; j < cell.size(); ++j)
    if (inside(theta_center[j])) s += cell[j];
  for (const auto& a : atoms)
    if (inside(a.theta)) s += a.weight;
  return s;
}

Matrix poisson_integral(const MatrixCircleMeasure& mu, Complex z) {
  Matrix s = Matrix::Zero(mu.m, mu.m);
  for (size_t j = 0; j < mu.cell.size(); ++j)
    s += schwarz_kernel(std::polar(1.0, mu.theta_center[j]), z) * mu.cell[j];
  for (const auto& a : mu.atoms) s += schwarz_kernel(std::polar(1.0, a.theta), z) * a.weight;
  return s;
}

StieltjesResult stieltjes_invert(const MatrixFunction& f, int m, double r, int n) {
  require(r > 0 && r < 1, Err::BadRange, "sampling radius must sit inside the disk");
  StieltjesResult out;
  out.measure.m = m;
  out.measure.theta_center = cell_centers(n);
  out.measure.cell.reserve(size_t(n));
  for (double theta : out.measure.theta_center) {
    Matrix w = herm_part(f(std::polar(r, theta))) / double(n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(w);
    require(es.info() == Eigen::Success, Err::SolveFailure, "cell eigensolve failed");
    RealVector ev = es.eigenvalues();
    bool dirty = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      if (ev(i) < 0) {
        out.clipped += -ev(i);
        ev(i) = 0;
        dirty = true;
      }
    if (dirty) w = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    out.measure.cell.push_back(std::move(w));
  }
  return out;
}

Matrix XiProfile::mean() const {
  Matrix s = Matrix::Zero(m, m);
  for (size_t j = 0; j < xi.size(); ++j)
    if (ok[j]) s += xi[j];
  return s / double(n());
}

double XiProfile::max_angle() const {
  double worst = 0;
  for (size_t j = 0; j < xi.size(); ++j) {
    if (!ok[j]) continue;
    Eigen::SelfAdjointEigenSolver<Matrix> es(xi[j]);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      worst = std::max(worst, std::abs(es.eigenvalues()(i)));
  }
  return worst;
}

long XiProfile::invalid_count() const {
  long bad = 0;
  for (char c : ok)
    if (!c) ++bad;
  return bad;
}

ExpHerglotzResult exp_herglotz(const MatrixFunction& f, int m, double r, int n) {
  require(r > 0 && r < 1, Err::BadRange, "sampling radius must sit inside the disk");
  ExpHerglotzResult rep;
  rep.d = -herm_part(principal_log(f(Complex(0, 0))));
  rep.xi.m = m;
  rep.xi.r = r;
  rep.xi.theta = cell_centers(n);
  rep.xi.xi.reserve(size_t(n));
  rep.xi.ok.reserve(size_t(n));
  for (double theta : rep.xi.theta) {
    try {
      rep.xi.xi.push_back(imag_part(principal_log(f(std::polar(r, theta)))));
      rep.xi.ok.push_back(1);
    } catch (const Error&) {
      rep.xi.xi.push_back(Matrix::Zero(m, m));
      rep.xi.ok.push_back(0);
    }
  }
  return rep;
}

Matrix herglotz_synthesize(const ExpHerglotzResult& rep, Complex w) {
  require(std::abs(w) < rep.xi.r, Err::BadRange, "synthesis point must sit inside the sampling circle");
  const int m = rep.xi.m;
  Matrix s = Matrix::Zero(m, m);
  for (size_t j = 0; j < rep.xi.xi.size(); ++j) {
    if (!rep.xi.ok[j]) continue;
    s += schwarz_kernel(std::polar(rep.xi.r, rep.xi.theta[j]), w) * rep.xi.xi[j];
  }
  s /= double(rep.xi.n());
  return matrix_exp(Matrix(-rep.d + I1 * s));
}

std::string xi_to_csv(const XiProfile& xi) {
  std::string out = "theta,ok";
  append_block_header(out, xi.m);
  out += '\n';
  for (size_t j = 0; j < xi.xi.size(); ++j) {
    append_g17(out, xi.theta[j]);
    out += xi.ok[j] ? ",1" : ",0";
    append_block_row(out, xi.xi[j]);
    out += '\n';
  }
  return out;
}

std::string measure_to_csv(const MatrixCircleMeasure& mu) {
  std::string out = "theta";
  append_block_header(out, mu.m);
  out += '\n';
  for (size_t j = 0; j < mu.cell.size(); ++j) {
    append_g17(out, mu.theta_center[j]);
    append_block_row(out, mu.cell[j]);
    out += '\n';
  }
  for (const auto& a : mu.atoms) {
    append_g17(out, a.theta);
    append_block_row(out, a.weight);
    out += '\n';
  }
  return out;
}

}  // namespace cmv
