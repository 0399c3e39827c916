#include "cmv/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

namespace cmv {

namespace {

using nlohmann::json;

json matrix_json(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      row.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
    rows.push_back(row);
  }
  return rows;
}

int parity(long k) { return static_cast<int>(((k % 2) + 2) % 2); }

}  // namespace

std::vector<Matrix> moments(const VerblunskySequence& seq, long k0, int jmax) {
  require(jmax >= 1, Err::BadRange, "moments: jmax must be positive");
  long clear = 2L * jmax + 4;
  auto t = build_truncation(seq, k0 - clear, k0 + clear);
  std::vector<Matrix> out;
  out.reserve(static_cast<size_t>(jmax));
  for (int j = 1; j <= jmax; ++j) out.push_back(2.0 * diagonal_moment(t, k0, j));
  return out;
}

std::vector<Matrix> log_coeffs(const std::vector<Matrix>& mom) {
  int jmax = static_cast<int>(mom.size());
  require(jmax >= 1, Err::BadRange, "log_coeffs: empty series");
  int m = static_cast<int>(mom[0].rows());
  Matrix zero = Matrix::Zero(m, m);
  std::vector<Matrix> out(mom.size(), zero);
  std::vector<Matrix> cur = mom;  // holds coefficients of the p-th power
  double sign = 1.0;
  for (int p = 1; p <= jmax; ++p) {
    for (int n = p; n <= jmax; ++n) out[n - 1] += (sign / p) * cur[n - 1];
    if (p == jmax) break;
    std::vector<Matrix> next(mom.size(), zero);
    for (int n = p + 1; n <= jmax; ++n)
      for (int i = p; i <= n - 1; ++i) next[n - 1] += cur[i - 1] * mom[n - i - 1];
    cur.swap(next);
    sign = -sign;
  }
  return out;
}

Matrix trace_rhs(const XiProfile& xi, long j) {
  Matrix s = Matrix::Zero(xi.m, xi.m);
  for (long c = 0; c < xi.n(); ++c) {
    if (!xi.ok[static_cast<size_t>(c)]) continue;
    s += std::polar(1.0, -static_cast<double>(j) * xi.theta[static_cast<size_t>(c)]) *
         xi.xi[static_cast<size_t>(c)];
  }
  return 2.0 * I1 * s / static_cast<double>(xi.n());
}

Matrix borg_l1(const ArcSpec& arc, int m) {
  double half_sum = 0.5 * (arc.theta0 + arc.theta1);
  double a = std::cos(0.25 * arc.width());
  return 2.0 * a * a * std::polar(1.0, -half_sum) * Matrix::Identity(m, m);
}

Matrix borg_l2(const ArcSpec& arc, int m) {
  double sum = arc.theta0 + arc.theta1;
  return -0.5 * (1.0 - std::cos(arc.width())) * std::polar(1.0, -sum) * Matrix::Identity(m, m);
}

XiProfile borg_xi(const ArcSpec& arc, int m, int n) {
  XiProfile xi;
  xi.m = m;
  xi.r = 1.0;
  xi.theta = cell_centers(n);
  xi.ok.assign(static_cast<size_t>(n), 1);
  Matrix id = Matrix::Identity(m, m);
  double ts = arc.theta_star();
  xi.xi.reserve(static_cast<size_t>(n));
  for (double th : xi.theta) {
    double t = arc.lift(th);
    double v = (t <= arc.theta1) ? 0.0 : (t < ts ? PI / 2 : -PI / 2);
    xi.xi.push_back(v * id);
  }
  return xi;
}

ExpHerglotzResult xi_of_operator(const VerblunskySequence& seq, const XiOptions& opt) {
  require(opt.half_width >= 8, Err::BadRange, "xi_of_operator: half_width too small");
  auto t = build_truncation(seq, opt.k0 - opt.half_width, opt.k0 + opt.half_width - 1);
  ResolventSolver rs(t);
  MatrixFunction f = [&](Complex z) { return m11_truncation(rs, t, opt.k0, z); };
  return exp_herglotz(f, seq.m(), opt.r, opt.grid_n);
}

TraceReport trace_check_profile(const VerblunskySequence& seq, long k0, int jmax,
                                const ExpHerglotzResult& rep, long half_width) {
  TraceReport tr;
  tr.m = seq.m();
  tr.k0 = k0;
  tr.jmax = jmax;
  tr.r = rep.xi.r;
  tr.grid_n = static_cast<int>(rep.xi.n());
  tr.half_width = half_width;
  tr.xi_invalid = rep.xi.invalid_count();
  tr.lhs = log_coeffs(moments(seq, k0, jmax));
  for (int j = 1; j <= jmax; ++j) {
    Matrix rhs = trace_rhs(rep.xi, j) / std::pow(rep.xi.r, j);
    tr.rhs.push_back(rhs);
    double e = operator_norm(tr.lhs[static_cast<size_t>(j - 1)] - rhs);
    tr.err.push_back(e);
    tr.max_err = std::max(tr.max_err, e);
  }
  return tr;
}

TraceReport trace_check(const VerblunskySequence& seq, long k0, int jmax, const XiOptions& xopt) {
  XiOptions local = xopt;
  local.k0 = k0;
  auto rep = xi_of_operator(seq, local);
  return trace_check_profile(seq, k0, jmax, rep, local.half_width);
}

std::string TraceReport::to_json() const {
  json j;
  j["schema"] = 1;
  j["m"] = m;
  j["k0"] = k0;
  j["jmax"] = jmax;
  j["r"] = r;
  j["grid_n"] = grid_n;
  j["half_width"] = half_width;
  j["xi_invalid"] = xi_invalid;
  json l = json::array(), rr = json::array();
  for (const auto& a : lhs) l.push_back(matrix_json(a));
  for (const auto& a : rhs) rr.push_back(matrix_json(a));
  j["lhs"] = l;
  j["rhs"] = rr;
  j["err"] = err;
  j["max_err"] = max_err;
  return j.dump(2);
}

EigenPairs spectrum(const CmvTruncation& t) { return unitary_eig(t.u.to_dense()); }

MatrixCircleMeasure spectral_measure(const CmvTruncation& t, const EigenPairs& eig, long k0) {
  require(k0 >= t.k_lo && k0 <= t.k_hi, Err::BadRange, "spectral_measure: k0 outside truncation");
  MatrixCircleMeasure mu;
  mu.m = t.m;
  long r0 = t.row0(k0);
  for (Eigen::Index l = 0; l < eig.values.size(); ++l) {
    Vector x = eig.vectors.block(r0, l, t.m, 1);
    mu.atoms.push_back({eig.angles[l], x * x.adjoint()});
  }
  return mu;
}

ContainmentReport arc_containment(const RealVector& angles, const ArcSpec& arc, double dilate,
                                  double deep) {
  ContainmentReport rep;
  rep.total = angles.size();
  std::vector<double> in_arc;
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    double t = arc.lift(angles[i]);
    double depth = 0;
    if (t > arc.theta1) depth = std::min(t - arc.theta1, arc.theta0 + TWO_PI - t);
    if (depth == 0) in_arc.push_back(t);
    if (depth <= dilate) ++rep.inside_dilated;
    if (depth > deep) ++rep.deep_intruders;
  }
  rep.inside_fraction =
      rep.total > 0 ? static_cast<double>(rep.inside_dilated) / static_cast<double>(rep.total) : 0;
  std::sort(in_arc.begin(), in_arc.end());
  if (in_arc.size() >= 2) {
    double sum = 0;
    for (size_t i = 0; i + 1 < in_arc.size(); ++i) {
      double g = in_arc[i + 1] - in_arc[i];
      sum += g;
      rep.max_in_arc_gap = std::max(rep.max_in_arc_gap, g);
    }
    rep.mean_in_arc_gap = sum / static_cast<double>(in_arc.size() - 1);
    if (rep.mean_in_arc_gap > 0) rep.gap_ratio = rep.max_in_arc_gap / rep.mean_in_arc_gap;
  }
  return rep;
}

std::string ContainmentReport::to_json() const {
  json j;
  j["total"] = total;
  j["inside_dilated"] = inside_dilated;
  j["deep_intruders"] = deep_intruders;
  j["inside_fraction"] = inside_fraction;
  j["max_in_arc_gap"] = max_in_arc_gap;
  j["mean_in_arc_gap"] = mean_in_arc_gap;
  j["gap_ratio"] = gap_ratio;
  return j.dump(2);
}

double max_circular_gap(const RealVector& sorted_angles) {
  long n = sorted_angles.size();
  require(n >= 1, Err::BadRange, "max_circular_gap: empty");
  double worst = sorted_angles[0] + TWO_PI - sorted_angles[n - 1];
  for (long i = 0; i + 1 < n; ++i) worst = std::max(worst, sorted_angles[i + 1] - sorted_angles[i]);
  return worst;
}

double eigenangle_distance(const RealVector& a, const RealVector& b) {
  require(a.size() == b.size(), Err::SizeMismatch, "eigenangle_distance: length mismatch");
  long n = a.size();
  if (n == 0) return 0;
  auto circ = [](double x) {
    double c = wrap_angle(x);
    return std::min(c, TWO_PI - c);
  };
  double best = std::numeric_limits<double>::infinity();
  for (long s = -2; s <= 2; ++s) {
    double worst = 0;
    for (long i = 0; i < n; ++i) {
      long j = ((i + s) % n + n) % n;
      worst = std::max(worst, circ(a[i] - b[j]));
    }
    best = std::min(best, worst);
  }
  return best;
}

double equivalence_check(const VerblunskySequence& seq, const Matrix& g1, const Matrix& g2,
                         long k_lo, long k_hi) {
  auto ta = build_truncation(seq, k_lo, k_hi);
  auto beta = conjugate_sequence(seq, g1, g2);
  Matrix bd = g1 * g2.adjoint();
  auto tb = build_truncation(beta, k_lo, k_hi, bd, bd);
  auto ea = spectrum(ta);
  auto eb = spectrum(tb);
  return eigenangle_distance(ea.angles, eb.angles);
}

ReflectionlessReport reflectionless_check(const VerblunskySequence& seq, const ArcSpec& arc,
                                          long k_a, long k_b, const ReflectionlessOptions& opt) {
  require(k_a != k_b, Err::BadRange, "reflectionless_check: sites must differ");
  require(arc.width() > 2 * opt.collar, Err::BadArc, "reflectionless_check: collar eats the arc");
  ReflectionlessReport rep;
  rep.worst_herm_min = std::numeric_limits<double>::infinity();
  double span = arc.width() - 2 * opt.collar;
  for (int i = 0; i < opt.angles; ++i) {
    double theta = arc.theta0 + opt.collar + (i + 0.5) * span / opt.angles;
    Complex z = std::polar(opt.r, wrap_angle(theta));
    for (long k : {k_a, k_b}) {
      ReflectionlessSample s;
      s.theta = wrap_angle(theta);
      s.k = k;
      Matrix phi = schur_plus(seq, z, k, opt.schur);
      Matrix g = schur_minus_inv(seq, z, k, opt.schur);
      s.pair_gap = operator_norm(phi.adjoint() - g);
      Matrix prod = parity(k) == 1 ? Matrix(g * phi) : Matrix(phi * g);
      Matrix m11 = schur_to_cayley(prod);
      Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(m11));
      s.herm_min = es.eigenvalues().minCoeff();
      try {
        s.xi_norm = operator_norm(imag_part(principal_log(m11)));
      } catch (const Error&) {
        s.xi_norm = 1e9;
      }
      rep.worst_pair = std::max(rep.worst_pair, s.pair_gap);
      rep.worst_herm_min = std::min(rep.worst_herm_min, s.herm_min);
      rep.worst_xi = std::max(rep.worst_xi, s.xi_norm);
      rep.samples.push_back(s);
    }
  }
  rep.ok = rep.worst_pair < opt.tol_pair && rep.worst_herm_min > -opt.tol_herm &&
           rep.worst_xi < opt.tol_xi;
  return rep;
}

std::string ReflectionlessReport::to_json() const {
  json j;
  j["ok"] = ok;
  j["worst_pair"] = worst_pair;
  j["worst_herm_min"] = worst_herm_min;
  j["worst_xi"] = worst_xi;
  json arr = json::array();
  for (const auto& s : samples) {
    json e;
    e["theta"] = s.theta;
    e["k"] = s.k;
    e["pair_gap"] = s.pair_gap;
    e["herm_min"] = s.herm_min;
    e["xi_norm"] = s.xi_norm;
    arr.push_back(e);
  }
  j["samples"] = arr;
  return j.dump(2);
}

LadderReport borg_ladder_check(const VerblunskySequence& seq, const ArcSpec& arc, long k_lo,
                               long k_hi) {
  require(k_lo <= k_hi, Err::BadRange, "borg_ladder_check: empty range");
  int m = seq.m();
  Matrix id = Matrix::Identity(m, m);
  double a2 = std::pow(std::cos(0.25 * arc.width()), 2);
  double half_sum = 0.5 * (arc.theta0 + arc.theta1);
  Complex gbar = -std::polar(1.0, -half_sum);  // conjugate one-step rotation
  Matrix adj_prod = a2 * gbar * id;
  Matrix two_step = 2.0 * a2 * gbar * gbar * id;
  Matrix norm_sq = a2 * id;
  LadderReport rep;
  auto upd = [](double& w, const Matrix& d) { w = std::max(w, operator_norm(d)); };
  for (long k = k_lo; k <= k_hi; ++k) {
    Matrix am1 = seq.alpha(k - 1), a0 = seq.alpha(k), a1 = seq.alpha(k + 1), a2m = seq.alpha(k + 2);
    upd(rep.commute, a1.adjoint() * a0 - a0 * a1.adjoint());
    upd(rep.product, a1.adjoint() * a0 - adj_prod);
    upd(rep.intertwine, a1.adjoint() * rho_tilde(a0) - rho(a0) * a1.adjoint());
    upd(rep.intertwine, rho_tilde(a0) * am1 - am1 * rho(a0));
    upd(rep.second, a0 * a2m.adjoint() + am1 * a1.adjoint() - two_step);
    upd(rep.sum_sq, a0.adjoint() * a0 + a1.adjoint() * a1 - 2.0 * norm_sq);
    upd(rep.step, a1 + std::polar(1.0, half_sum) * a0);
    upd(rep.norm_sq, a0.adjoint() * a0 - norm_sq);
  }
  return rep;
}

double LadderReport::worst() const {
  return std::max({commute, product, intertwine, second, sum_sq, step, norm_sq});
}

std::string angles_to_csv(const RealVector& a) {
  std::string out = "theta\n";
  char buf[64];
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", a[i]);
    out += buf;
  }
  return out;
}

}  // namespace cmv
