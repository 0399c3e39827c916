#include "cmv/verblunsky.hpp"

#include <cmath>

#include "json.hpp"

#include "cmv/linalg.hpp"

namespace cmv {

ArcSpec::ArcSpec(double t0, double t1) : theta0(t0), theta1(t1) {
  require(t0 >= 0.0 && t0 < TWO_PI, Err::BadArc, "theta0 outside [0, 2pi)");
  require(t1 > t0 && t1 <= t0 + TWO_PI, Err::BadArc, "theta1 outside (theta0, theta0 + 2pi]");
}

double ArcSpec::lift(double theta) const {
  double t = std::fmod(theta - theta0, TWO_PI);
  if (t < 0) t += TWO_PI;
  return theta0 + t;
}

namespace {

void require_contraction(const Matrix& a, int m) {
  require(a.rows() == m && a.cols() == m, Err::SizeMismatch, "alpha block size");
  require(operator_norm(a) < 1.0 - tols().contraction_margin, Err::NotContractive,
          "||alpha|| too close to 1");
}

void require_unitary(const Matrix& g, int m, const char* who) {
  require(g.rows() == m && g.cols() == m, Err::SizeMismatch, who);
  require(unitarity_defect(g) <= tols().unitary, Err::NotUnitary, who);
}

}  // namespace

Matrix rho(const Matrix& alpha) {
  const auto m = alpha.rows();
  return hermitian_sqrt(Matrix::Identity(m, m) - alpha.adjoint() * alpha);
}

Matrix rho_tilde(const Matrix& alpha) {
  const auto m = alpha.rows();
  return hermitian_sqrt(Matrix::Identity(m, m) - alpha * alpha.adjoint());
}

Matrix theta_block(const Matrix& alpha) {
  require(alpha.rows() == alpha.cols(), Err::NotSquare, "theta_block");
  require(operator_norm(alpha) < 1.0 - tols().contraction_margin, Err::NotContractive,
          "theta_block");
  const auto m = alpha.rows();
  Matrix t(2 * m, 2 * m);
  t.topLeftCorner(m, m) = -alpha;
  t.topRightCorner(m, m) = rho_tilde(alpha);
  t.bottomLeftCorner(m, m) = rho(alpha);
  t.bottomRightCorner(m, m) = alpha.adjoint();
  return t;
}

VerblunskySequence VerblunskySequence::free_seq(int m) {
  require(m >= 1, Err::BadConfig, "free_seq m");
  return VerblunskySequence(m, ExtensionKind::Zero);
}

VerblunskySequence VerblunskySequence::windowed(int m, long k_min, std::vector<Matrix> window) {
  require(m >= 1, Err::BadConfig, "windowed m");
  VerblunskySequence s(m, ExtensionKind::Zero);
  for (const auto& a : window) require_contraction(a, m);
  s.k_min_ = k_min;
  s.window_ = std::move(window);
  return s;
}

VerblunskySequence VerblunskySequence::borg(int m, const ArcSpec& arc, const Matrix& gamma) {
  require(m >= 1, Err::BadConfig, "borg m");
  require_unitary(gamma, m, "borg gamma");
  VerblunskySequence s(m, ExtensionKind::Borg);
  s.arc_ = arc;
  s.gamma_ = gamma;
  return s;
}

VerblunskySequence VerblunskySequence::periodic(int m, long k_min, std::vector<Matrix> window) {
  require(m >= 1, Err::BadConfig, "periodic m");
  require(!window.empty(), Err::BadConfig, "periodic window empty");
  for (const auto& a : window) require_contraction(a, m);
  VerblunskySequence s(m, ExtensionKind::Periodic);
  s.k_min_ = k_min;
  s.period_ = long(window.size());
  s.window_ = std::move(window);
  return s;
}

Matrix VerblunskySequence::extension_value(long k) const {
  switch (kind_) {
    case ExtensionKind::Zero:
      return Matrix::Zero(m_, m_);
    case ExtensionKind::Borg: {
      // alpha_k = g^k a gamma with g = -exp(i(theta0 + theta1)/2) and
      // a = cos((theta1 - theta0)/4).
      double half_sum = 0.5 * (arc_.theta0 + arc_.theta1);
      double a = std::cos(0.25 * (arc_.theta1 - arc_.theta0));
      Complex g_pow_k = std::polar(1.0, double(k) * (PI + half_sum));
      return (g_pow_k * a) * gamma_;
    }
    case ExtensionKind::Periodic: {
      long r = (k - k_min_) % period_;
      if (r < 0) r += period_;
      return window_[size_t(r)];
    }
  }
  return Matrix::Zero(m_, m_);
}

Matrix VerblunskySequence::alpha(long k) const {
  if (!window_.empty() && k >= k_min_ && k <= k_max()) return window_[size_t(k - k_min_)];
  return extension_value(k);
}

void VerblunskySequence::set_override(long k, const Matrix& a) {
  require_contraction(a, m_);
  require(kind_ != ExtensionKind::Periodic, Err::BadConfig,
          "override would break periodic extension");
  if (window_.empty()) {
    k_min_ = k;
    window_.push_back(a);
    return;
  }
  while (k < k_min_) {
    window_.insert(window_.begin(), extension_value(k_min_ - 1));
    --k_min_;
  }
  while (k > k_max()) window_.push_back(extension_value(k_max() + 1));
  window_[size_t(k - k_min_)] = a;
}

VerblunskySequence borg_sequence(int m, const ArcSpec& arc, const Matrix& gamma) {
  return VerblunskySequence::borg(m, arc, gamma);
}

VerblunskySequence conjugate_sequence(const VerblunskySequence& seq, const Matrix& g1,
                                      const Matrix& g2) {
  const int m = seq.m();
  require_unitary(g1, m, "conjugate_sequence g1");
  require_unitary(g2, m, "conjugate_sequence g2");
  auto conj = [&](const Matrix& a) { return Matrix(g1 * a * g2.adjoint()); };
  switch (seq.extension()) {
    case ExtensionKind::Zero: {
      std::vector<Matrix> window;
      for (long k = seq.k_min(); k <= seq.k_max(); ++k) window.push_back(conj(seq.alpha(k)));
      if (seq.window_empty()) window.clear();
      return VerblunskySequence::windowed(m, seq.k_min(), std::move(window));
    }
    case ExtensionKind::Borg: {
      // g1 (g^k a gamma) g2^* stays Borg with gamma -> g1 gamma g2^*.
      auto out = VerblunskySequence::borg(m, seq.arc(), g1 * seq.gamma() * g2.adjoint());
      for (long k = seq.k_min(); k <= seq.k_max(); ++k) out.set_override(k, conj(seq.alpha(k)));
      return out;
    }
    case ExtensionKind::Periodic: {
      std::vector<Matrix> window;
      for (long k = seq.k_min(); k <= seq.k_max(); ++k) window.push_back(conj(seq.alpha(k)));
      return VerblunskySequence::periodic(m, seq.k_min(), std::move(window));
    }
  }
  fail(Err::BadConfig, "conjugate_sequence extension");
}

ValidationReport validate(const VerblunskySequence& seq, long k_lo, long k_hi) {
  require(k_lo <= k_hi, Err::BadRange, "validate range");
  ValidationReport rep;
  for (long k = k_lo; k <= k_hi; ++k) {
    double margin = 1.0 - operator_norm(seq.alpha(k));
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin = k;
    }
  }
  rep.ok = rep.min_margin > tols().contraction_margin;
  return rep;
}

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& a) {
  json out = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.push_back(json::array({a(i, j).real(), a(i, j).imag()}));
  return out;
}

Matrix matrix_from_json(const json& j, int m) {
  require(j.is_array() && j.size() == size_t(m) * size_t(m), Err::BadConfig,
          "matrix entry count");
  Matrix a(m, m);
  size_t idx = 0;
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c, ++idx)
      a(r, c) = Complex(j[idx][0].get<double>(), j[idx][1].get<double>());
  return a;
}

}  // namespace

std::string VerblunskySequence::to_json() const {
  json j;
  j["m"] = m_;
  j["k_min"] = k_min_;
  j["k_max"] = k_max();
  json alphas = json::array();
  for (const auto& a : window_) alphas.push_back(matrix_to_json(a));
  j["alphas"] = alphas;
  json ext;
  switch (kind_) {
    case ExtensionKind::Zero:
      ext["kind"] = "zero";
      break;
    case ExtensionKind::Borg:
      ext["kind"] = "borg";
      ext["theta0"] = arc_.theta0;
      ext["theta1"] = arc_.theta1;
      ext["gamma"] = matrix_to_json(gamma_);
      break;
    case ExtensionKind::Periodic:
      ext["kind"] = "periodic";
      ext["period"] = period_;
      break;
  }
  j["extension"] = ext;
  return j.dump(2);
}

VerblunskySequence VerblunskySequence::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(Err::BadConfig, std::string("sequence json: ") + e.what());
  }
  try {
    int m = j.at("m").get<int>();
    long k_min = j.at("k_min").get<long>();
    std::vector<Matrix> window;
    for (const auto& a : j.at("alphas")) window.push_back(matrix_from_json(a, m));
    const json& ext = j.at("extension");
    std::string kind = ext.at("kind").get<std::string>();
    if (kind == "zero") {
      return windowed(m, k_min, std::move(window));
    } else if (kind == "borg") {
      ArcSpec arc(ext.at("theta0").get<double>(), ext.at("theta1").get<double>());
      auto seq = borg(m, arc, matrix_from_json(ext.at("gamma"), m));
      long k = k_min;
      for (auto& a : window) seq.set_override(k++, a);
      return seq;
    } else if (kind == "periodic") {
      return periodic(m, k_min, std::move(window));
    }
    fail(Err::BadConfig, "unknown extension kind " + kind);
  } catch (const json::exception& e) {
    fail(Err::BadConfig, std::string("sequence json: ") + e.what());
  }
}

}  // namespace cmv
