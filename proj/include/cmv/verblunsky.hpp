#pragma once

#include <string>
#include <vector>

#include "cmv/types.hpp"

namespace cmv {

// Circular arc from theta0 to theta1 (counterclockwise), 0 <= theta0 < 2pi,
// theta0 < theta1 <= theta0 + 2pi. theta_star is the midpoint of the
// complementary arc.
struct ArcSpec {
  double theta0 = 0.0;
  double theta1 = TWO_PI;

  ArcSpec() = default;
  ArcSpec(double t0, double t1);

  double width() const { return theta1 - theta0; }
  double theta_star() const { return 0.5 * (theta0 + theta1) + PI; }
  // Position of theta on the lifted interval [theta0, theta0 + 2pi).
  double lift(double theta) const;
  bool contains(double theta) const { return lift(theta) < theta1; }
};

// Defect blocks of a strict contraction.
Matrix rho(const Matrix& alpha);        // (I - a^* a)^{1/2}
Matrix rho_tilde(const Matrix& alpha);  // (I - a a^*)^{1/2}

// 2m x 2m unitary building block [[-a, rho_tilde], [rho, a^*]].
Matrix theta_block(const Matrix& alpha);

enum class ExtensionKind { Zero, Borg, Periodic };

// Doubly infinite sequence of m x m strict contractions: a contiguous stored
// window [k_min, k_max] plus an extension rule for every other site.
class VerblunskySequence {
 public:
  static VerblunskySequence free_seq(int m);
  static VerblunskySequence windowed(int m, long k_min, std::vector<Matrix> window);
  static VerblunskySequence borg(int m, const ArcSpec& arc, const Matrix& gamma);
  static VerblunskySequence periodic(int m, long k_min, std::vector<Matrix> window);

  int m() const { return m_; }
  ExtensionKind extension() const { return kind_; }
  const ArcSpec& arc() const { return arc_; }
  const Matrix& gamma() const { return gamma_; }
  long k_min() const { return k_min_; }
  long k_max() const { return k_min_ + long(window_.size()) - 1; }
  bool window_empty() const { return window_.empty(); }

  Matrix alpha(long k) const;

  // Pins a value at site k, materializing extension values for any gap the
  // window has to grow over. Used for local perturbations of a background.
  void set_override(long k, const Matrix& a);

  std::string to_json() const;
  static VerblunskySequence from_json(const std::string& text);

 private:
  VerblunskySequence(int m, ExtensionKind kind) : m_(m), kind_(kind) {}
  Matrix extension_value(long k) const;

  int m_ = 1;
  ExtensionKind kind_ = ExtensionKind::Zero;
  long k_min_ = 0;
  std::vector<Matrix> window_;
  ArcSpec arc_{0.0, TWO_PI};            // Borg only
  Matrix gamma_;                        // Borg only
  long period_ = 0;                     // Periodic only
};

VerblunskySequence borg_sequence(int m, const ArcSpec& arc, const Matrix& gamma);

// beta_k = g1 alpha_k g2^* for unitary g1, g2.
VerblunskySequence conjugate_sequence(const VerblunskySequence& seq, const Matrix& g1,
                                      const Matrix& g2);

struct ValidationReport {
  bool ok = true;
  double min_margin = 1.0;  // min over range of 1 - ||alpha_k||
  long argmin = 0;
};

ValidationReport validate(const VerblunskySequence& seq, long k_lo, long k_hi);

}  // namespace cmv
