#pragma once

#include <string>
#include <vector>

#include "cmv/cmv_operator.hpp"
#include "cmv/herglotz.hpp"
#include "cmv/linalg.hpp"
#include "cmv/types.hpp"
#include "cmv/verblunsky.hpp"
#include "cmv/weyl.hpp"

namespace cmv {

// Taylor coefficients (degree 1..jmax) of the diagonal Weyl function minus
// the identity, computed from exact banded powers around the base site.
std::vector<Matrix> moments(const VerblunskySequence& seq, long k0, int jmax);

// Coefficients of log(I + sum_j M_j z^j) up to the input degree.
std::vector<Matrix> log_coeffs(const std::vector<Matrix>& mom);

// Grid integral 2i * avg_cells Xi(theta) e^{-i j theta} over valid cells.
Matrix trace_rhs(const XiProfile& xi, long j);

// Closed forms of the first two log coefficients for the arc family.
Matrix borg_l1(const ArcSpec& arc, int m);
Matrix borg_l2(const ArcSpec& arc, int m);

// Boundary phase step profile attached to an arc: zero on the arc, +pi/2
// from the top edge to the midpoint of the gap, -pi/2 from there back around.
XiProfile borg_xi(const ArcSpec& arc, int m, int n);

struct XiOptions {
  long k0 = 0;
  double r = 1 - 1e-3;
  int grid_n = 4096;
  long half_width = 2048;  // truncation sites on each side of k0
};

// Phase profile of the truncation-backed diagonal Weyl function.
ExpHerglotzResult xi_of_operator(const VerblunskySequence& seq, const XiOptions& opt);

struct TraceReport {
  int m = 0;
  long k0 = 0;
  int jmax = 0;
  double r = 0;
  int grid_n = 0;
  long half_width = 0;
  long xi_invalid = 0;
  std::vector<Matrix> lhs;   // moment path
  std::vector<Matrix> rhs;   // grid path, radius-deconvolved
  std::vector<double> err;
  double max_err = 0;
  std::string to_json() const;
};

TraceReport trace_check(const VerblunskySequence& seq, long k0, int jmax, const XiOptions& xopt);
TraceReport trace_check_profile(const VerblunskySequence& seq, long k0, int jmax,
                                const ExpHerglotzResult& rep, long half_width);

EigenPairs spectrum(const CmvTruncation& t);

// Atomic matrix measure of the diagonal Weyl function at the base site.
MatrixCircleMeasure spectral_measure(const CmvTruncation& t, const EigenPairs& eig, long k0);

struct ContainmentReport {
  long total = 0;
  long inside_dilated = 0;
  long deep_intruders = 0;
  double inside_fraction = 0;
  double max_in_arc_gap = 0;
  double mean_in_arc_gap = 0;
  double gap_ratio = 0;  // max over mean of adjacent in-arc gaps
  std::string to_json() const;
};

ContainmentReport arc_containment(const RealVector& angles, const ArcSpec& arc, double dilate,
                                  double deep);

double max_circular_gap(const RealVector& sorted_angles);

// Largest circular mismatch between two sorted eigenangle lists, allowing a
// small cyclic realignment for angles straddling zero.
double eigenangle_distance(const RealVector& a, const RealVector& b);

// Largest eigenangle mismatch between a truncation of seq and the truncation
// of its conjugated sequence built with the covariant boundary.
double equivalence_check(const VerblunskySequence& seq, const Matrix& g1, const Matrix& g2,
                         long k_lo, long k_hi);

struct ReflectionlessOptions {
  double r = 1 - 1e-3;
  int angles = 24;
  double collar = 0.05;     // trimmed off both arc edges
  double tol_pair = 0.05;   // boundary matching of the two schur functions
  double tol_herm = 1e-8;   // lower bound slack for the real part
  double tol_xi = 0.05;     // phase flatness on the arc
  SchurOptions schur{};
};

struct ReflectionlessSample {
  double theta = 0;
  long k = 0;
  double pair_gap = 0;
  double herm_min = 0;
  double xi_norm = 0;
};

struct ReflectionlessReport {
  bool ok = false;
  double worst_pair = 0;
  double worst_herm_min = 0;
  double worst_xi = 0;
  std::vector<ReflectionlessSample> samples;
  std::string to_json() const;
};

ReflectionlessReport reflectionless_check(const VerblunskySequence& seq, const ArcSpec& arc,
                                          long k_a, long k_b, const ReflectionlessOptions& opt);

struct LadderReport {
  double commute = 0;     // the two adjacent products agree and are scalar
  double product = 0;     // adjacent product closed form
  double intertwine = 0;  // defect blocks slide through neighbors
  double second = 0;      // two-step sum closed form
  double sum_sq = 0;      // adjacent squared-norm sum closed form
  double step = 0;        // one-step rotation recurrence
  double norm_sq = 0;     // single squared-norm closed form
  double worst() const;
};

LadderReport borg_ladder_check(const VerblunskySequence& seq, const ArcSpec& arc, long k_lo,
                               long k_hi);

std::string angles_to_csv(const RealVector& a);

}  // namespace cmv
