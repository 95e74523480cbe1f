#pragma once

// Structured MPH*_alpha models that admit closed-form joint densities.
//
// Feed-forward: states split into n consecutive blocks, the process moves
// only from block k to block k+1, and component k is the time spent in
// block k:
//
//       | C_1 D_1          |          | e 0 ... 0 |
//   T = |     C_2 D_2      |      R = | 0 e ... 0 |
//       |         ... D_n-1|          |    ...    |
//       |             C_n  |          | 0 0 ... e |
//
// Bivariate block model: three blocks, block 1 earns for both components,
// block 2 only for the first and block 3 only for the second:
//
//       | T11 T12 T13 |         | e e |
//   T = |  0  T22  0  |     R = | e 0 |
//       |  0   0  T33 |         | 0 e |

#include <memory>
#include <string>
#include <vector>

#include "fracmph/mph.hpp"

namespace fracmph {

// ---------------------------------------------------------------- feed-forward

struct FeedForwardBlock {
  Matrix C;  ///< sub-intensity block
  Matrix D;  ///< transitions into the next block; empty for the last block
};

struct FeedForwardSpec {
  std::vector<FeedForwardBlock> blocks;
  Vector pi;  ///< initial distribution on block 1
};

/// Checks dimension chaining and flow balance -C_k e = D_k e (relative 1e-12),
/// assembles (pi, T, R), verifies Delta(R theta)^alpha = Delta(R theta^alpha)
/// on 100 random theta and attaches the closed-form joint density
///   pi prod_{k<n} [y_k^{alpha-1} E_{alpha,alpha}(C_k y_k^alpha) D_k]
///      y_n^{alpha-1} E_{alpha,alpha}(C_n y_n^alpha) c_n,   c_n = -C_n e.
MPHAlphaDist build_feed_forward(const FeedForwardSpec& spec, double alpha);

/// max_i |(R theta)_i^alpha - (R theta^alpha)_i|.
double power_diagonal_residual(const MPHAlphaDist& d, const Vector& theta);

/// Chained block resolvents:
///   (1 - pi e) + pi prod_{k<n} (theta_k^alpha I - C_k)^{-1} D_k (theta_n^alpha I - C_n)^{-1} c_n.
double feed_forward_laplace(const FeedForwardSpec& spec, double alpha, const Vector& theta);

// ---------------------------------------------------------------- bivariate

struct BivariateBlockSpec {
  Vector pi1, pi2, pi3;
  Matrix T11, T12, T13, T22, T33;
};

/// Parameters of the built-in two-dimensional example (alpha = 0.9).
BivariateBlockSpec paper_fig3_spec();
inline constexpr double kPaperFig3Alpha = 0.9;
inline constexpr const char* kPaperFig3Name = "paper-fig3";

class BivariateModel {
 public:
  BivariateModel(BivariateBlockSpec spec, double alpha);

  const BivariateBlockSpec& spec() const noexcept { return spec_; }
  const MPHAlphaDist& dist() const noexcept { return *dist_; }
  double alpha() const noexcept { return alpha_; }

  /// Exit vectors of the three blocks; t1 = -(T11 + T12 + T13) e.
  const Vector& t1() const noexcept { return t1_; }
  const Vector& t2() const noexcept { return t2_; }
  const Vector& t3() const noexcept { return t3_; }

  /// Row vector lhs^T s^{alpha-1} E_{alpha,alpha}(T_kk s^alpha), block k in {1,2,3}.
  RowVector kernel_row(int block, const Vector& lhs, double s) const;
  /// s^{alpha-1} E_{alpha,alpha}(T_kk s^alpha) rhs.
  Vector kernel_col(int block, double s, const Vector& rhs) const;
  /// Integrated kernel s^alpha E_{alpha,alpha+1}(T_kk s^alpha) rhs
  /// = int_0^s u^{alpha-1} E_{alpha,alpha}(T_kk u^alpha) du rhs.
  Vector cumulative_col(int block, double s, const Vector& rhs) const;

 private:
  const numerics::MatrixMLKernel& kernel(int block) const;

  BivariateBlockSpec spec_;
  double alpha_;
  std::shared_ptr<const MPHAlphaDist> dist_;
  std::shared_ptr<const numerics::MatrixMLKernel> k11_, k22_, k33_;
  Vector t1_, t2_, t3_;
};

BivariateModel build_bivariate(const BivariateBlockSpec& spec, double alpha);

/// Named built-in models. Throws ValidationError for an unknown name.
BivariateModel preset(const std::string& name);

enum class Region {
  Below,     ///< 0 < y < x: density w.r.t. Lebesgue measure on the plane
  Above,     ///< 0 < x < y
  Diagonal,  ///< x = y > 0: density w.r.t. length along the diagonal
  AxisX,     ///< y = 0 < x: density w.r.t. length along the x-axis
  AxisY,     ///< x = 0 < y
  Origin,    ///< x = y = 0: point mass
};

const char* region_name(Region r);

struct RegionDensity {
  Region region;
  double value;
};

/// Piecewise density of the bivariate model:
///   0<y<x:  pi1 y^{a-1}E(T11 y^a) T12 (x-y)^{a-1}E(T22 (x-y)^a) t2
///   0<x<y:  pi1 x^{a-1}E(T11 x^a) T13 (y-x)^{a-1}E(T33 (y-x)^a) t3
///   x=y>0:  pi1 x^{a-1}E(T11 x^a) t1
///   y=0<x:  pi2 x^{a-1}E(T22 x^a) t2      x=0<y: pi3 y^{a-1}E(T33 y^a) t3
///   origin: 1 - pi e (mass)
/// with E = E_{a,a}. Throws DomainError for negative coordinates.
RegionDensity bivariate_density(const BivariateModel& m, double x, double y);

/// Probability of the cell [x0,x1) x [y0,y1), counting every part of the
/// law (interior, diagonal, axes, origin) that falls into it.
double bivariate_cell_mass(const BivariateModel& m, double x0, double x1, double y0, double y1);

/// Quadrature of the piecewise density against exp(-theta1 x - theta2 y),
/// plus the atom. theta = (0,0) gives the total mass.
struct BivariateQuadrature {
  double interior_below = 0.0;
  double interior_above = 0.0;
  double diagonal = 0.0;
  double axis_x = 0.0;
  double axis_y = 0.0;
  double atom = 0.0;
  double total() const {
    return interior_below + interior_above + diagonal + axis_x + axis_y + atom;
  }
};
BivariateQuadrature bivariate_laplace_quadrature(const BivariateModel& m, const Vector& theta);

}  // namespace fracmph
