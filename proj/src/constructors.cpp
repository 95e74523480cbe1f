#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracmph/constructors.hpp"
#include "fracmph/errors.hpp"

namespace fracmph {

namespace {

double powa(double x, double alpha) { return x > 0.0 ? std::pow(x, alpha) : 0.0; }

template <typename... Parts>
std::string concat(Parts&&... parts) {
  std::ostringstream msg;
  (msg << ... << parts);
  return msg.str();
}

}  // namespace

// ---------------------------------------------------------------- feed-forward

namespace {

void validate_feed_forward(const FeedForwardSpec& spec) {
  std::vector<std::string> errors;
  const std::size_t n = spec.blocks.size();
  if (n == 0) throw ValidationError("feed-forward model needs at least one block");
  for (std::size_t k = 0; k < n; ++k) {
    const auto& b = spec.blocks[k];
    if (b.C.rows() == 0 || b.C.rows() != b.C.cols()) {
      errors.push_back(concat("block ", k, ": C must be square and nonempty"));
      continue;
    }
    if (k + 1 == n) {
      if (b.D.size() != 0) errors.push_back(concat("block ", k, ": the last block takes no D"));
      continue;
    }
    const auto& next = spec.blocks[k + 1].C;
    if (b.D.rows() != b.C.rows() || b.D.cols() != next.rows()) {
      errors.push_back(concat("block ", k, ": D must be ", b.C.rows(), "x", next.rows(), ", got ",
                              b.D.rows(), "x", b.D.cols()));
      continue;
    }
    if (!b.D.allFinite() || b.D.minCoeff() < 0.0) {
      errors.push_back(concat("block ", k, ": D entries must be nonnegative"));
    }
    const Vector balance = b.C.rowwise().sum() + b.D.rowwise().sum();
    const double scale = std::max(1.0, b.C.cwiseAbs().maxCoeff());
    if (balance.cwiseAbs().maxCoeff() > 1e-12 * scale) {
      errors.push_back(concat("block ", k, ": flow balance -C e = D e violated by ",
                              balance.cwiseAbs().maxCoeff()));
    }
  }
  if (spec.pi.size() != spec.blocks.front().C.rows()) {
    errors.push_back(concat("pi has ", spec.pi.size(), " entries, block 1 has ",
                            spec.blocks.front().C.rows(), " states"));
  }
  if (!errors.empty()) throw ValidationError(errors);
}

struct FeedForwardKernels {
  double alpha;
  Vector pi;
  std::vector<numerics::MatrixMLKernel> blocks;
  std::vector<Matrix> transfers;
  Vector exit;
};

}  // namespace

double power_diagonal_residual(const MPHAlphaDist& d, const Vector& theta) {
  const Vector outer = d.rewards() * theta;
  Vector powered(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) powered(k) = powa(theta(k), d.alpha());
  const Vector inner = d.rewards() * powered;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < outer.size(); ++i) {
    worst = std::max(worst, std::abs(powa(outer(i), d.alpha()) - inner(i)));
  }
  return worst;
}

MPHAlphaDist build_feed_forward(const FeedForwardSpec& spec, double alpha) {
  validate_feed_forward(spec);
  const std::size_t n = spec.blocks.size();
  std::vector<Eigen::Index> offsets(n + 1, 0);
  for (std::size_t k = 0; k < n; ++k) offsets[k + 1] = offsets[k] + spec.blocks[k].C.rows();
  const Eigen::Index p = offsets[n];

  Matrix t = Matrix::Zero(p, p);
  Matrix r = Matrix::Zero(p, static_cast<Eigen::Index>(n));
  Vector pi = Vector::Zero(p);
  pi.head(spec.pi.size()) = spec.pi;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& b = spec.blocks[k];
    const Eigen::Index m = b.C.rows();
    t.block(offsets[k], offsets[k], m, m) = b.C;
    if (k + 1 < n) t.block(offsets[k], offsets[k + 1], m, b.D.cols()) = b.D;
    r.block(offsets[k], static_cast<Eigen::Index>(k), m, 1).setOnes();
  }
  MPHAlphaDist dist = mpha_validate(pi, t, r, alpha);

  random::RngStream rng(0x5eedf00dULL, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector theta(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = random::sample_exponential(rng, 0.5);
    const double residual = power_diagonal_residual(dist, theta);
    if (residual > 1e-12) {
      throw AccuracyError(concat("feed-forward model: Delta(R theta)^alpha and Delta(R theta^alpha) differ by ",
                                 residual));
    }
  }

  auto kernels = std::make_shared<FeedForwardKernels>();
  kernels->alpha = alpha;
  kernels->pi = spec.pi;
  for (std::size_t k = 0; k < n; ++k) {
    kernels->blocks.emplace_back(spec.blocks[k].C);
    if (k + 1 < n) kernels->transfers.push_back(spec.blocks[k].D);
  }
  kernels->exit = -(spec.blocks.back().C.rowwise().sum());

  return dist.with_closed_form([kernels](std::span<const double> y) {
    const std::size_t blocks = kernels->blocks.size();
    if (y.size() != blocks) throw DomainError("feed-forward density: wrong number of coordinates");
    const double a = kernels->alpha;
    RowVector row = kernels->pi.transpose();
    for (std::size_t k = 0; k < blocks; ++k) {
      if (y[k] < 0.0) throw DomainError("feed-forward density: coordinates must be nonnegative");
      if (y[k] == 0.0) return 0.0;
      row = std::pow(y[k], a - 1.0) * (row * kernels->blocks[k].evaluate({a, a}, std::pow(y[k], a)));
      if (k + 1 < blocks) row = row * kernels->transfers[k];
    }
    return row.dot(kernels->exit.transpose());
  });
}

double feed_forward_laplace(const FeedForwardSpec& spec, double alpha, const Vector& theta) {
  validate_feed_forward(spec);
  const std::size_t n = spec.blocks.size();
  if (theta.size() != static_cast<Eigen::Index>(n)) {
    throw DomainError("feed_forward_laplace: theta has the wrong dimension");
  }
  if (!theta.allFinite() || theta.minCoeff() < 0.0) {
    throw DomainError("feed_forward_laplace: theta must be nonnegative");
  }
  // Evaluate right to left so every step is a linear solve against a vector.
  Vector v = -(spec.blocks.back().C.rowwise().sum());
  for (std::size_t j = n; j-- > 0;) {
    const auto& b = spec.blocks[j];
    if (j + 1 < n) v = b.D * v;
    Matrix m = -b.C;
    m.diagonal().array() += powa(theta(static_cast<Eigen::Index>(j)), alpha);
    v = numerics::solve_linear(m, v);
  }
  return std::max(0.0, 1.0 - spec.pi.sum()) + spec.pi.dot(v);
}

// ---------------------------------------------------------------- bivariate

BivariateBlockSpec paper_fig3_spec() {
  BivariateBlockSpec s;
  s.pi1 = Vector::Constant(2, 0.5);
  s.pi2 = Vector::Zero(2);
  s.pi3 = Vector::Zero(2);
  s.T11 = Matrix{{-3.0, 2.0}, {0.0, -4.0}};
  s.T12 = Matrix{{0.0, 0.5}, {1.0, 1.0}};
  s.T13 = s.T12;
  s.T22 = Matrix{{-1.0, 1.0}, {0.0, -2.0}};
  s.T33 = s.T22;
  return s;
}

namespace {

void validate_bivariate(const BivariateBlockSpec& s) {
  std::vector<std::string> errors;
  const Eigen::Index p1 = s.T11.rows(), p2 = s.T22.rows(), p3 = s.T33.rows();
  auto square = [&](const Matrix& m, const char* name) {
    if (m.rows() == 0 || m.rows() != m.cols()) errors.push_back(concat(name, " must be square and nonempty"));
  };
  square(s.T11, "T11");
  square(s.T22, "T22");
  square(s.T33, "T33");
  if (s.T12.rows() != p1 || s.T12.cols() != p2) errors.push_back(concat("T12 must be ", p1, "x", p2));
  if (s.T13.rows() != p1 || s.T13.cols() != p3) errors.push_back(concat("T13 must be ", p1, "x", p3));
  if (s.pi1.size() != p1) errors.push_back(concat("pi1 must have ", p1, " entries"));
  if (s.pi2.size() != p2) errors.push_back(concat("pi2 must have ", p2, " entries"));
  if (s.pi3.size() != p3) errors.push_back(concat("pi3 must have ", p3, " entries"));
  if (!errors.empty()) throw ValidationError(errors);
}

}  // namespace

BivariateModel::BivariateModel(BivariateBlockSpec spec, double alpha) : spec_(std::move(spec)), alpha_(alpha) {
  validate_bivariate(spec_);
  const auto& s = spec_;
  const Eigen::Index p1 = s.T11.rows(), p2 = s.T22.rows(), p3 = s.T33.rows();
  const Eigen::Index p = p1 + p2 + p3;
  Matrix t = Matrix::Zero(p, p);
  t.block(0, 0, p1, p1) = s.T11;
  t.block(0, p1, p1, p2) = s.T12;
  t.block(0, p1 + p2, p1, p3) = s.T13;
  t.block(p1, p1, p2, p2) = s.T22;
  t.block(p1 + p2, p1 + p2, p3, p3) = s.T33;
  Vector pi(p);
  pi << s.pi1, s.pi2, s.pi3;
  Matrix r = Matrix::Zero(p, 2);
  r.block(0, 0, p1, 2).setOnes();
  r.block(p1, 0, p2, 1).setOnes();
  r.block(p1 + p2, 1, p3, 1).setOnes();

  MPHAlphaDist base = mpha_validate(pi, t, r, alpha);
  k11_ = std::make_shared<const numerics::MatrixMLKernel>(s.T11);
  k22_ = std::make_shared<const numerics::MatrixMLKernel>(s.T22);
  k33_ = std::make_shared<const numerics::MatrixMLKernel>(s.T33);
  auto positive = [](double v) { return v > 0.0 ? v : 0.0; };
  t1_ = (-(s.T11.rowwise().sum() + s.T12.rowwise().sum() + s.T13.rowwise().sum())).unaryExpr(positive);
  t2_ = (-s.T22.rowwise().sum()).unaryExpr(positive);
  t3_ = (-s.T33.rowwise().sum()).unaryExpr(positive);

  // The closed form carries the planar part only; the diagonal and axis
  // parts live on null sets of the plane.
  auto shadow = std::make_shared<const BivariateModel>(*this);
  dist_ = std::make_shared<const MPHAlphaDist>(base.with_closed_form([shadow](std::span<const double> y) {
    if (y.size() != 2) throw DomainError("bivariate density: expected two coordinates");
    if (y[0] < 0.0 || y[1] < 0.0) throw DomainError("bivariate density: coordinates must be nonnegative");
    if (y[0] == 0.0 || y[1] == 0.0 || y[0] == y[1]) return 0.0;
    return bivariate_density(*shadow, y[0], y[1]).value;
  }));
}

const numerics::MatrixMLKernel& BivariateModel::kernel(int block) const {
  switch (block) {
    case 1: return *k11_;
    case 2: return *k22_;
    case 3: return *k33_;
    default: throw DomainError(concat("bivariate model: no block ", block));
  }
}

RowVector BivariateModel::kernel_row(int block, const Vector& lhs, double s) const {
  const double a = alpha();
  return std::pow(s, a - 1.0) * (lhs.transpose() * kernel(block).evaluate({a, a}, std::pow(s, a)));
}

Vector BivariateModel::kernel_col(int block, double s, const Vector& rhs) const {
  const double a = alpha();
  return std::pow(s, a - 1.0) * (kernel(block).evaluate({a, a}, std::pow(s, a)) * rhs);
}

Vector BivariateModel::cumulative_col(int block, double s, const Vector& rhs) const {
  if (s <= 0.0) return Vector::Zero(rhs.size());
  const double a = alpha();
  const double sa = std::pow(s, a);
  return sa * (kernel(block).evaluate({a, a + 1.0}, sa) * rhs);
}

BivariateModel build_bivariate(const BivariateBlockSpec& spec, double alpha) {
  return BivariateModel(spec, alpha);
}

BivariateModel preset(const std::string& name) {
  if (name == kPaperFig3Name) return build_bivariate(paper_fig3_spec(), kPaperFig3Alpha);
  throw ValidationError(concat("unknown preset '", name, "'"));
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Below: return "below";
    case Region::Above: return "above";
    case Region::Diagonal: return "diagonal";
    case Region::AxisX: return "axis_x";
    case Region::AxisY: return "axis_y";
    case Region::Origin: return "origin";
  }
  return "unknown";
}

RegionDensity bivariate_density(const BivariateModel& m, double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("bivariate_density: coordinates must be nonnegative");
  const auto& s = m.spec();
  if (x == 0.0 && y == 0.0) return {Region::Origin, m.dist().base().atom()};
  if (y == 0.0) return {Region::AxisX, m.kernel_row(2, s.pi2, x).dot(m.t2().transpose())};
  if (x == 0.0) return {Region::AxisY, m.kernel_row(3, s.pi3, y).dot(m.t3().transpose())};
  if (x == y) return {Region::Diagonal, m.kernel_row(1, s.pi1, x).dot(m.t1().transpose())};
  if (y < x) {
    const RowVector left = m.kernel_row(1, s.pi1, y) * s.T12;
    return {Region::Below, left.dot(m.kernel_col(2, x - y, m.t2()).transpose())};
  }
  const RowVector left = m.kernel_row(1, s.pi1, x) * s.T13;
  return {Region::Above, left.dot(m.kernel_col(3, y - x, m.t3()).transpose())};
}

namespace {

// Integrates f over [lo, hi] with a break at `kink` when it lies inside.
template <typename F>
double integrate_split(F&& f, double lo, double hi, double kink) {
  if (!(hi > lo)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto piece = [&](double a, double b) { return b > a ? ts.integrate(f, a, b, 1e-10) : 0.0; };
  if (kink > lo && kink < hi) return piece(lo, kink) + piece(kink, hi);
  return piece(lo, hi);
}

// Mass of {a in [a0,a1), b in [b0,b1), a < b} for the planar part where the
// time in block 1 is `a` and the total of the growing component is `b`.
double wedge_mass(const BivariateModel& m, int tail_block, const Matrix& coupling,
                  const Vector& tail_exit, double a0, double a1, double b0, double b1) {
  const Vector& pi1 = m.spec().pi1;
  auto integrand = [&](double a) {
    if (a <= 0.0) return 0.0;
    const Vector upper = m.cumulative_col(tail_block, b1 - a, tail_exit);
    const Vector lower = m.cumulative_col(tail_block, std::max(b0, a) - a, tail_exit);
    return (m.kernel_row(1, pi1, a) * coupling).dot((upper - lower).transpose());
  };
  const double lo = std::max(a0, 0.0);
  const double hi = std::min(a1, b1);
  return integrate_split(integrand, lo, hi, b0);
}

}  // namespace

double bivariate_cell_mass(const BivariateModel& m, double x0, double x1, double y0, double y1) {
  if (!(x1 > x0) || !(y1 > y0)) throw DomainError("bivariate_cell_mass: empty cell");
  const auto& s = m.spec();
  double mass = 0.0;
  // y < x: block-1 time is y, block-2 time is x - y.
  mass += wedge_mass(m, 2, s.T12, m.t2(), y0, y1, x0, x1);
  // x < y: block-1 time is x, block-3 time is y - x.
  mass += wedge_mass(m, 3, s.T13, m.t3(), x0, x1, y0, y1);

  const double d0 = std::max({x0, y0, 0.0});
  const double d1 = std::min(x1, y1);
  if (d1 > d0) {
    mass += s.pi1.dot(m.cumulative_col(1, d1, m.t1()) - m.cumulative_col(1, d0, m.t1()));
  }
  if (y0 <= 0.0 && y1 > 0.0 && x1 > 0.0) {
    mass += s.pi2.dot(m.cumulative_col(2, x1, m.t2()) - m.cumulative_col(2, std::max(x0, 0.0), m.t2()));
  }
  if (x0 <= 0.0 && x1 > 0.0 && y1 > 0.0) {
    mass += s.pi3.dot(m.cumulative_col(3, y1, m.t3()) - m.cumulative_col(3, std::max(y0, 0.0), m.t3()));
  }
  if (x0 <= 0.0 && x1 > 0.0 && y0 <= 0.0 && y1 > 0.0) mass += m.dist().base().atom();
  return mass;
}

BivariateQuadrature bivariate_laplace_quadrature(const BivariateModel& m, const Vector& theta) {
  if (theta.size() != 2 || !theta.allFinite() || theta.minCoeff() < 0.0) {
    throw DomainError("bivariate_laplace_quadrature: theta must be a nonnegative 2-vector");
  }
  const double a = m.alpha();
  const double th1 = theta(0), th2 = theta(1);
  // u = s^alpha maps s^{alpha-1} ds to du / alpha and removes the edge
  // singularity of every factor; beyond u_max the integrands are O(u^-2).
  constexpr double u_max = 1e12;
  auto from_u = [a](double u) { return std::pow(u, 1.0 / a); };
  auto jac = [a](double u) { return std::pow(u, 1.0 / a - 1.0) / a; };
  const double tol = 1e-9;

  auto line = [&](auto&& f) {
    boost::math::quadrature::exp_sinh<double> es;
    return es.integrate(
        [&](double u) {
          if (u <= 0.0 || u > u_max) return 0.0;
          const double s = from_u(u);
          return f(s) * jac(u);
        },
        tol);
  };
  // Planar part in (block-1 time, tail time) coordinates.
  auto plane = [&](bool below) {
    boost::math::quadrature::exp_sinh<double> outer;
    return outer.integrate(
        [&](double u) {
          if (u <= 0.0 || u > u_max) return 0.0;
          const double shared = from_u(u);
          boost::math::quadrature::exp_sinh<double> inner;
          const double in = inner.integrate(
              [&](double v) {
                if (v <= 0.0 || v > u_max) return 0.0;
                const double extra = from_u(v);
                const double x = below ? shared + extra : shared;
                const double y = below ? shared : shared + extra;
                if (x == y) return 0.0;
                const double f = bivariate_density(m, x, y).value;
                return std::exp(-th1 * x - th2 * y) * f * jac(v);
              },
              tol);
          return in * jac(u);
        },
        tol);
  };

  BivariateQuadrature q;
  const auto& s = m.spec();
  q.interior_below = s.pi1.sum() > 0.0 ? plane(true) : 0.0;
  q.interior_above = s.pi1.sum() > 0.0 ? plane(false) : 0.0;
  if (m.t1().maxCoeff() > 0.0 && s.pi1.sum() > 0.0) {
    q.diagonal = line([&](double x) { return std::exp(-(th1 + th2) * x) * bivariate_density(m, x, x).value; });
  }
  if (s.pi2.sum() > 0.0) {
    q.axis_x = line([&](double x) { return std::exp(-th1 * x) * bivariate_density(m, x, 0.0).value; });
  }
  if (s.pi3.sum() > 0.0) {
    q.axis_y = line([&](double y) { return std::exp(-th2 * y) * bivariate_density(m, 0.0, y).value; });
  }
  q.atom = m.dist().base().atom();
  return q;
}

}  // namespace fracmph
