#include "azb/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "azb/errors.hpp"

namespace azb {

namespace {

double reduce_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

// ---------------------------------------------------------------- Turns

Turns::Turns(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw ParameterError("Turns: denominator must be positive");
  num = floor_mod(num, den);
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

double Turns::radians() const {
  return kTwoPi * (static_cast<double>(num_) / static_cast<double>(den_));
}

Complex Turns::unit() const {
  if ((4 * num_) % den_ == 0) {
    switch ((4 * num_) / den_) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
      default: break;
    }
  }
  return std::polar(1.0, radians());
}

Turns Turns::operator+(const Turns& other) const {
  const std::int64_t l = std::lcm(den_, other.den_);
  return Turns(num_ * (l / den_) + other.num_ * (l / other.den_), l);
}

Turns Turns::operator-() const { return Turns(-num_, den_); }

Turns Turns::scaled(std::int64_t factor) const {
  return Turns(floor_mod(factor, den_) * num_, den_);
}

// ----------------------------------------------------------- GammaPoint

GammaPoint GammaPoint::zero() {
  GammaPoint g;
  g.zero_ = true;
  return g;
}

GammaPoint GammaPoint::make(int k, double theta) {
  if (!std::isfinite(theta)) throw DomainError("make_point: theta must be finite");
  GammaPoint g;
  g.k_ = k;
  g.theta_ = reduce_angle(theta);
  if (g.theta_ == 0.0) {
    g.turns_ = Turns();
  } else if (g.theta_ == kPi) {
    g.turns_ = Turns(1, 2);
  }
  return g;
}

GammaPoint GammaPoint::from_turns(int k, Turns phase) {
  GammaPoint g;
  g.k_ = k;
  g.turns_ = phase;
  g.theta_ = phase.radians();
  return g;
}

GammaPoint GammaPoint::snap(Complex z, double q, double rel_tol) {
  const double r = std::abs(z);
  if (!std::isfinite(r)) throw SpectralDomainError("snap: non-finite value");
  if (r <= rel_tol) return zero();
  const int k = static_cast<int>(std::lround(std::log(r) / std::log(q)));
  const double target = std::pow(q, k);
  const double rel = std::abs(r - target) / target;
  if (rel > rel_tol) {
    std::ostringstream os;
    os << "snap: |z| = " << r << " is off the lattice q^Z (relative distance " << rel << ")";
    throw SpectralDomainError(os.str());
  }
  // Phases close to a rational turn p/den (den <= kMaxSnapDenominator) are
  // stored exactly, so singular points and grid characters stay exact.
  const double t = std::arg(z) / kTwoPi;
  for (std::int64_t den = 1; den <= kMaxSnapDenominator; ++den) {
    const double scaled = t * static_cast<double>(den);
    const double num = std::round(scaled);
    if (std::abs(scaled - num) <= rel_tol) return from_turns(k, Turns(static_cast<std::int64_t>(num), den));
  }
  return make(k, std::arg(z));
}

bool GammaPoint::is_singular() const {
  if (zero_ || k_ > 0 || k_ % 2 != 0) return false;
  if (turns_) return *turns_ == Turns(1, 2);
  return theta_ == kPi;
}

Complex GammaPoint::phase() const {
  if (zero_) return {0.0, 0.0};
  if (turns_) return turns_->unit();
  return std::polar(1.0, theta_);
}

Complex GammaPoint::value(double q) const {
  if (zero_) return {0.0, 0.0};
  return std::pow(q, k_) * phase();
}

GammaPoint GammaPoint::operator*(const GammaPoint& other) const {
  if (zero_ || other.zero_) return zero();
  if (turns_ && other.turns_) return from_turns(k_ + other.k_, *turns_ + *other.turns_);
  return make(k_ + other.k_, theta_ + other.theta_);
}

GammaPoint GammaPoint::inverse() const {
  if (zero_) throw DomainError("inverse of the zero point");
  if (turns_) return from_turns(-k_, -*turns_);
  return make(-k_, -theta_);
}

GammaPoint GammaPoint::conj() const {
  if (zero_) return zero();
  if (turns_) return from_turns(k_, -*turns_);
  return make(k_, -theta_);
}

bool operator==(const GammaPoint& a, const GammaPoint& b) {
  if (a.zero_ || b.zero_) return a.zero_ == b.zero_;
  if (a.k_ != b.k_) return false;
  if (a.turns_ && b.turns_) return *a.turns_ == *b.turns_;
  return a.theta_ == b.theta_;
}

std::string GammaPoint::to_string() const {
  if (zero_) return "0";
  std::ostringstream os;
  os << "q^" << k_ << "*e^(i*";
  if (turns_) {
    os << "2pi*" << turns_->num() << "/" << turns_->den();
  } else {
    os << theta_;
  }
  os << ")";
  return os.str();
}

Complex chi(const GammaPoint& g1, const GammaPoint& g2) {
  if (g1.is_zero() || g2.is_zero()) throw DomainError("chi is defined on Gamma x Gamma only");
  const int k = g1.k();
  const int l = g2.k();
  if (g1.turns() && g2.turns()) {
    return (g1.turns()->scaled(l) + g2.turns()->scaled(k)).unit();
  }
  return std::polar(1.0, std::remainder(l * g1.theta() + k * g2.theta(), kTwoPi));
}

double relative_gamma_distance(Complex z, double q) {
  const double r = std::abs(z);
  if (r == 0.0) return 0.0;
  const double e = std::log(r) / std::log(q);
  double best = std::numeric_limits<double>::infinity();
  for (double n : {std::floor(e), std::ceil(e)}) {
    const double target = std::pow(q, n);
    best = std::min(best, std::abs(r - target) / target);
  }
  return best;
}

// ------------------------------------------------------------ GammaGrid

struct GammaGrid::Data {
  double q = 0.5;
  int order = 2;
  std::vector<GammaPoint> points;
  std::vector<Complex> roots;  // e^{2 pi i m/M}
  Matrix fourier;
  std::vector<std::string> warnings;
};

GammaGrid::GammaGrid(double q, int order) {
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("grid: q must lie in (0, 1)");
  if (order < 2 || order % 2 != 0) throw ParameterError("grid: M must be an even integer >= 2");

  auto data = std::make_shared<Data>();
  data->q = q;
  data->order = order;
  if (q < 0.1 || q > 0.9) {
    data->warnings.push_back("q outside [0.1, 0.9]: q^(+-M/2) may be poorly conditioned");
  }
  data->roots.reserve(order);
  for (int m = 0; m < order; ++m) data->roots.push_back(Turns(m, order).unit());

  const Index n = static_cast<Index>(order) * order;
  data->points.reserve(n);
  for (int k = 0; k < order; ++k) {
    const int c = ((k + order / 2) % order) - order / 2;
    for (int j = 0; j < order; ++j) data->points.push_back(GammaPoint::from_turns(c, Turns(j, order)));
  }
  data_ = data;

  data->fourier.resize(n, n);
  for (Index p = 0; p < n; ++p) {
    for (Index p2 = 0; p2 < n; ++p2) data->fourier(p, p2) = pairing(p, p2) / static_cast<double>(order);
  }
}

double GammaGrid::q() const { return data_->q; }
int GammaGrid::order() const { return data_->order; }
Index GammaGrid::size() const { return static_cast<Index>(data_->points.size()); }
std::span<const std::string> GammaGrid::warnings() const { return data_->warnings; }

int GammaGrid::centered(int k) const {
  const int m = data_->order;
  return static_cast<int>(floor_mod(k + m / 2, m)) - m / 2;
}

Index GammaGrid::index(int k, int j) const {
  const int m = data_->order;
  return floor_mod(k, m) * m + floor_mod(j, m);
}

int GammaGrid::modulus_index(Index p) const { return static_cast<int>(p / data_->order); }
int GammaGrid::phase_index(Index p) const { return static_cast<int>(p % data_->order); }

Index GammaGrid::translate(Index p, Index t) const {
  return index(modulus_index(p) + modulus_index(t), phase_index(p) + phase_index(t));
}

Index GammaGrid::negate(Index p) const { return index(-modulus_index(p), -phase_index(p)); }

const GammaPoint& GammaGrid::point(Index p) const { return data_->points.at(static_cast<std::size_t>(p)); }
std::span<const GammaPoint> GammaGrid::points() const { return data_->points; }
Complex GammaGrid::value(Index p) const { return point(p).value(data_->q); }

Vector GammaGrid::values() const {
  Vector v(size());
  for (Index p = 0; p < size(); ++p) v(p) = value(p);
  return v;
}

Complex GammaGrid::pairing(Index p, Index p2) const {
  const std::int64_t m = data_->order;
  const std::int64_t e = floor_mod(static_cast<std::int64_t>(phase_index(p)) * modulus_index(p2) +
                                       static_cast<std::int64_t>(phase_index(p2)) * modulus_index(p),
                                   m);
  return data_->roots[static_cast<std::size_t>(e)];
}

GammaPoint GammaGrid::modulus_generator() const { return GammaPoint::from_turns(1, Turns()); }
GammaPoint GammaGrid::phase_generator() const { return GammaPoint::from_turns(0, Turns(1, data_->order)); }

const Matrix& GammaGrid::fourier() const { return data_->fourier; }

namespace {

// out(k, j) = (1/M) sum_{l, j'} w^{s (j l + j' k)} v(l, j'), s = +-1.
Vector cross_coupled_dft(const Vector& v, const std::vector<Complex>& roots, int m, bool adjoint) {
  if (v.size() != static_cast<Index>(m) * m) throw DimensionError("fourier_apply: length must be M^2");
  auto root = [&](std::int64_t e) {
    const Complex w = roots[static_cast<std::size_t>(floor_mod(e, m))];
    return adjoint ? std::conj(w) : w;
  };
  // w(l, k) = sum_{j'} root(j' k) v(l, j')
  Matrix partial(m, m);
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < m; ++k) {
      Complex acc{0.0, 0.0};
      for (int jp = 0; jp < m; ++jp) acc += root(static_cast<std::int64_t>(jp) * k) * v(l * m + jp);
      partial(l, k) = acc;
    }
  }
  Vector out(v.size());
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      Complex acc{0.0, 0.0};
      for (int l = 0; l < m; ++l) acc += root(static_cast<std::int64_t>(j) * l) * partial(l, k);
      out(k * m + j) = acc / static_cast<double>(m);
    }
  }
  return out;
}

}  // namespace

Vector GammaGrid::fourier_apply(const Vector& v) const {
  return cross_coupled_dft(v, data_->roots, data_->order, false);
}

Vector GammaGrid::fourier_adjoint_apply(const Vector& v) const {
  return cross_coupled_dft(v, data_->roots, data_->order, true);
}

Vector GammaGrid::interior_mask(int margin) const {
  const int m = data_->order;
  Vector mask = Vector::Zero(size());
  for (Index p = 0; p < size(); ++p) {
    const int c = centered(modulus_index(p));
    if (c >= -m / 2 + margin && c < m / 2 - margin) mask(p) = 1.0;
  }
  return mask;
}

}  // namespace azb
