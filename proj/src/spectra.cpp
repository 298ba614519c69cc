#include "ldrm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "ldrm/errors.hpp"

namespace ldrm {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> chebyshev_nodes(double lo, double hi, int n) {
  std::vector<double> x(n);
  double mid = 0.5 * (lo + hi);
  double half = 0.5 * (hi - lo);
  for (int i = 0; i < n; ++i) {
    double phi = kPi * (n - 1 - i) / (n - 1);
    x[i] = mid + half * std::cos(phi);
  }
  x.front() = lo;
  x.back() = hi;
  return x;
}

double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return ys.back();
  size_t j = static_cast<size_t>(it - xs.begin());
  if (j == 0) return ys.front();
  double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return ys[j - 1] + t * (ys[j] - ys[j - 1]);
}

double positive_sqrt(double v) { return v > 0 ? std::sqrt(v) : 0.0; }

}  // namespace

SpectralDensity SpectralDensity::semicircle(double sigma) {
  if (!(sigma > 0)) throw Error("semicircle: sigma must be positive");
  SpectralDensity d;
  d.kind_ = DensityKind::semicircle;
  d.params_[0] = sigma;
  d.support_ = {-2 * sigma, 2 * sigma};
  d.edge_coeff_ = 1.0 / sigma;
  return d;
}

SpectralDensity SpectralDensity::marchenko_pastur(double q, double scale) {
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("marchenko_pastur: q must lie in (0, 1]");
  if (!(scale > 0)) throw Error("marchenko_pastur: scale must be positive");
  SpectralDensity d;
  d.kind_ = DensityKind::marchenko_pastur;
  d.params_[0] = q;
  d.params_[1] = scale;
  double r = std::sqrt(q);
  d.support_ = {scale * (1 - r) * (1 - r), scale * (1 + r) * (1 + r)};
  double c = std::pow(q, -0.75) / std::sqrt(scale) / d.support_.upper;
  d.edge_coeff_ = std::pow(c, 2.0 / 3.0);
  return d;
}

SpectralDensity SpectralDensity::quarter_circle(double sigma) {
  if (!(sigma > 0)) throw Error("quarter_circle: sigma must be positive");
  SpectralDensity d;
  d.kind_ = DensityKind::quarter_circle;
  d.params_[0] = sigma;
  d.support_ = {0.0, 2 * sigma};
  d.edge_coeff_ = std::pow(2.0 * std::pow(sigma, -1.5), 2.0 / 3.0);
  return d;
}

SpectralDensity SpectralDensity::gauss_rect_lsvd(double sigma, double q) {
  if (!(sigma > 0)) throw Error("gauss_rect_lsvd: sigma must be positive");
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("gauss_rect_lsvd: q must lie in (0, 1]");
  SpectralDensity d;
  d.kind_ = DensityKind::gauss_rect_lsvd;
  d.params_[0] = sigma;
  d.params_[1] = q;
  double r = std::sqrt(q);
  d.support_ = {sigma * (1 - r), sigma * (1 + r)};
  double sp = d.support_.upper;
  double cmu = std::pow(q, -0.75) / sigma / (sp * sp);
  d.edge_coeff_ = std::pow(2 * sp * std::sqrt(2 * sp) * cmu, 2.0 / 3.0);
  return d;
}

SpectralDensity SpectralDensity::dirac(double a) {
  SpectralDensity d;
  d.kind_ = DensityKind::dirac;
  d.params_[0] = a;
  d.support_ = {a, a};
  d.atoms_ = {{a, 1.0}};
  return d;
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> grid, std::vector<double> values,
                                           std::vector<Atom> atoms) {
  if (grid.size() != values.size()) throw Error("tabulated: grid and values differ in length");
  if (grid.size() == 1) throw Error("tabulated: need at least two nodes");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error("tabulated: grid must be strictly ascending");
  for (double v : values)
    if (!(v >= 0)) throw Error("tabulated: values must be nonnegative");
  // Rounding residue at the end nodes would read as a hard edge with g(a+) = inf.
  if (!values.empty()) {
    double peak = *std::max_element(values.begin(), values.end());
    if (values.front() < 1e-10 * peak) values.front() = 0.0;
    if (values.back() < 1e-10 * peak) values.back() = 0.0;
  }
  double atom_mass = 0.0;
  for (const auto& a : atoms) atom_mass += a.mass;
  double area = 0.0;
  for (size_t i = 1; i < grid.size(); ++i) area += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  double target = 1.0 - atom_mass;
  if (!grid.empty()) {
    if (!(area > 0) && target > 1e-14) throw Error("tabulated: zero mass");
    if (area > 0)
      for (double& v : values) v *= target / area;
  }
  SpectralDensity d;
  d.kind_ = DensityKind::tabulated;
  d.grid_ = std::move(grid);
  d.values_ = std::move(values);
  d.atoms_ = std::move(atoms);
  std::sort(d.atoms_.begin(), d.atoms_.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
  double lo = kInf, hi = -kInf;
  if (!d.grid_.empty()) {
    lo = d.grid_.front();
    hi = d.grid_.back();
  }
  for (const auto& a : d.atoms_) {
    lo = std::min(lo, a.position);
    hi = std::max(hi, a.position);
  }
  d.support_ = {lo, hi};
  return d;
}

SpectralDensity SpectralDensity::tabulate(const RealFn& f, SupportInterval support, int nodes) {
  auto xs = chebyshev_nodes(support.lower, support.upper, nodes);
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) ys[i] = std::max(0.0, f(xs[i]));
  return tabulated(std::move(xs), std::move(ys));
}

SpectralDensity SpectralDensity::as_numeric() const {
  SpectralDensity d = *this;
  d.numeric_ = true;
  return d;
}

double SpectralDensity::operator()(double x) const {
  double s = params_[0];
  switch (kind_) {
    case DensityKind::semicircle:
      if (x <= support_.lower || x >= support_.upper) return 0.0;
      return positive_sqrt(4 * s * s - x * x) / (2 * kPi * s * s);
    case DensityKind::marchenko_pastur: {
      if (x <= support_.lower || x >= support_.upper || x <= 0) return 0.0;
      double q = params_[0];
      double sc = params_[1];
      return positive_sqrt((support_.upper - x) * (x - support_.lower)) / (2 * kPi * q * sc * x);
    }
    case DensityKind::quarter_circle:
      if (x < 0 || x >= support_.upper) return 0.0;
      return positive_sqrt(4 * s * s - x * x) / (kPi * s * s);
    case DensityKind::gauss_rect_lsvd: {
      if (x <= support_.lower || x >= support_.upper || x <= 0) return 0.0;
      double q = params_[1];
      double u = x * x - s * s * (1 + q);
      return positive_sqrt(4 * q * s * s * s * s - u * u) / (kPi * s * s * q * x);
    }
    case DensityKind::dirac:
      return 0.0;
    case DensityKind::tabulated:
      return interp(grid_, values_, x);
  }
  return 0.0;
}

double SpectralDensity::expect(const RealFn& f, double tol) const {
  double total = 0.0;
  for (const auto& a : atoms_) total += a.mass * f(a.position);
  if (kind_ == DensityKind::dirac) return total;
  if (kind_ == DensityKind::tabulated) {
    using GL = boost::math::quadrature::gauss<double, 10>;
    for (size_t i = 1; i < grid_.size(); ++i) {
      double a = grid_[i - 1], b = grid_[i];
      double ya = values_[i - 1], yb = values_[i];
      if (ya == 0 && yb == 0) continue;
      auto g = [&](double x) { return f(x) * (ya + (yb - ya) * (x - a) / (b - a)); };
      total += GL::integrate(g, a, b);
    }
    return total;
  }
  double mid = 0.5 * (support_.lower + support_.upper);
  double half = 0.5 * (support_.upper - support_.lower);
  auto g = [&](double phi) {
    double x = mid + half * std::cos(phi);
    return f(x) * (*this)(x) * half * std::sin(phi);
  };
  return total + integrate(g, 0.0, kPi, tol);
}

double SpectralDensity::mean() const {
  switch (kind_) {
    case DensityKind::semicircle:
      return 0.0;
    case DensityKind::marchenko_pastur:
      return params_[1];
    case DensityKind::dirac:
      return params_[0];
    default:
      return expect([](double x) { return x; });
  }
}

double SpectralDensity::cdf(double x) const {
  if (x < support_.lower) return 0.0;
  if (x >= support_.upper) return 1.0;
  double total = 0.0;
  for (const auto& a : atoms_)
    if (a.position <= x) total += a.mass;
  if (kind_ == DensityKind::dirac) return total;
  if (kind_ == DensityKind::tabulated) {
    for (size_t i = 1; i < grid_.size(); ++i) {
      double a = grid_[i - 1], b = grid_[i];
      if (a >= x) break;
      double ya = values_[i - 1], yb = values_[i];
      double e = std::min(b, x);
      double ye = ya + (yb - ya) * (e - a) / (b - a);
      total += 0.5 * (ya + ye) * (e - a);
    }
    return std::min(1.0, total);
  }
  double mid = 0.5 * (support_.lower + support_.upper);
  double half = 0.5 * (support_.upper - support_.lower);
  double phi_x = std::acos(std::clamp((x - mid) / half, -1.0, 1.0));
  auto g = [&](double phi) {
    double t = mid + half * std::cos(phi);
    return (*this)(t) * half * std::sin(phi);
  };
  return std::clamp(integrate(g, phi_x, kPi, 1e-13), 0.0, 1.0);
}

std::string SpectralDensity::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case DensityKind::semicircle: os << "semicircle(" << params_[0] << ")"; break;
    case DensityKind::marchenko_pastur: os << "marchenko_pastur(" << params_[0] << "," << params_[1] << ")"; break;
    case DensityKind::quarter_circle: os << "quarter_circle(" << params_[0] << ")"; break;
    case DensityKind::gauss_rect_lsvd: os << "gauss_rect_lsvd(" << params_[0] << "," << params_[1] << ")"; break;
    case DensityKind::dirac: os << "dirac(" << params_[0] << ")"; break;
    case DensityKind::tabulated: os << "tabulated(" << grid_.size() << " nodes, " << atoms_.size() << " atoms)"; break;
  }
  return os.str();
}

double eval_density(const SpectralDensity& d, double x) { return d(x); }

std::vector<double> classical_positions(const SpectralDensity& d, int n) {
  if (d.kind() == DensityKind::dirac || (d.kind() == DensityKind::tabulated && d.grid().empty()))
    throw DegenerateDensity("classical_positions needs a continuous density");
  if (n < 1) throw Error("classical_positions: n must be positive");
  std::vector<double> out(n);
  double lo = d.lower(), hi = d.upper();
  for (int i = 1; i <= n; ++i) {
    double level = static_cast<double>(i) / (n + 1);
    double a = (i > 1) ? out[i - 2] : lo;
    out[i - 1] = solve_monotone([&](double x) { return d.cdf(x); }, level, a, hi, "classical_positions");
  }
  return out;
}

SpectralDensity symmetrize(const SpectralDensity& rho) {
  if (rho.lower() < 0) throw Error("symmetrize: density must live on the nonnegative half-line");
  switch (rho.kind()) {
    case DensityKind::quarter_circle:
      return SpectralDensity::semicircle(rho.param(0));
    case DensityKind::dirac: {
      double a = rho.param(0);
      if (a == 0) return SpectralDensity::dirac(0.0);
      return SpectralDensity::tabulated({}, {}, {{-a, 0.5}, {a, 0.5}});
    }
    default:
      break;
  }
  std::vector<double> base;
  if (rho.kind() == DensityKind::tabulated) {
    base = rho.grid();
  } else {
    base = chebyshev_nodes(rho.lower(), rho.upper(), 513);
  }
  std::vector<double> xs, ys;
  for (auto it = base.rbegin(); it != base.rend(); ++it) {
    if (*it == 0.0) continue;
    xs.push_back(-*it);
    ys.push_back(0.5 * rho(*it));
  }
  if (!base.empty() && base.front() == 0.0) {
    xs.push_back(0.0);
    ys.push_back(0.5 * rho(0.0));
  }
  for (double x : base) {
    if (x == 0.0) continue;
    xs.push_back(x);
    ys.push_back(0.5 * rho(x));
  }
  std::vector<Atom> atoms;
  for (const auto& a : rho.atoms()) {
    if (a.position == 0) {
      atoms.push_back(a);
    } else {
      atoms.push_back({-a.position, 0.5 * a.mass});
      atoms.push_back({a.position, 0.5 * a.mass});
    }
  }
  return SpectralDensity::tabulated(std::move(xs), std::move(ys), std::move(atoms));
}

SpectralDensity lsvd_to_square(const SpectralDensity& rho) {
  if (rho.lower() < 0) throw Error("lsvd_to_square: density must live on the nonnegative half-line");
  switch (rho.kind()) {
    case DensityKind::quarter_circle: {
      double s = rho.param(0);
      return SpectralDensity::marchenko_pastur(1.0, s * s);
    }
    case DensityKind::gauss_rect_lsvd: {
      double s = rho.param(0);
      return SpectralDensity::marchenko_pastur(rho.param(1), s * s);
    }
    case DensityKind::dirac:
      return SpectralDensity::dirac(rho.param(0) * rho.param(0));
    default:
      break;
  }
  std::vector<double> xs;
  if (rho.kind() == DensityKind::tabulated) {
    for (double s : rho.grid()) xs.push_back(s * s);
  } else {
    xs = chebyshev_nodes(rho.lower() * rho.lower(), rho.upper() * rho.upper(), 513);
  }
  std::vector<double> ys(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    double l = xs[i];
    if (l <= 0) {
      ys[i] = 0.0;
      continue;
    }
    double s = std::sqrt(l);
    ys[i] = rho(s) / (2 * s);
  }
  if (!xs.empty() && xs.front() <= 0 && xs.size() > 1) ys.front() = ys[1];
  std::vector<Atom> atoms;
  for (const auto& a : rho.atoms()) atoms.push_back({a.position * a.position, a.mass});
  return SpectralDensity::tabulated(std::move(xs), std::move(ys), std::move(atoms));
}

double edge_coefficient(const SpectralDensity& d) {
  if (d.edge_coeff()) return *d.edge_coeff();
  // Least-squares fit of pi rho(a+ - eps)/sqrt(eps) = c0 + c1 eps.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = 0; k <= 30; ++k) {
    double eps = std::pow(10.0, -6.0 + 3.0 * k / 30.0);
    double y = kPi * d(d.upper() - eps) / std::sqrt(eps);
    sx += eps;
    sy += y;
    sxx += eps * eps;
    sxy += eps * y;
    ++m;
  }
  double c1 = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double c0 = (sy - c1 * sx) / m;
  if (!(c0 > 0)) throw NonConvergence("edge_coefficient: no square-root edge detected");
  return std::pow(c0, 2.0 / 3.0);
}

SpectralDensity load_density_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open density file " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,density", 0) != 0) throw Error("density file must start with header x,density: " + path);
  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("malformed density row in " + path);
    xs.push_back(std::stod(line.substr(0, comma)));
    ys.push_back(std::stod(line.substr(comma + 1)));
  }
  return SpectralDensity::tabulated(std::move(xs), std::move(ys));
}

void save_density_csv(const SpectralDensity& d, const std::string& path, int nodes) {
  if (!d.atoms().empty()) throw Error("save_density_csv: atoms cannot be written as a density table");
  std::ofstream out(path);
  if (!out) throw Error("cannot write density file " + path);
  out.precision(17);
  out << "x,density\n";
  std::vector<double> xs = d.kind() == DensityKind::tabulated ? d.grid() : chebyshev_nodes(d.lower(), d.upper(), nodes);
  for (double x : xs) out << x << "," << d(x) << "\n";
}

Ensemble goe(double sigma, double wall) {
  Ensemble e;
  e.density = SpectralDensity::semicircle(sigma);
  double s2 = sigma * sigma;
  e.v_prime = [s2](double x) { return x / s2; };
  e.potential = [s2](double x) { return x * x / (2 * s2); };
  return with_wall(std::move(e), wall);
}

Ensemble wishart(double q, double wall, double scale) {
  Ensemble e;
  e.density = SpectralDensity::marchenko_pastur(q, scale);
  e.v_prime = [q, scale](double x) { return 1.0 / (q * scale) + (1.0 - 1.0 / q) / x; };
  e.potential = [q, scale](double x) {
    return x > 0 ? x / (q * scale) + (1.0 - 1.0 / q) * std::log(x) : kInf;
  };
  return with_wall(std::move(e), wall);
}

Ensemble fixed_diagonal(const SpectralDensity& d) {
  Ensemble e;
  e.density = d;
  e.wall = d.upper();
  return e;
}

Ensemble rank_one(double gamma, double base) {
  if (!(gamma > 0)) throw Error("rank_one: gamma must be positive");
  Ensemble e;
  e.density = SpectralDensity::dirac(base);
  e.wall = base + gamma;
  return e;
}

Ensemble with_wall(Ensemble e, double wall) {
  if (std::isnan(wall) || wall < e.density.upper() - 1e-12) throw Error("wall below the top edge");
  e.wall = std::max(wall, e.density.upper());
  return e;
}

RectEnsemble gauss_rect(double sigma, double q, double wall) {
  RectEnsemble r;
  r.lsvd = q == 1.0 ? SpectralDensity::quarter_circle(sigma) : SpectralDensity::gauss_rect_lsvd(sigma, q);
  r.q = q;
  double s2 = sigma * sigma;
  r.v_prime_tilde = [q, s2](double l) { return 1.0 / (q * s2) + (1.0 - 1.0 / q) / l; };
  if (wall < r.lsvd.upper() - 1e-12) throw Error("wall below the top edge");
  r.wall = std::max(wall, r.lsvd.upper());
  return r;
}

RectEnsemble ginibre(double sigma, double wall) { return gauss_rect(sigma, 1.0, wall); }

RectEnsemble fixed_rect(const SpectralDensity& lsvd, double q) {
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("fixed_rect: q must lie in (0, 1]");
  if (lsvd.lower() < 0) throw Error("fixed_rect: singular values must be nonnegative");
  RectEnsemble r;
  r.lsvd = lsvd;
  r.q = q;
  r.wall = lsvd.upper();
  return r;
}

EigenConfiguration metropolis_wall_sample(const Ensemble& e, int n, int steps, std::uint64_t seed) {
  if (n < 1) throw Error("metropolis_wall_sample: n must be positive");
  if (!e.potential && !e.v_prime) throw Error("metropolis_wall_sample: ensemble has no potential");
  RealFn V = e.potential;
  if (!V) {
    double ref = e.density.mean();
    V = [&e, ref](double x) { return integrate(e.v_prime, ref, x, 1e-10); };
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> lam;
  if (e.density.kind() == DensityKind::dirac) {
    lam.assign(n, e.density.param(0));
    for (int i = 0; i < n; ++i) lam[i] += 1e-3 * (i - 0.5 * n) / n;
  } else {
    lam = classical_positions(e.density, n);
  }
  for (double& x : lam) x = std::min(x, e.wall);
  double width = std::max(e.density.upper() - e.density.lower(), 1e-3);
  double step = width / std::max(4.0, std::sqrt(static_cast<double>(n)) * 2.0);
  double half_n = 0.5 * n;

  for (int sweep = 0; sweep < steps; ++sweep) {
    int accepted = 0;
    for (int i = 0; i < n; ++i) {
      double old = lam[i];
      double cand = old + step * normal(rng);
      if (cand > e.wall) continue;
      double vnew = V(cand);
      if (!std::isfinite(vnew)) continue;
      double dE = half_n * (vnew - V(old));
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        dE -= std::log(std::abs(cand - lam[j])) - std::log(std::abs(old - lam[j]));
      }
      if (dE <= 0 || unif(rng) < std::exp(-dE)) {
        lam[i] = cand;
        ++accepted;
      }
    }
    double rate = static_cast<double>(accepted) / n;
    if (sweep < steps / 2) {
      if (rate < 0.3) step *= 0.8;
      if (rate > 0.5) step *= 1.2;
    } else if (rate < 0.01 && n > 1) {
      throw NonConvergence("metropolis_wall_sample: acceptance below 1%");
    }
  }
  std::sort(lam.begin(), lam.end());
  return {lam, e.wall};
}

}  // namespace ldrm
