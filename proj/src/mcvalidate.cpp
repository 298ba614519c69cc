#include "ldrm/mcvalidate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "ldrm/errors.hpp"
#include "ldrm/rankone.hpp"

namespace ldrm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  MatrixXd g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = nd(rng);
  return g;
}

VectorXd unit_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v / v.norm();
}

int thread_count() {
  if (const char* env = std::getenv("LDRM_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on a fixed partition; results are indexed, so
// the outcome does not depend on the number of threads.
template <class F>
void parallel_for(long count, F body) {
  int nt = static_cast<int>(std::min<long>(thread_count(), std::max(1L, count)));
  if (nt <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (long i = t; i < count; i += nt) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!err) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

bool is_random(const McOperand& o) { return o.kind != McOperand::Kind::fixed; }

std::vector<double> fixed_values(const McOperand& o, int n, bool iid, std::uint64_t seed) {
  const auto& d = o.density;
  if (d.kind() == DensityKind::dirac) return std::vector<double>(n, d.param(0));
  if (!iid) {
    auto v = classical_positions(d, n);
    std::reverse(v.begin(), v.end());
    return v;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) {
    double u = ud(rng);
    x = solve_monotone([&](double t) { return d.cdf(t); }, u, d.lower(), d.upper(), "iid diagonal draw");
  }
  std::sort(v.rbegin(), v.rend());
  return v;
}

// Per-configuration data that does not change between samples.
struct Prepared {
  McConfig cfg;
  std::vector<double> diag_a, diag_b;
  int m = 0;
};

Prepared prepare(const McConfig& cfg) {
  if (cfg.n < 2) throw UsageError("McConfig: n must be at least 2");
  if (cfg.samples < 1) throw UsageError("McConfig: samples must be positive");
  Prepared p;
  p.cfg = cfg;
  if (!cfg.iid_diagonal) {
    if (!is_random(cfg.a) && cfg.model != McModel::rk1rk1) p.diag_a = fixed_values(cfg.a, cfg.n, false, 0);
    bool uses_b = cfg.model == McModel::sum || cfg.model == McModel::product || cfg.model == McModel::rect_sum;
    if (uses_b && !is_random(cfg.b)) p.diag_b = fixed_values(cfg.b, cfg.n, false, 0);
  }
  if (cfg.model == McModel::rect_sum || (cfg.model == McModel::single && cfg.a.kind == McOperand::Kind::gauss_rect)) {
    double q = cfg.model == McModel::rect_sum ? cfg.q : cfg.a.q;
    if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("McConfig: q must lie in (0, 1]");
    p.m = static_cast<int>(std::lround(cfg.n / q));
  }
  return p;
}

MatrixXd square_operand(const Prepared& p, const McOperand& o, const std::vector<double>& diag, std::uint64_t seed) {
  int n = p.cfg.n;
  switch (o.kind) {
    case McOperand::Kind::goe: return sample_goe(n, o.sigma, seed);
    case McOperand::Kind::wishart: return sample_wishart(n, o.q, seed, o.sigma);
    case McOperand::Kind::gauss_rect: throw UsageError("gauss_rect operand in a square model");
    case McOperand::Kind::fixed: break;
  }
  auto v = p.cfg.iid_diagonal ? fixed_values(o, n, true, seed) : diag;
  MatrixXd d = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) d(i, i) = v[i];
  return d;
}

MatrixXd rect_operand(const Prepared& p, const McOperand& o, const std::vector<double>& diag, std::uint64_t seed) {
  int n = p.cfg.n, m = p.m;
  if (o.kind == McOperand::Kind::gauss_rect) return sample_ginibre(n, m, o.sigma, seed);
  if (o.kind != McOperand::Kind::fixed) throw UsageError("square operand in a rectangular model");
  auto v = p.cfg.iid_diagonal ? fixed_values(o, n, true, seed) : diag;
  MatrixXd d = MatrixXd::Zero(n, m);
  for (int i = 0; i < n; ++i) d(i, i) = v[i];
  return d;
}

MatrixXd sqrt_psd(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

bool is_diagonal(const McOperand& o) { return o.kind == McOperand::Kind::fixed; }

// Symmetric matrix whose eigenvalues (or squared singular values when *rect) are sampled.
MatrixXd realize(const Prepared& p, std::uint64_t counter, bool* rect) {
  const auto& cfg = p.cfg;
  std::uint64_t s = derive_seed(cfg.seed, counter);
  std::uint64_t s1 = derive_seed(s, 1), s2 = derive_seed(s, 2), s3 = derive_seed(s, 3), s4 = derive_seed(s, 4);
  *rect = false;
  switch (cfg.model) {
    case McModel::single: {
      if (cfg.a.kind == McOperand::Kind::gauss_rect) {
        *rect = true;
        MatrixXd x = rect_operand(p, cfg.a, p.diag_a, s1);
        return x * x.transpose();
      }
      return square_operand(p, cfg.a, p.diag_a, s1);
    }
    case McModel::sum: {
      MatrixXd a = square_operand(p, cfg.a, p.diag_a, s1);
      MatrixXd b = square_operand(p, cfg.b, p.diag_b, s2);
      if (!is_random(cfg.a) && !is_random(cfg.b)) {
        MatrixXd o = haar_orthogonal(cfg.n, s3);
        return a + o * b * o.transpose();
      }
      return a + b;
    }
    case McModel::product: {
      MatrixXd a = square_operand(p, cfg.a, p.diag_a, s1);
      MatrixXd b = square_operand(p, cfg.b, p.diag_b, s2);
      if (!is_random(cfg.a) && !is_random(cfg.b)) {
        MatrixXd o = haar_orthogonal(cfg.n, s3);
        b = o * b * o.transpose();
      }
      if (is_diagonal(cfg.b) && !is_diagonal(cfg.a)) std::swap(a, b);
      if (is_diagonal(cfg.a) || is_diagonal(cfg.b)) {
        VectorXd r = a.diagonal().cwiseMax(0.0).cwiseSqrt();
        return r.asDiagonal() * b * r.asDiagonal();
      }
      MatrixXd h = sqrt_psd(a);
      return h * b * h;
    }
    case McModel::rect_sum: {
      *rect = true;
      MatrixXd a = rect_operand(p, cfg.a, p.diag_a, s1);
      MatrixXd b = rect_operand(p, cfg.b, p.diag_b, s2);
      MatrixXd c;
      if (!is_random(cfg.a) && !is_random(cfg.b)) {
        MatrixXd u = haar_orthogonal(cfg.n, s3);
        MatrixXd v = haar_orthogonal(p.m, s4);
        c = a + u * b * v.transpose();
      } else {
        c = a + b;
      }
      return c * c.transpose();
    }
    case McModel::spike_add: {
      MatrixXd b = square_operand(p, cfg.a, p.diag_a, s1);
      VectorXd v = unit_vector(cfg.n, s2);
      return b + cfg.gamma * v * v.transpose();
    }
    case McModel::spike_mul: {
      MatrixXd b = square_operand(p, cfg.a, p.diag_a, s1);
      VectorXd v = unit_vector(cfg.n, s2);
      MatrixXd pm = MatrixXd::Identity(cfg.n, cfg.n) + (std::sqrt(1.0 + cfg.gamma) - 1.0) * v * v.transpose();
      return pm * b * pm;
    }
    case McModel::rk1rk1: break;
  }
  throw UsageError("realize: rk1rk1 has no matrix realization");
}

double quantile_sorted(const std::vector<double>& s, double p) {
  double pos = p * (s.size() - 1);
  size_t i = static_cast<size_t>(std::floor(pos));
  if (i + 1 >= s.size()) return s.back();
  double f = pos - i;
  return s[i] + f * (s[i + 1] - s[i]);
}

void fill_statistics(McReport& r, const std::vector<double>& tops, int bins) {
  r.samples = static_cast<long>(tops.size());
  // Neumaier summation keeps the mean independent of accumulation error growth.
  double sum = 0.0, comp = 0.0;
  for (double t : tops) {
    double s = sum + t;
    comp += std::abs(sum) >= std::abs(t) ? (sum - s) + t : (t - s) + sum;
    sum = s;
  }
  r.mean = (sum + comp) / tops.size();
  double ss = 0.0;
  for (double t : tops) ss += (t - r.mean) * (t - r.mean);
  r.stddev = tops.size() > 1 ? std::sqrt(ss / (tops.size() - 1)) : 0.0;
  r.stderr_mean = r.stddev / std::sqrt(static_cast<double>(tops.size()));
  auto sorted = tops;
  std::sort(sorted.begin(), sorted.end());
  r.quantiles.clear();
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) r.quantiles.push_back(quantile_sorted(sorted, p));
  double lo = sorted.front(), hi = sorted.back();
  if (hi <= lo) hi = lo + 1e-12;
  bins = std::max(1, bins);
  r.bin_edges.resize(bins + 1);
  r.bin_counts.assign(bins, 0);
  for (int i = 0; i <= bins; ++i) r.bin_edges[i] = lo + (hi - lo) * i / bins;
  for (double t : sorted) {
    int k = static_cast<int>((t - lo) / (hi - lo) * bins);
    r.bin_counts[std::clamp(k, 0, bins - 1)]++;
  }
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  // splitmix64 applied to the master seed offset by the counter.
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MatrixXd sample_goe(int n, double sigma, std::uint64_t seed) {
  if (n < 1) throw UsageError("sample_goe: n must be positive");
  std::mt19937_64 rng(seed);
  MatrixXd g = gaussian(n, n, rng);
  return (g + g.transpose()) * (sigma / std::sqrt(2.0 * n));
}

MatrixXd sample_wishart(int n, double q, std::uint64_t seed, double scale) {
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("sample_wishart");
  int m = static_cast<int>(std::lround(n / q));
  std::mt19937_64 rng(seed);
  MatrixXd x = gaussian(n, m, rng);
  return (x * x.transpose()) * (scale / m);
}

MatrixXd sample_ginibre(int n, int m, double sigma, std::uint64_t seed) {
  if (n < 1 || m < 1) throw UsageError("sample_ginibre: sizes must be positive");
  std::mt19937_64 rng(seed);
  return gaussian(n, m, rng) * (sigma / std::sqrt(static_cast<double>(m)));
}

MatrixXd haar_orthogonal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatrixXd g = gaussian(n, n, rng);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

std::vector<double> symmetric_eigenvalues(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NonConvergence("symmetric eigensolver");
  const VectorXd& v = es.eigenvalues();
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> sample_spectrum(const McConfig& cfg, std::uint64_t counter) {
  Prepared p = prepare(cfg);
  bool rect = false;
  auto ev = symmetric_eigenvalues(realize(p, counter, &rect));
  if (rect)
    for (auto& x : ev) x = std::sqrt(std::max(0.0, x));
  return ev;
}

std::vector<double> sample_tops(const McConfig& cfg) {
  if (cfg.model == McModel::rk1rk1) {
    if (cfg.samples < 1) throw UsageError("McConfig: samples must be positive");
    return rk1rk1_sample({cfg.w_a, cfg.w_b}, cfg.n, cfg.samples, cfg.seed);
  }
  Prepared p = prepare(cfg);
  std::vector<double> tops(cfg.samples);
  parallel_for(cfg.samples, [&](long i) {
    bool rect = false;
    auto ev = symmetric_eigenvalues(realize(p, static_cast<std::uint64_t>(i), &rect));
    tops[i] = rect ? std::sqrt(std::max(0.0, ev.back())) : ev.back();
  });
  return tops;
}

McReport sample_model_top(const McConfig& cfg) {
  McReport r;
  r.config = config_json(cfg);
  r.seed = cfg.seed;
  fill_statistics(r, sample_tops(cfg), cfg.bins);
  return r;
}

McReport empirical_rate(const McConfig& cfg, const std::vector<double>& x_grid) {
  McReport r;
  r.config = config_json(cfg);
  r.seed = cfg.seed;
  auto tops = sample_tops(cfg);
  fill_statistics(r, tops, cfg.bins);
  std::sort(tops.begin(), tops.end());
  bool any = false;
  double s = static_cast<double>(tops.size());
  for (double x : x_grid) {
    RatePoint pt;
    pt.x = x;
    pt.hits = static_cast<long>(tops.end() - std::lower_bound(tops.begin(), tops.end(), x));
    pt.flagged = pt.hits < 10;
    if (pt.hits > 0) {
      double p = pt.hits / s;
      pt.rate = -std::log(p) / cfg.n;
      pt.stderr_rate = std::sqrt(p * (1 - p) / s) / (p * cfg.n);
    } else {
      pt.rate = kInf;
      pt.stderr_rate = kInf;
    }
    any = any || !pt.flagged;
    r.rates.push_back(pt);
  }
  if (!any) throw InsufficientTail("empirical_rate: every requested x has fewer than 10 hits");
  return r;
}

McReport histogram_vs_density(const McConfig& cfg, const SpectralDensity& predicted) {
  if (cfg.model == McModel::rk1rk1) throw UsageError("histogram_vs_density: rk1rk1 has no bulk spectrum");
  McReport r;
  r.config = config_json(cfg);
  r.seed = cfg.seed;
  Prepared p = prepare(cfg);
  std::vector<std::vector<double>> spectra(cfg.samples);
  parallel_for(cfg.samples, [&](long i) {
    bool rect = false;
    auto ev = symmetric_eigenvalues(realize(p, static_cast<std::uint64_t>(i), &rect));
    if (rect)
      for (auto& x : ev) x = std::sqrt(std::max(0.0, x));
    spectra[i] = std::move(ev);
  });
  std::vector<double> pooled, tops;
  for (const auto& s : spectra) {
    pooled.insert(pooled.end(), s.begin(), s.end());
    tops.push_back(s.back());
  }
  fill_statistics(r, tops, cfg.bins);
  std::sort(pooled.begin(), pooled.end());
  double n = static_cast<double>(pooled.size());
  double sup = 0.0;
  for (size_t i = 0; i < pooled.size(); ++i) {
    double f = predicted.cdf(pooled[i]);
    sup = std::max({sup, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  r.sup_cdf = sup;
  return r;
}

namespace {
const char* kind_name(McOperand::Kind k) {
  switch (k) {
    case McOperand::Kind::fixed: return "fixed";
    case McOperand::Kind::goe: return "goe";
    case McOperand::Kind::wishart: return "wishart";
    case McOperand::Kind::gauss_rect: return "gauss_rect";
  }
  return "?";
}

const char* model_name(McModel m) {
  switch (m) {
    case McModel::single: return "single";
    case McModel::sum: return "sum";
    case McModel::product: return "product";
    case McModel::rect_sum: return "rect_sum";
    case McModel::spike_add: return "spike_add";
    case McModel::spike_mul: return "spike_mul";
    case McModel::rk1rk1: return "rk1rk1";
  }
  return "?";
}

nlohmann::ordered_json operand_json(const McOperand& o) {
  nlohmann::ordered_json j;
  j["kind"] = kind_name(o.kind);
  if (o.kind == McOperand::Kind::fixed) j["density"] = o.density.describe();
  j["sigma"] = o.sigma;
  j["q"] = o.q;
  return j;
}

nlohmann::ordered_json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}
}  // namespace

std::string config_json(const McConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = model_name(cfg.model);
  if (!cfg.label.empty()) j["label"] = cfg.label;
  j["n"] = cfg.n;
  j["samples"] = cfg.samples;
  j["seed"] = cfg.seed;
  switch (cfg.model) {
    case McModel::rk1rk1:
      j["w_a"] = cfg.w_a;
      j["w_b"] = cfg.w_b;
      break;
    case McModel::spike_add:
    case McModel::spike_mul:
      j["base"] = operand_json(cfg.a);
      j["gamma"] = cfg.gamma;
      break;
    case McModel::single: j["a"] = operand_json(cfg.a); break;
    default:
      j["a"] = operand_json(cfg.a);
      j["b"] = operand_json(cfg.b);
      if (cfg.model == McModel::rect_sum) j["q"] = cfg.q;
  }
  j["iid_diagonal"] = cfg.iid_diagonal;
  return j.dump();
}

std::string McReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(config.empty() ? "{}" : config);
  j["seed"] = seed;
  j["samples"] = samples;
  j["top"] = {{"mean", mean}, {"stddev", stddev}, {"stderr", stderr_mean}, {"quantiles", quantiles}};
  j["histogram"] = {{"edges", bin_edges}, {"counts", bin_counts}};
  auto rs = nlohmann::ordered_json::array();
  for (const auto& p : rates) {
    rs.push_back({{"x", p.x},
                  {"hits", p.hits},
                  {"rate", finite_or_null(p.rate)},
                  {"stderr", finite_or_null(p.stderr_rate)},
                  {"flagged", p.flagged}});
  }
  j["rates"] = rs;
  if (sup_cdf >= 0) j["sup_cdf"] = sup_cdf;
  if (wall_seconds >= 0) j["wall_seconds"] = wall_seconds;
  return j.dump(2);
}

}  // namespace ldrm
