#include "ldrm/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ldrm/errors.hpp"
#include "ldrm/freenergy.hpp"
#include "ldrm/rankone.hpp"
#include "ldrm/ratefn.hpp"

namespace ldrm::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

double to_number(const std::string& s, const std::string& ctx) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("not a number in " + ctx + ": '" + s + "'");
  }
}

bool is_wall_token(const std::string& s) {
  if (s == "edge" || s == "inf") return true;
  try {
    size_t pos = 0;
    std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

size_t required_params(const std::string& kind) {
  if (kind == "sc" || kind == "mp" || kind == "qc" || kind == "dirac") return 1;
  if (kind == "gaussrect") return 2;
  throw UsageError("unknown ensemble kind '" + kind + "'");
}

std::string fmt(double v) {
  if (v == 0) v = 0.0;
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

nlohmann::ordered_json jnum(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot open output file " + out);
  f << text;
}

std::string render(const Table& t, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json o;
      for (size_t i = 0; i < t.header.size(); ++i) o[t.header[i]] = jnum(r[i]);
      arr.push_back(o);
    }
    os << arr.dump(2) << "\n";
    return os.str();
  }
  for (size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << fmt(r[i]);
    os << "\n";
  }
  return os.str();
}

SpectralDensity base_density(const Descriptor& d) {
  const auto& p = d.params;
  if (d.kind == "sc") return SpectralDensity::semicircle(p[0]);
  if (d.kind == "mp") return SpectralDensity::marchenko_pastur(p[0], p.size() > 1 ? p[1] : 1.0);
  if (d.kind == "qc") return SpectralDensity::quarter_circle(p[0]);
  if (d.kind == "gaussrect") return SpectralDensity::gauss_rect_lsvd(p[0], p[1]);
  if (d.kind == "dirac") return SpectralDensity::dirac(p[0]);
  return load_density_csv(d.path);
}

Table rate_table(const RateCurve& c, const std::vector<double>& xs) {
  Table t{{"x", "rate", "theta_star", "regime"}, {}};
  for (double x : xs) {
    double th = x < c.c_plus ? std::nan("") : c.theta_star(x);
    t.rows.push_back({x, c.eval(x), th, static_cast<double>(c.regime(x))});
  }
  return t;
}

ConvolutionModel build_conv(const std::string& op, const std::string& a, const std::string& b, double q) {
  if (op == "add") return add_conv(to_ensemble(parse_descriptor(a)), to_ensemble(parse_descriptor(b)));
  if (op == "mul") return mul_conv(to_ensemble(parse_descriptor(a)), to_ensemble(parse_descriptor(b)));
  if (op == "rect") return rect_conv(to_rect(parse_descriptor(a), q), to_rect(parse_descriptor(b), q), q);
  throw UsageError("unknown operation '" + op + "' (add, mul, rect)");
}

std::string rate_json(const RateCurve& c, const Table& t) {
  nlohmann::ordered_json j;
  j["c_plus"] = jnum(c.c_plus);
  j["typical"] = jnum(c.typical);
  j["x_c1"] = jnum(c.x_c1);
  j["x_c2"] = jnum(c.x_c2);
  j["hard_bound"] = jnum(c.hard_bound);
  j["K1"] = jnum(c.K1);
  j["K2"] = jnum(c.K2);
  j["points"] = nlohmann::ordered_json::parse(render(t, "json"));
  return j.dump(2) + "\n";
}

double support_lower(const ConvolutionModel& m) {
  switch (m.op()) {
    case ConvOp::add: return m.left().density.lower() + m.right().density.lower();
    case ConvOp::mul: return m.left().density.lower() * m.right().density.lower();
    case ConvOp::rect: return 0.0;
  }
  return 0.0;
}

McModel parse_model(std::string name, McConfig& cfg) {
  auto parts = split(name, ':');
  name = parts[0];
  if (name == "rk1rk1") {
    if (parts.size() >= 3) {
      cfg.w_a = to_number(parts[1], "--model");
      cfg.w_b = to_number(parts[2], "--model");
    }
    return McModel::rk1rk1;
  }
  if (parts.size() > 1) throw UsageError("only rk1rk1 takes inline model parameters");
  if (name == "single") return McModel::single;
  if (name == "sum") return McModel::sum;
  if (name == "prod") return McModel::product;
  if (name == "rect") return McModel::rect_sum;
  if (name == "spike-add") return McModel::spike_add;
  if (name == "spike-mul") return McModel::spike_mul;
  throw UsageError("unknown model '" + name + "'");
}

int exit_code_for(const std::exception& e, std::string& kind) {
  if (dynamic_cast<const UsageError*>(&e)) return kind = "UsageError", 2;
  if (dynamic_cast<const InvalidShapeRatio*>(&e)) return kind = "InvalidShapeRatio", 2;
  if (dynamic_cast<const NonConvergence*>(&e)) return kind = "NonConvergence", 3;
  if (dynamic_cast<const InsufficientTail*>(&e)) return kind = "InsufficientTail", 4;
  if (dynamic_cast<const OutOfSupport*>(&e)) return kind = "OutOfSupport", 1;
  if (dynamic_cast<const DomainExceeded*>(&e)) return kind = "DomainExceeded", 1;
  if (dynamic_cast<const DegenerateDensity*>(&e)) return kind = "DegenerateDensity", 1;
  if (dynamic_cast<const Error*>(&e)) return kind = "Error", 1;
  return kind = "Exception", 1;
}

}  // namespace

Descriptor parse_descriptor(const std::string& text) {
  auto parts = split(text, ':');
  if (parts.empty() || parts[0].empty()) throw UsageError("empty ensemble descriptor");
  Descriptor d;
  d.kind = parts[0];
  if (d.kind == "goe") d.kind = "sc";
  if (d.kind == "wishart") d.kind = "mp";
  if (d.kind == "ginibre") d.kind = "qc";
  std::vector<std::string> rest(parts.begin() + 1, parts.end());
  std::string wall_tok;
  if (d.kind == "tab") {
    if (rest.empty()) throw UsageError("tab descriptor needs a path");
    if (rest.size() > 1 && is_wall_token(rest.back())) {
      wall_tok = rest.back();
      rest.pop_back();
    }
    for (size_t i = 0; i < rest.size(); ++i) d.path += (i ? ":" : "") + rest[i];
    if (wall_tok.empty()) wall_tok = "edge";
  } else {
    size_t need = required_params(d.kind);
    size_t max_params = d.kind == "mp" ? 2 : need;
    if (rest.size() < need || rest.size() > max_params + 1)
      throw UsageError("descriptor '" + text + "' has the wrong number of fields");
    // A trailing field beyond the required ones is the wall, so mp:q:x sets a
    // wall; mp:q:scale:wall sets a scale.
    if (rest.size() > need) {
      wall_tok = rest.back();
      rest.pop_back();
      if (!is_wall_token(wall_tok)) throw UsageError("bad wall '" + wall_tok + "' in '" + text + "'");
    }
    for (const auto& r : rest) d.params.push_back(to_number(r, text));
    if (wall_tok.empty()) wall_tok = d.kind == "dirac" ? "edge" : "inf";
  }
  if (wall_tok == "edge") {
    d.wall_at_edge = true;
  } else if (wall_tok == "inf") {
    d.wall = kInf;
  } else {
    d.wall = to_number(wall_tok, text);
  }
  for (double p : d.params)
    if (!(p >= 0) || (d.kind != "dirac" && !(p > 0))) throw UsageError("descriptor '" + text + "' has a bad parameter");
  return d;
}

Ensemble to_ensemble(const Descriptor& d) {
  if (d.kind == "qc" || d.kind == "gaussrect") throw UsageError("'" + d.kind + "' is a rectangular kind");
  SpectralDensity rho = base_density(d);
  double edge = rho.upper();
  if (d.wall_at_edge || (d.kind != "dirac" && d.wall == edge)) return fixed_diagonal(rho);
  if (d.kind == "dirac") {
    if (!(d.wall > edge)) throw UsageError("dirac wall must be 'edge' or above the atom");
    if (std::isinf(d.wall)) throw UsageError("dirac wall must be finite");
    return rank_one(d.wall - edge, edge);
  }
  if (d.kind == "tab") throw UsageError("tabulated densities carry no potential: use wall 'edge'");
  if (d.wall < edge) throw UsageError("wall below the top edge");
  if (d.kind == "sc") return goe(d.params[0], d.wall);
  return wishart(d.params[0], d.wall, d.params.size() > 1 ? d.params[1] : 1.0);
}

RectEnsemble to_rect(const Descriptor& d, double q) {
  if (!(q > 0 && q <= 1)) throw InvalidShapeRatio("--q must lie in (0, 1]");
  if (d.kind == "sc" || d.kind == "mp") throw UsageError("'" + d.kind + "' is a square kind");
  SpectralDensity rho = base_density(d);
  double edge = rho.upper();
  if (d.kind == "qc" && q != 1.0) throw InvalidShapeRatio("qc describes q = 1; use gaussrect:sigma:q");
  if (d.kind == "gaussrect" && d.params[1] != q) throw InvalidShapeRatio("gaussrect shape ratio differs from --q");
  if (d.wall_at_edge || d.kind == "tab" || d.kind == "dirac") {
    RectEnsemble r = fixed_rect(rho, q);
    if (!d.wall_at_edge && d.kind == "dirac") {
      if (!(d.wall > edge) || std::isinf(d.wall)) throw UsageError("dirac wall must be 'edge' or a finite value above the atom");
      r.wall = d.wall;
    } else if (!d.wall_at_edge) {
      throw UsageError("tabulated densities carry no potential: use wall 'edge'");
    }
    return r;
  }
  if (d.wall < edge) throw UsageError("wall below the top edge");
  return gauss_rect(d.params[0], q, d.wall);
}

McOperand to_operand(const Descriptor& d) {
  McOperand o;
  o.density = base_density(d);
  if (d.wall_at_edge || d.kind == "dirac" || d.kind == "tab") return o;
  if (!std::isinf(d.wall)) throw UsageError("Monte Carlo operands take wall 'edge' (fixed) or 'inf' (random)");
  if (d.kind == "sc") {
    o.kind = McOperand::Kind::goe;
    o.sigma = d.params[0];
  } else if (d.kind == "mp") {
    o.kind = McOperand::Kind::wishart;
    o.q = d.params[0];
    o.sigma = d.params.size() > 1 ? d.params[1] : 1.0;
  } else {
    o.kind = McOperand::Kind::gauss_rect;
    o.sigma = d.params[0];
    o.q = d.kind == "qc" ? 1.0 : d.params[1];
  }
  return o;
}

std::vector<double> Grid::points() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? min : min + (max - min) * i / (count - 1);
  return v;
}

Grid parse_grid(const std::string& text) {
  auto p = split(text, ':');
  if (p.size() != 3) throw UsageError("grid must be min:max:count");
  Grid g{to_number(p[0], "--grid"), to_number(p[1], "--grid"), static_cast<int>(to_number(p[2], "--grid"))};
  if (g.count < 2) throw UsageError("grid count must be at least 2");
  if (!(g.max > g.min)) throw UsageError("grid max must exceed min");
  return g;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Large-deviation rate functions for the top eigenvalue of invariant random matrices"};
  app.require_subcommand(1);
  std::string out, format = "csv", a, b, grid, op = "add", base, model;
  double q = 1.0, gamma = 1.0, x = 0.0, wa = 2.0, wb = 1.0;
  int n = 0, steps = 2000;
  long samples = 1000;
  std::uint64_t seed = 1;
  std::string xs_text;
  bool hist = false, iid = false, timing = false;
  int bins = 40;

  auto common = [&](CLI::App* s) {
    s->add_option("--out,-o", out, "output path (default stdout)");
    s->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* s_sum = app.add_subcommand("rate-sum", "rate function of the top eigenvalue of A + OBO^T");
  auto* s_prod = app.add_subcommand("rate-prod", "rate function of the top eigenvalue of A^{1/2} OBO^T A^{1/2}");
  auto* s_rect = app.add_subcommand("rate-rect", "rate function of the top singular value of A + UBV^T");
  for (auto* s : {s_sum, s_prod, s_rect}) {
    s->add_option("--a", a, "descriptor kind:param[:param]:wall")->required();
    s->add_option("--b", b, "descriptor kind:param[:param]:wall")->required();
    s->add_option("--grid", grid, "min:max:count")->required();
    common(s);
  }
  s_rect->add_option("--q", q, "shape ratio N/M");

  auto* s_one = app.add_subcommand("one-matrix", "rate function of a single invariant matrix");
  s_one->add_option("--a", a)->required();
  s_one->add_option("--grid", grid)->required();
  s_one->add_option("--q", q, "shape ratio for rectangular kinds");
  common(s_one);

  auto* s_tilt = app.add_subcommand("tilt", "quenched minus annealed derivative I'_x(theta)");
  s_tilt->add_option("--a", a)->required();
  s_tilt->add_option("--b", b, "second operand (default dirac:0)");
  s_tilt->add_option("--op", op)->check(CLI::IsMember({"add", "mul", "rect"}));
  s_tilt->add_option("--q", q);
  s_tilt->add_option("--x", x)->required();
  s_tilt->add_option("--grid", grid, "theta grid min:max:count")->required();
  common(s_tilt);

  auto* s_pot = app.add_subcommand("potential", "effective potential of a convolution");
  s_pot->add_option("--a", a)->required();
  s_pot->add_option("--b", b)->required();
  s_pot->add_option("--op", op)->check(CLI::IsMember({"add", "mul"}));
  s_pot->add_option("--grid", grid)->required();
  common(s_pot);

  auto* s_inv = app.add_subcommand("inverse", "continued inverse of the Stieltjes transform");
  s_inv->add_option("--a", a)->required();
  s_inv->add_option("--grid", grid, "y grid")->required();
  common(s_inv);

  auto* s_den = app.add_subcommand("density", "spectral density of an ensemble or a convolution");
  s_den->add_option("--a", a)->required();
  s_den->add_option("--b", b);
  s_den->add_option("--op", op)->check(CLI::IsMember({"add", "mul", "rect"}));
  s_den->add_option("--q", q);
  s_den->add_option("--grid", grid)->required();
  common(s_den);

  auto* s_rk = app.add_subcommand("rank-one", "rate function of a spiked ensemble");
  s_rk->add_option("--base", base)->required();
  s_rk->add_option("--gamma", gamma)->required();
  s_rk->add_option("--op", op)->check(CLI::IsMember({"add", "mul"}));
  s_rk->add_option("--grid", grid)->required();
  common(s_rk);

  auto* s_rr = app.add_subcommand("rk1rk1", "rank-one plus rank-one: rate and exact finite-n rate");
  s_rr->add_option("--wa", wa);
  s_rr->add_option("--wb", wb);
  s_rr->add_option("--n", n, "size for the exact finite-n column");
  s_rr->add_option("--grid", grid)->required();
  common(s_rr);

  auto* s_cg = app.add_subcommand("coulomb", "Metropolis sample of the eigenvalue gas with a wall");
  s_cg->add_option("--a", a)->required();
  s_cg->add_option("--n", n)->required();
  s_cg->add_option("--steps", steps);
  s_cg->add_option("--seed", seed);
  common(s_cg);

  auto* s_mc = app.add_subcommand("mc", "finite-n Monte Carlo report (JSON)");
  s_mc->add_option("--model", model, "single, sum, prod, rect, spike-add, spike-mul, rk1rk1[:wa:wb]")->required();
  s_mc->add_option("--a", a);
  s_mc->add_option("--b", b);
  s_mc->add_option("--base", base);
  s_mc->add_option("--gamma", gamma);
  s_mc->add_option("--q", q);
  s_mc->add_option("--n", n)->required();
  s_mc->add_option("--samples", samples);
  s_mc->add_option("--seed", seed);
  s_mc->add_option("--x", xs_text, "comma-separated thresholds for empirical rates");
  s_mc->add_flag("--hist", hist, "compare the pooled spectrum with the predicted density");
  s_mc->add_flag("--iid", iid, "i.i.d. draws instead of classical positions for fixed operands");
  s_mc->add_option("--bins", bins);
  s_mc->add_flag("--timing", timing, "include wall-clock seconds (breaks byte-identical reruns)");
  s_mc->add_option("--out,-o", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error kind=UsageError message=\"" << e.what() << "\"\n";
    return 2;
  }

  try {
    if (s_sum->parsed() || s_prod->parsed() || s_rect->parsed()) {
      std::string o = s_sum->parsed() ? "add" : s_prod->parsed() ? "mul" : "rect";
      auto conv = build_conv(o, a, b, q);
      RateCurve c = rate_curve(conv);
      Table t = rate_table(c, parse_grid(grid).points());
      emit(format == "json" ? rate_json(c, t) : render(t, "csv"), out);
    } else if (s_one->parsed()) {
      Descriptor d = parse_descriptor(a);
      bool rect = d.kind == "qc" || d.kind == "gaussrect";
      if (rect && d.kind == "gaussrect") q = d.params[1];
      Table t{{"x", "rate"}, {}};
      if (rect) {
        RectEnsemble r = to_rect(d, q);
        for (double v : parse_grid(grid).points()) t.rows.push_back({v, phi_one_rect(r, v)});
      } else {
        Ensemble e = to_ensemble(d);
        for (double v : parse_grid(grid).points()) t.rows.push_back({v, psi_one_matrix(e, v)});
      }
      emit(render(t, format), out);
    } else if (s_tilt->parsed()) {
      std::string bb = b.empty() ? (op == "mul" ? "dirac:1" : "dirac:0") : b;
      auto conv = build_conv(op, a, bb, q);
      TiltModel tm = make_tilt(conv, x);
      Table t{{"theta", "tilt"}, {}};
      for (double th : parse_grid(grid).points()) t.rows.push_back({th, tilt_diff(tm, th)});
      emit(render(t, format), out);
    } else if (s_pot->parsed()) {
      auto conv = build_conv(op, a, b, 1.0);
      RateCurve c = rate_curve(conv);
      Table t{{"x", "potential"}, {}};
      double lo = support_lower(conv);
      for (double v : parse_grid(grid).points())
        t.rows.push_back({v, v < lo ? std::nan("") : effective_potential(c, conv, v)});
      emit(render(t, format), out);
    } else if (s_inv->parsed()) {
      Ensemble e = to_ensemble(parse_descriptor(a));
      double ga = stieltjes(e.density, e.density.upper());
      Table t{{"y", "inverse", "branch"}, {}};
      for (double y : parse_grid(grid).points()) t.rows.push_back({y, stieltjes_inverse(e, y), y <= ga ? 1.0 : 2.0});
      emit(render(t, format), out);
    } else if (s_den->parsed()) {
      auto xs = parse_grid(grid).points();
      Table t{{"x", "density"}, {}};
      if (b.empty()) {
        Descriptor d = parse_descriptor(a);
        SpectralDensity rho = base_density(d);
        for (double v : xs) t.rows.push_back({v, rho(v)});
      } else {
        auto conv = build_conv(op, a, b, q);
        auto ys = density_values(conv, xs);
        for (size_t i = 0; i < xs.size(); ++i) t.rows.push_back({xs[i], ys[i]});
      }
      emit(render(t, format), out);
    } else if (s_rk->parsed()) {
      SpikeModel m = make_spike(to_ensemble(parse_descriptor(base)), gamma, op == "mul" ? ConvOp::mul : ConvOp::add);
      RateCurve c = rankone_curve(m);
      Table t = rate_table(c, parse_grid(grid).points());
      emit(format == "json" ? rate_json(c, t) : render(t, "csv"), out);
    } else if (s_rr->parsed()) {
      Rk1PlusRk1 m{wa, wb};
      Table t{{"x", "rate"}, {}};
      if (n > 0) t.header.push_back("exact_rate");
      for (double v : parse_grid(grid).points()) {
        std::vector<double> row{v, rk1rk1_rate(m, v)};
        if (n > 0) row.push_back(-std::log(rk1rk1_tail(m, n, v)) / n);
        t.rows.push_back(row);
      }
      emit(render(t, format), out);
    } else if (s_cg->parsed()) {
      EigenConfiguration cfg = metropolis_wall_sample(to_ensemble(parse_descriptor(a)), n, steps, seed);
      Table t{{"index", "eigenvalue"}, {}};
      for (size_t i = 0; i < cfg.values.size(); ++i) t.rows.push_back({static_cast<double>(i), cfg.values[i]});
      emit(render(t, format), out);
    } else if (s_mc->parsed()) {
      auto t0 = std::chrono::steady_clock::now();
      McConfig cfg;
      cfg.model = parse_model(model, cfg);
      cfg.n = n;
      cfg.samples = samples;
      cfg.seed = seed;
      cfg.gamma = gamma;
      cfg.q = q;
      cfg.iid_diagonal = iid;
      cfg.bins = bins;
      bool spike = cfg.model == McModel::spike_add || cfg.model == McModel::spike_mul;
      if (spike) {
        if (base.empty()) throw UsageError("spike models need --base");
        cfg.a = to_operand(parse_descriptor(base));
      } else if (cfg.model != McModel::rk1rk1) {
        if (a.empty()) throw UsageError("--a is required for this model");
        cfg.a = to_operand(parse_descriptor(a));
        if (cfg.model != McModel::single) {
          if (b.empty()) throw UsageError("--b is required for this model");
          cfg.b = to_operand(parse_descriptor(b));
        }
      }
      McReport r;
      if (!xs_text.empty()) {
        std::vector<double> xs;
        for (const auto& s : split(xs_text, ',')) xs.push_back(to_number(s, "--x"));
        r = empirical_rate(cfg, xs);
      } else if (hist) {
        SpectralDensity pred = cfg.a.density;
        if (cfg.model == McModel::sum || cfg.model == McModel::product || cfg.model == McModel::rect_sum) {
          std::string o = cfg.model == McModel::sum ? "add" : cfg.model == McModel::product ? "mul" : "rect";
          auto conv = build_conv(o, a, b, q);
          double lo = support_lower(conv), hi = conv.c_plus();
          std::vector<double> xs(401);
          for (int i = 0; i <= 400; ++i) xs[i] = lo + (hi - lo) * i / 400.0;
          pred = density_on_support(conv, xs);
        } else if (spike) {
          pred = cfg.a.density;
        }
        r = histogram_vs_density(cfg, pred);
      } else {
        r = sample_model_top(cfg);
      }
      if (timing) r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      emit(r.to_json() + "\n", out);
    }
  } catch (const std::exception& e) {
    std::string kind;
    int code = exit_code_for(e, kind);
    std::cerr << "error kind=" << kind << " message=\"" << e.what() << "\"\n";
    return code;
  }
  return 0;
}

}  // namespace ldrm::cli
