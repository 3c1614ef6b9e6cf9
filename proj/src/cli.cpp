#include "tfairy/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "tfairy/cauchy.hpp"
#include "tfairy/ibvp.hpp"

namespace tfairy::cli {

namespace {

using json = nlohmann::ordered_json;

std::function<double(double)> preset_fn(const Preset& p) {
  if (p.type == "zero") return [](double) { return 0.0; };
  if (p.type == "gaussian") {
    const double c = p.center, w = p.width, a = p.amp;
    return [c, w, a](double x) {
      const double s = (x - c) / w;
      return a * std::exp(-0.5 * s * s);
    };
  }
  if (p.type == "bump") {
    const double lo = p.lo, hi = p.hi, a = p.amp;
    return [lo, hi, a](double x) {
      const double s = (2.0 * x - (lo + hi)) / (hi - lo);
      if (!(std::fabs(s) < 1.0)) return 0.0;
      return a * std::exp(1.0 - 1.0 / (1.0 - s * s));
    };
  }
  throw std::invalid_argument("preset_fn: unsupported type " + p.type);
}

Preset parse_preset(const json& j, std::vector<std::string>& errors,
                    const std::string& where) {
  Preset p;
  if (!j.is_object() || !j.contains("type")) {
    errors.push_back(where + ": preset must be an object with a 'type'");
    return p;
  }
  p.type = j["type"].get<std::string>();
  auto need = [&](const char* key, double& out) {
    if (!j.contains(key))
      errors.push_back(where + ": preset '" + p.type + "' needs '" + key + "'");
    else
      out = j[key].get<double>();
  };
  if (p.type == "gaussian") {
    need("center", p.center);
    need("width", p.width);
    need("amp", p.amp);
    if (p.width <= 0.0) errors.push_back(where + ": gaussian width must be > 0");
  } else if (p.type == "bump") {
    if (!j.contains("support") || !j["support"].is_array() ||
        j["support"].size() != 2) {
      errors.push_back(where + ": bump needs 'support': [lo, hi]");
    } else {
      p.lo = j["support"][0].get<double>();
      p.hi = j["support"][1].get<double>();
      if (!(p.lo < p.hi)) errors.push_back(where + ": bump support lo < hi");
    }
    need("amp", p.amp);
  } else if (p.type == "constant") {
    need("value", p.value);
  } else if (p.type != "zero" && p.type != "hold_u0") {
    errors.push_back(where + ": unknown preset type '" + p.type + "'");
  }
  return p;
}

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json preset_to_json(const Preset& p) {
  json j;
  j["type"] = p.type;
  if (p.type == "gaussian") {
    j["center"] = p.center;
    j["width"] = p.width;
    j["amp"] = p.amp;
  } else if (p.type == "bump") {
    j["support"] = {p.lo, p.hi};
    j["amp"] = p.amp;
  } else if (p.type == "constant") {
    j["value"] = p.value;
  }
  return j;
}

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["alpha"] = c.alpha;
  json g;
  g["k"] = c.k;
  g["m"] = c.m;
  g["a"] = c.a;
  g["B"] = c.B;
  if (c.lengths) g["lengths"] = *c.lengths;
  j["graph"] = g;
  json gr;
  gr["t_end"] = c.t_end;
  gr["n_steps"] = c.n_steps;
  gr["n_x"] = c.n_x;
  if (c.trunc_radius > 0.0) gr["truncation_radius"] = c.trunc_radius;
  gr["space_refine"] = c.space_refine;
  j["grids"] = gr;
  json d;
  d["u0"] = json::array();
  for (const auto& p : c.u0) d["u0"].push_back(preset_to_json(p));
  d["f"] = json::array();
  for (const auto& p : c.f) d["f"].push_back(preset_to_json(p));
  if (!c.varphi.empty()) {
    d["varphi"] = json::array();
    for (const auto& p : c.varphi) d["varphi"].push_back(preset_to_json(p));
  }
  if (!c.phi.empty()) {
    d["phi"] = json::array();
    for (const auto& p : c.phi) d["phi"].push_back(preset_to_json(p));
  }
  j["data"] = d;
  json o;
  o["field_csv"] = c.field_csv;
  o["summary"] = c.summary;
  j["output"] = o;
  json tol;
  tol["energy_slack"] = c.energy_slack;
  j["tolerances"] = tol;
  return j;
}

}  // namespace

ParseResult validate_config(const std::string& text) {
  ParseResult out;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    out.errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return out;
  }
  ScenarioConfig c;
  auto& errors = out.errors;

  if (!j.contains("problem"))
    errors.push_back("missing field 'problem' (\"cauchy\" or \"ibvp\")");
  else {
    c.problem = j["problem"].get<std::string>();
    if (c.problem != "cauchy" && c.problem != "ibvp")
      errors.push_back("problem must be \"cauchy\" or \"ibvp\"");
  }
  if (!j.contains("alpha"))
    errors.push_back("missing field 'alpha'");
  else {
    c.alpha = j["alpha"].get<double>();
    if (!(c.alpha > 0.0 && c.alpha < 1.0))
      errors.push_back("alpha out of range: (0,1) required");
  }
  if (!j.contains("graph")) {
    errors.push_back("missing block 'graph'");
  } else {
    const auto& g = j["graph"];
    c.k = g.value("k", 0);
    c.m = g.value("m", 0);
    if (c.k < 1 || c.m < 1) errors.push_back("graph.k and graph.m must be >= 1");
    if (!g.contains("a") || !g["a"].is_array())
      errors.push_back("graph.a must be an array of k+m coefficients");
    else {
      c.a = g["a"].get<std::vector<double>>();
      if (static_cast<int>(c.a.size()) != c.k + c.m)
        errors.push_back("graph.a must have k+m entries");
      else {
        if (c.a[0] != 1.0) errors.push_back("graph.a[0] must equal 1 (a_1 = 1)");
        for (double v : c.a)
          if (v == 0.0) errors.push_back("a_j != 0 violated");
      }
    }
    if (!g.contains("B") || !g["B"].is_array())
      errors.push_back("graph.B must be an m x k matrix (array of rows)");
    else {
      c.B.clear();
      for (const auto& row : g["B"])
        c.B.push_back(row.get<std::vector<double>>());
      if (static_cast<int>(c.B.size()) != c.m)
        errors.push_back("graph.B must have m rows (m x k required)");
      else
        for (const auto& row : c.B)
          if (static_cast<int>(row.size()) != c.k)
            errors.push_back("graph.B row width mismatch (m x k required)");
    }
    if (g.contains("lengths")) {
      c.lengths = g["lengths"].get<std::vector<double>>();
      if (static_cast<int>(c.lengths->size()) != c.k + c.m)
        errors.push_back("graph.lengths must have k+m entries");
    }
  }
  if (j.contains("grids")) {
    const auto& g = j["grids"];
    c.t_end = g.value("t_end", 1.0);
    c.n_steps = g.value("n_steps", 256);
    c.n_x = g.value("n_x", 128);
    c.trunc_radius = g.value("truncation_radius", 0.0);
    c.space_refine = g.value("space_refine", 1);
    if (!(c.t_end > 0.0)) errors.push_back("grids.t_end must be > 0");
    if (c.n_steps < 8) errors.push_back("grids.n_steps must be >= 8");
    if (c.n_x < 16) errors.push_back("grids.n_x must be >= 16");
  }
  const int nb = c.k + c.m;
  auto parse_preset_list = [&](const char* key, std::vector<Preset>& dst,
                               int count, bool required) {
    if (!j.contains("data") || !j["data"].contains(key)) {
      if (required) errors.push_back(std::string("missing data.") + key);
      dst.assign(count, Preset{});
      return;
    }
    const auto& arr = j["data"][key];
    if (!arr.is_array() || static_cast<int>(arr.size()) != count) {
      errors.push_back(std::string("data.") + key + " must list " +
                       std::to_string(count) + " presets (one per bond)");
      dst.assign(count, Preset{});
      return;
    }
    dst.clear();
    for (int i = 0; i < count; ++i)
      dst.push_back(parse_preset(arr[i], errors,
                                 std::string("data.") + key + "[" +
                                     std::to_string(i) + "]"));
  };
  parse_preset_list("u0", c.u0, nb, true);
  parse_preset_list("f", c.f, nb, false);
  const bool ibvp = c.problem == "ibvp";
  if (ibvp) {
    parse_preset_list("varphi", c.varphi, nb, true);
    parse_preset_list("phi", c.phi, c.k, true);
    if (!c.lengths) errors.push_back("ibvp requires graph.lengths");
  } else if (c.lengths) {
    errors.push_back("cauchy geometry must not carry graph.lengths");
  }
  if (c.lengths && static_cast<int>(c.lengths->size()) == nb) {
    for (int i = 0; i < nb; ++i) {
      const double L = (*c.lengths)[i];
      if (i < c.k ? !(L < 0.0) : !(L > 0.0))
        errors.push_back("lengths: incoming bonds negative, outgoing positive");
    }
  }
  for (const auto& p : c.u0)
    if (p.type == "constant" || p.type == "hold_u0")
      errors.push_back("u0 presets must be zero/gaussian/bump");
  if (j.contains("output")) {
    c.field_csv = j["output"].value("field_csv", c.field_csv);
    c.summary = j["output"].value("summary", c.summary);
  }
  if (j.contains("tolerances"))
    c.energy_slack = j["tolerances"].value("energy_slack", c.energy_slack);

  if (errors.empty()) out.config = c;
  return out;
}

graph::StarGraph make_graph(const ScenarioConfig& cfg) {
  graph::StarGraph g;
  g.k = cfg.k;
  g.m = cfg.m;
  g.a = Eigen::Map<const Eigen::VectorXd>(cfg.a.data(), cfg.a.size());
  g.B.resize(cfg.m, cfg.k);
  for (int i = 0; i < cfg.m; ++i)
    for (int q = 0; q < cfg.k; ++q) g.B(i, q) = cfg.B[i][q];
  if (cfg.lengths)
    g.lengths =
        Eigen::Map<const Eigen::VectorXd>(cfg.lengths->data(), cfg.lengths->size());
  g.check();
  return g;
}

graph::ProblemData make_data(const ScenarioConfig& cfg,
                             const fraccalc::TimeGrid& tgrid) {
  const auto g = make_graph(cfg);
  graph::ProblemData data;
  data.alpha = cfg.alpha;
  data.f_is_zero = true;
  for (int j = 0; j < g.n_bonds(); ++j) {
    data.u0.push_back(preset_fn(cfg.u0[j]));
    const Preset& fp = j < static_cast<int>(cfg.f.size()) ? cfg.f[j] : Preset{};
    if (fp.type != "zero") data.f_is_zero = false;
    auto fx = preset_fn(fp);
    data.f.push_back([fx](double x, double) { return fx(x); });
  }
  if (cfg.problem == "ibvp") {
    fraccalc::TraceGrid varphi(tgrid, g.n_bonds());
    fraccalc::TraceGrid phi(tgrid, g.k);
    for (int j = 0; j < g.n_bonds(); ++j) {
      const Preset& p = cfg.varphi[j];
      double val = 0.0;
      if (p.type == "constant") val = p.value;
      if (p.type == "hold_u0") val = data.u0[j](g.length(j));
      for (int i = 0; i < tgrid.n_nodes(); ++i) varphi.at(i, j) = val;
    }
    const double h = 1e-5;
    for (int j = 0; j < g.k; ++j) {
      const Preset& p = cfg.phi[j];
      double val = 0.0;
      if (p.type == "constant") val = p.value;
      if (p.type == "hold_u0") {
        const double L = g.length(j);
        val = (data.u0[j](L + h) - data.u0[j](L - h)) / (2.0 * h);
      }
      for (int i = 0; i < tgrid.n_nodes(); ++i) phi.at(i, j) = val;
    }
    data.varphi = std::move(varphi);
    data.phi = std::move(phi);
  }
  return data;
}

namespace {

void write_field_csv(const std::string& path, const verify::SolutionField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << "bond_id,x,t,u\n";
  for (int j = 0; j < f.g.n_bonds(); ++j)
    for (int i = 0; i < f.x[j].size(); ++i)
      for (int n = 0; n < f.tgrid.n_nodes(); ++n)
        os << (j + 1) << ',' << format17(f.x[j](i)) << ','
           << format17(f.tgrid.node(n)) << ',' << format17(f.u[j](i, n))
           << '\n';
}

}  // namespace

int run(const ScenarioConfig& cfg, const RunOptions& opts) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  const bool is_ibvp = cfg.problem == "ibvp";
  try {
    const auto g = make_graph(cfg);
    const fraccalc::TimeGrid tgrid(cfg.t_end, cfg.n_steps);
    const auto data = make_data(cfg, tgrid);
    const auto kind = is_ibvp ? graph::ProblemKind::Ibvp : graph::ProblemKind::Cauchy;
    const auto rep = graph::validate(g, data, kind, cfg.trunc_radius);
    if (!rep.hard_ok()) {
      for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
      return 1;
    }
    if (!rep.hypothesis_ok) {
      std::cerr << "hypothesis violated: B^T B - I_k must be "
                << (is_ibvp ? "negative" : "positive")
                << " definite for this problem\n";
      return 2;
    }
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";

    verify::FieldGridSpec spec;
    spec.t_end = cfg.t_end;
    spec.n_steps = cfg.n_steps;
    spec.n_x = cfg.n_x;
    spec.trunc_radius = cfg.trunc_radius;
    spec.space_refine = cfg.space_refine;

    const verify::SolutionField field = is_ibvp
                                            ? ibvp::solve_field(g, data, spec)
                                            : cauchy::solve_field(g, data, spec);

    // Residuals both over the whole run (3-node startup exclusion only) and
    // over the settled window t >= T/8 (the solution of a fractional problem
    // starts like t^alpha, where fixed-step schemes cannot be sharp).
    const double settle = cfg.t_end / 8.0;
    const double pde = verify::pde_residual(field, data.f);
    const double pde_settled = verify::pde_residual(field, data.f, settle);
    const auto vres = verify::vertex_residuals(field);
    const auto vres_settled = verify::vertex_residuals(field, settle);
    verify::BoundaryResiduals bres, bres_settled;
    if (is_ibvp) {
      bres = verify::boundary_residuals(field, *data.varphi, *data.phi);
      bres_settled =
          verify::boundary_residuals(field, *data.varphi, *data.phi, settle);
    }
    const double margin = verify::energy_check(field, data);

    const Eigen::MatrixXd M = cauchy::assemble_M(g);
    const double detM = M.fullPivLu().determinant();
    double detQ = 0.0;
    if (is_ibvp) detQ = ibvp::assemble_Q(g).fullPivLu().determinant();

    json s;
    s["artifact"] = kArtifactVersion;
    s["config"] = config_to_json(cfg);
    json res;
    res["residual_windows"] = {{"startup_exclusion_nodes", 3},
                               {"settled_from_t", settle}};
    res["pde_residual_max"] = pde;
    res["pde_residual_settled"] = pde_settled;
    res["vertex_residuals"] = {{"continuity", vres.continuity},
                               {"derivative", vres.derivative},
                               {"flux", vres.flux}};
    res["vertex_residuals_settled"] = {{"continuity", vres_settled.continuity},
                                       {"derivative", vres_settled.derivative},
                                       {"flux", vres_settled.flux}};
    if (is_ibvp) {
      res["boundary_residuals"] = {{"dirichlet", bres.dirichlet},
                                   {"neumann", bres.neumann}};
      res["boundary_residuals_settled"] = {
          {"dirichlet", bres_settled.dirichlet},
          {"neumann", bres_settled.neumann}};
    }
    res["energy_margin"] = margin;
    res["det_M"] = detM;
    if (is_ibvp) res["det_Q"] = detQ;
    res["truncation_radius"] = field.trunc_radius;
    s["results"] = res;

    // Convergence study on request.
    if (opts.levels >= 3) {
      auto runner = [&](int level) {
        verify::FieldGridSpec ls = spec;
        ls.n_steps = std::max(16, spec.n_steps >> (opts.levels - 1 - level));
        ls.n_x = std::max(32, spec.n_x >> (opts.levels - 1 - level));
        const auto lf = is_ibvp ? ibvp::solve_field(g, data, ls)
                                : cauchy::solve_field(g, data, ls);
        verify::ConvergenceRow row;
        row.dt = ls.t_end / ls.n_steps;
        row.dx = lf.x[0](1) - lf.x[0](0);
        row.residual =
            std::max(verify::pde_residual(lf, data.f, ls.t_end / 4.0),
                     verify::vertex_residuals(lf, ls.t_end / 8.0).max());
        return row;
      };
      const auto table = verify::convergence_study(runner, opts.levels);
      json rows = json::array();
      for (const auto& r : table.rows)
        rows.push_back({{"dt", r.dt}, {"dx", r.dx}, {"residual", r.residual}});
      s["convergence"] = {{"rows", rows},
                          {"fitted_order", table.fitted_order},
                          {"monotone", table.monotone}};
    }

    fs::create_directories(opts.out_dir);
    write_field_csv((fs::path(opts.out_dir) / cfg.field_csv).string(), field);
    {
      std::ofstream os(fs::path(opts.out_dir) / cfg.summary, std::ios::binary);
      os << s.dump(2) << "\n";
    }
    const auto t1 = std::chrono::steady_clock::now();
    std::cerr << "run completed in "
              << std::chrono::duration<double>(t1 - t0).count() << " s\n";
    return 0;
  } catch (const hypothesis_error& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return 2;
  } catch (const singular_system_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const convergence_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const precision_error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_file(const std::string& config_path, const RunOptions& opts) {
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  const auto parsed = validate_config(ss.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
    return 1;
  }
  return run(*parsed.config, opts);
}

int validate_file(const std::string& config_path) {
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return 1;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  const auto parsed = validate_config(ss.str());
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) std::cerr << "config error: " << e << "\n";
    return 1;
  }
  std::cout << "config ok\n";
  return 0;
}

double det_sweep(unsigned seed, int count, bool cauchy_valid,
                 std::string* report) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dk(1, 4);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  std::ostringstream os;
  for (int it = 0; it < count; ++it) {
    graph::StarGraph g;
    // Cauchy validity (B^T B - I_k positive definite) forces m >= k.
    g.k = dk(rng);
    g.m = dk(rng);
    if (cauchy_valid && g.m < g.k) std::swap(g.k, g.m);
    g.a.resize(g.k + g.m);
    g.a(0) = 1.0;
    for (int j = 1; j < g.k + g.m; ++j) {
      double v = mag(rng);
      if (unit(rng) < 0.0) v = -v;
      g.a(j) = v;
    }
    // Random B with singular values pushed above (below) 1.
    Eigen::MatrixXd raw(g.m, g.k);
    for (int i = 0; i < g.m; ++i)
      for (int q = 0; q < g.k; ++q) raw(i, q) = unit(rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        raw, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd sv(svd.singularValues().size());
    for (int i = 0; i < sv.size(); ++i)
      sv(i) = cauchy_valid ? 1.1 + mag(rng) : 0.1 + 0.4 * mag(rng) / 2.0;
    const Eigen::MatrixXd B =
        svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
    g.B = B;
    g.check();

    Eigen::MatrixXd M = cauchy::assemble_M(g);
    // Row equilibration before the determinant.
    for (int r = 0; r < M.rows(); ++r) {
      const double s = M.row(r).cwiseAbs().maxCoeff();
      if (s > 0.0) M.row(r) /= s;
    }
    const double d = std::fabs(M.fullPivLu().determinant());
    worst = std::min(worst, d);
    os << "k=" << g.k << " m=" << g.m << " |det~M|=" << d << "\n";
  }
  if (report) *report = os.str();
  return worst;
}

}  // namespace tfairy::cli
