#pragma once

// Experiment driver: JSON config in, CSV/JSON artifacts out.  The four
// commands (solve, convergence, spectrum, nearfield) are plain functions so
// they can be exercised directly from tests; the binary wrapper only parses
// argv and maps exceptions to exit codes.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bvp.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "medium.hpp"
#include "operators.hpp"
#include "quadrature.hpp"
#include "spectrum.hpp"

namespace arcscat::cli {

using nlohmann::json;

// Configuration problems (bad JSON, bad values) -> exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct GridSpec {
  double xmin = -4.0, xmax = 4.0, ymin = -4.0, ymax = 4.0;
  int nx = 0, ny = 0;  // zero points is allowed: empty CSV with header
  double mask_radius = 0.05;
};

struct ExperimentConfig {
  MediumParams medium;          // includes omega
  std::string arc_name = "flat_strip";
  std::optional<json> arc_custom;  // ellipse spec, see make_config_arc
  int bc_kind = 1;
  bool regularized = false;     // variant: "direct" | "regularized"
  std::vector<int> n_values;    // one entry for solve/spectrum/nearfield
  double gmres_tol = 1e-10;
  int gmres_max_it = 5000;
  double theta_inc = 0.0;
  int reference_n = 800;        // N_K for convergence runs
  std::string spectrum_operator = "auto";  // auto|V2wV1w|V4wV3w|identity
  GridSpec grid;
  json output_paths = json::object();
};

namespace detail {

template <typename T>
T field_or(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
}

inline const json& subobject(const json& j, const std::string& key, const json& fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_object()) throw ConfigError("field '" + key + "' must be an object");
  return j.at(key);
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  ExperimentConfig cfg;
  static const json empty = json::object();

  const json& med = detail::subobject(doc, "medium", empty);
  cfg.medium.lambda = detail::field_or(med, "lambda", cfg.medium.lambda);
  cfg.medium.mu = detail::field_or(med, "mu", cfg.medium.mu);
  cfg.medium.rho = detail::field_or(med, "rho", cfg.medium.rho);
  cfg.medium.kappa = detail::field_or(med, "kappa", cfg.medium.kappa);
  cfg.medium.gamma = detail::field_or(med, "gamma", cfg.medium.gamma);
  cfg.medium.eta = detail::field_or(med, "eta", cfg.medium.eta);
  cfg.medium.omega = detail::field_or(doc, "omega", cfg.medium.omega);
  try {
    cfg.medium.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (doc.contains("arc")) {
    const json& a = doc.at("arc");
    if (a.is_string())
      cfg.arc_name = a.get<std::string>();
    else if (a.is_object()) {
      cfg.arc_name = detail::field_or(a, "name", std::string("custom"));
      cfg.arc_custom = a;
    } else
      throw ConfigError("field 'arc' must be a string or an object");
  }

  cfg.bc_kind = detail::field_or(doc, "bc_kind", 1);
  if (cfg.bc_kind < 1 || cfg.bc_kind > 4) throw ConfigError("bc_kind must be 1..4");

  const std::string variant = detail::field_or(doc, "variant", std::string("direct"));
  if (variant == "direct")
    cfg.regularized = false;
  else if (variant == "regularized")
    cfg.regularized = true;
  else
    throw ConfigError("variant must be 'direct' or 'regularized'");

  if (doc.contains("N")) {
    const json& n = doc.at("N");
    if (n.is_number_integer())
      cfg.n_values = {n.get<int>()};
    else if (n.is_array()) {
      cfg.n_values = n.get<std::vector<int>>();
    } else
      throw ConfigError("field 'N' must be an integer or an array of integers");
  } else {
    cfg.n_values = {150};
  }
  if (cfg.n_values.empty()) throw ConfigError("field 'N' must not be empty");
  for (std::size_t i = 0; i < cfg.n_values.size(); ++i) {
    if (cfg.n_values[i] < 1) throw ConfigError("all N must be >= 1");
    if (i > 0 && cfg.n_values[i] <= cfg.n_values[i - 1])
      throw ConfigError("N list must be strictly ascending");
  }

  const json& gm = detail::subobject(doc, "gmres", empty);
  cfg.gmres_tol = detail::field_or(gm, "tol", cfg.gmres_tol);
  cfg.gmres_max_it = detail::field_or(gm, "max_it", cfg.gmres_max_it);
  if (!(cfg.gmres_tol > 0.0)) throw ConfigError("gmres.tol must be positive");
  if (cfg.gmres_max_it < 1) throw ConfigError("gmres.max_it must be >= 1");

  const json& inc = detail::subobject(doc, "incident", empty);
  cfg.theta_inc = detail::field_or(inc, "theta_inc", cfg.theta_inc);

  const json& ref = detail::subobject(doc, "reference", empty);
  cfg.reference_n = detail::field_or(ref, "N_K", cfg.reference_n);
  if (cfg.reference_n < 1) throw ConfigError("reference.N_K must be >= 1");

  cfg.spectrum_operator =
      detail::field_or(doc, "spectrum_operator", cfg.spectrum_operator);
  if (cfg.spectrum_operator != "auto" && cfg.spectrum_operator != "V2wV1w" &&
      cfg.spectrum_operator != "V4wV3w" && cfg.spectrum_operator != "identity")
    throw ConfigError("spectrum_operator must be auto|V2wV1w|V4wV3w|identity");

  const json& gr = detail::subobject(doc, "grid", empty);
  cfg.grid.xmin = detail::field_or(gr, "xmin", cfg.grid.xmin);
  cfg.grid.xmax = detail::field_or(gr, "xmax", cfg.grid.xmax);
  cfg.grid.ymin = detail::field_or(gr, "ymin", cfg.grid.ymin);
  cfg.grid.ymax = detail::field_or(gr, "ymax", cfg.grid.ymax);
  cfg.grid.nx = detail::field_or(gr, "nx", cfg.grid.nx);
  cfg.grid.ny = detail::field_or(gr, "ny", cfg.grid.ny);
  cfg.grid.mask_radius = detail::field_or(gr, "mask_radius", cfg.grid.mask_radius);
  if (cfg.grid.nx < 0 || cfg.grid.ny < 0) throw ConfigError("grid.nx/ny must be >= 0");
  if (cfg.grid.nx > 0 && !(cfg.grid.xmax > cfg.grid.xmin))
    throw ConfigError("grid.xmax must exceed grid.xmin");
  if (cfg.grid.ny > 0 && !(cfg.grid.ymax > cfg.grid.ymin))
    throw ConfigError("grid.ymax must exceed grid.ymin");

  cfg.output_paths = detail::subobject(doc, "outputs", empty);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    is >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline ArcParametrization make_config_arc(const ExperimentConfig& cfg) {
  if (!cfg.arc_custom) {
    try {
      return make_arc(cfg.arc_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  // custom arcs: elliptical section {"type":"ellipse","a":..,"b":..,
  // "angle0":..,"angle1":..}, parametrized over t in [-1,1]
  const json& a = *cfg.arc_custom;
  const std::string type = detail::field_or(a, "type", std::string(""));
  if (type == "ellipse") {
    const double ra = detail::field_or(a, "a", 1.0);
    const double rb = detail::field_or(a, "b", 1.0);
    const double p0 = detail::field_or(a, "angle0", 0.0);
    const double p1 = detail::field_or(a, "angle1", M_PI);
    if (!(ra > 0.0) || !(rb > 0.0)) throw ConfigError("ellipse semi-axes must be positive");
    if (!(p1 > p0)) throw ConfigError("ellipse angle1 must exceed angle0");
    const double mid = 0.5 * (p0 + p1), half = 0.5 * (p1 - p0);
    try {
      return make_custom_arc(
          [=](double t) -> Vec2 {
            const double p = mid + half * t;
            return {ra * std::cos(p), rb * std::sin(p)};
          },
          [=](double t) -> Vec2 {
            const double p = mid + half * t;
            return {-ra * half * std::sin(p), rb * half * std::cos(p)};
          },
          cfg.arc_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError("unsupported custom arc type '" + type + "'");
}

// ---------------------------------------------------------------------------
// Deterministic formatting helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::filesystem::path resolve_out(const ExperimentConfig& cfg,
                                         const std::string& key,
                                         const std::filesystem::path& out_dir,
                                         const std::string& fallback) {
  const std::string name = field_or(cfg.output_paths, key, fallback);
  std::filesystem::path p(name);
  if (p.is_absolute()) return p;
  return out_dir / p;
}

inline void require_writable(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

inline json cmd_solve(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  const ArcParametrization arc = make_config_arc(cfg);
  const ChebyshevGrid grid(cfg.n_values.front());
  const bvp::IncidentField inc(cfg.medium, cfg.theta_inc);

  bvp::SolveReport rep;
  rep.t_precompute = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  bvp::Density den;
  den.bc_kind = cfg.bc_kind;
  den.regularized = cfg.regularized;
  {
    const kernels::WaveCtx wc = kernels::make_wave_ctx(cfg.medium);
    const VectorXcd g = bvp::boundary_data(cfg.bc_kind, inc, arc, grid);
    operators::DiscreteOperator right, left;
    if (!cfg.regularized) {
      right = cfg.bc_kind == 1 ? operators::assemble_single_layer(wc, arc, grid)
                               : operators::assemble_regularized(wc, arc, grid, cfg.bc_kind);
    } else if (cfg.bc_kind <= 2) {
      right = operators::assemble_single_layer(wc, arc, grid);
      left = operators::assemble_regularized(wc, arc, grid, 2);
    } else {
      right = operators::assemble_regularized(wc, arc, grid, 3);
      left = operators::assemble_regularized(wc, arc, grid, 4);
    }
    rep.t_precompute =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // unlike solve_with_operators, honor the configured iteration cap
    std::function<VectorXcd(const VectorXcd&)> action;
    VectorXcd b = g;
    if (!cfg.regularized) {
      action = [&right](const VectorXcd& v) { return VectorXcd(right.m * v); };
    } else {
      action = [&left, &right](const VectorXcd& v) {
        return VectorXcd(left.m * (right.m * v));
      };
      if (cfg.bc_kind == 1 || cfg.bc_kind == 3) b = left.m * g;
    }
    den.values = bvp::gmres(action, b, cfg.gmres_tol, cfg.gmres_max_it, rep);
  }
  if (!rep.converged)
    throw std::runtime_error("GMRES did not reach tolerance " +
                             detail::num(cfg.gmres_tol) + " within " +
                             std::to_string(rep.n_iterations) + " iterations");

  json report = {
      {"schema", 1},
      {"command", "solve"},
      {"n_iterations", rep.n_iterations},
      {"t_precompute", rep.t_precompute},
      {"t_iterations", rep.t_iterations},
      {"converged", rep.converged},
      {"stagnated", rep.stagnated},
      {"residual_history", rep.residual_history},
  };
  const auto report_path = detail::resolve_out(cfg, "solve_json", out_dir, "solve.json");
  detail::require_writable(report_path);
  std::ofstream os(report_path);
  if (!os) throw std::runtime_error("cannot write " + report_path.string());
  os << report.dump(2) << "\n";

  if (cfg.output_paths.contains("density_csv")) {
    const auto csv_path =
        detail::resolve_out(cfg, "density_csv", out_dir, "density.csv");
    detail::require_writable(csv_path);
    std::ofstream cs(csv_path);
    if (!cs) throw std::runtime_error("cannot write " + csv_path.string());
    cs << "# t,re_psi1,im_psi1,re_psi2,im_psi2,re_psi3,im_psi3\n";
    const int n = grid.n;
    for (int j = 0; j < n; ++j) {
      cs << detail::num(grid.nodes[j]);
      for (int c = 0; c < 3; ++c)
        cs << "," << detail::num(den.values[c * n + j].real()) << ","
           << detail::num(den.values[c * n + j].imag());
      cs << "\n";
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

inline json cmd_convergence(const ExperimentConfig& cfg,
                            const std::filesystem::path& out_dir) {
  if (cfg.reference_n <= cfg.n_values.back())
    throw ConfigError("reference.N_K must exceed the largest N");
  const ArcParametrization arc = make_config_arc(cfg);
  const kernels::WaveCtx wc = kernels::make_wave_ctx(cfg.medium);
  const auto circle = bvp::sample_circle(4.0, 128);

  auto field_at = [&](int n) {
    const ChebyshevGrid grid(n);
    const bvp::IncidentField inc(cfg.medium, cfg.theta_inc);
    bvp::SolveReport rep;
    const bvp::Density den = bvp::solve_bvp(cfg.bc_kind, cfg.regularized, cfg.medium,
                                            arc, grid, inc, cfg.gmres_tol, rep);
    if (!rep.converged)
      throw std::runtime_error("GMRES did not converge at N=" + std::to_string(n));
    return bvp::near_field(wc, arc, grid, cfg.bc_kind, cfg.regularized, den.values,
                           circle);
  };

  const auto reference = field_at(cfg.reference_n);
  const auto csv_path =
      detail::resolve_out(cfg, "convergence_csv", out_dir, "convergence.csv");
  detail::require_writable(csv_path);
  std::ofstream cs(csv_path);
  if (!cs) throw std::runtime_error("cannot write " + csv_path.string());
  cs << "# N,eps_inf\n";
  json rows = json::array();
  for (int n : cfg.n_values) {
    const double err = bvp::near_field_error(field_at(n), reference);
    cs << n << "," << detail::num(err) << "\n";
    rows.push_back({{"N", n}, {"eps_inf", err}});
  }
  return json{{"schema", 1}, {"command", "convergence"}, {"rows", rows}};
}

// ---------------------------------------------------------------------------
// spectrum
// ---------------------------------------------------------------------------

inline json cmd_spectrum(const ExperimentConfig& cfg,
                         const std::filesystem::path& out_dir) {
  const int n = cfg.n_values.front();
  const ChebyshevGrid grid(n);
  std::string tag = cfg.spectrum_operator;
  if (tag == "auto") tag = cfg.bc_kind >= 3 ? "V4wV3w" : "V2wV1w";

  operators::DiscreteOperator op;
  if (tag == "identity") {
    op = operators::identity_operator(grid);
  } else {
    const ArcParametrization arc = make_config_arc(cfg);
    const kernels::WaveCtx wc = kernels::make_wave_ctx(cfg.medium);
    if (tag == "V2wV1w")
      op = operators::compose(operators::assemble_regularized(wc, arc, grid, 2),
                              operators::assemble_single_layer(wc, arc, grid));
    else
      op = operators::compose(operators::assemble_regularized(wc, arc, grid, 4),
                              operators::assemble_regularized(wc, arc, grid, 3));
  }
  const spectrum::EigenReport rep = spectrum::eigenvalues_of(op);

  const auto csv_path =
      detail::resolve_out(cfg, "eigenvalues_csv", out_dir, "eigenvalues.csv");
  detail::require_writable(csv_path);
  spectrum::write_eigenvalues_csv(csv_path.string(), rep, tag,
                                  static_cast<std::size_t>(n), cfg.medium.omega,
                                  cfg.medium.lambda, cfg.medium.mu);

  const auto ca = spectrum::cluster_a();
  const auto cb = spectrum::cluster_b(cfg.medium.lambda, cfg.medium.mu);
  json clusters = json::array();
  for (const auto& c : rep.clusters)
    clusters.push_back({{"re", c.center.real()},
                        {"im", c.center.imag()},
                        {"count", c.count}});
  json report = {
      {"schema", 1},
      {"command", "spectrum"},
      {"operator", tag},
      {"N", n},
      {"cluster_a", {{"re", ca.real()}, {"im", ca.imag()},
                     {"count", spectrum::detail::disc_count(rep.eigenvalues, ca,
                                                            rep.cluster_radius)}}},
      {"cluster_b", {{"re", cb.real()}, {"im", cb.imag()},
                     {"count", spectrum::detail::disc_count(rep.eigenvalues, cb,
                                                            rep.cluster_radius)}}},
      {"clusters", clusters},
      {"min_abs", rep.min_abs},
      {"cluster_radius", rep.cluster_radius},
  };
  const auto json_path =
      detail::resolve_out(cfg, "clusters_json", out_dir, "clusters.json");
  detail::require_writable(json_path);
  std::ofstream os(json_path);
  if (!os) throw std::runtime_error("cannot write " + json_path.string());
  os << report.dump(2) << "\n";
  return report;
}

// ---------------------------------------------------------------------------
// nearfield
// ---------------------------------------------------------------------------

inline json cmd_nearfield(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir) {
  const ArcParametrization arc = make_config_arc(cfg);
  const kernels::WaveCtx wc = kernels::make_wave_ctx(cfg.medium);
  const int n = cfg.n_values.front();
  const ChebyshevGrid grid(n);
  const bvp::IncidentField inc(cfg.medium, cfg.theta_inc);

  const auto csv_path = detail::resolve_out(cfg, "field_csv", out_dir, "field.csv");
  detail::require_writable(csv_path);
  std::ofstream cs(csv_path);
  if (!cs) throw std::runtime_error("cannot write " + csv_path.string());
  cs << "# x,y,re_u1,im_u1,re_u2,im_u2,re_p,im_p,masked\n";
  if (cfg.grid.nx == 0 || cfg.grid.ny == 0)
    return json{{"schema", 1}, {"command", "nearfield"}, {"points", 0}, {"masked", 0}};

  bvp::SolveReport rep;
  const bvp::Density den = bvp::solve_bvp(cfg.bc_kind, cfg.regularized, cfg.medium, arc,
                                          grid, inc, cfg.gmres_tol, rep);
  if (!rep.converged) throw std::runtime_error("GMRES did not converge");

  // distance-to-arc mask on a fine parameter sampling
  const int fine = 2048;
  std::vector<Vec2> arc_pts(fine + 1);
  for (int i = 0; i <= fine; ++i)
    arc_pts[i] = arc.position(-1.0 + 2.0 * i / fine);
  auto masked = [&](const Vec2& x) {
    for (const auto& p : arc_pts)
      if (std::hypot(x[0] - p[0], x[1] - p[1]) <= cfg.grid.mask_radius) return true;
    return false;
  };

  std::vector<Vec2> pts;
  std::vector<char> is_masked;
  for (int iy = 0; iy < cfg.grid.ny; ++iy)
    for (int ix = 0; ix < cfg.grid.nx; ++ix) {
      const double x = cfg.grid.nx == 1
                           ? cfg.grid.xmin
                           : cfg.grid.xmin + (cfg.grid.xmax - cfg.grid.xmin) * ix /
                                                 (cfg.grid.nx - 1);
      const double y = cfg.grid.ny == 1
                           ? cfg.grid.ymin
                           : cfg.grid.ymin + (cfg.grid.ymax - cfg.grid.ymin) * iy /
                                                 (cfg.grid.ny - 1);
      pts.push_back({x, y});
      is_masked.push_back(masked({x, y}) ? 1 : 0);
    }
  std::vector<Vec2> live;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!is_masked[i]) live.push_back(pts[i]);
  const auto values =
      bvp::near_field(wc, arc, grid, cfg.bc_kind, cfg.regularized, den.values, live);

  std::size_t iv = 0, n_masked = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cs << detail::num(pts[i][0]) << "," << detail::num(pts[i][1]);
    if (is_masked[i]) {
      cs << ",0,0,0,0,0,0,1\n";
      ++n_masked;
    } else {
      const auto& v = values[iv++];
      for (int c = 0; c < 3; ++c)
        cs << "," << detail::num(v[c].real()) << "," << detail::num(v[c].imag());
      cs << ",0\n";
    }
  }
  return json{{"schema", 1},
              {"command", "nearfield"},
              {"points", pts.size()},
              {"masked", n_masked}};
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

// exit codes: 0 ok, 1 numerical failure, 2 config error
inline int run_command(const std::string& command, const std::string& config_path,
                       const std::string& out_dir, std::ostream& err) {
  std::filesystem::path out(out_dir.empty() ? "." : out_dir);
  try {
    std::filesystem::create_directories(out);
    const ExperimentConfig cfg = load_config(config_path);
    if (command == "solve")
      cmd_solve(cfg, out);
    else if (command == "convergence")
      cmd_convergence(cfg, out);
    else if (command == "spectrum")
      cmd_spectrum(cfg, out);
    else if (command == "nearfield")
      cmd_nearfield(cfg, out);
    else
      throw ConfigError("unknown command: " + command);
    return 0;
  } catch (const ConfigError& e) {
    err << json{{"schema", 1}, {"error", e.what()}, {"kind", "config"}}.dump() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << json{{"schema", 1}, {"error", e.what()}, {"kind", "config"}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << json{{"schema", 1}, {"error", e.what()}, {"kind", "numerical"}}.dump() << "\n";
    return 1;
  }
}

}  // namespace arcscat::cli
