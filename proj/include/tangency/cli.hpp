#pragma once
/**
 * @file cli.hpp
 * @brief Run configuration, deterministic CSV/JSON output and the four
 * subcommands (portrait, sweep, verify, predict) behind tools/tangency.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "tangency/asymptotics.hpp"
#include "tangency/bifurcation.hpp"
#include "tangency/errors.hpp"
#include "tangency/map_core.hpp"
#include "tangency/orbit.hpp"
#include "tangency/portrait.hpp"

namespace tangency {

/// Malformed or out-of-range configuration; the CLI exits with code 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitBadConfig = 2, kExitSolverFailed = 3 };

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct RunConfig {
  ModelParams params;
  std::optional<int> k_min;
  std::optional<int> k_max;
  std::optional<int> direction;
  std::optional<ParamVec> v;
  double tol_newton = 1e-12;
  double tol_bisect = 1e-8;
  std::string out_dir = "out";
  int jobs = 1;
  bool allow_large_k = false;
  bool plot_script = true;

  static constexpr int kDefaultCap = 30;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["constants"] = {{"alpha", params.alpha}, {"a10", params.a10}, {"c20", params.c20}, {"d50", params.d50}};
    j["mu"] = params.mu;
    if (k_min) j["k_min"] = *k_min;
    if (k_max) j["k_max"] = *k_max;
    if (direction) j["direction"] = *direction;
    if (v) j["v"] = *v;
    j["tol_newton"] = tol_newton;
    j["tol_bisect"] = tol_bisect;
    j["allow_large_k"] = allow_large_k;
    j["plot_script"] = plot_script;
    return j;
  }

  /// to_json() plus the settings that do not affect results (output directory, thread count).
  nlohmann::json to_json_full() const {
    nlohmann::json j = to_json();
    j["out"] = out_dir;
    j["jobs"] = jobs;
    return j;
  }

  static RunConfig from_json(const nlohmann::json& j) {
    static const std::vector<std::string> known{"constants", "mu", "k_min", "k_max", "direction", "v",
                                                "tol_newton", "tol_bisect", "out", "jobs", "allow_large_k",
                                                "plot_script"};
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (std::find(known.begin(), known.end(), key) == known.end()) throw ConfigError("unknown config key: " + key);
    RunConfig c;
    try {
      if (j.contains("constants")) {
        const auto& k = j.at("constants");
        for (const auto& [key, _] : k.items())
          if (key != "alpha" && key != "a10" && key != "c20" && key != "d50")
            throw ConfigError("unknown constant: " + key);
        c.params.alpha = k.value("alpha", c.params.alpha);
        c.params.a10 = k.value("a10", c.params.a10);
        c.params.c20 = k.value("c20", c.params.c20);
        c.params.d50 = k.value("d50", c.params.d50);
      }
      if (j.contains("mu")) c.params.mu = j.at("mu").get<ParamVec>();
      if (j.contains("k_min")) c.k_min = j.at("k_min").get<int>();
      if (j.contains("k_max")) c.k_max = j.at("k_max").get<int>();
      if (j.contains("direction")) c.direction = j.at("direction").get<int>();
      if (j.contains("v")) c.v = j.at("v").get<ParamVec>();
      c.tol_newton = j.value("tol_newton", c.tol_newton);
      c.tol_bisect = j.value("tol_bisect", c.tol_bisect);
      c.out_dir = j.value("out", c.out_dir);
      c.jobs = j.value("jobs", c.jobs);
      c.allow_large_k = j.value("allow_large_k", c.allow_large_k);
      c.plot_script = j.value("plot_script", c.plot_script);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    }
    return c;
  }

  void validate() const {
    try {
      params.validate();
    } catch (const InvalidParams& e) {
      throw ConfigError(e.what());
    }
    const int cap = allow_large_k ? 1000 : kDefaultCap;
    if (k_max && (*k_max < 0 || *k_max > cap))
      throw ConfigError("k_max = " + std::to_string(*k_max) + " exceeds the cap of " + std::to_string(cap) +
                        (allow_large_k ? "" : " (pass the large-k override to go further)"));
    if (k_min && *k_min < 1) throw ConfigError("k_min must be at least 1");
    if (direction && v) throw ConfigError("give either direction or v, not both");
    if (direction && (*direction < 1 || *direction > 4)) throw ConfigError("direction must be 1, 2, 3 or 4");
    if (v && std::all_of(v->begin(), v->end(), [](double x) { return x == 0.0; }))
      throw ConfigError("v must be nonzero");
    if (!(tol_newton > 0.0) || !(tol_bisect > 0.0)) throw ConfigError("tolerances must be positive");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
  }

  int k_cap() const { return allow_large_k ? 1000 : kDefaultCap; }

  ScanOptions scan_options() const {
    ScanOptions o;
    o.orbit.tol_newton = tol_newton;
    o.orbit.k_cap = k_cap();
    o.tol_bisect = tol_bisect;
    return o;
  }

  OrbitOptions orbit_options() const {
    OrbitOptions o;
    o.tol_newton = tol_newton;
    o.k_cap = k_cap();
    return o;
  }

  DirectionRay ray() const {
    if (v) return make_ray(*v, params);
    return coordinate_ray(direction.value_or(1), params);
  }
};

/// Parses a config file (JSON) and applies flag overrides, which win.
inline RunConfig load_config(const std::optional<std::string>& path, const nlohmann::json& overrides) {
  nlohmann::json j = nlohmann::json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot open config file " + *path);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  }
  if (overrides.contains("direction")) j.erase("v");
  if (overrides.contains("v")) j.erase("direction");
  if (overrides.contains("constants") && j.contains("constants")) {
    for (const auto& [key, val] : overrides.at("constants").items()) j["constants"][key] = val;
    nlohmann::json rest = overrides;
    rest.erase("constants");
    j.update(rest);
  } else {
    j.update(overrides);
  }
  RunConfig c = RunConfig::from_json(j);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Output

/// CSV with '#' header lines echoing the effective config, a fixed schema and 17-digit floats.
class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void add_note(std::string note) { notes_.push_back(std::move(note)); }
  std::size_t size() const { return rows_.size(); }

  void write(std::ostream& out, const RunConfig& cfg) const {
    out << "# config: " << cfg.to_json().dump() << '\n';
    for (const auto& n : notes_) out << "# " << n << '\n';
    write_row(out, columns_);
    for (const auto& r : rows_) write_row(out, r);
  }

  void write_file(const std::filesystem::path& path, const RunConfig& cfg) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    write(out, cfg);
  }

private:
  static void write_row(std::ostream& out, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::string> notes_;
};

inline std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

inline const char* kPortraitPlot = R"PY(#!/usr/bin/env python3
import csv, sys
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "portrait.csv"
groups = {}
with open(path) as fh:
    rows = csv.DictReader(line for line in fh if not line.startswith("#"))
    for r in rows:
        groups.setdefault(r["entity"], []).append((float(r["x"]), float(r["y"])))

fig, ax = plt.subplots(figsize=(6, 6))
cmap = plt.get_cmap("viridis")
orbit_keys = sorted((e for e in groups if e.startswith("orbit_")), key=lambda e: int(e.split("_")[1]))
for e, pts in groups.items():
    xs, ys = zip(*pts)
    if e == "unstable_plus":
        ax.plot(xs, ys, color="tab:red", lw=0.8, label="unstable manifold")
    elif e == "stable_local":
        ax.plot(xs, ys, color="tab:blue", lw=0.8, label="stable manifold")
    elif e == "homoclinic":
        ax.plot(xs, ys, "k.", ms=3, label="homoclinic orbit")
    elif e == "fixed_point":
        ax.plot(xs, ys, "ks", ms=5, label="fixed points")
for i, e in enumerate(orbit_keys):
    xs, ys = zip(*groups[e])
    ax.plot(xs, ys, "o", ms=3, color=cmap(i / max(1, len(orbit_keys) - 1)), label=e if i in (0, len(orbit_keys) - 1) else None)
ax.set_xlim(-0.1, 1.3)
ax.set_ylim(-0.1, 1.3)
ax.set_xlabel("x")
ax.set_ylabel("y")
ax.legend(fontsize=7, loc="upper right")
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=200)
)PY";

inline const char* kSweepPlot = R"PY(#!/usr/bin/env python3
import csv, sys
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "bifurcations.csv"
rows = []
with open(path) as fh:
    for r in csv.DictReader(line for line in fh if not line.startswith("#")):
        if r["status"] == "ok":
            rows.append(r)

fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))
for kind, color in (("SN", "tab:blue"), ("PD", "tab:red")):
    sel = [r for r in rows if r["kind"] == kind]
    ks = [int(r["k"]) for r in sel]
    a.semilogy(ks, [abs(float(r["epsilon"])) for r in sel], "o-", color=color, label=kind)
    b.plot(ks, [float(r["scaled_value"]) for r in sel], "o-", color=color, label=kind)
    if sel:
        b.axhline(float(sel[0]["predicted_limit"]), color=color, ls="--", lw=0.8)
rate = rows[0]["rate"] if rows else ""
a.set_xlabel("k"); a.set_ylabel("|epsilon|"); a.legend()
b.set_xlabel("k"); b.set_ylabel("epsilon / " + rate); b.legend()
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=200)
)PY";

// ---------------------------------------------------------------------------
// portrait

inline int cmd_portrait(const RunConfig& cfg, std::ostream& log) {
  const int k_max = cfg.k_max.value_or(15);
  PortraitOptions opt;
  opt.orbit = cfg.orbit_options();
  const PortraitDataset data = build_portrait(cfg.params, k_max, opt);

  CsvTable table({"entity", "index", "x", "y"});
  auto add_points = [&](const std::string& entity, const std::vector<Point>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      table.add_row({entity, std::to_string(i), format_double(pts[i].x), format_double(pts[i].y)});
  };
  for (const auto& arc : data.arcs) add_points(to_string(arc.branch), arc.points);
  add_points("homoclinic", data.homoclinic_points);
  add_points("fixed_point", data.fixed_points);
  for (const auto& orb : data.orbits) add_points("orbit_" + std::to_string(orb.k), orb.points);

  table.add_note("orbits: " + std::to_string(data.orbits.size()) + " of " + std::to_string(k_max));
  for (const auto& [k, why] : data.missing) {
    table.add_note("missing k=" + std::to_string(k) + ": " + why);
    log << "note: no single-round orbit for k=" << k << " (" << why << ")\n";
  }

  const auto dir = prepare_out_dir(cfg);
  table.write_file(dir / "portrait.csv", cfg);
  if (cfg.plot_script) write_text(dir / "plot_portrait.py", kPortraitPlot);
  log << "wrote " << (dir / "portrait.csv").string() << " (" << table.size() << " rows)\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

inline int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  const DirectionRay ray = cfg.ray();
  const int k_max = cfg.k_max.value_or(22);
  const int k_min = cfg.k_min.value_or(std::min(8, k_max));
  if (k_min > k_max) throw ConfigError("k_min exceeds k_max");
  const SweepResult res = scaled_sequence(k_min, k_max, ray, cfg.params, cfg.scan_options(), cfg.jobs);

  std::optional<AsymptoticPrediction> pred;
  try {
    pred = predict(ray.scaling, k_min, unfolding_data(cfg.params), ray.v);
  } catch (const DegenerateDirection&) {
  }
  auto pred_str = [&](BifurcationKind kind) {
    if (!pred) return std::string("nan");
    return format_double(kind == BifurcationKind::SN ? pred->sn_limit : pred->pd_limit);
  };

  const std::string case_name(to_string(ray.scaling));
  const std::string rate(rate_label(ray.scaling));
  CsvTable table({"case", "kind", "k", "epsilon", "scaled_value", "rate", "predicted_limit", "g", "single_round",
                  "status"});
  using Row = std::tuple<int, int, double, std::vector<std::string>>;
  std::vector<Row> rows;
  for (const auto& rec : res.records) {
    for (auto kind : {BifurcationKind::SN, BifurcationKind::PD}) {
      const auto& bp = kind == BifurcationKind::SN ? rec.sn : rec.pd;
      if (bp) {
        const double g = kind == BifurcationKind::SN ? bp->indicators_at.g_sn : bp->indicators_at.g_pd;
        rows.emplace_back(rec.k, static_cast<int>(kind), bp->epsilon,
                          std::vector<std::string>{case_name, to_string(kind), std::to_string(rec.k),
                                                   format_double(bp->epsilon), format_double(bp->scaled_value), rate,
                                                   pred_str(kind), format_double(g), bp->single_round ? "1" : "0",
                                                   "ok"});
      } else {
        std::string status = rec.status;
        for (char& ch : status)
          if (ch == ',' || ch == '\n') ch = ';';
        rows.emplace_back(rec.k, static_cast<int>(kind), 0.0,
                          std::vector<std::string>{case_name, to_string(kind), std::to_string(rec.k), "nan", "nan",
                                                   rate, pred_str(kind), "nan", "0", status});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
  });
  for (auto& r : rows) table.add_row(std::move(std::get<3>(r)));

  CsvTable fits({"case", "kind", "rate", "predicted_limit", "fitted_limit", "fit_residual", "fit_terms",
                 "leading_limit", "leading_residual", "points", "sufficient"});
  for (auto kind : {BifurcationKind::SN, BifurcationKind::PD}) {
    const ScalingFit& f = kind == BifurcationKind::SN ? res.sn_fit : res.pd_fit;
    fits.add_row({case_name, to_string(kind), rate, pred_str(kind), format_double(f.extrapolated_limit),
                  format_double(f.fit_residual), std::to_string(f.terms), format_double(f.leading_limit),
                  format_double(f.leading_residual), std::to_string(f.sequence.size()), f.sufficient ? "1" : "0"});
    log << to_string(kind) << ": fitted " << format_double(f.extrapolated_limit) << ", predicted " << pred_str(kind)
        << " (" << f.sequence.size() << " single-round points, rate " << rate << ")\n";
  }

  const auto dir = prepare_out_dir(cfg);
  table.write_file(dir / "bifurcations.csv", cfg);
  fits.write_file(dir / "fit_summary.csv", cfg);
  if (cfg.plot_script) write_text(dir / "plot_sweep.py", kSweepPlot);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyCheck {
  std::string check;
  bool pass = false;
  double value = 0.0;
  double bound = 0.0;
  std::string note;
};

/// Tolerances of the scaled-limit fits, by case.
inline double fit_tolerance(ScalingCase c) {
  switch (c) {
    case ScalingCase::Case1_mu1: return 0.02;
    case ScalingCase::Case2_mu2:
    case ScalingCase::Case3_mu3: return 0.03;
    default: return 0.05;
  }
}

inline std::vector<VerifyCheck> run_verification(const RunConfig& cfg) {
  std::vector<VerifyCheck> out;
  const ModelParams& p = cfg.params;
  const ModelParams origin = p.with_mu({0.0, 0.0, 0.0, 0.0});

  const ConditionReport rep = check_conditions(extract_normal_form(p));
  for (const auto& c : rep.checks) out.push_back({"condition_" + c.name, c.passed, c.value, c.residual, ""});
  const double delta0 = discriminant(discriminant_inputs(extract_normal_form(origin)));
  out.push_back({"delta0", delta0 > 0.0, delta0, 0.0, "Delta0 must be positive"});

  const NormalFormCoeffs nf = extract_normal_form(p);
  const KSet ks = k_set(1, nf.chi_eig, nf.d1 >= 0.0 ? 1 : -1);
  out.push_back({"k_set_nonempty", !ks.empty(), static_cast<double>(ks.members_up_to(30).size()), 1.0, ""});

  // Trace, determinant and ansatz asymptotics at mu = 0, constants fixed at k = 5 with a 1.2 margin.
  {
    const OrbitOptions oo = cfg.orbit_options();
    double c_tau = 0, c_det = 0, c_y = 0, worst_tau = 0, worst_det = 0, worst_y = 0;
    bool ok = true;
    for (int k = 5; k <= 25; ++k) {
      try {
        const PeriodicOrbit orb = find_periodic_orbit(k, origin, std::nullopt, oo);
        const double ak = std::pow(p.alpha, k);
        const double rt = std::abs(orb.trace) / (k * ak);
        const double rd = std::abs(orb.det + origin.c20) / (k * ak);
        const double ry = std::abs(orb.points.front().y - 1.0) / (k * k * ak * ak);
        if (k == 5) {
          c_tau = 1.2 * rt;
          c_det = 1.2 * rd;
          c_y = 1.2 * ry;
        }
        worst_tau = std::max(worst_tau, rt);
        worst_det = std::max(worst_det, rd);
        worst_y = std::max(worst_y, ry);
      } catch (const SolverError&) {
        ok = false;
      }
    }
    out.push_back({"trace_asymptotics", ok && worst_tau <= c_tau, worst_tau, c_tau, "max |tau_k|/(k alpha^k), k=5..25"});
    out.push_back({"det_asymptotics", ok && worst_det <= c_det, worst_det, c_det,
                   "max |delta_k + c20|/(k alpha^k), k=5..25"});
    out.push_back({"ansatz_convergence", ok && worst_y <= c_y, worst_y, c_y, "max |y_k - 1|/(k^2 alpha^2k), k=5..25"});
  }

  // Expansion of the k-fold local map, sup over a 10-point sample.
  {
    auto ratio = [&](int k) { return expansion_ratio(k, origin); };
    const double r8 = ratio(8);
    double worst = 0.0;
    for (int k = 8; k <= 24; ++k) worst = std::max(worst, ratio(k) / r8);
    out.push_back({"lemma_expansion_ratio", worst <= 1.1, worst, 1.1, "max_k ratio(k)/ratio(8), k=8..24"});
  }

  // Scaled-sequence fits along the four coordinate rays.
  const int k_max = cfg.k_max.value_or(22);
  const int k_min = cfg.k_min.value_or(std::min(8, k_max));
  for (int d = 1; d <= 4; ++d) {
    const DirectionRay ray = coordinate_ray(d, origin);
    const std::string tag = "case" + std::to_string(d);
    SweepResult res;
    try {
      res = scaled_sequence(k_min, k_max, ray, origin, cfg.scan_options(), cfg.jobs);
    } catch (const Error& e) {
      out.push_back({"fit_" + tag, false, 0.0, 0.0, e.what()});
      continue;
    }
    const AsymptoticPrediction pr = predict(ray.scaling, k_min, unfolding_data(origin), ray.v);
    const double tol = fit_tolerance(ray.scaling);
    for (auto kind : {BifurcationKind::SN, BifurcationKind::PD}) {
      const ScalingFit& f = kind == BifurcationKind::SN ? res.sn_fit : res.pd_fit;
      const double target = kind == BifurcationKind::SN ? pr.sn_limit : pr.pd_limit;
      const std::string name = "fit_" + tag + "_" + to_string(kind);
      if (!f.sufficient) {
        out.push_back({name, false, static_cast<double>(f.sequence.size()), kMinFitPoints, "insufficient points"});
        continue;
      }
      const double rel = std::abs(f.extrapolated_limit - target) / std::abs(target);
      out.push_back({name, rel <= tol, rel, tol,
                     "limit " + format_double(f.extrapolated_limit) + " vs " + format_double(target)});
    }
    bool signs = true;
    int pairs = 0;
    for (const auto& r : res.records)
      if (r.sn && r.pd) {
        ++pairs;
        signs = signs && r.sn->epsilon > 0.0 && r.pd->epsilon < 0.0;
      }
    out.push_back({"signs_" + tag, signs && pairs > 0, static_cast<double>(pairs), 0.0, "eps_SN > 0 > eps_PD"});
  }
  return out;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const auto checks = run_verification(cfg);
  nlohmann::json report;
  report["config"] = cfg.to_json();
  report["checks"] = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.pass;
    report["checks"].push_back({{"check", c.check},
                                {"status", c.pass ? "pass" : "fail"},
                                {"value", c.value},
                                {"bound", c.bound},
                                {"note", c.note}});
    log << (c.pass ? "PASS " : "FAIL ") << c.check << " value=" << format_double(c.value)
        << " bound=" << format_double(c.bound) << (c.note.empty() ? "" : " (" + c.note + ")") << '\n';
  }
  report["all_pass"] = all;
  const auto dir = prepare_out_dir(cfg);
  write_text(dir / "verify_report.json", report.dump(2) + "\n");
  return all ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// predict

inline int cmd_predict(const RunConfig& cfg, std::ostream& log) {
  const DirectionRay ray = cfg.ray();
  const int k_max = cfg.k_max.value_or(22);
  const int k_min = cfg.k_min.value_or(std::min(8, k_max));
  if (k_min > k_max) throw ConfigError("k_min exceeds k_max");
  const UnfoldingData u = unfolding_data(cfg.params);
  CsvTable table({"case", "k", "rate", "sn_limit", "pd_limit", "sn_epsilon", "pd_epsilon"});
  const double delta0 = discriminant(discriminant_inputs(u.origin));
  table.add_note("delta0: " + format_double(delta0));
  for (int k = k_min; k <= k_max; ++k) {
    const AsymptoticPrediction pr = predict(ray.scaling, k, u, ray.v);
    table.add_row({std::string(to_string(ray.scaling)), std::to_string(k), pr.rate, format_double(pr.sn_limit),
                   format_double(pr.pd_limit), format_double(pr.sn_epsilon()), format_double(pr.pd_epsilon())});
  }
  const auto dir = prepare_out_dir(cfg);
  table.write_file(dir / "predictions.csv", cfg);
  const AsymptoticPrediction pr = predict(ray.scaling, k_min, u, ray.v);
  log << to_string(ray.scaling) << ": SN " << format_double(pr.sn_limit) << ", PD " << format_double(pr.pd_limit)
      << ", rate " << pr.rate << ", delta0 " << format_double(delta0) << '\n';
  return kExitOk;
}

} // namespace tangency
