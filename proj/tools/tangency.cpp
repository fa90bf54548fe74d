// Command-line front end: portrait | sweep | verify | predict.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tangency/cli.hpp"

namespace {

std::optional<tangency::ParamVec> parse_vector(const std::string& text) {
  tangency::ParamVec v{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 4) return std::nullopt;
    try {
      std::size_t used = 0;
      v[i++] = std::stod(item, &used);
      if (used != item.size()) return std::nullopt;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  if (i != 4) return std::nullopt;
  return v;
}

} // namespace

int main(int argc, char** argv) {
  using namespace tangency;
  CLI::App app{"Stable periodic orbits near a globally resonant homoclinic tangency"};
  app.require_subcommand(1, 1);

  std::optional<std::string> config_path, out_dir, v_text;
  std::optional<double> alpha, tol_newton, tol_bisect;
  std::optional<double> mu[4];
  std::optional<int> direction, k_min, k_max, jobs;
  bool allow_large_k = false, no_plot = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--alpha", alpha, "saddle eigenvalue alpha in (0,1)");
    for (int i = 0; i < 4; ++i)
      sub->add_option("--mu" + std::to_string(i + 1), mu[i], "unfolding parameter mu" + std::to_string(i + 1));
    auto* dir = sub->add_option("--direction", direction, "coordinate ray 1..4");
    auto* vec = sub->add_option("--v", v_text, "direction vector a,b,c,d");
    dir->excludes(vec);
    sub->add_option("--k-min", k_min, "smallest k");
    sub->add_option("--k-max", k_max, "largest k");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--jobs", jobs, "worker threads");
    sub->add_option("--tol-newton", tol_newton, "Newton step/residual tolerance");
    sub->add_option("--tol-bisect", tol_bisect, "relative bisection tolerance on epsilon");
    sub->add_flag("--allow-large-k", allow_large_k, "permit k_max above 30");
    sub->add_flag("--no-plot", no_plot, "skip the plot script");
  };

  auto* portrait = app.add_subcommand("portrait", "unstable manifold, homoclinic orbit and periodic orbits");
  auto* sweep = app.add_subcommand("sweep", "bifurcation values along a parameter ray");
  auto* verify = app.add_subcommand("verify", "run the verification checks");
  auto* predict_cmd = app.add_subcommand("predict", "leading-order bifurcation predictions");
  for (auto* s : {portrait, sweep, verify, predict_cmd}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    nlohmann::json over = nlohmann::json::object();
    if (alpha) over["constants"]["alpha"] = *alpha;
    if (std::any_of(std::begin(mu), std::end(mu), [](const auto& m) { return m.has_value(); })) {
      // Individual mu flags patch the configured vector.
      nlohmann::json base = nlohmann::json::array({0.0, 0.0, 0.0, 0.0});
      if (config_path) {
        const RunConfig file_cfg = load_config(config_path, nlohmann::json::object());
        base = file_cfg.params.mu;
      }
      for (int i = 0; i < 4; ++i)
        if (mu[i]) base[static_cast<std::size_t>(i)] = *mu[i];
      over["mu"] = base;
    }
    if (direction) over["direction"] = *direction;
    if (v_text) {
      const auto v = parse_vector(*v_text);
      if (!v) throw ConfigError("--v expects four comma-separated numbers");
      over["v"] = *v;
    }
    if (k_min) over["k_min"] = *k_min;
    if (k_max) over["k_max"] = *k_max;
    if (out_dir) over["out"] = *out_dir;
    if (jobs) over["jobs"] = *jobs;
    if (tol_newton) over["tol_newton"] = *tol_newton;
    if (tol_bisect) over["tol_bisect"] = *tol_bisect;
    if (allow_large_k) over["allow_large_k"] = true;
    if (no_plot) over["plot_script"] = false;

    const RunConfig cfg = load_config(config_path, over);
    if (portrait->parsed()) return cmd_portrait(cfg, std::cerr);
    if (sweep->parsed()) return cmd_sweep(cfg, std::cerr);
    if (verify->parsed()) return cmd_verify(cfg, std::cerr);
    return cmd_predict(cfg, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const InvalidParams& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitSolverFailed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
}
