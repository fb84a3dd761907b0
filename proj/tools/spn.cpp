// Command-line front end: build models from config + flag overrides, run
// certifications, oracle cross-checks, parameter searches, and CSV curve
// dumps. Exit codes: 0 positive / pass, 1 nonpositive / fail, 2 inconclusive,
// 3 search exhausted, 64 bad configuration, 70 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "spn/concordance.hpp"
#include "spn/config.hpp"
#include "spn/constructions.hpp"
#include "spn/io.hpp"
#include "spn/oracle.hpp"

namespace fs = std::filesystem;
using namespace spn;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string model, dims, radii;
  int n = -1, m = -1, p = -1, threads = 0;
  double delta = -1, lambda = -1, Lambda = -1, tol = -1;
  std::string grid;
  long long seed = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "config file (key = value with [section] headers)");
  cmd->add_option("--model", f.model, "model kind");
  cmd->add_option("--n", f.n, "fiber dimension parameter");
  cmd->add_option("--m", f.m, "sphere product factor dimension");
  cmd->add_option("--p", f.p, "plane dimension p");
  cmd->add_option("--delta", f.delta, "torpedo radius delta");
  cmd->add_option("--lambda", f.lambda, "neck length lambda");
  cmd->add_option("--Lambda", f.Lambda, "bend standoff radius Lambda");
  cmd->add_option("--dims", f.dims, "sphere factor dimensions, comma separated");
  cmd->add_option("--radii", f.radii, "sphere factor radii, comma separated");
  cmd->add_option("--grid", f.grid, "certification grid, e.g. 64x32");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--tol", f.tol, "tolerance");
  cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)");
  cmd->add_option("--out", f.out, "output directory for reports");
}

Config merge_config(const CommonFlags& f) {
  Config cfg;
  if (!f.config_path.empty()) cfg = Config::parse_file(f.config_path);
  if (!f.model.empty()) cfg.set("model.kind", f.model);
  if (f.n >= 0) cfg.set("model.n", std::to_string(f.n));
  if (f.m >= 0) cfg.set("model.m", std::to_string(f.m));
  if (f.delta >= 0) cfg.set("model.delta", fmt17(f.delta));
  if (f.lambda >= 0) cfg.set("model.lambda", fmt17(f.lambda));
  if (f.Lambda >= 0) cfg.set("model.Lambda", fmt17(f.Lambda));
  if (!f.dims.empty()) cfg.set("model.dims", f.dims);
  if (!f.radii.empty()) cfg.set("model.radii", f.radii);
  if (f.p >= 0) cfg.set("certify.p", std::to_string(f.p));
  if (!f.grid.empty()) cfg.set("certify.grid", f.grid);
  if (f.seed >= 0) cfg.set("certify.seed", std::to_string(f.seed));
  if (f.tol >= 0) cfg.set("certify.tol", fmt17(f.tol));
  if (f.threads > 0) set_default_threads(f.threads);
  return cfg;
}

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

int cmd_certify(const CommonFlags& flags) {
  const Config cfg = merge_config(flags);
  const MetricModel model = model_from_config(cfg);
  const int p = cfg.get_int("certify.p", 0);
  const GridSpec grid = grid_from_config(cfg);
  const double tol = cfg.get_num("certify.tol", 1e-7);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("certify.seed", 1));

  const PositivityCertificate cert = certify(model, p, grid, tol, seed);
  const fs::path dir = ensure_out_dir(flags.out);
  write_text_file((dir / "certificate.txt").string(), cert.text());
  cert.write_csv((dir / "certificate.csv").string());
  write_text_file((dir / "model.txt").string(), model_config_text(model));
  std::cout << cert.text();
  return cert.exit_code();
}

int cmd_crosscheck(const CommonFlags& flags, int samples, double h) {
  const Config cfg = merge_config(flags);
  const MetricModel model = model_from_config(cfg);
  const double tol = cfg.get_num("certify.tol", 1e-5);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("certify.seed", 1));
  const CrosscheckReport report = crosscheck(model, samples, h, tol, seed);
  const fs::path dir = ensure_out_dir(flags.out);
  report.write_csv((dir / "crosscheck.csv").string());
  std::cout << report.text();
  return report.pass ? 0 : 1;
}

MetricPath path_from_config(const Config& cfg) {
  const std::string kind = cfg.get("path.kind", "round");
  std::vector<int> dims = cfg.has("path.dims") ? cfg.get_int_list("path.dims")
                                               : std::vector<int>{cfg.get_int("path.n", 4)};
  std::vector<double> rho0 = cfg.has("path.rho0") ? cfg.get_num_list("path.rho0")
                                                  : std::vector<double>(dims.size(), 1.0);
  std::vector<double> rho1 = cfg.has("path.rho1") ? cfg.get_num_list("path.rho1")
                                                  : std::vector<double>(dims.size(), 1.0);
  if (rho0.size() != dims.size() || rho1.size() != dims.size())
    fail(Err::ConfigError, "path radii must match path dims");
  std::vector<WarpingProfile> radii;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const double a = rho0[i], b = rho1[i];
    radii.push_back(WarpingProfile(
        [a, b](double r) { return ProfileSample{a + (b - a) * r, b - a, 0.0}; }, 0.0, 1.0, 0.0));
  }
  if (kind != "round" && kind != "product") fail(Err::ConfigError, "unknown path.kind: " + kind);
  return product_path(dims, radii);
}

int cmd_search(const CommonFlags& flags, const std::string& kind) {
  const Config cfg = merge_config(flags);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int("certify.seed", 1));
  const fs::path dir = ensure_out_dir(flags.out);
  if (kind == "bend-lambda") {
    const int n = cfg.get_int("model.n", 2);
    const double delta = cfg.get_num("model.delta", 1.0);
    const int p = cfg.get_int("certify.p", 0);
    GridSpec grid = grid_from_config(cfg);
    const double lambda_star = search_bend_Lambda(n, delta, p, grid, seed);
    std::cout << "Lambda = " << fmt17(lambda_star) << "\n";
    write_text_file((dir / "search.txt").string(), "Lambda = " + fmt17(lambda_star) + "\n");
    return 0;
  }
  if (kind == "concordance-C") {
    const MetricPath path = path_from_config(cfg);
    const int p = cfg.get_int("certify.p", 0);
    const double C = find_C(path, p, grid_from_config(cfg), seed);
    std::cout << "C = " << fmt17(C) << "\n";
    write_text_file((dir / "search.txt").string(), "C = " + fmt17(C) + "\n");
    return 0;
  }
  fail(Err::ConfigError, "unknown search kind: " + kind);
}

int cmd_curves(const CommonFlags& flags, const std::string& what, double at_t) {
  const Config cfg = merge_config(flags);
  const fs::path dir = ensure_out_dir(flags.out);
  if (what == "profile") {
    const MetricModel model = model_from_config(cfg);
    dump_profile_csv(model.beta, (dir / "profile.csv").string());
    return 0;
  }
  if (what == "sectionals") {
    const MetricModel model = model_from_config(cfg);
    dump_sectionals_csv(model, at_t, (dir / "sectionals.csv").string());
    return 0;
  }
  if (what == "min-s") {
    const MetricModel model = model_from_config(cfg);
    const int p = cfg.get_int("certify.p", 0);
    const GridSpec grid = grid_from_config(cfg);
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("certify.seed", 1));
    const PositivityCertificate cert = certify(model, p, grid, cfg.get_num("certify.tol", 1e-7), seed);
    cert.write_csv((dir / "min_s.csv").string());
    return cert.exit_code() == 2 ? 2 : 0;
  }
  fail(Err::ConfigError, "unknown curve kind: " + what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warped-product intermediate-curvature certification toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  int samples = 50;
  double h = 1e-4;
  std::string search_kind, curves_what;
  double at_t = 0.0;

  auto* certify_cmd = app.add_subcommand("certify", "certify s_{p,n} positivity on a grid");
  add_common(certify_cmd, flags);

  auto* crosscheck_cmd = app.add_subcommand("crosscheck", "closed forms vs finite differences");
  add_common(crosscheck_cmd, flags);
  crosscheck_cmd->add_option("--samples", samples, "sample count");
  crosscheck_cmd->add_option("--h", h, "finite difference step");

  auto* search_cmd = app.add_subcommand("search", "parameter searches");
  add_common(search_cmd, flags);
  search_cmd->add_option("kind", search_kind, "bend-lambda | concordance-C")->required();

  auto* curves_cmd = app.add_subcommand("curves", "CSV curve dumps");
  add_common(curves_cmd, flags);
  curves_cmd->add_option("what", curves_what, "profile | sectionals | min-s")->required();
  curves_cmd->add_option("--t", at_t, "t slice for sectionals");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    if (certify_cmd->parsed()) return cmd_certify(flags);
    if (crosscheck_cmd->parsed()) return cmd_crosscheck(flags, samples, h);
    if (search_cmd->parsed()) return cmd_search(flags, search_kind);
    if (curves_cmd->parsed()) return cmd_curves(flags, curves_what, at_t);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == Err::ConfigError) return 64;
    if (e.code() == Err::SearchExhausted) return 3;
    return 70;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return 64;
}
