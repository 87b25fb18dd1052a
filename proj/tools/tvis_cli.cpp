// tvis: degrade, restore, compare and self-check front end.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvis/tvis.hpp"

namespace {

using namespace tvis;

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_io = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_real(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw UsageError("invalid " + what + " '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError("invalid " + what + " '" + s + "'");
  return std::stoul(s);
}

GridSize parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError("size must look like <rows>x<cols>, got '" + s + "'");
  return {parse_count(s.substr(0, x), "row count"), parse_count(s.substr(x + 1), "column count")};
}

/// Options shared by every subcommand.
struct Common {
  std::string manifest;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--manifest", c.manifest, "Manifest path (default: <out>.manifest)");
  cmd->add_option("--threads", c.threads, "Transform threads (1 keeps runs bit-reproducible)")
      ->check(CLI::PositiveNumber);
}

/// Blur given either parametrically or as a PSF image.
struct BlurOptions {
  std::string blur;
  std::string psf;
};

void add_blur(CLI::App* cmd, BlurOptions& b) {
  auto* blur = cmd->add_option("--blur", b.blur, "gauss:<sigma> or box:<width>");
  auto* psf = cmd->add_option("--psf", b.psf,
                              "PSF graymap; its centre sample (rows/2, cols/2) is the origin, "
                              "it is normalized to unit sum and wrapped periodically");
  blur->excludes(psf);
}

SpectralFilter resolve_blur(const BlurOptions& b, std::size_t rows, std::size_t cols, Manifest& m) {
  if (!b.psf.empty()) {
    const Image kernel = read_image(b.psf);
    m.set("blur", "psf:" + b.psf);
    SpectralFilter h = normalize_blur(kernel_filter(kernel, rows, cols));
    m.set("blur_condition_number", condition_number(h));
    return h;
  }
  if (b.blur.empty()) throw UsageError("one of --blur or --psf is required");
  const auto colon = b.blur.find(':');
  const std::string kind = b.blur.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : b.blur.substr(colon + 1);
  BlurSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  if (kind == "gauss") {
    spec.kind = BlurKind::gaussian;
    spec.sigma = parse_real(arg, "gaussian sigma");
    if (!(spec.sigma > 0.0)) throw UsageError("gaussian sigma must be positive");
    m.set("blur_support_radius", spec.support_radius());
  } else if (kind == "box") {
    spec.kind = BlurKind::moving_average;
    spec.width = parse_count(arg, "box width");
    if (spec.width == 0) throw UsageError("box width must be positive");
  } else {
    throw UsageError("unknown blur '" + b.blur + "' (expected gauss:<sigma> or box:<width>)");
  }
  m.set("blur", b.blur);
  SpectralFilter h = blur_filter(spec);
  m.set("blur_condition_number", condition_number(h));
  return h;
}

std::string manifest_path(const Common& c, const std::string& out, const std::string& fallback) {
  if (!c.manifest.empty()) return c.manifest;
  return out.empty() ? fallback : out + ".manifest";
}

void apply_threads(const Common& c, Manifest& m) {
  if (c.threads > 1) set_transform_threads(c.threads);
  m.set("threads", static_cast<std::size_t>(c.threads));
}

void write_trace(const std::string& path, const IterationTrace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << "iter,energy,data_term,tv_term,c,delta_rel\n";
  for (const IterationRecord& r : trace.records)
    out << r.iter << ',' << format_real(r.energy) << ',' << format_real(r.data_term) << ','
        << format_real(r.tv_term) << ',' << format_real(r.c) << ',' << format_real(r.delta_rel) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

// ---------------------------------------------------------------- degrade

struct DegradeArgs {
  Common common;
  BlurOptions blur;
  std::string in, phantom, out, reference_out;
  std::optional<double> target_psnr, noise_sigma;
  std::uint64_t seed = 0;
};

int run_degrade(const DegradeArgs& a, const std::string& invocation) {
  const auto t0 = Clock::now();
  Manifest m;
  m.set("command", "degrade");
  m.set("invocation", invocation);
  apply_threads(a.common, m);

  Image f;
  if (!a.phantom.empty()) {
    const GridSize s = parse_size(a.phantom);
    f = shepp_logan(s.rows, s.cols);
    m.set("input", "phantom:" + a.phantom);
  } else if (!a.in.empty()) {
    f = read_image(a.in);
    m.set("input", a.in);
  } else {
    throw UsageError("one of --in or --phantom is required");
  }
  m.set("rows", f.rows());
  m.set("cols", f.cols());
  m.set("boundary", to_string(Boundary::periodic));

  const SpectralFilter h = resolve_blur(a.blur, f.rows(), f.cols(), m);
  NoiseSpec noise;
  noise.seed = a.seed;
  if (a.target_psnr) noise.target_psnr = *a.target_psnr;
  else noise.sigma = a.noise_sigma.value_or(0.0);
  if (noise.sigma && *noise.sigma < 0.0) throw UsageError("--noise-sigma must be >= 0");
  const double sigma = noise.resolved_sigma();
  m.set("noise_sigma", sigma);
  if (a.target_psnr) m.set("target_psnr", *a.target_psnr);
  m.set("seed", static_cast<std::size_t>(a.seed));

  const Image blurred = convolve_freq(f, h);
  Image g = blurred;
  g += gaussian_noise(f.rows(), f.cols(), sigma, a.seed);
  const Image written = quantize(g);
  m.set("psnr_noisy_vs_blurred", psnr(g, blurred));
  m.set("psnr_written_vs_blurred", psnr(written, blurred));
  m.set("psnr_written_vs_input", psnr(written, f));

  write_image(a.out, g);
  m.set("output", a.out);
  if (!a.reference_out.empty()) {
    write_image(a.reference_out, f);
    m.set("reference_output", a.reference_out);
  }
  m.set("duration_s", seconds_since(t0));
  m.save(manifest_path(a.common, a.out, "degrade.manifest"));

  std::cout << "degraded " << f.rows() << "x" << f.cols() << "  noise sigma " << format_real(sigma)
            << "  psnr(g, Hf) " << format_real(psnr(g, blurred)) << " dB\n";
  return exit_ok;
}

// ---------------------------------------------------------------- restore

struct RestoreArgs {
  Common common;
  BlurOptions blur;
  std::string in, out, trace, reference, lambda = "auto", lambda_reference, noise_manifest;
  std::string solver = "tvis";
  std::optional<double> noise_sigma, step, epsilon;
  std::size_t directions = 3, iters = 500;
  double rel_tol = 1e-5, mu = 0.8;
  bool backtracking = false, no_renormalize = false;
};

double resolve_lambda(const RestoreArgs& a, const Image& g, Manifest& m) {
  if (a.lambda != "auto") {
    const double v = parse_real(a.lambda, "lambda");
    if (!(v >= 0.0)) throw UsageError("lambda must be non-negative");
    m.set("lambda_source", "given");
    m.set("lambda", v);
    return v;
  }
  double sigma = 0.0;
  if (a.noise_sigma) {
    sigma = *a.noise_sigma;
  } else if (!a.noise_manifest.empty()) {
    sigma = parse_real(Manifest::load(a.noise_manifest).at("noise_sigma"), "noise_sigma");
  } else {
    throw UsageError("--lambda auto needs --noise-sigma or --noise-manifest");
  }
  if (!(sigma > 0.0)) throw UsageError("--lambda auto needs a positive noise sigma");
  Image ref = g;
  std::string source = "estimate:observed";
  if (!a.lambda_reference.empty()) {
    ref = read_image(a.lambda_reference);
    if (!ref.same_shape(g)) throw ShapeError("lambda reference and observed image differ in shape");
    source = "estimate:" + a.lambda_reference;
  }
  const LambdaEstimate est = estimate_lambda(ref, sigma * sigma);
  m.set("lambda_source", source);
  m.set("lambda_beta", est.beta);
  m.set("lambda_noise_variance", est.noise_variance);
  m.set("lambda", est.lambda);
  return est.lambda;
}

/// One trace row per epsilon stage: energy is the smoothed functional and
/// delta_rel the plug-back residual; c does not apply.
IterationTrace mld_trace(const MldResult& r) {
  IterationTrace t;
  std::size_t outer = 0;
  for (const MldStage& s : r.stages) {
    outer += s.outer_iterations;
    t.records.push_back({outer, s.smoothed_energy, s.data_term, s.tv_term,
                         std::numeric_limits<double>::quiet_NaN(), s.residual});
  }
  return t;
}

int run_restore(const RestoreArgs& a, const std::string& invocation) {
  const auto t0 = Clock::now();
  Manifest m;
  m.set("command", "restore");
  m.set("invocation", invocation);
  apply_threads(a.common, m);
  if (a.solver != "tvis" && a.solver != "mld") throw UsageError("unknown solver '" + a.solver + "'");

  const Image g = read_image(a.in);
  m.set("input", a.in);
  m.set("rows", g.rows());
  m.set("cols", g.cols());
  m.set("boundary", to_string(Boundary::periodic));
  const SpectralFilter h = resolve_blur(a.blur, g.rows(), g.cols(), m);
  const double lambda = resolve_lambda(a, g, m);
  m.set("solver", a.solver);

  Image restored;
  IterationTrace trace;
  if (a.solver == "tvis") {
    SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.directions = a.directions;
    cfg.step = a.step;
    cfg.epsilon_margin = a.epsilon;
    cfg.mu = a.mu;
    cfg.max_iters = a.iters;
    cfg.rel_tol = a.rel_tol;
    cfg.backtracking = a.backtracking;
    cfg.validate();
    const double bound = step_constant(g.rows(), g.cols(), a.directions, 0.0);
    m.set("L", a.directions);
    m.set("c", cfg.resolved_step(g.rows(), g.cols()));
    m.set("epsilon", cfg.step ? cfg.resolved_step(g.rows(), g.cols()) - bound
                              : cfg.epsilon_margin.value_or(1e-3 * bound));
    m.set("backtracking", a.backtracking);
    if (a.backtracking) m.set("mu", a.mu);
    m.set("max_iters", a.iters);
    m.set("rel_tol", a.rel_tol);
    RestoreResult r = a.backtracking ? iterate_backtracking(g, h, cfg) : iterate_fixed(g, h, cfg);
    m.set("iterations", r.iterations);
    m.set("converged", r.converged);
    m.set("final_energy", r.trace.records.back().energy);
    restored = std::move(r.restored);
    restored += mean(g);
    trace = std::move(r.trace);
  } else {
    MldConfig cfg;
    cfg.lambda = lambda;
    MldResult r = mld_restore(g, h, cfg);
    m.set("epsilon_schedule_first", cfg.epsilon_schedule.front());
    m.set("epsilon_schedule_last", cfg.epsilon_schedule.back());
    m.set("epsilon_stages", cfg.epsilon_schedule.size());
    m.set("final_residual", r.stages.back().residual);
    restored = r.restored;
    trace = mld_trace(r);
  }

  if (!a.reference.empty()) {
    const Image ref = read_image(a.reference);
    if (!ref.same_shape(restored)) throw ShapeError("reference and restored image differ in shape");
    m.set("reference", a.reference);
    m.set("psnr_observed", psnr(g, ref));
    m.set("psnr_restored", psnr(restored, ref));
  }
  m.set("renormalized", !a.no_renormalize);
  if (!a.no_renormalize) restored = renormalize_range(restored);
  write_image(a.out, restored);
  m.set("output", a.out);
  if (!a.trace.empty()) {
    write_trace(a.trace, trace);
    m.set("trace", a.trace);
  }
  m.set("duration_s", seconds_since(t0));
  m.save(manifest_path(a.common, a.out, "restore.manifest"));

  std::cout << "restored with " << a.solver << "  lambda " << format_real(lambda);
  if (auto p = m.get("psnr_restored")) std::cout << "  psnr " << *p << " dB";
  std::cout << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  Common common;
  BlurOptions blur;
  std::vector<std::string> images, labels;
  std::string reference, data, report;
  std::optional<double> lambda;
  std::size_t directions = 3;
};

int run_compare(const CompareArgs& a, const std::string& invocation) {
  const auto t0 = Clock::now();
  Manifest m;
  m.set("command", "compare");
  m.set("invocation", invocation);
  apply_threads(a.common, m);
  if (a.images.size() < 2) throw UsageError("compare needs at least two images");
  if (!a.labels.empty() && a.labels.size() != a.images.size())
    throw UsageError("--labels must name every image");

  const Image ref = read_image(a.reference);
  m.set("reference", a.reference);
  std::vector<Image> imgs;
  for (const std::string& p : a.images) {
    imgs.push_back(read_image(p));
    if (!imgs.back().same_shape(ref)) throw ShapeError("'" + p + "' differs in shape from the reference");
  }
  const auto label = [&](std::size_t i) { return a.labels.empty() ? a.images[i] : a.labels[i]; };

  // Energy 0.5||Hf - g||^2 + lambda TV_L(f), when the data term is available.
  std::optional<Image> g;
  std::optional<SpectralFilter> h;
  if (!a.data.empty()) {
    if (!a.lambda) throw UsageError("--data needs --lambda");
    g = read_image(a.data);
    if (!g->same_shape(ref)) throw ShapeError("data image differs in shape from the reference");
    h = resolve_blur(a.blur, ref.rows(), ref.cols(), m);
    m.set("data", a.data);
    m.set("lambda", *a.lambda);
    m.set("L", a.directions);
  }
  const AngleSet angles(a.directions);

  std::ostringstream rep;
  rep << "image,psnr_db" << (g ? ",energy" : "") << '\n';
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    const double p = psnr(imgs[i], ref);
    rep << label(i) << ',' << format_real(p);
    m.set("psnr." + label(i), p);
    if (g) {
      const Image r = convolve_freq(imgs[i], *h) - *g;
      const double e = 0.5 * inner_product(r, r) + *a.lambda * tv_L(imgs[i], angles);
      rep << ',' << format_real(e);
      m.set("energy." + label(i), e);
    }
    rep << '\n';
  }
  rep << "pair,relative_l2_error_percent\n";
  for (std::size_t i = 0; i < imgs.size(); ++i) {
    for (std::size_t j = i + 1; j < imgs.size(); ++j) {
      const double e = 100.0 * relative_l2_error(imgs[i], imgs[j]);
      rep << label(i) << " vs " << label(j) << ',' << format_real(e) << '\n';
      m.set("relative_error_percent." + label(i) + ".vs." + label(j), e);
    }
  }
  std::cout << rep.str();
  if (!a.report.empty()) {
    std::ofstream out(a.report);
    if (!out) throw IoError("cannot write '" + a.report + "'");
    out << rep.str();
    m.set("report", a.report);
  }
  m.set("duration_s", seconds_since(t0));
  m.save(manifest_path(a.common, a.report, "compare.manifest"));
  return exit_ok;
}

// ---------------------------------------------------------------- check-operators

struct CheckArgs {
  Common common;
  std::string sizes = "4x4,5x7,32x48";
  std::string directions = "1,2,3,5";
  std::size_t instances = 10;
  std::uint64_t seed = 1;
  bool flip_mdd_sign = false;
};

int run_check(const CheckArgs& a, const std::string& invocation) {
  const auto t0 = Clock::now();
  Manifest m;
  m.set("command", "check-operators");
  m.set("invocation", invocation);
  apply_threads(a.common, m);

  CheckOptions opt;
  opt.sizes.clear();
  for (const std::string& s : split(a.sizes, ',')) opt.sizes.push_back(parse_size(s));
  opt.directions.clear();
  for (const std::string& s : split(a.directions, ',')) {
    opt.directions.push_back(parse_count(s, "direction count"));
    if (opt.directions.back() == 0) throw UsageError("direction counts must be >= 1");
  }
  for (const GridSize s : opt.sizes)
    if (s.rows < 2 || s.cols < 2) throw UsageError("check sizes must be at least 2x2");
  opt.instances = a.instances;
  opt.seed = a.seed;
  opt.flip_mdd_sign = a.flip_mdd_sign;
  m.set("sizes", a.sizes);
  m.set("directions", a.directions);
  m.set("instances", a.instances);
  m.set("seed", static_cast<std::size_t>(a.seed));
  m.set("flip_mdd_sign", a.flip_mdd_sign);

  const std::vector<CheckResult> results = run_operator_checks(opt);
  std::size_t failed = 0;
  for (const CheckResult& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ' ' << r.detail << "  worst "
              << format_real(r.worst) << "  tol " << format_real(r.tolerance) << '\n';
    if (!r.passed) ++failed;
  }
  std::cout << results.size() - failed << '/' << results.size() << " checks passed\n";
  m.set("checks", results.size());
  m.set("failed", failed);
  m.set("duration_s", seconds_since(t0));
  m.save(manifest_path(a.common, "", "check-operators.manifest"));
  return failed == 0 ? exit_ok : exit_numerical;
}

// ---------------------------------------------------------------- dispatch

int dispatch(const std::vector<std::string>& args);

int run_replay(const std::string& path) {
  const Manifest m = Manifest::load(path);
  std::vector<std::string> args;
  try {
    args = nlohmann::json::parse(m.at("invocation")).get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest '" + path + "': unreadable invocation (" + e.what() + ")");
  }
  if (args.empty() || args.front() == "replay") throw IoError("manifest '" + path + "' cannot be replayed");
  return dispatch(args);
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Total-variation deconvolution by iterative shrinkage"};
  app.require_subcommand(1);
  const std::string invocation = nlohmann::json(args).dump();

  DegradeArgs d;
  auto* degrade = app.add_subcommand("degrade", "Blur an image and add white Gaussian noise");
  add_common(degrade, d.common);
  add_blur(degrade, d.blur);
  auto* d_in = degrade->add_option("--in", d.in, "Input graymap");
  auto* d_ph = degrade->add_option("--phantom", d.phantom, "Generate a Shepp-Logan phantom, <rows>x<cols>");
  d_in->excludes(d_ph);
  auto* tp = degrade->add_option("--target-psnr", d.target_psnr, "Noise level as PSNR(g, Hf) in dB");
  auto* ns = degrade->add_option("--noise-sigma", d.noise_sigma, "Noise standard deviation");
  tp->excludes(ns);
  degrade->add_option("--seed", d.seed, "Noise seed");
  degrade->add_option("--out", d.out, "Degraded image")->required();
  degrade->add_option("--reference-out", d.reference_out, "Also write the clean input here");

  RestoreArgs r;
  auto* restore = app.add_subcommand("restore", "Deconvolve with TV_L shrinkage or lagged diffusivity");
  add_common(restore, r.common);
  add_blur(restore, r.blur);
  restore->add_option("--in", r.in, "Degraded image")->required();
  restore->add_option("--out", r.out, "Restored image")->required();
  restore->add_option("--L", r.directions, "Number of directions")->check(CLI::PositiveNumber);
  restore->add_option("--lambda", r.lambda, "Regularization weight or 'auto'");
  auto* r_ns = restore->add_option("--noise-sigma", r.noise_sigma, "Noise std-dev for --lambda auto");
  auto* r_nm = restore->add_option("--noise-manifest", r.noise_manifest,
                                   "Take the noise std-dev from a degrade manifest");
  r_ns->excludes(r_nm);
  restore->add_option("--lambda-reference", r.lambda_reference,
                      "Image whose gradients set the auto lambda (default: the observed image)");
  restore->add_option("--iters", r.iters, "Iteration limit");
  restore->add_option("--rel-tol", r.rel_tol, "Relative-change stopping threshold");
  restore->add_flag("--backtracking", r.backtracking, "Adjust c per iteration by back-tracking");
  restore->add_option("--mu", r.mu, "Back-tracking reduction factor");
  restore->add_option("--step", r.step, "Step constant c (default: derived bound)");
  restore->add_option("--epsilon", r.epsilon, "Slack added to the derived c bound");
  restore->add_option("--solver", r.solver, "tvis or mld");
  restore->add_option("--trace", r.trace, "CSV iteration trace");
  restore->add_option("--reference", r.reference, "Ground truth for PSNR reporting");
  restore->add_flag("--no-renormalize", r.no_renormalize, "Write values as computed instead of stretching to [0, 255]");

  CompareArgs c;
  auto* compare = app.add_subcommand("compare", "PSNR, energy and pairwise errors of restorations");
  add_common(compare, c.common);
  add_blur(compare, c.blur);
  compare->add_option("images", c.images, "Restored images")->required();
  compare->add_option("--reference", c.reference, "Ground truth")->required();
  compare->add_option("--labels", c.labels, "Names for the images")->delimiter(',');
  compare->add_option("--data", c.data, "Degraded image, enables the energy column");
  compare->add_option("--lambda", c.lambda, "Regularization weight for the energy");
  compare->add_option("--L", c.directions, "Directions for the energy")->check(CLI::PositiveNumber);
  compare->add_option("--report", c.report, "Also write the report here");

  CheckArgs k;
  auto* check = app.add_subcommand("check-operators", "Randomized checks of the operator identities");
  add_common(check, k.common);
  check->add_option("--sizes", k.sizes, "Comma-separated <rows>x<cols> list");
  check->add_option("--L", k.directions, "Comma-separated direction counts");
  check->add_option("--instances", k.instances, "Random draws per check");
  check->add_option("--seed", k.seed, "Random seed");
  check->add_flag("--flip-mdd-sign", k.flip_mdd_sign, "Negative control: negate mdd in the adjointness check")
      ->group("Testing");

  std::string replay_path;
  auto* replay = app.add_subcommand("replay", "Re-run the invocation recorded in a manifest");
  replay->add_option("manifest", replay_path, "Manifest file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  if (degrade->parsed()) return run_degrade(d, invocation);
  if (restore->parsed()) return run_restore(r, invocation);
  if (compare->parsed()) return run_compare(c, invocation);
  if (check->parsed()) return run_check(k, invocation);
  return run_replay(replay_path);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return dispatch(args);
  } catch (const UsageError& e) {
    std::cerr << "tvis: " << e.what() << '\n';
    return exit_usage;
  } catch (const NumericalError& e) {
    std::cerr << "tvis: numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const IoError& e) {
    std::cerr << "tvis: " << e.what() << '\n';
    return exit_io;
  } catch (const std::invalid_argument& e) {
    std::cerr << "tvis: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "tvis: " << e.what() << '\n';
    return exit_numerical;
  }
}
