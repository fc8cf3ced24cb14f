#include "pdeacc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "pdeacc/energy.hpp"
#include "pdeacc/imaging.hpp"
#include "pdeacc/kernel.hpp"
#include "pdeacc/solver.hpp"
#include "pdeacc/stability.hpp"

namespace pdeacc {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("cannot parse " + what + " '" + text + "'");
  return v;
}

StepChoice parse_step(const std::string& text) {
  StepChoice s;
  if (text == "auto" || text == "cfl") return s;
  if (ends_with(text, "dx")) {
    s.mode = StepChoice::Mode::DxMultiple;
    const std::string k = text.substr(0, text.size() - 2);
    s.value = k.empty() ? 1.0 : parse_number(k, "dt multiple");
    return s;
  }
  s.mode = StepChoice::Mode::Value;
  s.value = parse_number(text, "dt");
  return s;
}

DampingChoice parse_damping(const std::string& text) {
  DampingChoice d;
  if (text == "auto" || text == "optimal") return d;
  if (ends_with(text, "sqrtlambda")) {
    d.mode = DampingChoice::Mode::SqrtLambdaMultiple;
    const std::string k = text.substr(0, text.size() - 10);
    d.value = k.empty() ? 1.0 : parse_number(k, "damping multiple");
    return d;
  }
  d.mode = DampingChoice::Mode::Value;
  d.value = parse_number(text, "damping");
  return d;
}

std::string describe(const StepChoice& s) {
  std::ostringstream os;
  switch (s.mode) {
    case StepChoice::Mode::Value: os << s.value; break;
    case StepChoice::Mode::Cfl: os << "cfl"; break;
    case StepChoice::Mode::DxMultiple: os << s.value << "dx"; break;
  }
  return os.str();
}

std::string describe(const DampingChoice& d) {
  std::ostringstream os;
  switch (d.mode) {
    case DampingChoice::Mode::Value: os << d.value; break;
    case DampingChoice::Mode::Optimal: os << "optimal"; break;
    case DampingChoice::Mode::SqrtLambdaMultiple: os << d.value << "sqrtlambda"; break;
  }
  return os.str();
}

bool is_run(Subcommand c) {
  return c == Subcommand::Denoise || c == Subcommand::Deblur || c == Subcommand::Inpaint;
}

Regularizer make_regularizer(const RunConfig& cfg) {
  if (cfg.regularizer == "quadratic") return Quadratic{cfg.c.value_or(1.0)};
  if (cfg.regularizer == "beltrami") return Beltrami{cfg.beta.value_or(1.0)};
  return TotalVariation{};
}

struct Observation {
  GridField g;
  std::optional<GridField> clean;
};

Observation load_observation(const RunConfig& cfg) {
  if (cfg.square) {
    SyntheticPair p = noisy_square(*cfg.square, cfg.seed);
    return {std::move(p.noisy), std::move(p.clean)};
  }
  if (cfg.scene) {
    GridField clean = synthetic_scene(*cfg.scene);
    GridField blurred = apply_kernel(gaussian_kernel(cfg.sigma.value_or(3.0)), clean);
    return {std::move(blurred), std::move(clean)};
  }
  return {read_image(cfg.input), std::nullopt};
}

int analyze(const RunConfig& cfg, std::ostream& out) {
  const auto scheme = parse_analyzed_scheme(cfg.analyzed_scheme);
  const double a = cfg.damping.mode == DampingChoice::Mode::Value ? cfg.damping.value : 0.0;
  const double dt_max = cfl_max_dt(*scheme, *cfg.zmax, a);
  out << std::setprecision(10);
  out << "scheme=" << analyzed_name(*scheme) << " zmax=" << *cfg.zmax << " a=" << a << " dt_max=" << dt_max
      << '\n';
  if (cfg.sweep.empty()) return 0;

  const double lo = cfg.dt_lo.value_or(0.0);
  const double hi = cfg.dt_hi.value_or(1.5 * dt_max);
  const auto rows = stability_sweep(*scheme, *cfg.zmax, a, lo, hi, cfg.sweep_steps);
  std::ofstream csv(cfg.sweep);
  if (!csv) throw std::runtime_error("cannot open " + cfg.sweep);
  write_stability_csv(csv, rows);
  double boundary = 0.0;
  for (const auto& r : rows) {
    if (r.magnitude <= 1.0 + 1e-9) boundary = std::max(boundary, r.dt);
  }
  out << "sweep=" << cfg.sweep << " rows=" << rows.size() << " stable_dt_max=" << boundary
      << " bisection_dt_max=" << empirical_max_dt(*scheme, *cfg.zmax, a) << '\n';
  return 0;
}

int generate(const RunConfig& cfg, std::ostream& out) {
  GridField clean(1, 1, 1.0);
  GridField observed(1, 1, 1.0);
  if (cfg.square) {
    SyntheticPair p = noisy_square(*cfg.square, cfg.seed);
    clean = std::move(p.clean);
    observed = std::move(p.noisy);
  } else {
    clean = synthetic_scene(*cfg.scene);
    observed = apply_kernel(gaussian_kernel(cfg.sigma.value_or(3.0)), clean);
  }
  write_image(cfg.output, observed);
  if (!cfg.clean_output.empty()) write_image(cfg.clean_output, clean);
  out << "wrote " << cfg.output << (cfg.clean_output.empty() ? "" : " and " + cfg.clean_output) << '\n';
  return 0;
}

int restore(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Observation obs = load_observation(cfg);
  const Regularizer reg = make_regularizer(cfg);

  ProblemSpec spec;
  GridField init = obs.g;
  if (cfg.command == Subcommand::Inpaint) {
    const GridField mask_image = read_image(cfg.mask);
    if (!mask_image.same_shape(obs.g)) throw std::invalid_argument("mask does not match the input image");
    InpaintSetup setup = inpaint_spec(obs.g, InpaintMask::from_image(mask_image), cfg.lambda_known, reg);
    spec = std::move(setup.spec);
    init = std::move(setup.initial);
  } else {
    spec = ProblemSpec::denoising(obs.g, cfg.lambda, reg);
    if (cfg.command == Subcommand::Deblur) {
      spec.kernel = gaussian_kernel(cfg.sigma.value_or(3.0), obs.g.dimension() == 1);
    }
  }

  switch (cfg.damping.mode) {
    case DampingChoice::Mode::Value: spec.damping = cfg.damping.value; break;
    case DampingChoice::Mode::Optimal: spec.damping = auto_damping(spec); break;
    case DampingChoice::Mode::SqrtLambdaMultiple: spec.damping = cfg.damping.value * std::sqrt(spec.lambda_max()); break;
  }

  SchemeConfig scfg;
  scfg.kind = cfg.scheme;
  if (cfg.quantization) scfg.quantization = *cfg.quantization;
  switch (cfg.dt.mode) {
    case StepChoice::Mode::Value: scfg.dt = cfg.dt.value; break;
    case StepChoice::Mode::Cfl: scfg.dt = AutoCfl{cfg.dt.safety}; break;
    case StepChoice::Mode::DxMultiple: scfg.dt = cfg.dt.value * obs.g.dx(); break;
  }
  const ResolvedStep resolved = resolve_time_step(spec, scfg);

  StoppingRule stopping;
  stopping.tol = cfg.tol;
  stopping.max_iters = cfg.max_iters;

  RunOptions options;
  if (!cfg.reference.empty()) {
    options.reference = read_image(cfg.reference, obs.g.dx());
  } else if (obs.clean) {
    options.reference = obs.clean;
  }

  std::vector<std::string> comments;
  {
    std::ostringstream os;
    os << std::setprecision(17);
    os << "scheme=" << scheme_name(cfg.scheme) << " regularizer=" << regularizer_name(reg);
    if (const auto* q = std::get_if<Quadratic>(&reg)) os << " c=" << q->c;
    if (const auto* b = std::get_if<Beltrami>(&reg)) os << " beta=" << b->beta;
    comments.push_back(os.str());
    os.str("");
    os << "lambda=" << spec.lambda_max() << " dt=" << resolved.dt << " dt_policy=" << describe(cfg.dt)
       << " damping=" << spec.damping << " damping_policy=" << describe(cfg.damping);
    if (std::isfinite(resolved.z_max)) os << " zmax=" << resolved.z_max << " safety=" << resolved.safety;
    comments.push_back(os.str());
    os.str("");
    os << "tol=" << cfg.tol << " max_iters=" << cfg.max_iters << " seed=" << cfg.seed
       << " grid=" << obs.g.rows() << "x" << obs.g.cols() << " dx=" << obs.g.dx();
    if (cfg.command == Subcommand::Deblur) os << " sigma=" << cfg.sigma.value_or(3.0);
    if (!cfg.preset.empty()) os << " preset=" << cfg.preset;
    comments.push_back(os.str());
  }

  auto write_log = [&](const ConvergenceLog& log) {
    if (cfg.log.empty()) return;
    std::ofstream csv(cfg.log);
    if (!csv) throw std::runtime_error("cannot open " + cfg.log);
    write_log_csv(csv, log, comments, cfg.wall_clock);
  };
  auto summary = [&](const char* status, const ConvergenceLog& log) {
    const LogRecord& last = log.records.back();
    out << std::setprecision(10) << "status=" << status << " iterations=" << last.iteration
        << " wall_seconds=" << last.wall_seconds << " energy=" << last.energy;
    if (!std::isnan(last.psnr)) out << " psnr=" << last.psnr;
    out << " dt=" << resolved.dt << " damping=" << spec.damping << '\n';
  };

  try {
    RunResult result = run(spec, scfg, stopping, init, options);
    write_log(result.log);
    if (!cfg.output.empty()) write_image(cfg.output, result.u);
    const bool converged = result.reason == StopReason::Converged;
    summary(converged ? "converged" : "max_iters", result.log);
    return converged ? 0 : 2;
  } catch (const RunBlowUp& e) {
    write_log(e.log());
    summary("blowup", e.log());
    err << "blow-up: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& why) { throw std::invalid_argument(why); };

  if (command == Subcommand::Analyze) {
    if (!parse_analyzed_scheme(analyzed_scheme)) fail("unknown scheme '" + analyzed_scheme + "'");
    if (!zmax || !(*zmax > 0.0) || !std::isfinite(*zmax)) fail("analyze needs a positive finite --zmax");
    if (damping.mode == DampingChoice::Mode::SqrtLambdaMultiple) fail("analyze takes a numeric damping");
    if (damping.mode == DampingChoice::Mode::Value && !(damping.value >= 0.0)) fail("damping must be >= 0");
    if (dt_lo && dt_hi && !(*dt_hi > *dt_lo)) fail("--dt-hi must exceed --dt-lo");
    if (dt_lo && *dt_lo < 0.0) fail("--dt-lo must be >= 0");
    if (!sweep.empty() && sweep_steps < 2) fail("a sweep needs at least 2 steps");
    return;
  }

  if (command == Subcommand::Gen) {
    if (square.has_value() == scene.has_value()) fail("gen needs exactly one of --square or --scene");
    if (output.empty()) fail("gen needs --output");
    if (square && *square < 16) fail("--square must be at least 16");
    if (scene && *scene < 16) fail("--scene must be at least 16");
    if (sigma && square) fail("--sigma applies to --scene only");
    if (sigma && !(*sigma > 0.0)) fail("--sigma must be positive");
    return;
  }

  const int sources = static_cast<int>(!input.empty()) + static_cast<int>(square.has_value()) +
                      static_cast<int>(scene.has_value());
  if (sources != 1) fail("give exactly one input: --input, --square or --scene");
  if (square && command != Subcommand::Denoise) fail("--square is only available for denoise");
  if (scene && command != Subcommand::Deblur) fail("--scene is only available for deblur");
  if (square && *square < 16) fail("--square must be at least 16");
  if (scene && *scene < 16) fail("--scene must be at least 16");

  if (regularizer != "quadratic" && regularizer != "beltrami" && regularizer != "tv") {
    fail("unknown regularizer '" + regularizer + "'");
  }
  if (c && regularizer != "quadratic") fail("--c applies to the quadratic regularizer only");
  if (beta && regularizer != "beltrami") fail("--beta applies to the beltrami regularizer only");
  if (quantization && regularizer != "tv") fail("--Q applies to the tv regularizer only");
  if (c && !(*c > 0.0)) fail("--c must be positive");
  if (beta && !(*beta > 0.0)) fail("--beta must be positive");
  if (quantization && !(*quantization > 0.0)) fail("--Q must be positive");

  if (sigma && command != Subcommand::Deblur) fail("--sigma applies to deblur only");
  if (sigma && !(*sigma > 0.0)) fail("--sigma must be positive");
  if (command == Subcommand::Inpaint) {
    if (mask.empty()) fail("inpaint needs --mask");
    if (!(lambda_known > 0.0)) fail("--lambda-known must be positive");
  } else {
    if (!mask.empty()) fail("--mask applies to inpaint only");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail("--lambda must be positive");
  }

  if (dt.mode != StepChoice::Mode::Cfl && !(dt.value > 0.0)) fail("--dt must be positive");
  if (dt.safety && dt.mode != StepChoice::Mode::Cfl) fail("--safety applies to the cfl step only");
  if (dt.safety && !(*dt.safety > 0.0)) fail("--safety must be positive");
  if (damping.mode != DampingChoice::Mode::Optimal && !(damping.value >= 0.0)) fail("damping must be >= 0");
  if (!(tol > 0.0)) fail("--tol must be positive");
  if (max_iters == 0) fail("--max-iters must be positive");
}

void apply_preset(RunConfig& cfg, const std::string& name, const std::vector<std::string>& explicit_flags) {
  auto given = [&](const std::string& flag) {
    return std::find(explicit_flags.begin(), explicit_flags.end(), flag) != explicit_flags.end();
  };
  if (name == "tv-square" || name == "tv-lenna7000") {
    const bool square = name == "tv-square";
    if (!given("reg")) cfg.regularizer = "tv";
    if (!given("lambda")) cfg.lambda = square ? 1000.0 : 7000.0;
    if (!given("damping")) cfg.damping = {DampingChoice::Mode::SqrtLambdaMultiple, square ? 6.0 : 2.0};
    if (!given("dt")) cfg.dt = {StepChoice::Mode::DxMultiple, 0.5, std::nullopt};
    if (!given("scheme")) cfg.scheme = SchemeKind::Accel1;
    if (square && cfg.input.empty() && !cfg.square && !cfg.scene) cfg.square = 128;
  } else if (name == "beltrami-denoise") {
    if (!given("reg")) cfg.regularizer = "beltrami";
    if (!given("damping")) cfg.damping = {DampingChoice::Mode::Optimal, 0.0};
    if (!given("scheme")) cfg.scheme = SchemeKind::Accel1;
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  cfg.preset = name;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Accelerated PDE flows for image restoration"};
  app.require_subcommand(1);

  std::string dt_text = "auto";
  std::string damping_text = "auto";
  std::string scheme_text = "accel2";
  std::size_t square = 0, scene = 0;
  double c = 0, beta = 0, q = 0, sigma = 0, zmax = 0, dt_lo = 0, dt_hi = 0, safety = 0;

  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--input,-i", cfg.input, "input image (PGM or PNG)");
    sub->add_option("--output,-o", cfg.output, "restored image path");
    sub->add_option("--log", cfg.log, "convergence CSV path");
    sub->add_option("--reference", cfg.reference, "clean image for PSNR");
    sub->add_option("--seed", cfg.seed, "noise seed for synthetic inputs");
    sub->add_option("--reg", cfg.regularizer, "quadratic, beltrami or tv");
    sub->add_option("--lambda", cfg.lambda, "fidelity weight");
    sub->add_option("--c", c, "quadratic coefficient");
    sub->add_option("--beta", beta, "beltrami parameter");
    sub->add_option("--Q", q, "quantization interval for tv step bounds");
    sub->add_option("--scheme", scheme_text, "gd, accel1, accel2 or semi");
    sub->add_option("--dt", dt_text, "time step: a number, auto, or a multiple like 0.5dx");
    sub->add_option("--safety", safety, "factor on the cfl step");
    sub->add_option("--damping,--a", damping_text, "damping: a number, auto, or a multiple like 6sqrtlambda");
    sub->add_option("--tol", cfg.tol, "increment sup-norm tolerance");
    sub->add_option("--max-iters", cfg.max_iters, "iteration limit");
    sub->add_flag("!--no-wall-clock", cfg.wall_clock, "leave the wall-clock column empty");
    sub->add_option("--preset", cfg.preset, "tv-square, tv-lenna7000 or beltrami-denoise");
  };

  CLI::App* denoise = app.add_subcommand("denoise", "denoise an image");
  add_run_options(denoise);
  denoise->add_option("--square", square, "synthetic noisy square of this size");

  CLI::App* deblur = app.add_subcommand("deblur", "deblur a Gaussian-blurred image");
  add_run_options(deblur);
  deblur->add_option("--sigma", sigma, "blur standard deviation in pixels (default 3)");
  deblur->add_option("--scene", scene, "synthetic blurred scene of this size");

  CLI::App* inpaint = app.add_subcommand("inpaint", "fill masked regions");
  add_run_options(inpaint);
  inpaint->add_option("--mask", cfg.mask, "mask image, bright pixels are missing");
  inpaint->add_option("--lambda-known", cfg.lambda_known, "fidelity weight outside the mask");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "stability limits and sweeps");
  analyze_cmd->add_option("--scheme", cfg.analyzed_scheme, "gd, accel1, accel2, semi or backward");
  analyze_cmd->add_option("--zmax", zmax, "largest gradient amplifier");
  analyze_cmd->add_option("--a,--damping", damping_text, "damping coefficient");
  analyze_cmd->add_option("--sweep", cfg.sweep, "write a stability CSV here");
  analyze_cmd->add_option("--dt-lo", dt_lo, "sweep start");
  analyze_cmd->add_option("--dt-hi", dt_hi, "sweep end (default 1.5 dt_max)");
  analyze_cmd->add_option("--steps", cfg.sweep_steps, "sweep rows");

  CLI::App* gen = app.add_subcommand("gen", "write synthetic test images");
  gen->add_option("--square", square, "noisy square of this size");
  gen->add_option("--scene", scene, "blurred scene of this size");
  gen->add_option("--seed", cfg.seed, "noise seed");
  gen->add_option("--sigma", sigma, "blur standard deviation in pixels (default 3)");
  gen->add_option("--output,-o", cfg.output, "observed image path");
  gen->add_option("--clean", cfg.clean_output, "clean image path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    auto count = [&](const std::string& name) {
      try {
        return sub->get_option(name)->count() > 0;
      } catch (const CLI::OptionNotFound&) {
        return false;
      }
    };
    if (sub == denoise) cfg.command = Subcommand::Denoise;
    if (sub == deblur) cfg.command = Subcommand::Deblur;
    if (sub == inpaint) cfg.command = Subcommand::Inpaint;
    if (sub == analyze_cmd) cfg.command = Subcommand::Analyze;
    if (sub == gen) cfg.command = Subcommand::Gen;

    if (count("--square")) cfg.square = square;
    if (count("--scene")) cfg.scene = scene;
    if (count("--c")) cfg.c = c;
    if (count("--beta")) cfg.beta = beta;
    if (count("--Q")) cfg.quantization = q;
    if (count("--sigma")) cfg.sigma = sigma;
    if (count("--zmax")) cfg.zmax = zmax;
    if (count("--dt-lo")) cfg.dt_lo = dt_lo;
    if (count("--dt-hi")) cfg.dt_hi = dt_hi;

    cfg.damping = parse_damping(damping_text);
    if (is_run(cfg.command)) {
      const auto kind = parse_scheme(scheme_text);
      if (!kind) throw std::invalid_argument("unknown scheme '" + scheme_text + "'");
      cfg.scheme = *kind;
      cfg.dt = parse_step(dt_text);
      if (!cfg.preset.empty()) {
        std::vector<std::string> given;
        for (const char* flag : {"reg", "lambda", "damping", "dt", "scheme"}) {
          if (count(std::string("--") + flag)) given.emplace_back(flag);
        }
        apply_preset(cfg, cfg.preset, given);
      }
      if (count("--safety")) cfg.dt.safety = safety;
    }
    cfg.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    switch (cfg.command) {
      case Subcommand::Analyze: return analyze(cfg, out);
      case Subcommand::Gen: return generate(cfg, out);
      default: return restore(cfg, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace pdeacc
