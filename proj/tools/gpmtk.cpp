// Command-line front end: phase retrieval, forward simulation, filter
// inspection and analysis utilities over float32 TIFF / raw images.
//
// Exit codes: 0 success, 2 usage, 3 file I/O, 4 parameter/physics,
// 5 numerical failure.

#include "gpm/analysis.hpp"
#include "gpm/core.hpp"
#include "gpm/deconv.hpp"
#include "gpm/filters.hpp"
#include "gpm/fresnel.hpp"
#include "gpm/io.hpp"
#include "gpm/phantom.hpp"
#include "gpm/retrieval.hpp"
#include "gpm/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

int run(const std::vector<std::string>& args);

int effective_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void apply_thread_count(int threads) {
  if (threads <= 0) return;
#ifdef _OPENMP
  omp_set_num_threads(threads);
#else
  if (threads != 1)
    std::cerr << "note: built without OpenMP; --threads ignored" << std::endl;
#endif
}

// Meters with optional SI suffix: "0.1", "10um", "5 mm", "0.5nm".
CLI::AsNumberWithUnit length_unit() {
  static const std::map<std::string, double> units{
      {"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}};
  return CLI::AsNumberWithUnit(units, CLI::AsNumberWithUnit::CASE_SENSITIVE, "LENGTH");
}

std::string stem_of(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t start = (slash == std::string::npos) ? 0 : slash + 1;
  std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || dot < start) dot = path.size();
  return path.substr(start, dot - start);
}

std::string dir_of(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  return (slash == std::string::npos) ? std::string(".") : path.substr(0, slash);
}

// Accumulates everything the run manifest records.
struct RunContext {
  std::vector<std::string> argv;
  std::string manifest_path;
  bool no_manifest = false;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  json params = json::object();
  bool rng_used = false;
  std::uint64_t rng_seed = 0;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write() const {
    if (no_manifest) return;
    std::string path = manifest_path;
    if (path.empty()) {
      if (outputs.empty()) return;
      path = outputs.front() + ".manifest.json";
    }
    json j;
    j["tool"] = "gpmtk";
    j["version"] = gpm::kVersion;
    j["command"] = argv;
    j["threads"] = effective_threads();
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["params"] = params;
    if (rng_used)
      j["rng"] = {{"algorithm", gpm::kPhantomRngAlgorithm}, {"seed", rng_seed}};
    j["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gpm::IoError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
    if (!out) throw gpm::IoError("manifest write failed: " + path);
  }
};

// Beam/geometry options shared by several subcommands.
struct PhysicsCli {
  double energy_kev = 0.0;
  double wavelength_m = 0.0;
  double delta = 0.0;
  double beta = 0.0;
  double distance_m = -1.0;
  double pixel_m = 0.0;
  double i0 = 1.0;

  void add_to(CLI::App* cmd, bool pixel_required) {
    auto* wl = cmd->add_option("--wavelength", wavelength_m, "beam wavelength")
                   ->transform(length_unit());
    cmd->add_option("--energy-kev", energy_kev, "photon energy [keV]")->excludes(wl);
    cmd->add_option("--delta", delta, "refractive index decrement")->required();
    cmd->add_option("--beta", beta, "absorption index")->required();
    cmd->add_option("--distance", distance_m, "propagation distance")
        ->transform(length_unit())
        ->required();
    auto* px = cmd->add_option("--pixel", pixel_m, "detector pixel width")
                   ->transform(length_unit());
    if (pixel_required) px->required();
    cmd->add_option("--i0", i0, "incident intensity")->capture_default_str();
  }

  gpm::PhysicalConfig config(double fallback_pixel = 0.0) const {
    gpm::PhysicalConfig cfg;
    if (wavelength_m > 0.0)
      cfg.wavelength_m = wavelength_m;
    else if (energy_kev > 0.0)
      cfg.wavelength_m = gpm::wavelength_from_energy_kev(energy_kev);
    else
      throw gpm::ParameterError("need --wavelength or --energy-kev");
    cfg.delta = delta;
    cfg.beta = beta;
    cfg.distance_m = distance_m;
    cfg.pixel_m = pixel_m > 0.0 ? pixel_m : fallback_pixel;
    cfg.incident_intensity = i0;
    cfg.validate();
    return cfg;
  }

  json to_json(const gpm::PhysicalConfig& cfg) const {
    return json{{"wavelength_m", cfg.wavelength_m}, {"delta", cfg.delta},
                {"beta", cfg.beta},                 {"distance_m", cfg.distance_m},
                {"pixel_m", cfg.pixel_m},           {"incident_intensity", cfg.incident_intensity}};
  }
};

// Filter selection shared by retrieve/filters.
struct FilterCli {
  std::string kind = "gpm";
  double tau = 1.0;
  double anka_c = 1.0;
  double anka_sigma_m = 0.0;
  double source_blur_m = 0.0;

  CLI::Option* add_to(CLI::App* cmd) {
    auto* opt = cmd->add_option("--filter", kind, "filter kind")
                    ->check(CLI::IsMember({"pm", "gpm", "tunable", "anka", "anka-revised"}))
                    ->capture_default_str();
    cmd->add_option("--tau", tau, "tunable deformation (0 = pm, 1 = gpm)")
        ->capture_default_str();
    cmd->add_option("--anka-c", anka_c, "deblur constant c")->capture_default_str();
    cmd->add_option("--anka-sigma", anka_sigma_m, "deblur width sigma")
        ->transform(length_unit());
    cmd->add_option("--source-blur", source_blur_m, "RMS source-size blur")
        ->transform(length_unit());
    return opt;
  }

  gpm::FilterSpec spec() const {
    gpm::FilterSpec s;
    if (kind == "pm")
      s.kind = gpm::FilterKind::Pm;
    else if (kind == "gpm")
      s.kind = gpm::FilterKind::Gpm;
    else if (kind == "tunable")
      s.kind = gpm::FilterKind::Tunable;
    else if (kind == "anka")
      s.kind = gpm::FilterKind::AnkaDeconv;
    else if (kind == "anka-revised")
      s.kind = gpm::FilterKind::AnkaDeconvRevised;
    else
      throw gpm::ParameterError("unknown filter kind: " + kind);
    s.tau = tau;
    s.anka_c = anka_c;
    s.anka_sigma_m = anka_sigma_m;
    s.source_blur_m = source_blur_m;
    s.validate();
    return s;
  }

  json to_json() const {
    return json{{"kind", kind},
                {"tau", tau},
                {"anka_c", anka_c},
                {"anka_sigma_m", anka_sigma_m},
                {"source_blur_m", source_blur_m}};
  }
};

void print_kv(std::ostream& os, const std::string& key, const std::string& value,
              bool last = false) {
  os << key << "=" << value << (last ? "\n" : " ");
}

void print_kv(std::ostream& os, const std::string& key, double value, bool last = false) {
  print_kv(os, key, gpm::format_double(value), last);
}

// ---------------------------------------------------------------------------
// retrieve

struct RetrieveCli {
  std::vector<std::string> inputs;
  std::string output;
  std::string output_dir;
  PhysicsCli physics;
  FilterCli filter;
  double unsharp = -1.0;
  std::string flat_path;
  double flat_scalar = 0.0;
  int pad_px = 0;
  double log_floor_rel = 1e-8;
  int raw_width = 0;
  int raw_height = 0;
};

void setup_retrieve(CLI::App& app, RetrieveCli& o, RunContext& ctx) {
  CLI::App* cmd =
      app.add_subcommand("retrieve", "thickness maps from propagation images");
  cmd->add_option("inputs", o.inputs, "intensity images (.tif/.tiff/.raw)")
      ->required()
      ->expected(-1);
  cmd->add_option("-o,--output", o.output, "output image (single input only)");
  cmd->add_option("--output-dir", o.output_dir, "directory for batch outputs");
  o.physics.add_to(cmd, false);
  auto* filter_opt = o.filter.add_to(cmd);
  cmd->add_option("--unsharp", o.unsharp,
                  "blend weight s for pm + s*(gpm - pm); runs both filters")
      ->excludes(filter_opt);
  cmd->add_option("--flat", o.flat_path, "flat-field image");
  cmd->add_option("--flat-scalar", o.flat_scalar, "scalar flat (0: use --i0)");
  cmd->add_option("--pad", o.pad_px, "mirror padding per side [px]");
  cmd->add_option("--log-floor-rel", o.log_floor_rel, "clamp level relative to mean")
      ->capture_default_str();
  cmd->add_option("--width", o.raw_width, "raw input width [px]");
  cmd->add_option("--height", o.raw_height, "raw input height [px]");

  cmd->callback([&o, &ctx]() {
    if (!o.output.empty() && o.inputs.size() > 1)
      throw gpm::ParameterError("-o works with a single input; use --output-dir");

    std::optional<gpm::RealImage> flat;
    for (const std::string& in : o.inputs) {
      const gpm::RealImage img =
          gpm::read_image(in, o.raw_width, o.raw_height, o.physics.pixel_m);
      const gpm::PhysicalConfig cfg = o.physics.config(img.pixel_m);
      if (!o.flat_path.empty() && !flat)
        flat = gpm::read_image(o.flat_path, o.raw_width, o.raw_height, cfg.pixel_m);

      gpm::RetrievalOptions opts;
      opts.flat = flat;
      opts.flat_scalar = o.flat_scalar;
      opts.pad_px = o.pad_px;
      opts.log_floor_rel = o.log_floor_rel;

      gpm::RetrievalResult res;
      if (o.unsharp >= 0.0) {
        opts.filter = gpm::FilterSpec{};
        opts.filter.kind = gpm::FilterKind::Pm;
        opts.filter.source_blur_m = o.filter.source_blur_m;
        const gpm::RetrievalResult pm = gpm::retrieve_thickness(img, cfg, opts);
        opts.filter.kind = gpm::FilterKind::Gpm;
        const gpm::RetrievalResult gp = gpm::retrieve_thickness(img, cfg, opts);
        res.thickness = gpm::unsharp_combination(pm.thickness, gp.thickness, o.unsharp);
        res.clamped_pixels = pm.clamped_pixels + gp.clamped_pixels;
      } else {
        opts.filter = o.filter.spec();
        res = gpm::retrieve_thickness(img, cfg, opts);
      }

      std::string out = o.output;
      if (out.empty()) {
        const std::string dir = o.output_dir.empty() ? dir_of(in) : o.output_dir;
        out = dir + "/" + stem_of(in) + "_thickness.tif";
      }
      gpm::write_image(out, res.thickness);

      ctx.inputs.push_back(in);
      ctx.outputs.push_back(out);
      print_kv(std::cout, "input", in);
      print_kv(std::cout, "output", out);
      print_kv(std::cout, "clamped", std::to_string(res.clamped_pixels));
      print_kv(std::cout, "thickness_min", res.thickness.min());
      print_kv(std::cout, "thickness_max", res.thickness.max());
      print_kv(std::cout, "thickness_mean", res.thickness.mean(), true);

      if (ctx.params.empty()) {
        ctx.params["config"] = o.physics.to_json(cfg);
        ctx.params["filter"] = o.filter.to_json();
        ctx.params["unsharp"] = o.unsharp;
        ctx.params["pad_px"] = o.pad_px;
        ctx.params["log_floor_rel"] = o.log_floor_rel;
        ctx.params["flat"] = o.flat_path;
        ctx.params["flat_scalar"] = o.flat_scalar;
      }
    }
  });
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateCli {
  std::string phantom = "random";
  int n1 = 0;
  int n2 = 0;
  PhysicsCli physics;
  double thickness_m = 0.0;
  double fill = 0.5;
  int block_px = 1;
  std::uint64_t seed = 0;
  double sigma_px = 4.0;
  double radius_px = 8.0;
  int edge_col = -1;
  int oversample = 2;
  std::string intensity_out;
  std::string thickness_out;
};

void setup_simulate(CLI::App& app, SimulateCli& o, RunContext& ctx) {
  CLI::App* cmd =
      app.add_subcommand("simulate", "forward propagation images of phantoms");
  cmd->add_option("--phantom", o.phantom, "phantom family")
      ->check(CLI::IsMember({"random", "step", "bump", "disk"}))
      ->capture_default_str();
  cmd->add_option("--n1", o.n1, "image width [px]")->required();
  cmd->add_option("--n2", o.n2, "image height [px]")->required();
  o.physics.add_to(cmd, true);
  cmd->add_option("--thickness", o.thickness_m, "phantom thickness amplitude")
      ->transform(length_unit())
      ->required();
  cmd->add_option("--fill", o.fill, "random: fill fraction")->capture_default_str();
  cmd->add_option("--block", o.block_px, "random: cell size [px]")->capture_default_str();
  cmd->add_option("--seed", o.seed, "random: generator seed")->capture_default_str();
  cmd->add_option("--sigma-px", o.sigma_px, "bump: width [px]")->capture_default_str();
  cmd->add_option("--radius-px", o.radius_px, "disk: radius [px]")->capture_default_str();
  cmd->add_option("--edge-col", o.edge_col, "step: edge column (default n1/2)");
  cmd->add_option("--oversample", o.oversample, "fine-grid factor for propagation")
      ->capture_default_str();
  cmd->add_option("--intensity", o.intensity_out, "output intensity image")->required();
  cmd->add_option("--thickness-out", o.thickness_out, "also write the ground-truth map");

  cmd->callback([&o, &ctx]() {
    const gpm::PhysicalConfig cfg = o.physics.config();

    gpm::RealImage thickness;
    if (o.phantom == "random") {
      gpm::BinaryPhantomSpec spec;
      spec.n1 = o.n1;
      spec.n2 = o.n2;
      spec.pixel_m = cfg.pixel_m;
      spec.thickness_m = o.thickness_m;
      spec.fill_fraction = o.fill;
      spec.block_px = o.block_px;
      spec.seed = o.seed;
      thickness = gpm::random_binary(spec);
      ctx.rng_used = true;
      ctx.rng_seed = o.seed;
    } else if (o.phantom == "step") {
      const int edge = o.edge_col >= 0 ? o.edge_col : o.n1 / 2;
      thickness = gpm::step_edge(o.n1, o.n2, cfg.pixel_m, edge, 0.0, o.thickness_m);
    } else if (o.phantom == "bump") {
      thickness = gpm::gaussian_bump(o.n1, o.n2, cfg.pixel_m, o.sigma_px, o.thickness_m);
    } else {
      thickness = gpm::disk(o.n1, o.n2, cfg.pixel_m, o.radius_px, o.thickness_m);
    }

    gpm::PropagationPlan plan;
    plan.distance_m = cfg.distance_m;
    plan.oversample_factor = o.oversample;
    const gpm::RealImage img = gpm::simulate_pbi(thickness, cfg, plan);

    gpm::write_image(o.intensity_out, img);
    ctx.outputs.push_back(o.intensity_out);
    if (!o.thickness_out.empty()) {
      gpm::write_image(o.thickness_out, thickness);
      ctx.outputs.push_back(o.thickness_out);
    }

    ctx.params["config"] = o.physics.to_json(cfg);
    ctx.params["phantom"] = o.phantom;
    ctx.params["n1"] = o.n1;
    ctx.params["n2"] = o.n2;
    ctx.params["thickness_m"] = o.thickness_m;
    ctx.params["fill"] = o.fill;
    ctx.params["block_px"] = o.block_px;
    ctx.params["sigma_px"] = o.sigma_px;
    ctx.params["radius_px"] = o.radius_px;
    ctx.params["edge_col"] = o.edge_col;
    ctx.params["oversample"] = o.oversample;

    print_kv(std::cout, "intensity", o.intensity_out);
    if (!o.thickness_out.empty()) print_kv(std::cout, "thickness", o.thickness_out);
    print_kv(std::cout, "min", img.min());
    print_kv(std::cout, "max", img.max());
    print_kv(std::cout, "mean", img.mean(), true);
  });
}

// ---------------------------------------------------------------------------
// filters

struct FiltersCli {
  FilterCli filter;
  int n1 = 0;
  int n2 = 0;
  double pixel_m = 0.0;
  double alpha = -1.0;
  PhysicsCli physics;
  bool have_physics = false;
  std::string output;
};

void setup_filters(CLI::App& app, FiltersCli& o, RunContext& ctx) {
  CLI::App* cmd = app.add_subcommand("filters", "inspect and export filter grids");
  cmd->add_option("--n1", o.n1, "grid width [bins]")->required();
  cmd->add_option("--n2", o.n2, "grid height [bins]")->required();
  cmd->add_option("--pixel", o.pixel_m, "detector pixel width")
      ->transform(length_unit())
      ->required();
  cmd->add_option("--alpha", o.alpha, "screening constant [m^2] (bypasses beam options)");
  auto* wl = cmd->add_option("--wavelength", o.physics.wavelength_m, "beam wavelength")
                 ->transform(length_unit());
  cmd->add_option("--energy-kev", o.physics.energy_kev, "photon energy [keV]")->excludes(wl);
  cmd->add_option("--delta", o.physics.delta, "refractive index decrement");
  cmd->add_option("--beta", o.physics.beta, "absorption index");
  cmd->add_option("--distance", o.physics.distance_m, "propagation distance")
      ->transform(length_unit());
  o.filter.add_to(cmd);
  cmd->add_option("-o,--output", o.output, "write the grid as .tif/.raw");

  cmd->callback([&o, &ctx]() {
    double alpha = o.alpha;
    if (alpha < 0.0) {
      o.physics.pixel_m = o.pixel_m;
      const gpm::PhysicalConfig cfg = o.physics.config();
      alpha = cfg.alpha();
    }
    const gpm::FilterSpec spec = o.filter.spec();
    double effective_alpha = alpha;
    if (spec.kind == gpm::FilterKind::Pm || spec.kind == gpm::FilterKind::Gpm ||
        spec.kind == gpm::FilterKind::Tunable) {
      double distance = o.physics.distance_m > 0.0 ? o.physics.distance_m : 1.0;
      effective_alpha = gpm::apply_source_blur(alpha, spec.source_blur_m, distance);
    }
    const gpm::RealImage grid =
        gpm::build_filter_grid(spec, effective_alpha, o.pixel_m, o.n1, o.n2);
    if (!o.output.empty()) {
      gpm::write_image(o.output, grid);
      ctx.outputs.push_back(o.output);
    }

    const double upsilon = effective_alpha / (o.pixel_m * o.pixel_m);
    const double corner = gpm::kPi / o.pixel_m;
    print_kv(std::cout, "alpha", effective_alpha);
    print_kv(std::cout, "upsilon", upsilon);
    print_kv(std::cout, "r_max", gpm::r_max(upsilon));
    print_kv(std::cout, "pm_corner", gpm::pm_filter(corner, corner, effective_alpha));
    print_kv(std::cout, "gpm_corner",
             gpm::gpm_filter(corner, corner, effective_alpha, o.pixel_m));
    print_kv(std::cout, "grid_min", grid.min());
    print_kv(std::cout, "grid_max", grid.max(), true);

    ctx.params["alpha_m2"] = effective_alpha;
    ctx.params["pixel_m"] = o.pixel_m;
    ctx.params["n1"] = o.n1;
    ctx.params["n2"] = o.n2;
    ctx.params["filter"] = o.filter.to_json();
  });
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeKernelCli {
  std::string reference;
  std::string observation;
  int kernel_size = 15;
  int iterations = 100;
  double pixel_m = 0.0;
  int raw_width = 0;
  int raw_height = 0;
  std::string kernel_out;
  std::string objective_csv;
};

struct AnalyzeSignatureCli {
  std::string input;
  double sigma1_m = 0.0;
  double sigma2_m = 0.0;
  double pixel_m = 0.0;
  int raw_width = 0;
  int raw_height = 0;
};

struct AnalyzeValidityCli {
  double delta_beta = 0.0;
  double fresnel_number = 0.0;
  double wavelength_m = 0.0;
  double energy_kev = 0.0;
  double pixel_m = 0.0;
  double distance_m = 0.0;
  double aleph = 0.1;
  double nf_threshold = 10.0;
  bool rounded = false;
};

struct AnalyzeProfileCli {
  std::string input;
  int row = -1;
  std::vector<int> segment;
  double pixel_m = 0.0;
  int raw_width = 0;
  int raw_height = 0;
  std::string output;
};

struct AnalyzeDiffCli {
  std::string a;
  std::string b;
  double pixel_m = 0.0;
  int raw_width = 0;
  int raw_height = 0;
  std::string output;
  std::string correlate = "none";
};

void add_raw_options(CLI::App* cmd, int& w, int& h, double& pixel) {
  cmd->add_option("--width", w, "raw input width [px]");
  cmd->add_option("--height", h, "raw input height [px]");
  cmd->add_option("--pixel", pixel, "pixel width (override/for raw)")
      ->transform(length_unit());
}

void setup_analyze(CLI::App& app, AnalyzeKernelCli& ok, AnalyzeSignatureCli& os,
                   AnalyzeValidityCli& ov, AnalyzeProfileCli& op, AnalyzeDiffCli& od,
                   RunContext& ctx) {
  CLI::App* ana = app.add_subcommand("analyze", "resolution and validity analysis");
  ana->require_subcommand(1);

  // kernel: blur width linking a reference and its blurred counterpart.
  CLI::App* k = ana->add_subcommand("kernel", "estimate the blur kernel linking two images");
  k->add_option("--reference", ok.reference, "sharp reference image")->required();
  k->add_option("--observation", ok.observation, "blurred observation image")->required();
  k->add_option("--kernel-size", ok.kernel_size, "odd kernel support [px]")
      ->capture_default_str();
  k->add_option("--iterations", ok.iterations, "update iterations")->capture_default_str();
  add_raw_options(k, ok.raw_width, ok.raw_height, ok.pixel_m);
  k->add_option("-o,--output", ok.kernel_out, "write the kernel as .tif/.raw");
  k->add_option("--objective-csv", ok.objective_csv, "write the objective trace");
  k->callback([&ok, &ctx]() {
    const gpm::RealImage ref =
        gpm::read_image(ok.reference, ok.raw_width, ok.raw_height, ok.pixel_m);
    const gpm::RealImage obs =
        gpm::read_image(ok.observation, ok.raw_width, ok.raw_height, ok.pixel_m);
    const gpm::KernelEstimate est =
        gpm::estimate_kernel_rl(ref, obs, ok.kernel_size, ok.iterations);

    ctx.inputs = {ok.reference, ok.observation};
    if (!ok.kernel_out.empty()) {
      gpm::write_image(ok.kernel_out, est.kernel);
      ctx.outputs.push_back(ok.kernel_out);
    }
    if (!ok.objective_csv.empty()) {
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < est.objective.size(); ++i)
        rows.push_back({double(i + 1), est.objective[i]});
      gpm::write_csv(ok.objective_csv, {"iteration", "objective"}, rows);
      ctx.outputs.push_back(ok.objective_csv);
    }

    const double px = ref.pixel_m;
    print_kv(std::cout, "sigma_m", est.sigma_m);
    print_kv(std::cout, "sigma_px", est.sigma_m / px);
    print_kv(std::cout, "fwhm_m", est.fwhm_m);
    print_kv(std::cout, "fwhm_px", est.fwhm_m / px);
    print_kv(std::cout, "iterations", std::to_string(est.iterations_run));
    print_kv(std::cout, "diverged", est.diverged ? "true" : "false");
    print_kv(std::cout, "objective_final", est.objective.back(), true);

    ctx.params["kernel_size"] = ok.kernel_size;
    ctx.params["iterations"] = ok.iterations;
    ctx.params["sigma_m"] = est.sigma_m;
    ctx.params["fwhm_m"] = est.fwhm_m;
    ctx.params["diverged"] = est.diverged;
  });

  // signature: two-resolution second-order consistency.
  CLI::App* s = ana->add_subcommand("signature",
                                    "two-resolution difference vs stencil signature");
  s->add_option("--input", os.input, "image to test")->required();
  s->add_option("--sigma1", os.sigma1_m, "finer blur width")
      ->transform(length_unit())
      ->required();
  s->add_option("--sigma2", os.sigma2_m, "coarser blur width")
      ->transform(length_unit())
      ->required();
  add_raw_options(s, os.raw_width, os.raw_height, os.pixel_m);
  s->callback([&os, &ctx]() {
    const gpm::RealImage img =
        gpm::read_image(os.input, os.raw_width, os.raw_height, os.pixel_m);
    const double res = gpm::laplacian_signature_residual(img, os.sigma1_m, os.sigma2_m);
    ctx.inputs = {os.input};
    ctx.params["sigma1_m"] = os.sigma1_m;
    ctx.params["sigma2_m"] = os.sigma2_m;
    ctx.params["residual"] = res;
    print_kv(std::cout, "residual", res, true);
  });

  // validity: worthwhile-boost report and distance band.
  CLI::App* v = ana->add_subcommand("validity", "is the periodic filter worth it here");
  v->add_option("--delta-beta", ov.delta_beta, "delta/beta ratio")->required();
  v->add_option("--fresnel-number", ov.fresnel_number, "pixel Fresnel number W^2/(lambda*D)");
  auto* vwl = v->add_option("--wavelength", ov.wavelength_m, "beam wavelength")
                  ->transform(length_unit());
  v->add_option("--energy-kev", ov.energy_kev, "photon energy [keV]")->excludes(vwl);
  v->add_option("--pixel", ov.pixel_m, "detector pixel width")->transform(length_unit());
  v->add_option("--distance", ov.distance_m, "propagation distance")
      ->transform(length_unit());
  v->add_option("--aleph", ov.aleph, "demanded fractional corner boost")
      ->capture_default_str();
  v->add_option("--nf-threshold", ov.nf_threshold, "near-field N_F floor")
      ->capture_default_str();
  v->add_flag("--rounded", ov.rounded, "use the order-of-magnitude band coefficient 10");
  v->callback([&ov, &ctx]() {
    double lambda = ov.wavelength_m;
    if (lambda <= 0.0 && ov.energy_kev > 0.0)
      lambda = gpm::wavelength_from_energy_kev(ov.energy_kev);
    double nf = ov.fresnel_number;
    if (nf <= 0.0) {
      if (!(lambda > 0.0 && ov.pixel_m > 0.0 && ov.distance_m > 0.0))
        throw gpm::ParameterError(
            "need --fresnel-number or (--wavelength/--energy-kev, --pixel, --distance)");
      nf = ov.pixel_m * ov.pixel_m / (lambda * ov.distance_m);
    }
    const gpm::ValidityReport rep =
        gpm::validity_report(ov.delta_beta, nf, ov.aleph, ov.nf_threshold);
    print_kv(std::cout, "fresnel_number", nf);
    print_kv(std::cout, "upsilon", rep.upsilon);
    print_kv(std::cout, "r_max", rep.r_max);
    print_kv(std::cout, "gpm_worthwhile", rep.gpm_worthwhile ? "true" : "false");
    print_kv(std::cout, "tie_valid", rep.tie_valid ? "true" : "false",
             !(lambda > 0.0 && ov.pixel_m > 0.0));
    if (lambda > 0.0 && ov.pixel_m > 0.0) {
      const gpm::DeltaBand band =
          gpm::gpm_delta_band(ov.delta_beta, lambda, ov.pixel_m, ov.aleph, ov.rounded);
      print_kv(std::cout, "band_min_m", band.min_m);
      print_kv(std::cout, "band_max_m", band.max_m, true);
      ctx.params["band_min_m"] = band.min_m;
      ctx.params["band_max_m"] = band.max_m;
    }
    ctx.params["delta_beta"] = ov.delta_beta;
    ctx.params["fresnel_number"] = nf;
    ctx.params["aleph"] = ov.aleph;
    ctx.params["upsilon"] = rep.upsilon;
    ctx.params["r_max"] = rep.r_max;
    ctx.params["gpm_worthwhile"] = rep.gpm_worthwhile;
    ctx.params["tie_valid"] = rep.tie_valid;
  });

  // profile: row or segment samples to CSV.
  CLI::App* p = ana->add_subcommand("profile", "line profile to CSV");
  p->add_option("--input", op.input, "image")->required();
  p->add_option("--row", op.row, "row index (y)");
  p->add_option("--segment", op.segment, "m0 n0 m1 n1 sample segment")->expected(4);
  add_raw_options(p, op.raw_width, op.raw_height, op.pixel_m);
  p->add_option("-o,--output", op.output, "CSV output")->required();
  p->callback([&op, &ctx]() {
    const gpm::RealImage img =
        gpm::read_image(op.input, op.raw_width, op.raw_height, op.pixel_m);
    std::vector<std::pair<double, double>> prof;
    if (!op.segment.empty()) {
      prof = gpm::line_profile_segment(img, op.segment[0], op.segment[1], op.segment[2],
                                       op.segment[3]);
    } else if (op.row >= 0) {
      prof = gpm::line_profile_row(img, op.row);
    } else {
      throw gpm::ParameterError("need --row or --segment");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(prof.size());
    for (const auto& [pos, val] : prof) rows.push_back({pos, val});
    gpm::write_csv(op.output, {"position_m", "value"}, rows);
    ctx.inputs = {op.input};
    ctx.outputs = {op.output};
    ctx.params["row"] = op.row;
    ctx.params["segment"] = op.segment;
    print_kv(std::cout, "output", op.output);
    print_kv(std::cout, "samples", std::to_string(prof.size()), true);
  });

  // diff: difference map plus optional stencil correlation.
  CLI::App* d = ana->add_subcommand("diff", "difference map statistics");
  d->add_option("--a", od.a, "first image")->required();
  d->add_option("--b", od.b, "second image")->required();
  add_raw_options(d, od.raw_width, od.raw_height, od.pixel_m);
  d->add_option("-o,--output", od.output, "write a - b as .tif/.raw");
  d->add_option("--correlate-laplacian", od.correlate,
                "correlate a-b with the 5-point laplacian of image a or b")
      ->check(CLI::IsMember({"none", "a", "b"}))
      ->capture_default_str();
  d->callback([&od, &ctx]() {
    const gpm::RealImage a = gpm::read_image(od.a, od.raw_width, od.raw_height, od.pixel_m);
    const gpm::RealImage b = gpm::read_image(od.b, od.raw_width, od.raw_height, od.pixel_m);
    const gpm::RealImage diff = gpm::difference_map(a, b);
    if (!od.output.empty()) {
      gpm::write_image(od.output, diff);
      ctx.outputs.push_back(od.output);
    }
    ctx.inputs = {od.a, od.b};
    const bool correlate = od.correlate != "none";
    print_kv(std::cout, "min", diff.min());
    print_kv(std::cout, "max", diff.max());
    print_kv(std::cout, "mean", diff.mean());
    print_kv(std::cout, "rms", diff.rms(), !correlate);
    ctx.params["rms"] = diff.rms();
    if (correlate) {
      const gpm::RealImage lap = gpm::laplacian_5pt(od.correlate == "a" ? a : b);
      const double r = gpm::pearson_correlation(diff, lap);
      print_kv(std::cout, "pearson_laplacian", r, true);
      ctx.params["pearson_laplacian"] = r;
      ctx.params["laplacian_of"] = od.correlate;
    }
  });
}

// ---------------------------------------------------------------------------
// rerun

struct RerunCli {
  std::string manifest;
  bool dry_run = false;
  int replay_code = 0;
};

void setup_rerun(CLI::App& app, RerunCli& o) {
  CLI::App* cmd = app.add_subcommand("rerun", "re-execute a recorded run");
  cmd->add_option("manifest", o.manifest, "run manifest (.manifest.json)")->required();
  cmd->add_flag("--dry-run", o.dry_run, "print the recorded command and stop");
  cmd->callback([&o]() {
    std::ifstream in(o.manifest, std::ios::binary);
    if (!in) throw gpm::IoError("cannot read manifest: " + o.manifest);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw gpm::IoError("manifest parse failed: " + std::string(e.what()));
    }
    if (!j.contains("command") || !j["command"].is_array() || j["command"].empty())
      throw gpm::ParameterError("manifest has no recorded command");
    std::vector<std::string> cmd_args;
    for (const auto& part : j["command"]) {
      if (!part.is_string()) throw gpm::ParameterError("manifest command is not a string list");
      cmd_args.push_back(part.get<std::string>());
    }
    if (cmd_args.front() == "rerun")
      throw gpm::ParameterError("refusing to rerun a rerun manifest");
    if (o.dry_run) {
      std::cout << "command=";
      for (std::size_t i = 0; i < cmd_args.size(); ++i)
        std::cout << (i ? " " : "") << cmd_args[i];
      std::cout << "\n";
      return;
    }
    o.replay_code = run(cmd_args);
  });
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"single-distance x-ray phase retrieval toolkit"};
  app.set_version_flag("--version", gpm::kVersion);
  app.set_config("--config", "", "key=value configuration file; subcommand options live "
                                 "in a [subcommand] section");
  // Global options (--config, --threads, --manifest) may appear after the
  // subcommand name; subcommands inherit this at add_subcommand time.
  app.fallthrough();
  app.require_subcommand(1);

  RunContext ctx;
  ctx.argv = args;

  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0: library default)");
  app.add_option("--manifest", ctx.manifest_path,
                 "manifest path (default: <first output>.manifest.json)");
  app.add_flag("--no-manifest", ctx.no_manifest, "skip the run manifest");

  RetrieveCli retrieve_cli;
  SimulateCli simulate_cli;
  FiltersCli filters_cli;
  AnalyzeKernelCli kernel_cli;
  AnalyzeSignatureCli signature_cli;
  AnalyzeValidityCli validity_cli;
  AnalyzeProfileCli profile_cli;
  AnalyzeDiffCli diff_cli;
  RerunCli rerun_cli;

  setup_retrieve(app, retrieve_cli, ctx);
  setup_simulate(app, simulate_cli, ctx);
  setup_filters(app, filters_cli, ctx);
  setup_analyze(app, kernel_cli, signature_cli, validity_cli, profile_cli, diff_cli, ctx);
  setup_rerun(app, rerun_cli);

  app.parse_complete_callback([&]() { apply_thread_count(threads); });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // rerun writes no manifest of its own (the replayed command already did).
  if (app.get_subcommand("rerun")->parsed()) return rerun_cli.replay_code;
  ctx.write();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run(args);
  } catch (const gpm::IoError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  } catch (const gpm::ParameterError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 4;
  } catch (const gpm::NumericalError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}
