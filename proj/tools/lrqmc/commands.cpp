#include "lrqmc/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <lrqmc/lrqmc.hpp>

namespace lrqmc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double round6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

std::uint64_t batch_seed(std::uint64_t master, const std::string& image_name, double sr) {
  // FNV-1a over "name|sr"
  char srbuf[32];
  std::snprintf(srbuf, sizeof srbuf, "%.17g", sr);
  const std::string key = image_name + "|" + srbuf;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix_seed(mix_seed(master) ^ h);
}

namespace {

// ---- shared option blocks ---------------------------------------------------

struct SolverFlags {
  double lambda = 0.5;
  Eigen::Index init_rank = 50;
  double tol = 1e-3;
  int max_iters = 1000;
  double mu_threshold = 10.0;
  bool single_drop = false;

  void attach(CLI::App* app) {
    app->add_option("--lambda", lambda, "Regularization weight")->capture_default_str();
    app->add_option("--init-rank", init_rank, "Initial complex rank of f(X) (even)")->capture_default_str();
    app->add_option("--tol", tol, "Stop when |eps change| < tol")->capture_default_str();
    app->add_option("--max-iters", max_iters, "Iteration cap")->capture_default_str();
    app->add_option("--mu-threshold", mu_threshold, "Rank-drop threshold on mu; inf disables")->capture_default_str();
    app->add_flag("--single-rank-drop", single_drop, "Allow at most one rank decrease");
  }

  /// Config for an M x N problem. Oversized init ranks are clamped.
  SolverConfig config(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) const {
    SolverConfig c;
    c.lambda = lambda;
    c.init_rank = init_rank;
    c.tol = tol;
    c.max_iters = max_iters;
    c.mu_threshold = mu_threshold;
    c.allow_multiple_rank_drops = !single_drop;
    c.seed = seed;
    const Eigen::Index cap = 2 * std::min(rows, cols);
    if (c.init_rank > cap) {
      std::cerr << "warning: init-rank " << c.init_rank << " exceeds 2*min(M,N); clamped to " << cap << "\n";
      c.init_rank = cap;
    }
    c.validate(rows, cols);
    return c;
  }
};

json config_json(const SolverConfig& c) {
  json j;
  j["lambda"] = round6(c.lambda);
  j["init_rank"] = c.init_rank;
  j["tol"] = round6(c.tol);
  j["max_iters"] = c.max_iters;
  if (std::isfinite(c.mu_threshold))
    j["mu_threshold"] = round6(c.mu_threshold);
  else
    j["mu_threshold"] = nullptr;
  j["allow_multiple_rank_drops"] = c.allow_multiple_rank_drops;
  return j;
}

// nlohmann's float printer is not always shortest; floats are written with
// 6 significant digits here instead.
void emit(std::ostream& os, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' '), inner(static_cast<std::size_t>(2 * depth + 2), ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      os << inner << json(it.key()).dump() << ": ";
      emit(os, it.value(), depth + 1);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << inner;
      emit(os, j[i], depth + 1);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << ']';
  } else if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", j.get<double>());
    os << buf;
  } else {
    os << j.dump();
  }
}

std::string to_text(const json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << '\n';
  return os.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(round6(*v)) : json(nullptr); }

PixelScale parse_scale(const std::string& s) { return s == "byte" ? PixelScale::Byte : PixelScale::Unit; }

ColorImage load_image(const std::string& path) {
  PngReadResult r = read_png(path);
  if (r.had_alpha) std::cerr << "warning: " << path << ": alpha channel ignored\n";
  return std::move(r.image);
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

// ---- complete ---------------------------------------------------------------

struct CompleteArgs {
  std::string input, output, report, mask_in, mask_out, observed_out;
  double sr = 0.3;
  std::uint64_t seed = 0;
  std::string pixel_scale = "unit";
  SolverFlags solver;
};

int cmd_complete(const CompleteArgs& a) {
  const ColorImage img = load_image(a.input);
  if (!(a.sr >= 0.0 && a.sr <= 1.0)) throw ConfigError("--sr must lie in [0, 1]");
  const SolverConfig cfg = a.solver.config(img.height(), img.width(), derive_seed(a.seed, 2));

  ObservationMask mask;
  if (!a.mask_in.empty()) {
    mask = read_mask(a.mask_in);
    detail::require_dims(mask.rows() == img.height() && mask.cols() == img.width(),
                         "mask " + a.mask_in + " does not match the image dimensions");
  } else {
    mask = sample_mask(img.height(), img.width(), a.sr, derive_seed(a.seed, 1));
  }

  const RecoveryOutcome out = recover_image(img, mask, cfg, parse_scale(a.pixel_scale));
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";

  ensure_parent(a.output);
  if (!a.observed_out.empty()) ensure_parent(a.observed_out);
  if (!a.mask_out.empty()) ensure_parent(a.mask_out);
  write_png(a.output, out.recovered);
  write_png(a.observed_out.empty() ? with_suffix(a.output, "_observed.png") : a.observed_out, out.observed);
  write_mask(a.mask_out.empty() ? with_suffix(a.output, "_mask.txt") : a.mask_out, mask);

  const SolverTrace& tr = out.solve.trace;
  json r;
  r["input"] = a.input;
  r["dims"] = {{"rows", img.height()}, {"cols", img.width()}};
  r["sampling_ratio"] = round6(mask.sampling_ratio());
  r["seed"] = a.seed;
  r["config"] = config_json(cfg);
  r["iterations"] = tr.iterations();
  r["rank_complex"] = out.solve.factors.rank();
  r["rank_quaternion"] = out.solve.factors.rank() / 2;
  r["epsilon_history_length"] = tr.epsilon.size();
  r["rse"] = round6(out.quality.rse);
  r["psnr"] = round6(out.quality.psnr);
  r["ssim"] = optional_json(out.quality.ssim);
  r["fsim"] = optional_json(out.quality.fsim);
  r["seconds"] = round6(out.seconds);
  r["termination"] = to_string(tr.termination);
  write_text(a.report, to_text(r));
  return kExitOk;
}

// ---- synth ------------------------------------------------------------------

struct SynthArgs {
  Eigen::Index m = 30, n = 30, rank = 2;
  double sr = 0.7;
  std::uint64_t seed = 0;
  std::string report;
  SolverFlags solver;
};

int cmd_synth(const SynthArgs& a) {
  if (a.m <= 0 || a.n <= 0) throw ConfigError("--m and --n must be positive");
  if (a.rank <= 0 || a.rank > std::min(a.m, a.n)) throw ConfigError("--rank must lie in [1, min(m, n)]");
  if (!(a.sr >= 0.0 && a.sr <= 1.0)) throw ConfigError("--sr must lie in [0, 1]");
  const SyntheticProblem p = make_synthetic_problem(a.m, a.n, a.rank, a.sr, a.seed);
  const SolverConfig cfg = a.solver.config(a.m, a.n, p.solver_seed);

  const auto start = std::chrono::steady_clock::now();
  const SolveResult res = solve(p.truth, p.mask, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json drops = json::array();
  for (const auto& d : res.trace.rank_drops)
    drops.push_back({{"iteration", d.iteration}, {"from_rank", d.from_rank}, {"to_rank", d.to_rank},
                     {"mu", round6(d.mu)}});
  json r;
  r["dims"] = {{"rows", a.m}, {"cols", a.n}};
  r["true_rank_quaternion"] = a.rank;
  r["sampling_ratio"] = round6(p.mask.sampling_ratio());
  r["seed"] = a.seed;
  r["config"] = config_json(cfg);
  r["iterations"] = res.trace.iterations();
  r["rank_complex"] = res.factors.rank();
  r["rank_quaternion"] = res.factors.rank() / 2;
  r["rank_drops"] = drops;
  r["rse"] = round6(rse(res.x, p.truth));
  r["seconds"] = round6(secs);
  r["termination"] = to_string(res.trace.termination);
  write_text(a.report, to_text(r));
  return kExitOk;
}

// ---- metrics ----------------------------------------------------------------

int cmd_metrics(const std::string& input, const std::string& reference) {
  const ColorImage x = load_image(input);
  const ColorImage t = load_image(reference);
  detail::require_dims(x.same_shape(t), "images differ in size");
  const QualityReport q = assess(x, t);
  json r;
  r["rse"] = round6(q.rse);
  r["psnr"] = round6(q.psnr);
  r["ssim"] = optional_json(q.ssim);
  r["fsim"] = optional_json(q.fsim);
  std::cout << to_text(r);
  return kExitOk;
}

// ---- spectrum ---------------------------------------------------------------

int cmd_spectrum(const std::string& input, const std::string& csv, double rank_tol) {
  const ColorImage img = load_image(input);
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw ConfigError("--rank-tol must lie in (0, 1)");
  const Eigen::VectorXd sv = adjoint_singular_values(encode_image(img));
  // adjoint values come in equal pairs; one per quaternion value
  const Eigen::Index k = sv.size() && sv(0) > 0.0 ? (detail::count_above(sv, rank_tol * sv(0)) + 1) / 2 : 0;
  std::ostringstream os;
  os << "index,singular_value\n";
  for (Eigen::Index i = 0; i < k; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%lld,%.6g\n", static_cast<long long>(i + 1), sv(2 * i));
    os << buf;
  }
  write_text(csv, os.str());
  return kExitOk;
}

// ---- batch ------------------------------------------------------------------

struct BatchArgs {
  std::string dir, csv;
  std::vector<double> sr_list{0.1, 0.3, 0.5};
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  std::string pixel_scale = "unit";
  SolverFlags solver;
};

struct BatchRow {
  std::string image;
  double sr = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  Eigen::Index rank = 0;
  QualityReport q;
  double seconds = 0.0;
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string fmt6(const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); }

int cmd_batch(const BatchArgs& a) {
  if (!fs::is_directory(a.dir)) throw InputError("not a directory: " + a.dir);
  std::vector<fs::path> images;
  for (const auto& e : fs::directory_iterator(a.dir)) {
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (e.is_regular_file() && ext == ".png") images.push_back(e.path());
  }
  if (images.empty()) throw InputError("no PNG images in " + a.dir);
  if (a.sr_list.empty()) throw ConfigError("--sr-list is empty");
  for (double sr : a.sr_list)
    if (!(sr > 0.0 && sr <= 1.0)) throw ConfigError("--sr-list entries must lie in (0, 1]");
  std::sort(images.begin(), images.end(), [](const fs::path& x, const fs::path& y) {
    return x.filename().string() < y.filename().string();
  });
  std::vector<double> srs = a.sr_list;
  std::sort(srs.begin(), srs.end());
  srs.erase(std::unique(srs.begin(), srs.end()), srs.end());

  // load once, up front, so input errors surface before any work starts
  std::vector<ColorImage> loaded;
  for (const auto& p : images) loaded.push_back(load_image(p.string()));

  struct Task {
    std::size_t image;
    double sr;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < images.size(); ++i)
    for (double sr : srs) tasks.push_back({i, sr});

  std::vector<BatchRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  const PixelScale scale = parse_scale(a.pixel_scale);

  const auto worker = [&] {
    for (std::size_t idx = next++; idx < tasks.size(); idx = next++) {
      try {
        const Task& t = tasks[idx];
        const ColorImage& img = loaded[t.image];
        const std::string name = images[t.image].filename().string();
        const std::uint64_t seed = batch_seed(a.seed, name, t.sr);
        SolverConfig cfg;
        {
          std::lock_guard<std::mutex> lock(log_mutex);
          cfg = a.solver.config(img.height(), img.width(), derive_seed(seed, 2));
        }
        const ObservationMask mask = sample_mask(img.height(), img.width(), t.sr, derive_seed(seed, 1));
        const RecoveryOutcome out = recover_image(img, mask, cfg, scale);
        rows[idx] = {name, t.sr, seed, out.solve.trace.iterations(), out.solve.factors.rank(), out.quality,
                     out.seconds};
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };

  unsigned jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::ostringstream os;
  os << "image,sr,seed,iterations,rank,rse,psnr,ssim,fsim,seconds\n";
  for (const auto& r : rows)
    os << r.image << ',' << fmt6(r.sr) << ',' << r.seed << ',' << r.iterations << ',' << r.rank << ','
       << fmt6(r.q.rse) << ',' << fmt6(r.q.psnr) << ',' << fmt6(r.q.ssim) << ',' << fmt6(r.q.fsim) << ','
       << fmt6(r.seconds) << '\n';
  write_text(a.csv, os.str());
  return kExitOk;
}

int report_error(const char* kind, const std::exception& e, int code) {
  std::cerr << "error (" << kind << "): " << e.what() << "\n";
  return code;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Low-rank quaternion matrix completion for color images"};
  app.require_subcommand(1);

  CompleteArgs complete;
  auto* c = app.add_subcommand("complete", "Recover missing pixels of one image");
  c->add_option("--input", complete.input, "Input PNG")->required();
  c->add_option("--output", complete.output, "Recovered PNG")->required();
  c->add_option("--report", complete.report, "JSON report path (stdout if omitted)");
  c->add_option("--mask-in", complete.mask_in, "Use this mask file instead of sampling");
  c->add_option("--mask-out", complete.mask_out, "Mask file to write (default <output>_mask.txt)");
  c->add_option("--observed-out", complete.observed_out, "Zero-filled PNG (default <output>_observed.png)");
  c->add_option("--sr", complete.sr, "Sampling ratio")->capture_default_str();
  c->add_option("--seed", complete.seed, "Master seed")->capture_default_str();
  c->add_option("--pixel-scale", complete.pixel_scale, "Solver intensity range: unit or byte")
      ->check(CLI::IsMember({"unit", "byte"}))
      ->capture_default_str();
  complete.solver.attach(c);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Exact-recovery experiment on a random low-rank matrix");
  s->add_option("--m", synth.m, "Rows")->capture_default_str();
  s->add_option("--n", synth.n, "Columns")->capture_default_str();
  s->add_option("--rank", synth.rank, "Quaternion rank of the ground truth")->capture_default_str();
  s->add_option("--sr", synth.sr, "Sampling ratio")->capture_default_str();
  s->add_option("--seed", synth.seed, "Master seed")->capture_default_str();
  s->add_option("--report", synth.report, "JSON report path (stdout if omitted)");
  synth.solver.attach(s);

  std::string m_input, m_reference;
  auto* m = app.add_subcommand("metrics", "Compare an image with a reference");
  m->add_option("--input", m_input, "Image to score")->required();
  m->add_option("--reference", m_reference, "Reference image")->required();

  std::string sp_input, sp_csv;
  double sp_tol = kDefaultRankTol;
  auto* sp = app.add_subcommand("spectrum", "Quaternion singular values of an image");
  sp->add_option("--input", sp_input, "Input PNG")->required();
  sp->add_option("--csv", sp_csv, "CSV path (stdout if omitted)");
  sp->add_option("--rank-tol", sp_tol, "Relative cutoff for listed values")->capture_default_str();

  BatchArgs batch;
  auto* b = app.add_subcommand("batch", "Sweep a directory of images over sampling ratios");
  b->add_option("--dir", batch.dir, "Directory of PNG images")->required();
  b->add_option("--csv", batch.csv, "CSV path (stdout if omitted)");
  b->add_option("--sr-list", batch.sr_list, "Sampling ratios")->delimiter(',')->capture_default_str();
  b->add_option("--seed", batch.seed, "Master seed")->capture_default_str();
  b->add_option("--jobs", batch.jobs, "Worker threads (0 = hardware)")->capture_default_str();
  b->add_option("--pixel-scale", batch.pixel_scale, "Solver intensity range: unit or byte")
      ->check(CLI::IsMember({"unit", "byte"}))
      ->capture_default_str();
  batch.solver.attach(b);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error (usage): " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (c->parsed()) return cmd_complete(complete);
    if (s->parsed()) return cmd_synth(synth);
    if (m->parsed()) return cmd_metrics(m_input, m_reference);
    if (sp->parsed()) return cmd_spectrum(sp_input, sp_csv, sp_tol);
    if (b->parsed()) return cmd_batch(batch);
  } catch (const InputError& e) {
    return report_error("input", e, kExitInput);
  } catch (const ConfigError& e) {
    return report_error("configuration", e, kExitConfig);
  } catch (const DimensionError& e) {
    return report_error("dimension", e, kExitDimension);
  } catch (const NumericalError& e) {
    return report_error("numerical", e, kExitNumerical);
  } catch (const std::exception& e) {
    return report_error("unexpected", e, kExitUnexpected);
  }
  return kExitUnexpected;
}

}  // namespace lrqmc::cli
