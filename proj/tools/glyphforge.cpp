// glyphforge command-line tool.
//
//   glyphforge validate  PATH...                 check trajectory files
//   glyphforge rasterize TRAJ -o OUT.pgm         udf + render, 8-bit PGM
//   glyphforge udf       TRAJ -o OUT.txt         ASCII distance field
//   glyphforge loss      TRAJ TARGET.pgm         loose rasterization loss
//   glyphforge snap      TRAJ TARGET.pgm -o FIT  gradient-descent fit
//   glyphforge annotate  --traj-dir --mean-dir --out-dir
//   glyphforge metrics   MANIFEST                CSV id,mae,dtw,dtw_normalized
//   glyphforge gmm-eval  --gmm RAW --targets TRAJ
//   glyphforge gradcheck [--module M]
//
// Settings come from flags, then a key=value --config file, then defaults.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>

#include "glyphforge/glyphforge.hpp"

namespace fs = std::filesystem;
using namespace glyphforge;

namespace {

// ---------------------------------------------------------------------------
// file helpers

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file, then rename over the destination.
void write_file_atomic(const fs::path& p, const std::string& data) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  fs::path tmp = p;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, p);
}

Trajectory load_trajectory(const fs::path& p) {
  try {
    return parse_trajectory(read_file(p));
  } catch (const Error& e) {
    throw Error(e.kind(), p.string() + ": " + e.what(), e.line(), e.index());
  }
}

std::vector<fs::path> regular_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GLYPHFORGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// Runs fn(i) for i in [0, jobs) on a small pool; callers keep results by
/// index so output order never depends on scheduling.
void parallel_for(std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = worker_count(jobs);
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs; i = next++) fn(i);
    });
  }
}

// ---------------------------------------------------------------------------
// configuration

struct RunConfig {
  std::size_t grid_h = 128;
  std::size_t grid_w = 128;
  double theta = 100.0;
  double width = 2.0;
  LossWeights lambdas;
  double tau = kDefaultTemperature;
  double threshold = kDefaultAnnotateThreshold;
  bool include_connections = false;
  std::uint64_t seed = 1;

  Grid grid() const { return Grid(grid_h, grid_w); }
  RenderParams render() const {
    RenderParams p{theta, width};
    p.validate();
    return p;
  }
};

/// Flag values; unset flags fall through to the config file, then defaults.
struct Overrides {
  std::string config_path;
  std::optional<std::size_t> grid_h, grid_w;
  std::optional<double> theta, width, tau, threshold;
  std::optional<double> lambda[5];
  bool include_connections = false;
  std::optional<std::uint64_t> seed;
};

template <typename T>
T parse_value(const std::string& key, const std::string& v) {
  T out{};
  std::istringstream in(v);
  in >> out;
  if (!in || !in.eof()) throw Error(ErrorKind::InvalidArgument, "config: bad value '" + v + "' for " + key);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::InvalidArgument, "config: bad boolean '" + v + "' for " + key);
}

RunConfig resolve(const Overrides& o) {
  RunConfig c;
  if (!o.config_path.empty()) {
    for (const auto& [k, v] : parse_key_values(read_file(o.config_path))) {
      if (k == "grid_h") c.grid_h = parse_value<std::size_t>(k, v);
      else if (k == "grid_w") c.grid_w = parse_value<std::size_t>(k, v);
      else if (k == "theta") c.theta = parse_value<double>(k, v);
      else if (k == "w") c.width = parse_value<double>(k, v);
      else if (k == "tau") c.tau = parse_value<double>(k, v);
      else if (k == "threshold") c.threshold = parse_value<double>(k, v);
      else if (k == "include_connections") c.include_connections = parse_bool(k, v);
      else if (k == "seed") c.seed = parse_value<std::uint64_t>(k, v);
      else if (k == "lambda1") c.lambdas.lambda1 = parse_value<double>(k, v);
      else if (k == "lambda2") c.lambdas.lambda2 = parse_value<double>(k, v);
      else if (k == "lambda3") c.lambdas.lambda3 = parse_value<double>(k, v);
      else if (k == "lambda4") c.lambdas.lambda4 = parse_value<double>(k, v);
      else if (k == "lambda5") c.lambdas.lambda5 = parse_value<double>(k, v);
      else throw Error(ErrorKind::InvalidArgument, "config: unknown key '" + k + "'");
    }
  }
  if (o.grid_h) c.grid_h = *o.grid_h;
  if (o.grid_w) c.grid_w = *o.grid_w;
  if (o.theta) c.theta = *o.theta;
  if (o.width) c.width = *o.width;
  if (o.tau) c.tau = *o.tau;
  if (o.threshold) c.threshold = *o.threshold;
  if (o.include_connections) c.include_connections = true;
  if (o.seed) c.seed = *o.seed;
  double* lambdas[] = {&c.lambdas.lambda1, &c.lambdas.lambda2, &c.lambdas.lambda3, &c.lambdas.lambda4,
                       &c.lambdas.lambda5};
  for (int k = 0; k < 5; ++k) {
    if (o.lambda[k]) *lambdas[k] = *o.lambda[k];
  }
  if (c.grid_h == 0 || c.grid_w == 0) throw Error(ErrorKind::InvalidArgument, "grid dimensions must be >= 1");
  if (!(c.tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "tau must be > 0");
  if (!(c.threshold > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be > 0");
  c.lambdas.validate();
  c.render();
  return c;
}

void add_config_option(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "key=value settings file")->check(CLI::ExistingFile);
}

void add_render_options(CLI::App* app, Overrides& o) {
  app->add_option("--grid-h", o.grid_h, "raster rows (default 128)");
  app->add_option("--grid-w", o.grid_w, "raster columns (default 128)");
  app->add_option("--theta", o.theta, "sigmoid sharpness per pixel (default 100)");
  app->add_option("--width", o.width, "line half-width in pixels (default 2)");
  app->add_flag("--include-connections", o.include_connections, "also render connected-stroke segments");
}

void add_lambda_options(CLI::App* app, Overrides& o) {
  for (int k = 0; k < 5; ++k) {
    app->add_option("--lambda" + std::to_string(k + 1), o.lambda[k], "loss weight (default 1)");
  }
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_validate(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (auto& f : regular_files(in)) files.push_back(std::move(f));
    } else {
      files.emplace_back(in);
    }
  }
  std::vector<std::string> lines(files.size());
  std::vector<char> ok(files.size(), 0);
  parallel_for(files.size(), [&](std::size_t i) {
    try {
      const auto t = load_trajectory(files[i]);
      lines[i] = "OK " + files[i].string() + " (" + std::to_string(t.size()) + " points)";
      ok[i] = 1;
    } catch (const std::exception& e) {
      lines[i] = std::string("ERROR ") + e.what();
    }
  });
  for (const auto& l : lines) std::cout << l << '\n';
  return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; }) ? 0 : 1;
}

int cmd_rasterize(const std::string& traj, const std::string& out, bool ascii, const RunConfig& c) {
  const auto t = load_trajectory(traj);
  const auto img = render(udf(t, c.grid(), c.include_connections), c.render());
  write_file_atomic(out, write_pgm(img, ascii ? PgmEncoding::Ascii : PgmEncoding::Binary));
  return 0;
}

int cmd_udf(const std::string& traj, const std::string& out, const RunConfig& c) {
  const auto t = load_trajectory(traj);
  write_file_atomic(out, write_field_ascii(udf(t, c.grid(), c.include_connections)));
  return 0;
}

std::string gradient_csv(const Trajectory& t, const std::vector<Vec2>& grad) {
  std::string out = "index,x,y,d_x,d_y\n";
  char buf[160];
  for (std::size_t k = 0; k < grad.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", k, t[k].x, t[k].y, grad[k].x, grad[k].y);
    out += buf;
  }
  return out;
}

int cmd_loss(const std::string& traj, const std::string& target, const std::string& grad_out, RunConfig c) {
  const auto t = load_trajectory(traj);
  const auto img = read_pgm(read_file(target));
  const auto l = loss_diff(t, img, c.grid(), c.render(), c.include_connections);
  std::printf("%.12g\n", l.value);
  if (!grad_out.empty()) write_file_atomic(grad_out, gradient_csv(t, l.grad));
  return 0;
}

int cmd_snap(const std::string& traj, const std::string& target, std::size_t steps, double lr, const std::string& out,
             const std::string& trace_out, const RunConfig& c) {
  const auto t = load_trajectory(traj);
  const auto img = read_pgm(read_file(target));
  const auto r = snap_fit(t, img, c.grid(), c.render(), steps, lr, c.include_connections);
  write_file_atomic(out, serialize_trajectory(r.trajectory));
  std::string csv = "step,loss\n";
  char buf[64];
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, r.trace[k]);
    csv += buf;
  }
  if (!trace_out.empty()) write_file_atomic(trace_out, csv);
  std::printf("initial %.12g final %.12g\n", r.trace.front(), r.trace.back());
  return 0;
}

int cmd_annotate(const std::string& traj_dir, const std::string& mean_dir, const std::string& out_dir,
                 const RunConfig& c) {
  const auto files = regular_files(traj_dir);
  std::vector<std::string> errors(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    try {
      const auto t = load_trajectory(files[i]);
      const auto mean = load_trajectory(fs::path(mean_dir) / files[i].filename());
      const auto annotated = pseudo_annotate(t, mean, AnnotateConfig{c.threshold});
      write_file_atomic(fs::path(out_dir) / files[i].filename(), serialize_trajectory(annotated));
    } catch (const std::exception& e) {
      errors[i] = files[i].string() + ": " + e.what();
    }
  });
  int rc = 0;
  for (const auto& e : errors) {
    if (e.empty()) continue;
    std::cerr << "ERROR " << e << '\n';
    rc = 1;
  }
  std::cout << "annotated " << files.size() << " files\n";
  return rc;
}

// Manifest lines: id,gen_pgm,ref_pgm,gen_traj,ref_traj ('-' skips a pair).
int cmd_metrics(const std::string& manifest, const std::string& out) {
  const fs::path base = fs::path(manifest).parent_path();
  struct Row {
    std::string id;
    std::string image_a, image_b, traj_a, traj_b;
  };
  std::vector<Row> rows;
  std::istringstream in(read_file(manifest));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 5) throw Error(ErrorKind::MalformedLine, "manifest needs 5 comma-separated fields", lineno);
    rows.push_back({f[0], f[1], f[2], f[3], f[4]});
  }
  auto resolve_path = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };
  std::vector<std::string> results(rows.size());
  std::vector<std::string> errors(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto& r = rows[i];
    try {
      char buf[128];
      std::string s = r.id + ",";
      if (r.image_a != "-" && r.image_b != "-") {
        std::snprintf(buf, sizeof buf, "%.12g", mae(read_pgm(read_file(resolve_path(r.image_a))),
                                                    read_pgm(read_file(resolve_path(r.image_b)))));
        s += buf;
      }
      s += ",";
      if (r.traj_a != "-" && r.traj_b != "-") {
        const auto d = dtw(load_trajectory(resolve_path(r.traj_a)), load_trajectory(resolve_path(r.traj_b)));
        std::snprintf(buf, sizeof buf, "%.12g,%.12g", d.cost, d.normalized());
        s += buf;
      } else {
        s += ",";
      }
      results[i] = s;
    } catch (const std::exception& e) {
      errors[i] = r.id + ": " + e.what();
    }
  });
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorKind::Io, e);
  }
  std::string csv = "id,mae,dtw,dtw_normalized\n";
  for (const auto& r : results) csv += r + "\n";
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file_atomic(out, csv);
  }
  return 0;
}

struct GmmEvalArgs {
  std::string gmm, targets, logits, grad, sample, generated, image;
};

// loss_seq = l1 loss_point + l2 loss_label + l3 loss_diff; the label and
// rasterization terms are 0 unless their inputs are given.
int cmd_gmm_eval(const GmmEvalArgs& a, const RunConfig& c) {
  const auto raw = parse_gmm_raw(read_file(a.gmm));
  const auto targets = load_trajectory(a.targets);
  std::printf("components %zu steps %zu\n", raw.empty() ? 0 : raw.front().components(), raw.size());
  const double point = loss_point(raw, targets);
  double label = 0.0;
  double diff = 0.0;
  std::printf("loss_point %.12g\n", point);
  const std::string& logits_path = a.logits;
  if (!logits_path.empty()) {
    const Matrix logits = parse_feature_matrix(read_file(logits_path));
    if (logits.rows() != targets.size() || logits.cols() != 4) {
      throw Error(ErrorKind::ShapeMismatch, "logits must be L x 4");
    }
    double acc = 0.0;
    for (std::size_t s = 0; s < targets.size(); ++s) {
      const auto r = logits.row(s);
      acc += loss_label({r[0], r[1], r[2], r[3]}, targets[s].control);
    }
    label = acc / static_cast<double>(targets.size());
    std::printf("loss_label %.12g\n", label);
  }
  if (!a.generated.empty() && !a.image.empty()) {
    diff = loss_diff(load_trajectory(a.generated), read_pgm(read_file(a.image)), c.grid(), c.render(),
                     c.include_connections)
               .value;
    std::printf("loss_diff %.12g\n", diff);
  }
  std::printf("loss_seq %.12g\n", combine_seq(point, label, diff, c.lambdas));
  if (!a.grad.empty()) write_file_atomic(a.grad, serialize_gmm_raw(loss_point_grad(raw, targets)));
  if (!a.sample.empty()) {
    const Rng root(c.seed);
    Matrix pts(raw.size(), 2);
    for (std::size_t s = 0; s < raw.size(); ++s) {
      const Vec2 p = sample(activate(raw[s]), root.split(s).next_u64());
      pts(s, 0) = p.x;
      pts(s, 1) = p.y;
    }
    write_file_atomic(a.sample, serialize_feature_matrix(pts));
  }
  return 0;
}

int cmd_gradcheck(const std::string& module, std::uint64_t seed, std::size_t instances, bool inject_fault) {
  const GradCheckOptions opt{seed, instances, inject_fault};
  std::vector<GradCheckReport> reports;
  if (module == "rasterizer" || module == "all") reports.push_back(gradcheck_rasterizer(opt));
  if (module == "gmm" || module == "all") reports.push_back(gradcheck_gmm(opt));
  if (module == "nce" || module == "all") reports.push_back(gradcheck_nce(opt));
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("%s %s instances=%zu checked=%zu skipped=%zu max_rel_error=%.3e tol=%.0e\n",
                r.passed() ? "PASS" : "FAIL", r.suite.c_str(), r.instances, r.checked, r.skipped, r.max_rel_error,
                r.tolerance);
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glyphforge: trajectory rasterization, mixture head and representation losses"};
  app.require_subcommand(1);

  Overrides ov;
  int rc = 0;
  std::function<int()> run;

  auto* validate = app.add_subcommand("validate", "parse and validate trajectory files or directories");
  std::vector<std::string> validate_paths;
  validate->add_option("paths", validate_paths, "files or directories")->required()->check(CLI::ExistingPath);
  validate->callback([&] { run = [&] { return cmd_validate(validate_paths); }; });

  auto* rasterize = app.add_subcommand("rasterize", "render a trajectory to a PGM image");
  std::string r_traj, r_out;
  bool r_ascii = false;
  rasterize->add_option("trajectory", r_traj)->required()->check(CLI::ExistingFile);
  rasterize->add_option("-o,--output", r_out, "output PGM")->required();
  rasterize->add_flag("--ascii", r_ascii, "write P2 instead of P5");
  add_config_option(rasterize, ov);
  add_render_options(rasterize, ov);
  rasterize->callback([&] { run = [&] { return cmd_rasterize(r_traj, r_out, r_ascii, resolve(ov)); }; });

  auto* udf_cmd = app.add_subcommand("udf", "export the unsigned distance field (pixel units)");
  std::string u_traj, u_out;
  udf_cmd->add_option("trajectory", u_traj)->required()->check(CLI::ExistingFile);
  udf_cmd->add_option("-o,--output", u_out)->required();
  add_config_option(udf_cmd, ov);
  add_render_options(udf_cmd, ov);
  udf_cmd->callback([&] { run = [&] { return cmd_udf(u_traj, u_out, resolve(ov)); }; });

  auto* loss = app.add_subcommand("loss", "loose rasterization loss against a target image");
  std::string l_traj, l_target, l_grad;
  loss->add_option("trajectory", l_traj)->required()->check(CLI::ExistingFile);
  loss->add_option("target", l_target, "target PGM")->required()->check(CLI::ExistingFile);
  loss->add_option("--grad", l_grad, "write per-point gradient CSV");
  add_config_option(loss, ov);
  add_render_options(loss, ov);
  loss->callback([&] { run = [&] { return cmd_loss(l_traj, l_target, l_grad, resolve(ov)); }; });

  auto* snap = app.add_subcommand("snap", "fit trajectory coordinates to a target image");
  std::string s_traj, s_target, s_out, s_trace;
  std::size_t s_steps = 200;
  double s_lr = 1e-5;
  snap->add_option("trajectory", s_traj)->required()->check(CLI::ExistingFile);
  snap->add_option("target", s_target)->required()->check(CLI::ExistingFile);
  snap->add_option("--steps", s_steps, "descent steps")->check(CLI::PositiveNumber);
  snap->add_option("--lr", s_lr, "step size")->check(CLI::NonNegativeNumber);
  snap->add_option("-o,--output", s_out, "fitted trajectory")->required();
  snap->add_option("--trace", s_trace, "loss trace CSV");
  add_config_option(snap, ov);
  add_render_options(snap, ov);
  snap->callback([&] { run = [&] { return cmd_snap(s_traj, s_target, s_steps, s_lr, s_out, s_trace, resolve(ov)); }; });

  auto* annotate = app.add_subcommand("annotate", "pseudo connected-stroke labels for a directory");
  std::string a_traj, a_mean, a_out;
  annotate->add_option("--traj-dir", a_traj)->required()->check(CLI::ExistingDirectory);
  annotate->add_option("--mean-dir", a_mean, "mean skeletons, same file names")->required()->check(CLI::ExistingDirectory);
  annotate->add_option("--out-dir", a_out)->required();
  annotate->add_option("--threshold", ov.threshold, "distance threshold (default 0.1)");
  add_config_option(annotate, ov);
  annotate->callback([&] { run = [&] { return cmd_annotate(a_traj, a_mean, a_out, resolve(ov)); }; });

  auto* metrics = app.add_subcommand("metrics", "MAE and DTW for a manifest of pairs");
  std::string m_manifest, m_out;
  metrics->add_option("manifest", m_manifest)->required()->check(CLI::ExistingFile);
  metrics->add_option("-o,--output", m_out, "CSV output (default stdout)");
  metrics->callback([&] { run = [&] { return cmd_metrics(m_manifest, m_out); }; });

  auto* gmm = app.add_subcommand("gmm-eval", "evaluate the mixture head and the sequence-branch objective");
  GmmEvalArgs ga;
  gmm->add_option("--gmm", ga.gmm, "raw head output file")->required()->check(CLI::ExistingFile);
  gmm->add_option("--targets", ga.targets, "target trajectory")->required()->check(CLI::ExistingFile);
  gmm->add_option("--logits", ga.logits, "L x 4 control logits (feature matrix)")->check(CLI::ExistingFile);
  gmm->add_option("--generated", ga.generated, "generated trajectory for the rasterization term")
      ->check(CLI::ExistingFile);
  gmm->add_option("--image", ga.image, "target glyph PGM for the rasterization term")->check(CLI::ExistingFile);
  gmm->add_option("--grad", ga.grad, "write raw-output gradient");
  gmm->add_option("--sample", ga.sample, "write one sampled point per step");
  gmm->add_option("--seed", ov.seed, "sampling seed");
  add_config_option(gmm, ov);
  add_render_options(gmm, ov);
  add_lambda_options(gmm, ov);
  gmm->callback([&] { run = [&] { return cmd_gmm_eval(ga, resolve(ov)); }; });

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suites");
  std::string gc_module = "all";
  std::size_t gc_instances = 50;
  bool gc_fault = false;
  gradcheck->add_option("--module", gc_module, "rasterizer | gmm | nce | all")
      ->check(CLI::IsMember({"rasterizer", "gmm", "nce", "all"}));
  gradcheck->add_option("--seed", ov.seed, "suite seed");
  gradcheck->add_option("--instances", gc_instances, "random instances per suite")->check(CLI::PositiveNumber);
  gradcheck->add_flag("--inject-fault", gc_fault, "corrupt analytic gradients (negative control)");
  add_config_option(gradcheck, ov);
  gradcheck->callback([&] {
    run = [&] { return cmd_gradcheck(gc_module, resolve(ov).seed, gc_instances, gc_fault); };
  });

  CLI11_PARSE(app, argc, argv);
  try {
    rc = run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    rc = 1;
  }
  return rc;
}
